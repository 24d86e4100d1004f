#include "cpat/time.hpp"

#include <chrono>
#include <cstdio>

namespace cpat {
namespace {

// Reads 1..max_width digits, stopping at the first non-digit; handles both
// zero-padded and bare fields.
bool read_int(std::string_view text, std::size_t& pos, int max_width, int& out) {
    int value = 0;
    int digits = 0;
    while (pos < text.size() && digits < max_width && text[pos] >= '0' && text[pos] <= '9') {
        value = value * 10 + (text[pos] - '0');
        ++pos;
        ++digits;
    }
    if (digits == 0) return false;
    out = value;
    return true;
}

std::optional<TimeMs> assemble(int year, int month, int day, int hour, int minute, int second,
                               int millis) {
    using namespace std::chrono;
    if (month < 1 || month > 12 || day < 1) return std::nullopt;
    year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                       std::chrono::day{static_cast<unsigned>(day)}};
    if (!ymd.ok()) return std::nullopt;
    if (hour > 23 || minute > 59 || second > 60) return std::nullopt;
    sys_days days{ymd};
    std::int64_t secs = duration_cast<seconds>(days.time_since_epoch()).count();
    secs += hour * 3600 + minute * 60 + second;
    return secs * 1000 + millis;
}

bool read_millis(std::string_view text, std::size_t& pos, int& millis) {
    if (pos >= text.size() || text[pos] != '.') return true;  // no fraction
    std::size_t p = pos + 1;
    int value = 0;
    int digits = 0;
    while (p < text.size() && digits < 3 && text[p] >= '0' && text[p] <= '9') {
        value = value * 10 + (text[p] - '0');
        ++p;
        ++digits;
    }
    if (digits == 0) return false;
    while (digits < 3) {
        value *= 10;
        ++digits;
    }
    pos = p;
    millis = value;
    return true;
}

}  // namespace

std::optional<TimeMs> parse_timestamp(std::string_view text, std::string_view format) {
    std::size_t pos = 0;
    int year = 1970, month = 1, day = 1, hour = 0, minute = 0, second = 0;
    for (std::size_t f = 0; f < format.size(); ++f) {
        if (format[f] == '%' && f + 1 < format.size()) {
            ++f;
            bool ok = true;
            switch (format[f]) {
                case 'd': ok = read_int(text, pos, 2, day); break;
                case 'm': ok = read_int(text, pos, 2, month); break;
                case 'Y': ok = read_int(text, pos, 4, year); break;
                case 'H': ok = read_int(text, pos, 2, hour); break;
                case 'M': ok = read_int(text, pos, 2, minute); break;
                case 'S': ok = read_int(text, pos, 2, second); break;
                case '%':
                    ok = pos < text.size() && text[pos] == '%';
                    ++pos;
                    break;
                default: return std::nullopt;  // unsupported token in format
            }
            if (!ok) return std::nullopt;
        } else {
            if (pos >= text.size() || text[pos] != format[f]) return std::nullopt;
            ++pos;
        }
    }
    int millis = 0;
    if (!read_millis(text, pos, millis)) return std::nullopt;
    if (pos != text.size()) return std::nullopt;
    return assemble(year, month, day, hour, minute, second, millis);
}

std::optional<TimeMs> parse_iso8601(std::string_view text) {
    std::size_t pos = 0;
    int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
    auto expect = [&](char c) {
        if (pos >= text.size() || text[pos] != c) return false;
        ++pos;
        return true;
    };
    if (!read_int(text, pos, 4, year) || !expect('-') || !read_int(text, pos, 2, month) ||
        !expect('-') || !read_int(text, pos, 2, day))
        return std::nullopt;
    if (pos >= text.size() || (text[pos] != 'T' && text[pos] != ' ')) return std::nullopt;
    ++pos;
    if (!read_int(text, pos, 2, hour) || !expect(':') || !read_int(text, pos, 2, minute) ||
        !expect(':') || !read_int(text, pos, 2, second))
        return std::nullopt;
    int millis = 0;
    if (!read_millis(text, pos, millis)) return std::nullopt;

    std::int64_t offset_ms = 0;
    if (pos < text.size()) {
        char c = text[pos];
        if (c == 'Z') {
            ++pos;
        } else if (c == '+' || c == '-') {
            ++pos;
            int oh = 0, om = 0;
            if (!read_int(text, pos, 2, oh)) return std::nullopt;
            if (pos < text.size() && text[pos] == ':') ++pos;
            if (!read_int(text, pos, 2, om)) return std::nullopt;
            offset_ms = (oh * 3600 + om * 60) * 1000LL;
            if (c == '+') offset_ms = -offset_ms;  // local ahead of UTC
        }
    }
    if (pos != text.size()) return std::nullopt;
    auto base = assemble(year, month, day, hour, minute, second, millis);
    if (!base) return std::nullopt;
    return *base + offset_ms;
}

namespace {

void split_epoch_ms(TimeMs ms, int& year, int& month, int& day, int& hour, int& minute,
                    int& second, int& millis) {
    using namespace std::chrono;
    std::int64_t total_secs = ms / 1000;
    millis = static_cast<int>(ms % 1000);
    if (millis < 0) {
        millis += 1000;
        --total_secs;
    }
    sys_days days{floor<std::chrono::days>(sys_seconds{seconds{total_secs}})};
    std::int64_t rem = total_secs - duration_cast<seconds>(days.time_since_epoch()).count();
    year_month_day ymd{days};
    year = static_cast<int>(ymd.year());
    month = static_cast<int>(static_cast<unsigned>(ymd.month()));
    day = static_cast<int>(static_cast<unsigned>(ymd.day()));
    hour = static_cast<int>(rem / 3600);
    minute = static_cast<int>((rem % 3600) / 60);
    second = static_cast<int>(rem % 60);
}

}  // namespace

std::string format_timestamp(TimeMs ms, std::string_view format) {
    int year, month, day, hour, minute, second, millis;
    split_epoch_ms(ms, year, month, day, hour, minute, second, millis);
    std::string out;
    out.reserve(format.size() + 8);
    char buf[16];
    for (std::size_t f = 0; f < format.size(); ++f) {
        if (format[f] == '%' && f + 1 < format.size()) {
            ++f;
            switch (format[f]) {
                case 'd': std::snprintf(buf, sizeof buf, "%02d", day); out += buf; break;
                case 'm': std::snprintf(buf, sizeof buf, "%02d", month); out += buf; break;
                case 'Y': std::snprintf(buf, sizeof buf, "%04d", year); out += buf; break;
                case 'H': std::snprintf(buf, sizeof buf, "%02d", hour); out += buf; break;
                case 'M': std::snprintf(buf, sizeof buf, "%02d", minute); out += buf; break;
                case 'S': std::snprintf(buf, sizeof buf, "%02d", second); out += buf; break;
                case '%': out += '%'; break;
                default: out += '%'; out += format[f]; break;
            }
        } else {
            out += format[f];
        }
    }
    if (millis != 0) {
        std::snprintf(buf, sizeof buf, ".%03d", millis);
        out += buf;
    }
    return out;
}

std::string format_iso8601(TimeMs ms) {
    int year, month, day, hour, minute, second, millis;
    split_epoch_ms(ms, year, month, day, hour, minute, second, millis);
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", year, month, day, hour,
                  minute, second, millis);
    return buf;
}

}  // namespace cpat
