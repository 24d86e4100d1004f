// XES event-log reader.
//
// Covers the trace/event/attribute subset of the standard: <trace> and
// <event> elements holding <string/>, <date/>, <int/> (and tolerated
// float/boolean/id) attributes. Extensions, globals, classifiers and nested
// attribute children are skipped. Standard keys are mapped onto the canonical
// event fields: concept:name, time:timestamp, lifecycle:transition,
// org:resource, concept:instance; "cpat:job" carries the job on
// machines-as-cases logs and "identity:id" preserves event ids.

#include <string>
#include <unordered_set>
#include <vector>

#include "cpat/event_log.hpp"

namespace cpat {
namespace {

class XmlScanner {
public:
    explicit XmlScanner(std::string_view text) : text_(text) {}

    struct Attr {
        std::string name;
        std::string value;
    };
    struct Tag {
        std::string name;
        std::vector<Attr> attrs;
        bool closing = false;      // </name>
        bool self_closing = false; // <name/>
    };

    // Advances to the next element tag, skipping text, comments, PIs,
    // DOCTYPE and CDATA. Returns false at end of input.
    bool next_tag(Tag& tag) {
        for (;;) {
            while (pos_ < text_.size() && text_[pos_] != '<') ++pos_;
            if (pos_ >= text_.size()) return false;
            if (starts_with("<!--")) {
                skip_until("-->");
                continue;
            }
            if (starts_with("<![CDATA[")) {
                skip_until("]]>");
                continue;
            }
            if (starts_with("<?")) {
                skip_until("?>");
                continue;
            }
            if (starts_with("<!")) {
                skip_until(">");
                continue;
            }
            return parse_tag(tag);
        }
    }

    std::size_t offset() const { return pos_; }

    [[noreturn]] void fail(const std::string& message) const {
        throw ParseError(ParseError::Kind::XmlSyntax, pos_, "xes: " + message);
    }

private:
    bool starts_with(std::string_view prefix) const {
        return text_.substr(pos_, prefix.size()) == prefix;
    }

    void skip_until(std::string_view marker) {
        std::size_t found = text_.find(marker, pos_);
        if (found == std::string_view::npos) fail("unterminated '" + std::string(marker) + "'");
        pos_ = found + marker.size();
    }

    void skip_ws() {
        while (pos_ < text_.size() &&
               (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
                text_[pos_] == '\r'))
            ++pos_;
    }

    static bool is_name_char(char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
               c == ':' || c == '_' || c == '-' || c == '.';
    }

    std::string parse_name() {
        std::size_t begin = pos_;
        while (pos_ < text_.size() && is_name_char(text_[pos_])) ++pos_;
        if (pos_ == begin) fail("expected a name");
        return std::string(text_.substr(begin, pos_ - begin));
    }

    std::string parse_quoted() {
        if (pos_ >= text_.size() || (text_[pos_] != '"' && text_[pos_] != '\''))
            fail("expected a quoted value");
        char quote = text_[pos_++];
        std::string out;
        while (pos_ < text_.size() && text_[pos_] != quote) {
            if (text_[pos_] == '&') {
                out += parse_entity();
            } else {
                out += text_[pos_++];
            }
        }
        if (pos_ >= text_.size()) fail("unterminated attribute value");
        ++pos_;  // closing quote
        return out;
    }

    char parse_entity() {
        std::size_t semi = text_.find(';', pos_);
        if (semi == std::string_view::npos || semi - pos_ > 8) fail("malformed entity");
        std::string_view ent = text_.substr(pos_ + 1, semi - pos_ - 1);
        pos_ = semi + 1;
        if (ent == "amp") return '&';
        if (ent == "lt") return '<';
        if (ent == "gt") return '>';
        if (ent == "quot") return '"';
        if (ent == "apos") return '\'';
        if (!ent.empty() && ent[0] == '#') {
            int code = 0;
            for (std::size_t i = 1; i < ent.size(); ++i) {
                if (ent[i] < '0' || ent[i] > '9') fail("malformed character reference");
                code = code * 10 + (ent[i] - '0');
            }
            if (code <= 0 || code > 127) fail("unsupported character reference");
            return static_cast<char>(code);
        }
        fail("unknown entity '&" + std::string(ent) + ";'");
    }

    bool parse_tag(Tag& tag) {
        ++pos_;  // '<'
        tag = Tag{};
        if (pos_ < text_.size() && text_[pos_] == '/') {
            ++pos_;
            tag.closing = true;
            tag.name = parse_name();
            skip_ws();
            if (pos_ >= text_.size() || text_[pos_] != '>') fail("malformed closing tag");
            ++pos_;
            return true;
        }
        tag.name = parse_name();
        for (;;) {
            skip_ws();
            if (pos_ >= text_.size()) fail("unterminated tag");
            if (text_[pos_] == '>') {
                ++pos_;
                return true;
            }
            if (text_[pos_] == '/') {
                ++pos_;
                if (pos_ >= text_.size() || text_[pos_] != '>') fail("malformed self-closing tag");
                ++pos_;
                tag.self_closing = true;
                return true;
            }
            Attr attr;
            attr.name = parse_name();
            skip_ws();
            if (pos_ >= text_.size() || text_[pos_] != '=') fail("expected '=' in attribute");
            ++pos_;
            skip_ws();
            attr.value = parse_quoted();
            tag.attrs.push_back(std::move(attr));
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

const std::string* find_attr(const XmlScanner::Tag& tag, std::string_view name) {
    for (const auto& a : tag.attrs)
        if (a.name == name) return &a.value;
    return nullptr;
}

bool is_xes_attribute_element(const std::string& name) {
    return name == "string" || name == "date" || name == "int" || name == "float" ||
           name == "boolean" || name == "id";
}

}  // namespace

EventLog parse_xes_log(std::string_view text, const LogSchema& schema) {
    XmlScanner scan(text);
    EventLog log;
    log.case_perspective = schema.perspective;

    EventId next_id = 1;
    std::unordered_set<std::int64_t> seen_ids;
    bool in_log = false;
    bool in_trace = false;
    bool in_event = false;
    int skip_depth = 0;  // inside an ignored subtree (globals, nested attrs, ...)
    Event event;
    bool event_has_explicit_id = false;
    std::size_t event_offset = 0;

    XmlScanner::Tag tag;
    while (scan.next_tag(tag)) {
        if (skip_depth > 0) {
            if (tag.closing) --skip_depth;
            else if (!tag.self_closing) ++skip_depth;
            continue;
        }
        if (tag.closing) {
            if (tag.name == "event" && in_event) {
                if (event.timestamp == kNoTime)
                    throw ParseError(ParseError::Kind::MissingTimestamp, event_offset,
                                     "xes: event without time:timestamp");
                if (!event_has_explicit_id) event.id = next_id++;
                if (!seen_ids.insert(event.id).second)
                    throw ParseError(ParseError::Kind::DuplicateEventId, event_offset,
                                     "xes: duplicate event id " + std::to_string(event.id));
                log.cases.back().trace.push_back(std::move(event));
                in_event = false;
            } else if (tag.name == "trace" && in_trace) {
                in_trace = false;
            } else if (tag.name == "log") {
                in_log = false;
            }
            continue;
        }

        if (tag.name == "log") {
            in_log = true;
            if (tag.self_closing) in_log = false;
            continue;
        }
        if (tag.name == "trace") {
            if (!in_log) scan.fail("<trace> outside <log>");
            in_trace = true;
            log.cases.push_back(Case{"trace" + std::to_string(log.cases.size() + 1), {}});
            if (tag.self_closing) in_trace = false;
            continue;
        }
        if (tag.name == "event") {
            if (!in_trace) scan.fail("<event> outside <trace>");
            in_event = true;
            event = Event{};
            event_has_explicit_id = false;
            event_offset = scan.offset();
            if (tag.self_closing)
                throw ParseError(ParseError::Kind::MissingTimestamp, event_offset,
                                 "xes: event without time:timestamp");
            continue;
        }
        if (is_xes_attribute_element(tag.name)) {
            const std::string* key = find_attr(tag, "key");
            const std::string* value = find_attr(tag, "value");
            if (!tag.self_closing) ++skip_depth;  // ignore nested attribute children
            if (!key || !value) continue;
            if (in_event) {
                if (*key == "concept:name") event.activity = *value;
                else if (*key == "lifecycle:transition") event.transaction = *value;
                else if (*key == "org:resource") event.machine = *value;
                else if (*key == "cpat:job") event.job = *value;
                else if (*key == "concept:instance") event.activity_instance = *value;
                else if (*key == "time:timestamp") {
                    auto ts = parse_iso8601(*value);
                    if (!ts)
                        throw ParseError(ParseError::Kind::UnparseableTimestamp, scan.offset(),
                                         "xes: unparseable time:timestamp '" + *value + "'");
                    event.timestamp = *ts;
                } else if (*key == "identity:id" && tag.name == "int") {
                    std::int64_t id = 0;
                    try {
                        id = std::stoll(*value);
                    } catch (...) {
                        scan.fail("identity:id is not an integer");
                    }
                    event.id = id;
                    event_has_explicit_id = true;
                } else if (tag.name == "int") {
                    try {
                        event.extra.emplace_back(*key, AttrValue{std::stoll(*value)});
                    } catch (...) {
                        event.extra.emplace_back(*key, AttrValue{*value});
                    }
                } else if (tag.name == "date") {
                    auto ts = parse_iso8601(*value);
                    event.extra.emplace_back(*key, ts ? AttrValue{Timestamp{*ts}}
                                                      : AttrValue{*value});
                } else {
                    event.extra.emplace_back(*key, AttrValue{*value});
                }
            } else if (in_trace) {
                if (*key == "concept:name") log.cases.back().id = *value;
            }
            continue;
        }
        // Anything else (extension, global, classifier, unknown containers).
        if (!tag.self_closing) ++skip_depth;
    }
    if (in_event || in_trace || in_log) scan.fail("unexpected end of document");
    return log;
}

}  // namespace cpat
