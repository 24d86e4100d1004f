// Streaming FNV-1a content hashing for reports and artifacts.

#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace cpat {

class Fnv1a {
public:
    void update(std::string_view bytes) {
        for (unsigned char c : bytes) {
            state_ ^= c;
            state_ *= 0x100000001b3ULL;
        }
    }

    void update(std::int64_t v) {
        for (int i = 0; i < 8; ++i) {
            state_ ^= static_cast<unsigned char>(v >> (i * 8));
            state_ *= 0x100000001b3ULL;
        }
    }

    /// Field separator; keeps adjacent fields from colliding.
    void sep() { update(std::string_view("\x1f", 1)); }

    std::uint64_t value() const { return state_; }

    std::string hex() const {
        char buf[20];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(state_));
        return buf;
    }

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace cpat
