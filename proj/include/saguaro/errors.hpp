#pragma once
#include <stdexcept>
#include <string>

namespace saguaro {

// Bad user input: malformed DSL, unknown vertex, non-parallel relation...
struct input_error : std::runtime_error {
    explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A computation the library legitimately declines: unsupported regime,
// exhausted budget, failed hypothesis. Carries a certificate string.
struct refusal : std::runtime_error {
    explicit refusal(const std::string& msg) : std::runtime_error(msg) {}
};

// A theorem-backed runtime assertion broke. Always a bug or a genuinely
// inconsistent fixture; surfaced loudly, never swallowed.
struct internal_error : std::logic_error {
    explicit internal_error(const std::string& msg) : std::logic_error(msg) {}
};

inline void check_internal(bool ok, const std::string& msg) {
    if (!ok)
        throw internal_error(msg);
}

} // namespace saguaro
