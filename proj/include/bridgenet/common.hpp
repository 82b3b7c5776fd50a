#pragma once
// Shared vocabulary types: platforms, events, error classes, small string helpers.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bridgenet {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad or missing configuration (lexicons, config keys, weight files).
class ConfigError : public Error {
public:
    using Error::Error;
};

enum class Platform : std::uint8_t { X = 0, YouTube = 1, Reddit = 2 };

inline constexpr std::array<Platform, 3> kPlatforms{Platform::X, Platform::YouTube, Platform::Reddit};

inline constexpr std::string_view to_string(Platform p) noexcept {
    switch (p) {
        case Platform::X: return "X";
        case Platform::YouTube: return "YouTube";
        case Platform::Reddit: return "Reddit";
    }
    return "X";
}

inline std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// Accepts the canonical names case-insensitively; anything else is rejected.
inline std::optional<Platform> parse_platform(std::string_view s) {
    const std::string lower = to_lower(s);
    if (lower == "x") return Platform::X;
    if (lower == "youtube") return Platform::YouTube;
    if (lower == "reddit") return Platform::Reddit;
    return std::nullopt;
}

enum class Event : std::uint8_t { helene, milton, other };

inline constexpr std::string_view to_string(Event e) noexcept {
    switch (e) {
        case Event::helene: return "helene";
        case Event::milton: return "milton";
        case Event::other: return "other";
    }
    return "other";
}

inline Event parse_event(std::string_view s) {
    const std::string lower = to_lower(s);
    if (lower == "helene") return Event::helene;
    if (lower == "milton") return Event::milton;
    return Event::other;
}

inline constexpr std::size_t platform_index(Platform p) noexcept { return static_cast<std::size_t>(p); }

}  // namespace bridgenet
