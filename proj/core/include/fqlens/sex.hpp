#pragma once

#include <cstdint>
#include <string_view>

namespace fqlens {

enum class Sex : std::uint8_t { female = 0, male = 1 };

constexpr std::string_view to_string(Sex s) noexcept { return s == Sex::female ? "F" : "M"; }

constexpr Sex opposite(Sex s) noexcept { return s == Sex::female ? Sex::male : Sex::female; }

}  // namespace fqlens
