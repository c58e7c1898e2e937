#pragma once

#include <cstdint>

namespace loom {

enum class LogicLevel : std::uint8_t { Low = 0, High = 1 };

constexpr LogicLevel invert(LogicLevel level) {
    return level == LogicLevel::High ? LogicLevel::Low : LogicLevel::High;
}

constexpr char level_char(LogicLevel level) {
    return level == LogicLevel::High ? '1' : '0';
}

} // namespace loom
