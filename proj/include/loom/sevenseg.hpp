#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "loom/soc_core.hpp"

namespace loom::sevenseg {

/// Seven-segment mask, active-high, bit 0 = segment a .. bit 6 = segment g.
struct SegmentMask {
    std::uint8_t bits = 0; // 0 = blank
    bool dp = false;

    bool operator==(const SegmentMask&) const = default;
};

inline constexpr std::uint8_t kDashBits = 0x40; // segment g only

inline constexpr int kDigits = 6;

/// Six digit positions, most significant first.
struct SegmentFrame {
    std::array<SegmentMask, kDigits> digits{};

    bool operator==(const SegmentFrame&) const = default;
};

/// Common-cathode gfedcba encoding of 0..9; throws ConfigError otherwise.
SegmentMask encode_digit(int d);

SegmentFrame dashes_frame();

/// Meters with two decimals from whole centimeters: 3901 cm -> "  39.01".
/// Leading zeros blank down to the units digit; values outside 0..999999
/// render as dashes.
SegmentFrame render_meters(soc::LengthCm length);

/// Percent with two decimals from basis points: 8000 bp -> "  80.00".
/// Values outside 0..99999 render as dashes.
SegmentFrame render_efficiency(soc::EfficiencyBp eff);

SegmentFrame render(const soc::DisplayContent& content);

/// Mask byte with the decimal point in bit 7, as written to the trace.
constexpr std::uint8_t packed(const SegmentMask& m) {
    return static_cast<std::uint8_t>(m.bits | (m.dp ? 0x80 : 0x00));
}

/// Display trace line: "<t_us> <D5> <D4> <D3> <D2> <D1> <D0>", masks as two
/// uppercase hex digits.
std::string trace_line(std::uint64_t t_us, const SegmentFrame& frame);

} // namespace loom::sevenseg
