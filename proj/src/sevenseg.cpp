#include "loom/sevenseg.hpp"

#include <variant>

#include "loom/errors.hpp"

namespace loom::sevenseg {

namespace {

constexpr std::array<std::uint8_t, 10> kDigitBits = {
    0x3F, 0x06, 0x5B, 0x4F, 0x66, 0x6D, 0x7D, 0x07, 0x7F, 0x6F,
};

// value is hundredths (cm or bp); shown as X.YY with the point on the
// third-from-right digit
SegmentFrame render_hundredths(std::int64_t value) {
    if (value < 0 || value > 999999) {
        return dashes_frame();
    }
    SegmentFrame frame;
    std::array<int, kDigits> digits{};
    auto v = value;
    for (int i = kDigits - 1; i >= 0; --i) {
        digits[i] = static_cast<int>(v % 10);
        v /= 10;
    }
    bool blanking = true;
    for (int i = 0; i < kDigits; ++i) {
        const bool integer_part_tail = i >= kDigits - 3; // keep "0.00" visible
        if (blanking && digits[i] == 0 && !integer_part_tail) {
            continue; // leave blank
        }
        blanking = false;
        frame.digits[i] = encode_digit(digits[i]);
    }
    frame.digits[kDigits - 3].dp = true;
    return frame;
}

} // namespace

SegmentMask encode_digit(int d) {
    if (d < 0 || d > 9) {
        throw ConfigError("seven-segment encoder handles digits 0..9 only");
    }
    return SegmentMask{kDigitBits[static_cast<std::size_t>(d)], false};
}

SegmentFrame dashes_frame() {
    SegmentFrame frame;
    for (auto& d : frame.digits) {
        d.bits = kDashBits;
    }
    return frame;
}

SegmentFrame render_meters(soc::LengthCm length) {
    return render_hundredths(length.value);
}

SegmentFrame render_efficiency(soc::EfficiencyBp eff) {
    if (eff.value > 99999) {
        return dashes_frame();
    }
    return render_hundredths(eff.value);
}

SegmentFrame render(const soc::DisplayContent& content) {
    if (const auto* m = std::get_if<soc::ShowMeters>(&content)) {
        return render_meters(m->length);
    }
    if (const auto* e = std::get_if<soc::ShowEfficiency>(&content)) {
        return render_efficiency(e->eff);
    }
    return dashes_frame();
}

std::string trace_line(std::uint64_t t_us, const SegmentFrame& frame) {
    static constexpr char hex[] = "0123456789ABCDEF";
    std::string line = std::to_string(t_us);
    for (const auto& d : frame.digits) {
        const auto b = packed(d);
        line += ' ';
        line += hex[b >> 4];
        line += hex[b & 0xF];
    }
    return line;
}

} // namespace loom::sevenseg
