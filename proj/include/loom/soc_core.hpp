#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace loom::soc {

enum class ShiftId : std::uint8_t { A = 0, B = 1, C = 2 };

constexpr char shift_letter(ShiftId id) {
    return static_cast<char>('A' + static_cast<int>(id));
}

std::optional<ShiftId> shift_from_letter(char c);

/// Three-wheel decimal selector, wheels[0] = hundreds .. wheels[2] = units.
/// Values above 9 are representable (a stuck or miswired wheel) and are
/// rejected by bcd_to_binary.
struct ThumbwheelState {
    std::array<std::uint8_t, 3> wheels{0, 0, 0};

    bool operator==(const ThumbwheelState&) const = default;
};

/// Horizontal threads per inch. Zero means "not set" and is rejected by the
/// meter calculator.
struct PickValue {
    int picks_per_inch = 0;

    bool operator==(const PickValue&) const = default;
};

struct MachineRating {
    int rated_rpm = 0;

    bool operator==(const MachineRating&) const = default;
};

struct ShiftConfig {
    ShiftId shift_id = ShiftId::A;
    int hours = 0;

    bool operator==(const ShiftConfig&) const = default;
};

inline constexpr std::int64_t kMaxShaftRpm = 999;
inline constexpr int kMaxShiftHours = 12;
inline constexpr std::int64_t kMaxBufferCapacity = kMaxShaftRpm * 60 * kMaxShiftHours; // 719280

/// Saturating per-shift rotation counter. Capacity is fixed at construction
/// from the shift length: 999 rpm * 60 min * hours.
struct RotationBuffer {
    ShiftId shift_id = ShiftId::A;
    std::int64_t count = 0;
    std::int64_t capacity = 0;

    bool operator==(const RotationBuffer&) const = default;
};

RotationBuffer make_buffer(const ShiftConfig& cfg);

/// Efficiency in basis points (hundredths of a percent), truncated.
struct EfficiencyBp {
    std::int64_t value = 0;

    bool operator==(const EfficiencyBp&) const = default;
    auto operator<=>(const EfficiencyBp&) const = default;
};

/// Woven length in whole centimeters, truncated.
struct LengthCm {
    std::int64_t value = 0;

    bool operator==(const LengthCm&) const = default;
    auto operator<=>(const LengthCm&) const = default;
};

struct ShiftRecord {
    ShiftId shift_id = ShiftId::A;
    std::int64_t count = 0;
    EfficiencyBp eff_bp;
    LengthCm len_cm;
    int pick = 0;
    int rated_rpm = 0;
    int hours = 0;

    bool operator==(const ShiftRecord&) const = default;
};

/// 100*w[0] + 10*w[1] + w[2]. Throws BcdError if any wheel nibble exceeds 9.
PickValue bcd_to_binary(const ThumbwheelState& wheels);

/// One shaft revolution; holds at capacity instead of wrapping.
RotationBuffer count_rotation(RotationBuffer buffer);

/// floor(count * 10000 / (rated_rpm * 60 * hours)). Throws ConfigError on a
/// zero divisor. Not clamped: a shaft outrunning its rating reads above
/// 10000 bp.
EfficiencyBp efficiency_bp(std::int64_t count, int rated_rpm, int hours);

/// floor(count * 10000 / (pick * 3937)). 39.37 inches per meter is carried
/// exactly as 3937/100, so the result is exact integer centimeters. Throws
/// ConfigError when pick is zero (thumbwheel at 000).
LengthCm length_cm(std::int64_t count, PickValue pick);

// ---------------------------------------------------------------------------
// Monitor state machine
// ---------------------------------------------------------------------------

struct RotationEdge {
    std::uint64_t t_us = 0;
};
struct SelectShift {
    ShiftId shift_id = ShiftId::A;
    std::uint64_t t_us = 0;
};
struct EfficiencyButton {
    std::uint64_t t_us = 0;
};
struct SetThumbwheel {
    std::array<std::uint8_t, 3> wheels{0, 0, 0};
    std::uint64_t t_us = 0;
};
struct Tick {
    std::uint64_t t_us = 0;
};

using Event = std::variant<RotationEdge, SelectShift, EfficiencyButton, SetThumbwheel, Tick>;

std::uint64_t event_time(const Event& ev);

// What the display should currently show.
struct ShowMeters {
    LengthCm length;
    bool operator==(const ShowMeters&) const = default;
};
struct ShowEfficiency {
    EfficiencyBp eff;
    bool operator==(const ShowEfficiency&) const = default;
};
struct ShowError {
    bool operator==(const ShowError&) const = default;
};
using DisplayContent = std::variant<ShowMeters, ShowEfficiency, ShowError>;

struct LiveMeters {
    bool operator==(const LiveMeters&) const = default;
};
/// Efficiency (or error code) held on the display until `until_us`; a Tick at
/// or past that instant reverts to live meters. eff == nullopt renders the
/// error code.
struct HoldDisplay {
    std::uint64_t until_us = 0;
    std::optional<EfficiencyBp> eff;

    bool operator==(const HoldDisplay&) const = default;
};
using DisplayMode = std::variant<LiveMeters, HoldDisplay>;

inline constexpr std::uint64_t kEfficiencyHoldUs = 5'000'000;

struct MonitorState {
    int rated_rpm = 0;
    std::vector<ShiftConfig> shifts;
    std::vector<RotationBuffer> buffers; // parallel to shifts
    ShiftId active_shift = ShiftId::A;
    ThumbwheelState thumbwheel;
    DisplayMode display = LiveMeters{};
    std::vector<std::uint8_t> pending_tx;
    std::uint64_t last_event_us = 0;

    bool operator==(const MonitorState&) const = default;
};

/// Validates the configuration (rpm 1..999, 1..3 distinct shifts, hours
/// 1..12, wheel nibbles <= 9) and returns a monitor with zeroed buffers,
/// the first listed shift active, and the display in live-meter mode.
MonitorState make_monitor(int rated_rpm, std::vector<ShiftConfig> shifts,
                          ThumbwheelState thumbwheel);

struct Effects {
    DisplayContent display;
    std::vector<std::uint8_t> tx;          // bytes enqueued by this step
    std::optional<ShiftRecord> record;     // emitted on a successful button press
    std::optional<std::string> error;      // e.g. efficiency request with pick 0
};

struct StepResult {
    MonitorState state;
    Effects effects;
};

/// Pure step: same state + event always yields the same result. Event
/// timestamps must be non-decreasing across calls (ConfigError otherwise).
/// SetThumbwheel with an invalid nibble throws BcdError and leaves the
/// caller's state untouched.
StepResult monitor_step(const MonitorState& state, const Event& ev);

/// Content the display should show for the given state.
DisplayContent display_content(const MonitorState& state);

/// Removes and returns all queued UART bytes.
std::vector<std::uint8_t> drain_tx(MonitorState& state);

const RotationBuffer& buffer_for(const MonitorState& state, ShiftId id);

} // namespace loom::soc
