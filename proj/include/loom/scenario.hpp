#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "loom/signal_chain.hpp"
#include "loom/soc_core.hpp"
#include "loom/uart.hpp"

namespace loom::sim {

/// One machine-state stretch: the shaft turns at actual_rpm (0 = stopped) and
/// the sensor sees additive noise bounded by noise_amp_mT.
struct Segment {
    std::uint64_t duration_us = 0;
    int actual_rpm = 0;
    double noise_amp_mT = 0.0;

    bool operator==(const Segment&) const = default;
};

struct SelectShiftAction {
    soc::ShiftId shift_id = soc::ShiftId::A;
    bool operator==(const SelectShiftAction&) const = default;
};
struct EfficiencyButtonAction {
    bool operator==(const EfficiencyButtonAction&) const = default;
};
struct SetThumbwheelAction {
    std::array<std::uint8_t, 3> wheels{0, 0, 0};
    bool operator==(const SetThumbwheelAction&) const = default;
};
using Action = std::variant<SelectShiftAction, EfficiencyButtonAction, SetThumbwheelAction>;

struct OperatorEvent {
    std::uint64_t t_us = 0;
    Action action;

    bool operator==(const OperatorEvent&) const = default;
};

struct Scenario {
    std::uint64_t seed = 0;
    int rated_rpm = 0;
    std::vector<soc::ShiftConfig> shifts;
    soc::ThumbwheelState thumbwheel;
    uart::UartConfig uart;
    signal::SensorConfig sensor;
    std::vector<Segment> segments;
    std::vector<OperatorEvent> events;

    std::uint64_t total_duration_us() const;

    bool operator==(const Scenario&) const = default;
};

/// Throws ScenarioError on any invariant violation: bad ranges, unordered or
/// late events, noise amplitude at or above half the hysteresis window,
/// events addressing unconfigured shifts.
void validate(const Scenario& sc);

/// Strict JSON: unknown keys are rejected, times are seconds as decimal
/// numbers. See the shipped scenario files for the shape.
Scenario parse_scenario(std::string_view json_text);

Scenario load_scenario(const std::string& path);

} // namespace loom::sim
