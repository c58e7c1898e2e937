#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "loom/logic_level.hpp"

namespace loom::signal {

/// Hall-effect proximity switch thresholds. The switch asserts (output goes
/// Low) once the field reaches operate_mT and releases (output High) once it
/// drops to release_mT; between the two it holds its last output.
struct SensorConfig {
    double operate_mT = 3.0;
    double release_mT = 1.5;

    bool operator==(const SensorConfig&) const = default;
};

/// Throws ConfigError unless operate_mT > release_mT > 0.
void validate(const SensorConfig& cfg);

struct SensorState {
    LogicLevel output = LogicLevel::High; // High = no magnet in range
    double last_field_mT = 0.0;

    bool operator==(const SensorState&) const = default;
};

constexpr SensorState initial_sensor_state() { return {}; }

struct SensorStep {
    SensorState state;
    LogicLevel output;
};

SensorStep sensor_step(const SensorConfig& cfg, SensorState state, double field_mT);

/// Signal conditioner: inverts the active-low switch output so a magnet pass
/// shows up as a High pulse downstream.
constexpr LogicLevel condition(LogicLevel raw) { return invert(raw); }

enum class EdgeKind : std::uint8_t { Rising, Falling };

struct Edge {
    EdgeKind kind;
    std::uint64_t at_us;

    bool operator==(const Edge&) const = default;
};

struct LevelSample {
    std::uint64_t t_us;
    LogicLevel level;
};

/// Incremental transition detector. feed() returns an edge whenever the level
/// changes relative to the previous sample; timestamps must strictly increase.
class EdgeDetector {
public:
    explicit EdgeDetector(LogicLevel initial) : level_(initial) {}

    std::optional<Edge> feed(std::uint64_t t_us, LogicLevel level);

    LogicLevel level() const { return level_; }

private:
    LogicLevel level_;
    std::optional<std::uint64_t> last_t_;
};

/// Edges of a sampled waveform. The first sample fixes the starting level and
/// produces no edge itself. Throws ConfigError on non-monotonic timestamps.
std::vector<Edge> detect_edges(std::span<const LevelSample> samples);

} // namespace loom::signal
