#include "loom/signal_chain.hpp"

#include "loom/errors.hpp"

namespace loom::signal {

void validate(const SensorConfig& cfg) {
    if (!(cfg.release_mT > 0.0)) {
        throw ConfigError("sensor release point must be > 0 mT");
    }
    if (!(cfg.operate_mT > cfg.release_mT)) {
        throw ConfigError("sensor operate point must exceed release point");
    }
}

SensorStep sensor_step(const SensorConfig& cfg, SensorState state, double field_mT) {
    validate(cfg);
    if (field_mT >= cfg.operate_mT) {
        state.output = LogicLevel::Low; // magnet present
    } else if (field_mT <= cfg.release_mT) {
        state.output = LogicLevel::High;
    }
    // inside the hysteresis window: hold previous output
    state.last_field_mT = field_mT;
    return {state, state.output};
}

std::optional<Edge> EdgeDetector::feed(std::uint64_t t_us, LogicLevel level) {
    if (last_t_ && t_us <= *last_t_) {
        throw ConfigError("sample timestamps must strictly increase");
    }
    last_t_ = t_us;
    if (level == level_) {
        return std::nullopt;
    }
    level_ = level;
    return Edge{level == LogicLevel::High ? EdgeKind::Rising : EdgeKind::Falling, t_us};
}

std::vector<Edge> detect_edges(std::span<const LevelSample> samples) {
    std::vector<Edge> edges;
    if (samples.empty()) {
        return edges;
    }
    EdgeDetector det(samples.front().level);
    for (const auto& s : samples) {
        if (auto e = det.feed(s.t_us, s.level)) {
            edges.push_back(*e);
        }
    }
    return edges;
}

} // namespace loom::signal
