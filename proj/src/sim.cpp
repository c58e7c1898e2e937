#include "loom/sim.hpp"

#include <queue>

#include "loom/errors.hpp"
#include "loom/prng.hpp"

namespace loom::sim {

namespace {

constexpr std::uint64_t kUsPerMinute = 60'000'000;

} // namespace

std::int64_t expected_rotations(std::span<const Segment> segments) {
    std::int64_t total = 0;
    for (const auto& seg : segments) {
        total += static_cast<std::int64_t>(seg.duration_us) * seg.actual_rpm /
                 static_cast<std::int64_t>(kUsPerMinute);
    }
    return total;
}

std::vector<FieldSample> field_samples(std::span<const Segment> segments,
                                       const signal::SensorConfig& sensor, std::uint64_t seed) {
    signal::validate(sensor);
    const double half_window = (sensor.operate_mT - sensor.release_mT) / 2.0;
    const double dwell_field = sensor.operate_mT + half_window;
    const double base_field = sensor.release_mT - half_window;

    SplitMix64 rng(seed);
    std::vector<FieldSample> samples;
    std::uint64_t origin = 0;
    for (std::size_t si = 0; si < segments.size(); ++si) {
        const auto& seg = segments[si];
        const double amp = seg.noise_amp_mT;
        auto noise = [&] { return amp > 0.0 ? rng.next_symmetric(amp) : 0.0; };
        auto emit = [&](std::uint64_t off, double field) {
            samples.push_back({origin + off, field + noise(), si});
        };

        if (seg.actual_rpm == 0) {
            emit(0, base_field);
            if (amp > 0.0 && seg.duration_us >= 2) {
                emit(seg.duration_us / 2, base_field);
            }
        } else {
            const auto rpm = static_cast<std::uint64_t>(seg.actual_rpm);
            const std::uint64_t dwell = kUsPerMinute / (10 * rpm);
            for (std::uint64_t k = 0;; ++k) {
                const std::uint64_t start = k * kUsPerMinute / rpm;
                if (start + dwell >= seg.duration_us) {
                    break; // partial revolution at the boundary is dropped
                }
                emit(start, dwell_field);
                if (amp > 0.0 && dwell >= 2) {
                    emit(start + dwell / 2, dwell_field);
                }
                emit(start + dwell, base_field);
                if (amp > 0.0) {
                    const std::uint64_t gap_mid = start + dwell + (kUsPerMinute / rpm - dwell) / 2;
                    if (gap_mid > start + dwell && gap_mid < seg.duration_us) {
                        emit(gap_mid, base_field);
                    }
                }
            }
        }
        origin += seg.duration_us;
    }
    return samples;
}

PulseTrain pulse_train(std::span<const Segment> segments, const signal::SensorConfig& sensor,
                       std::uint64_t seed) {
    PulseTrain train;
    train.rising_per_segment.assign(segments.size(), 0);

    auto state = signal::initial_sensor_state();
    signal::EdgeDetector detector(signal::condition(state.output)); // conditioned line idles Low
    for (const auto& s : field_samples(segments, sensor, seed)) {
        auto step = signal::sensor_step(sensor, state, s.field_mT);
        state = step.state;
        if (auto edge = detector.feed(s.t_us, signal::condition(step.output))) {
            train.edges.push_back(*edge);
            if (edge->kind == signal::EdgeKind::Rising) {
                ++train.rising_per_segment[s.segment_index];
            }
        }
    }
    return train;
}

namespace {

soc::Event to_monitor_event(const OperatorEvent& ev) {
    if (const auto* sel = std::get_if<SelectShiftAction>(&ev.action)) {
        return soc::SelectShift{sel->shift_id, ev.t_us};
    }
    if (std::holds_alternative<EfficiencyButtonAction>(ev.action)) {
        return soc::EfficiencyButton{ev.t_us};
    }
    const auto& set = std::get<SetThumbwheelAction>(ev.action);
    return soc::SetThumbwheel{set.wheels, ev.t_us};
}

} // namespace

SimOutput run(const Scenario& scenario) {
    validate(scenario);

    auto train = pulse_train(scenario.segments, scenario.sensor, scenario.seed);
    std::vector<std::uint64_t> edge_times;
    edge_times.reserve(train.edges.size() / 2 + 1);
    for (const auto& e : train.edges) {
        if (e.kind == signal::EdgeKind::Rising) {
            edge_times.push_back(e.at_us);
        }
    }

    SimOutput out;
    out.edge_count_per_segment = std::move(train.rising_per_segment);

    auto monitor = soc::make_monitor(scenario.rated_rpm, scenario.shifts, scenario.thumbwheel);
    uart::Transmitter tx(scenario.uart);

    auto last_frame = sevenseg::render(soc::display_content(monitor));
    out.display_trace.push_back({0, last_frame});

    auto record_frame = [&](std::uint64_t t) {
        const auto frame = sevenseg::render(soc::display_content(monitor));
        if (frame == last_frame) {
            return;
        }
        if (!out.display_trace.empty() && out.display_trace.back().t_us == t) {
            out.display_trace.back().frame = frame; // final state at this instant wins
        } else {
            out.display_trace.push_back({t, frame});
        }
        last_frame = frame;
    };

    auto deliver = [&](const soc::Event& ev) {
        const auto t = soc::event_time(ev);
        auto step = soc::monitor_step(monitor, ev);
        monitor = std::move(step.state);
        if (step.effects.record) {
            out.records.push_back(*step.effects.record);
        }
        if (step.effects.error) {
            out.errors.push_back("t=" + std::to_string(t) + "us: " + *step.effects.error);
        }
        if (!step.effects.tx.empty()) {
            soc::drain_tx(monitor); // same bytes the effects report
            tx.queue(step.effects.tx, t);
        }
        record_frame(t);
    };

    std::priority_queue<std::uint64_t, std::vector<std::uint64_t>, std::greater<>> ticks;
    std::size_t oi = 0;
    std::size_t ei = 0;
    while (oi < scenario.events.size() || ei < edge_times.size() || !ticks.empty()) {
        // operator events win timestamp ties, then ticks, then edges
        const bool has_op = oi < scenario.events.size();
        const bool has_tick = !ticks.empty();
        const bool has_edge = ei < edge_times.size();
        const std::uint64_t t_op = has_op ? scenario.events[oi].t_us : UINT64_MAX;
        const std::uint64_t t_tick = has_tick ? ticks.top() : UINT64_MAX;
        const std::uint64_t t_edge = has_edge ? edge_times[ei] : UINT64_MAX;

        if (t_op <= t_tick && t_op <= t_edge) {
            const auto& ev = scenario.events[oi++];
            deliver(to_monitor_event(ev));
            if (std::holds_alternative<EfficiencyButtonAction>(ev.action)) {
                ticks.push(ev.t_us + soc::kEfficiencyHoldUs);
            }
        } else if (t_tick <= t_edge) {
            ticks.pop();
            deliver(soc::Tick{t_tick});
        } else {
            deliver(soc::RotationEdge{edge_times[ei++]});
        }
    }

    out.bitstream = tx.take_stream();
    out.final_monitor = std::move(monitor);
    return out;
}

} // namespace loom::sim
