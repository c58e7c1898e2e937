#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "loom/scenario.hpp"
#include "loom/sevenseg.hpp"
#include "loom/signal_chain.hpp"
#include "loom/soc_core.hpp"
#include "loom/uart.hpp"

namespace loom::sim {

/// Oracle for the rotation counter: sum of floor(duration_s * rpm / 60).
std::int64_t expected_rotations(std::span<const Segment> segments);

struct FieldSample {
    std::uint64_t t_us = 0;
    double field_mT = 0.0;
    std::size_t segment_index = 0;
};

/// Flux-density samples for the whole segment plan. Revolution k of a running
/// segment starts at floor(k * 6e7 / rpm) us past the segment origin (per-
/// segment boundaries, so rounding never accumulates); the magnet dwell holds
/// the field above the operate point for the first tenth of each period and
/// the line sits at baseline otherwise. Additive noise is drawn from a
/// SplitMix64 stream seeded by `seed`; amplitudes below half the hysteresis
/// window can never move a sample across the wrong threshold.
std::vector<FieldSample> field_samples(std::span<const Segment> segments,
                                       const signal::SensorConfig& sensor, std::uint64_t seed);

struct PulseTrain {
    std::vector<signal::Edge> edges; // conditioned line, alternating
    std::vector<std::int64_t> rising_per_segment;
};

/// Runs the Hall switch + conditioner over field_samples and collects edges.
PulseTrain pulse_train(std::span<const Segment> segments, const signal::SensorConfig& sensor,
                       std::uint64_t seed);

struct DisplayTraceEntry {
    std::uint64_t t_us = 0;
    sevenseg::SegmentFrame frame;

    bool operator==(const DisplayTraceEntry&) const = default;
};

struct SimOutput {
    std::vector<soc::ShiftRecord> records;
    std::vector<DisplayTraceEntry> display_trace;
    uart::UartBitstream bitstream;
    std::vector<std::int64_t> edge_count_per_segment;
    std::vector<std::string> errors;
    soc::MonitorState final_monitor;
};

/// Deterministic event-driven run: rotation edges, operator events and display
/// hold-off ticks are merged in timestamp order (operator events win ties,
/// then ticks, then edges) and pushed through the monitor; queued record bytes
/// go out through the serial transmitter as soon as the line is free.
SimOutput run(const Scenario& scenario);

} // namespace loom::sim
