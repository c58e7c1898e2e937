#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "loom/sim.hpp"
#include "loom/soc_core.hpp"
#include "loom/uart.hpp"

namespace loom::host {

struct LogEntry {
    soc::ShiftRecord record;
    std::uint64_t recv_t_us = 0; // stop-bit instant, or an ordinal when untimed

    bool operator==(const LogEntry&) const = default;
};

/// Validated shift records received from the wire, plus per-reason counts of
/// rejected frames.
struct ShiftLog {
    std::vector<LogEntry> entries;
    std::array<std::int64_t, 3> rejects{0, 0, 0}; // indexed by uart::FrameError

    std::int64_t reject_count() const { return rejects[0] + rejects[1] + rejects[2]; }

    bool operator==(const ShiftLog&) const = default;
};

/// Incremental line-oriented decoder. Feed arbitrary byte chunks; complete
/// lines are parsed as record frames, bad lines bump a reject counter, and a
/// line whose prefix is garbage is retried from the next "LOOM," in it.
class Ingestor {
public:
    void feed(std::span<const std::uint8_t> bytes);
    void feed(std::span<const std::uint8_t> bytes, std::span<const std::uint64_t> times);

    /// Treats any buffered partial line as final (e.g. input ended mid-frame).
    void flush();

    const ShiftLog& log() const { return log_; }
    ShiftLog take_log() { return std::move(log_); }

private:
    void push_byte(std::uint8_t b, std::uint64_t t);
    void complete_line(std::uint64_t t);

    std::string line_;
    ShiftLog log_;
    std::uint64_t seq_ = 0;
};

/// One-shot fold over a byte buffer (ordinal receive timestamps).
ShiftLog ingest(std::span<const std::uint8_t> bytes);

/// Writes records.jsonl and summary.csv under dir. Byte-deterministic for a
/// given log. Throws IoError with path context.
void persist(const ShiftLog& log, const std::string& dir);

/// Reads a records.jsonl written by persist. Strict: unknown keys, bad types
/// or out-of-range fields throw IoError.
std::vector<soc::ShiftRecord> load_records(const std::string& path);

struct ReportRow {
    soc::ShiftId shift_id = soc::ShiftId::A;
    std::int64_t records = 0;
    soc::EfficiencyBp latest_eff;
    soc::LengthCm latest_len;

    bool operator==(const ReportRow&) const = default;
};

struct Report {
    std::vector<ReportRow> rows; // ordered A, B, C; only shifts present
    std::int64_t total_records = 0;
    std::int64_t total_len_cm = 0;

    bool operator==(const Report&) const = default;
};

/// Latest record per shift wins; totals sum lengths and count records.
Report report(const ShiftLog& log);

void render_report(const Report& rep, std::ostream& out);

/// Full host-side pipeline for a finished run: serializes uart.bits and
/// display.trace, decodes the bitstream, ingests it, and persists
/// records.jsonl + summary.csv. Returns the ingested log.
ShiftLog write_run_outputs(const sim::SimOutput& output, const uart::UartConfig& cfg,
                           const std::string& dir);

struct VerifyCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Scenario-level invariant checks: counter vs oracle, wire fidelity, and
/// determinism via a double run.
std::vector<VerifyCheck> verify_scenario(const sim::Scenario& scenario);

} // namespace loom::host
