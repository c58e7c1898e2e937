#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "loom/logic_level.hpp"
#include "loom/soc_core.hpp"

namespace loom::uart {

inline constexpr std::uint32_t kMinBaud = 300;
inline constexpr std::uint32_t kMaxBaud = 115200;
inline constexpr int kFrameBits = 10; // start + 8 data + stop (8N1)

struct UartConfig {
    std::uint32_t baud = 9600;

    bool operator==(const UartConfig&) const = default;
};

void validate(const UartConfig& cfg);

struct Transition {
    std::uint64_t t_us = 0;
    LogicLevel level = LogicLevel::High;

    bool operator==(const Transition&) const = default;
};

/// Logic-level transitions on the serial line. The line idles High: the level
/// before the first transition is High, so a well-formed stream alternates
/// Low, High, Low, ... and ends High.
struct UartBitstream {
    std::vector<Transition> transitions;

    LogicLevel level_at(std::uint64_t t_us) const;
    bool well_formed() const;

    bool operator==(const UartBitstream&) const = default;
};

/// Start bit, 8 data bits LSB-first (1 -> High), stop bit.
std::array<LogicLevel, kFrameBits> byte_to_bits(std::uint8_t b);

/// Offset of frame-bit boundary i from the frame origin: floor(i * 1e6 / baud).
/// Computed per frame so rounding never accumulates across a byte stream.
std::uint64_t bit_offset_us(const UartConfig& cfg, int bit_index);

/// floor(10 * 1e6 / baud) -- e.g. 1041 us at 9600 baud.
std::uint64_t frame_duration_us(const UartConfig& cfg);

/// Mid-bit sample offset for frame bit j (j = 1..8 data, j = 9 stop):
/// floor((j + 0.5) * 1e6 / baud) past the start edge.
std::uint64_t sample_offset_us(const UartConfig& cfg, int frame_bit);

/// Serializes frames back-to-back starting at start_t_us.
UartBitstream tx_bytes(std::span<const std::uint8_t> bytes, const UartConfig& cfg,
                       std::uint64_t start_t_us);

/// Incremental transmitter with the same bit timing as tx_bytes. Bytes queued
/// while the line is busy start as soon as the previous frame ends.
class Transmitter {
public:
    explicit Transmitter(UartConfig cfg);

    void queue(std::span<const std::uint8_t> bytes, std::uint64_t at_t_us);

    const UartBitstream& stream() const { return stream_; }
    UartBitstream take_stream() { return std::move(stream_); }
    std::uint64_t line_free_us() const { return line_free_us_; }

private:
    UartConfig cfg_;
    UartBitstream stream_;
    LogicLevel level_ = LogicLevel::High;
    std::uint64_t line_free_us_ = 0;
};

struct FramingError {
    std::uint64_t t_us = 0;

    bool operator==(const FramingError&) const = default;
};

struct RxResult {
    std::vector<std::uint8_t> bytes;
    std::vector<std::uint64_t> byte_times; // stop-sample instant per byte
    std::vector<FramingError> errors;
};

/// Decodes a bitstream: each High->Low edge seen from idle starts a frame,
/// data and stop bits are sampled mid-bit, and a Low stop bit is reported as
/// a framing error after which decoding waits for the line to idle High.
RxResult rx_bytes(const UartBitstream& stream, const UartConfig& cfg);

// ---------------------------------------------------------------------------
// Record framing: LOOM,<shift>,<count>,<eff_bp>,<len_cm>,<pick>,<rpm>,<hours>*CS\n
// where CS is two uppercase hex digits, the XOR of all payload bytes.
// ---------------------------------------------------------------------------

std::uint8_t xor_checksum(std::string_view payload);

std::string record_payload(const soc::ShiftRecord& rec);

std::vector<std::uint8_t> frame_record(const soc::ShiftRecord& rec);

enum class FrameError : std::uint8_t { ChecksumMismatch, MalformedFrame, FieldOutOfRange };

const char* frame_error_name(FrameError err);

struct ParseResult {
    std::optional<soc::ShiftRecord> record;
    std::optional<FrameError> error;
    std::string raw; // the offending line, when error is set

    bool ok() const { return record.has_value(); }
};

/// Inverse of frame_record. The trailing '\n' is optional so line-split input
/// parses too; anything else out of shape is rejected, including field values
/// inconsistent with the efficiency/meter calculators.
ParseResult parse_frame(std::string_view line);

// Bitstream text format: one "<time_us> <0|1>" line per transition, initial
// level implicitly High at time 0.
std::string write_bits(const UartBitstream& stream);
UartBitstream read_bits(std::istream& in);

} // namespace loom::uart
