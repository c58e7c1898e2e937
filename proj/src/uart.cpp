#include "loom/uart.hpp"

#include <algorithm>
#include <charconv>
#include <istream>

#include "loom/errors.hpp"

namespace loom::uart {

namespace {

constexpr std::uint64_t kUsPerSecond = 1'000'000;

} // namespace

void validate(const UartConfig& cfg) {
    if (cfg.baud < kMinBaud || cfg.baud > kMaxBaud) {
        throw ConfigError("baud rate must be in 300..115200");
    }
}

LogicLevel UartBitstream::level_at(std::uint64_t t_us) const {
    // last transition with time <= t decides; none -> idle High
    auto it = std::upper_bound(transitions.begin(), transitions.end(), t_us,
                               [](std::uint64_t t, const Transition& tr) { return t < tr.t_us; });
    if (it == transitions.begin()) {
        return LogicLevel::High;
    }
    return std::prev(it)->level;
}

bool UartBitstream::well_formed() const {
    LogicLevel prev = LogicLevel::High;
    std::uint64_t prev_t = 0;
    bool first = true;
    for (const auto& tr : transitions) {
        if (!first && tr.t_us <= prev_t) {
            return false;
        }
        if (tr.level == prev) {
            return false;
        }
        prev = tr.level;
        prev_t = tr.t_us;
        first = false;
    }
    return prev == LogicLevel::High;
}

std::array<LogicLevel, kFrameBits> byte_to_bits(std::uint8_t b) {
    std::array<LogicLevel, kFrameBits> bits;
    bits[0] = LogicLevel::Low; // start
    for (int i = 0; i < 8; ++i) {
        bits[1 + i] = (b >> i) & 1 ? LogicLevel::High : LogicLevel::Low;
    }
    bits[9] = LogicLevel::High; // stop
    return bits;
}

std::uint64_t bit_offset_us(const UartConfig& cfg, int bit_index) {
    return static_cast<std::uint64_t>(bit_index) * kUsPerSecond / cfg.baud;
}

std::uint64_t frame_duration_us(const UartConfig& cfg) {
    return bit_offset_us(cfg, kFrameBits);
}

std::uint64_t sample_offset_us(const UartConfig& cfg, int frame_bit) {
    return (2 * static_cast<std::uint64_t>(frame_bit) + 1) * kUsPerSecond / (2 * cfg.baud);
}

Transmitter::Transmitter(UartConfig cfg) : cfg_(cfg) {
    validate(cfg_);
}

void Transmitter::queue(std::span<const std::uint8_t> bytes, std::uint64_t at_t_us) {
    std::uint64_t frame_t = std::max(at_t_us, line_free_us_);
    const auto frame_dur = frame_duration_us(cfg_);
    for (auto b : bytes) {
        const auto bits = byte_to_bits(b);
        for (int j = 0; j < kFrameBits; ++j) {
            if (bits[j] != level_) {
                stream_.transitions.push_back({frame_t + bit_offset_us(cfg_, j), bits[j]});
                level_ = bits[j];
            }
        }
        frame_t += frame_dur;
    }
    if (!bytes.empty()) {
        line_free_us_ = frame_t;
    }
}

UartBitstream tx_bytes(std::span<const std::uint8_t> bytes, const UartConfig& cfg,
                       std::uint64_t start_t_us) {
    Transmitter tx(cfg);
    tx.queue(bytes, start_t_us);
    return tx.take_stream();
}

RxResult rx_bytes(const UartBitstream& stream, const UartConfig& cfg) {
    validate(cfg);
    RxResult out;
    const auto& trs = stream.transitions;
    std::size_t i = 0;
    // position i scans for the next start edge
    while (i < trs.size()) {
        if (trs[i].level != LogicLevel::Low) {
            ++i;
            continue;
        }
        const std::uint64_t t0 = trs[i].t_us;
        std::uint8_t data = 0;
        for (int bit = 0; bit < 8; ++bit) {
            if (stream.level_at(t0 + sample_offset_us(cfg, 1 + bit)) == LogicLevel::High) {
                data |= static_cast<std::uint8_t>(1u << bit);
            }
        }
        const std::uint64_t stop_t = t0 + sample_offset_us(cfg, 9);
        if (stream.level_at(stop_t) == LogicLevel::High) {
            out.bytes.push_back(data);
            out.byte_times.push_back(stop_t);
            // resume at the first transition after the stop sample
            while (i < trs.size() && trs[i].t_us <= stop_t) {
                ++i;
            }
        } else {
            out.errors.push_back({stop_t});
            // wait for the line to return to idle High
            while (i < trs.size() && !(trs[i].t_us > stop_t && trs[i].level == LogicLevel::High)) {
                ++i;
            }
        }
    }
    return out;
}

std::uint8_t xor_checksum(std::string_view payload) {
    std::uint8_t cs = 0;
    for (char c : payload) {
        cs ^= static_cast<std::uint8_t>(c);
    }
    return cs;
}

std::string record_payload(const soc::ShiftRecord& rec) {
    std::string p = "LOOM,";
    p += shift_letter(rec.shift_id);
    p += ',';
    p += std::to_string(rec.count);
    p += ',';
    p += std::to_string(rec.eff_bp.value);
    p += ',';
    p += std::to_string(rec.len_cm.value);
    p += ',';
    p += std::to_string(rec.pick);
    p += ',';
    p += std::to_string(rec.rated_rpm);
    p += ',';
    p += std::to_string(rec.hours);
    return p;
}

namespace {

constexpr char kHexDigits[] = "0123456789ABCDEF";

std::optional<std::uint64_t> parse_u64(std::string_view field) {
    if (field.empty() || field.size() > 10) {
        return std::nullopt;
    }
    std::uint64_t v = 0;
    for (char c : field) {
        if (c < '0' || c > '9') {
            return std::nullopt;
        }
        v = v * 10 + static_cast<std::uint64_t>(c - '0');
    }
    return v;
}

std::optional<int> parse_hex_pair(std::string_view s) {
    int v = 0;
    for (char c : s) {
        int d;
        if (c >= '0' && c <= '9') {
            d = c - '0';
        } else if (c >= 'A' && c <= 'F') {
            d = c - 'A' + 10;
        } else {
            return std::nullopt; // lowercase is non-canonical, reject
        }
        v = v * 16 + d;
    }
    return v;
}

ParseResult reject(std::string_view line, FrameError err) {
    ParseResult r;
    r.error = err;
    r.raw = std::string(line);
    return r;
}

} // namespace

std::vector<std::uint8_t> frame_record(const soc::ShiftRecord& rec) {
    const auto payload = record_payload(rec);
    const auto cs = xor_checksum(payload);
    std::vector<std::uint8_t> out(payload.begin(), payload.end());
    out.push_back('*');
    out.push_back(static_cast<std::uint8_t>(kHexDigits[cs >> 4]));
    out.push_back(static_cast<std::uint8_t>(kHexDigits[cs & 0xF]));
    out.push_back('\n');
    return out;
}

const char* frame_error_name(FrameError err) {
    switch (err) {
    case FrameError::ChecksumMismatch: return "checksum_mismatch";
    case FrameError::MalformedFrame: return "malformed_frame";
    case FrameError::FieldOutOfRange: return "field_out_of_range";
    }
    return "unknown";
}

ParseResult parse_frame(std::string_view line) {
    std::string_view body = line;
    if (!body.empty() && body.back() == '\n') {
        body.remove_suffix(1);
    }
    for (char c : body) {
        if (static_cast<unsigned char>(c) < 0x20 || static_cast<unsigned char>(c) == 0x7F) {
            return reject(line, FrameError::MalformedFrame);
        }
    }
    const auto star = body.find('*');
    if (star == std::string_view::npos || star + 3 != body.size()) {
        return reject(line, FrameError::MalformedFrame);
    }
    const auto payload = body.substr(0, star);
    const auto cs_field = parse_hex_pair(body.substr(star + 1, 2));
    if (!cs_field) {
        return reject(line, FrameError::MalformedFrame);
    }
    if (*cs_field != xor_checksum(payload)) {
        return reject(line, FrameError::ChecksumMismatch);
    }

    std::array<std::string_view, 8> fields;
    std::size_t nfields = 0;
    std::size_t pos = 0;
    while (true) {
        const auto comma = payload.find(',', pos);
        const auto part = payload.substr(pos, comma == std::string_view::npos
                                                  ? std::string_view::npos
                                                  : comma - pos);
        if (nfields == fields.size()) {
            return reject(line, FrameError::MalformedFrame);
        }
        fields[nfields++] = part;
        if (comma == std::string_view::npos) {
            break;
        }
        pos = comma + 1;
    }
    if (nfields != fields.size() || fields[0] != "LOOM") {
        return reject(line, FrameError::MalformedFrame);
    }
    if (fields[1].size() != 1) {
        return reject(line, FrameError::FieldOutOfRange);
    }
    const auto shift = soc::shift_from_letter(fields[1][0]);
    if (!shift) {
        return reject(line, FrameError::FieldOutOfRange);
    }
    std::array<std::uint64_t, 6> nums;
    for (std::size_t f = 2; f < 8; ++f) {
        const auto v = parse_u64(fields[f]);
        if (!v) {
            return reject(line, FrameError::MalformedFrame);
        }
        nums[f - 2] = *v;
    }
    const auto count = nums[0];
    const auto eff = nums[1];
    const auto len = nums[2];
    const auto pick = nums[3];
    const auto rpm = nums[4];
    const auto hours = nums[5];
    if (rpm < 1 || rpm > 999 || hours < 1 || hours > 12 || pick < 1 || pick > 999) {
        return reject(line, FrameError::FieldOutOfRange);
    }
    if (count > static_cast<std::uint64_t>(soc::kMaxShaftRpm) * 60 * hours) {
        return reject(line, FrameError::FieldOutOfRange);
    }
    // derived fields must agree with the calculators
    const auto want_eff = soc::efficiency_bp(static_cast<std::int64_t>(count),
                                             static_cast<int>(rpm), static_cast<int>(hours));
    const auto want_len = soc::length_cm(static_cast<std::int64_t>(count),
                                         soc::PickValue{static_cast<int>(pick)});
    if (eff != static_cast<std::uint64_t>(want_eff.value) ||
        len != static_cast<std::uint64_t>(want_len.value)) {
        return reject(line, FrameError::FieldOutOfRange);
    }

    ParseResult res;
    soc::ShiftRecord rec;
    rec.shift_id = *shift;
    rec.count = static_cast<std::int64_t>(count);
    rec.eff_bp = want_eff;
    rec.len_cm = want_len;
    rec.pick = static_cast<int>(pick);
    rec.rated_rpm = static_cast<int>(rpm);
    rec.hours = static_cast<int>(hours);
    res.record = rec;
    return res;
}

std::string write_bits(const UartBitstream& stream) {
    std::string out;
    for (const auto& tr : stream.transitions) {
        out += std::to_string(tr.t_us);
        out += ' ';
        out += level_char(tr.level);
        out += '\n';
    }
    return out;
}

UartBitstream read_bits(std::istream& in) {
    UartBitstream stream;
    std::string word;
    std::uint64_t t;
    while (in >> word) {
        auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), t);
        if (ec != std::errc{} || ptr != word.data() + word.size()) {
            throw IoError("bitstream file: bad timestamp '" + word + "'");
        }
        std::string lvl;
        if (!(in >> lvl) || (lvl != "0" && lvl != "1")) {
            throw IoError("bitstream file: expected 0 or 1 after timestamp");
        }
        stream.transitions.push_back(
            {t, lvl == "1" ? LogicLevel::High : LogicLevel::Low});
    }
    if (!stream.well_formed()) {
        throw IoError("bitstream file: transitions must strictly increase, alternate, and end High");
    }
    return stream;
}

} // namespace loom::uart
