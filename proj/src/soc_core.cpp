#include "loom/soc_core.hpp"

#include <algorithm>

#include "loom/errors.hpp"
#include "loom/uart.hpp"

namespace loom::soc {

std::optional<ShiftId> shift_from_letter(char c) {
    switch (c) {
    case 'A': return ShiftId::A;
    case 'B': return ShiftId::B;
    case 'C': return ShiftId::C;
    default: return std::nullopt;
    }
}

RotationBuffer make_buffer(const ShiftConfig& cfg) {
    if (cfg.hours < 1 || cfg.hours > kMaxShiftHours) {
        throw ConfigError("shift hours must be in 1..12");
    }
    return RotationBuffer{cfg.shift_id, 0, kMaxShaftRpm * 60 * cfg.hours};
}

PickValue bcd_to_binary(const ThumbwheelState& wheels) {
    for (auto w : wheels.wheels) {
        if (w > 9) {
            throw BcdError("thumbwheel nibble " + std::to_string(int(w)) + " is not a BCD digit");
        }
    }
    return PickValue{100 * wheels.wheels[0] + 10 * wheels.wheels[1] + wheels.wheels[2]};
}

RotationBuffer count_rotation(RotationBuffer buffer) {
    buffer.count = std::min(buffer.count + 1, buffer.capacity);
    return buffer;
}

EfficiencyBp efficiency_bp(std::int64_t count, int rated_rpm, int hours) {
    if (rated_rpm <= 0 || hours <= 0) {
        throw ConfigError("efficiency needs rated rpm and shift hours >= 1");
    }
    if (count < 0) {
        throw ConfigError("rotation count cannot be negative");
    }
    const std::int64_t denom = std::int64_t{rated_rpm} * 60 * hours;
    return EfficiencyBp{count * 10000 / denom};
}

LengthCm length_cm(std::int64_t count, PickValue pick) {
    if (pick.picks_per_inch <= 0) {
        throw ConfigError("pick value is zero; set the thumbwheel before measuring");
    }
    if (count < 0) {
        throw ConfigError("rotation count cannot be negative");
    }
    const std::int64_t denom = std::int64_t{pick.picks_per_inch} * 3937;
    return LengthCm{count * 10000 / denom};
}

std::uint64_t event_time(const Event& ev) {
    return std::visit([](const auto& e) { return e.t_us; }, ev);
}

MonitorState make_monitor(int rated_rpm, std::vector<ShiftConfig> shifts,
                          ThumbwheelState thumbwheel) {
    if (rated_rpm < 1 || rated_rpm > kMaxShaftRpm) {
        throw ConfigError("rated rpm must be in 1..999");
    }
    if (shifts.empty() || shifts.size() > 3) {
        throw ConfigError("configure between one and three shifts");
    }
    for (std::size_t i = 0; i < shifts.size(); ++i) {
        for (std::size_t j = i + 1; j < shifts.size(); ++j) {
            if (shifts[i].shift_id == shifts[j].shift_id) {
                throw ConfigError("duplicate shift id in configuration");
            }
        }
    }
    for (auto w : thumbwheel.wheels) {
        if (w > 9) {
            throw ConfigError("initial thumbwheel digits must be 0..9");
        }
    }
    MonitorState st;
    st.rated_rpm = rated_rpm;
    st.buffers.reserve(shifts.size());
    for (const auto& s : shifts) {
        st.buffers.push_back(make_buffer(s)); // validates hours
    }
    st.shifts = std::move(shifts);
    st.active_shift = st.shifts.front().shift_id;
    st.thumbwheel = thumbwheel;
    return st;
}

namespace {

std::size_t index_for(const MonitorState& st, ShiftId id) {
    for (std::size_t i = 0; i < st.shifts.size(); ++i) {
        if (st.shifts[i].shift_id == id) {
            return i;
        }
    }
    throw ConfigError(std::string("shift ") + shift_letter(id) + " is not configured");
}

} // namespace

const RotationBuffer& buffer_for(const MonitorState& state, ShiftId id) {
    return state.buffers[index_for(state, id)];
}

DisplayContent display_content(const MonitorState& state) {
    if (const auto* hold = std::get_if<HoldDisplay>(&state.display)) {
        if (hold->eff) {
            return ShowEfficiency{*hold->eff};
        }
        return ShowError{};
    }
    const auto pick = bcd_to_binary(state.thumbwheel);
    if (pick.picks_per_inch == 0) {
        return ShowError{};
    }
    return ShowMeters{length_cm(buffer_for(state, state.active_shift).count, pick)};
}

StepResult monitor_step(const MonitorState& state, const Event& ev) {
    const auto t = event_time(ev);
    if (t < state.last_event_us) {
        throw ConfigError("monitor events must carry non-decreasing timestamps");
    }

    StepResult res{state, {}};
    MonitorState& st = res.state;
    Effects& fx = res.effects;
    st.last_event_us = t;

    if (std::holds_alternative<RotationEdge>(ev)) {
        auto& buf = st.buffers[index_for(st, st.active_shift)];
        buf = count_rotation(buf);
    } else if (const auto* sel = std::get_if<SelectShift>(&ev)) {
        index_for(st, sel->shift_id); // reject unconfigured shifts
        st.active_shift = sel->shift_id;
    } else if (std::holds_alternative<EfficiencyButton>(ev)) {
        const auto idx = index_for(st, st.active_shift);
        const auto& buf = st.buffers[idx];
        const auto& cfg = st.shifts[idx];
        const auto pick = bcd_to_binary(st.thumbwheel);
        if (pick.picks_per_inch == 0) {
            st.display = HoldDisplay{t + kEfficiencyHoldUs, std::nullopt};
            fx.error = "efficiency request rejected: pick value is zero";
        } else {
            ShiftRecord rec;
            rec.shift_id = st.active_shift;
            rec.count = buf.count;
            rec.eff_bp = efficiency_bp(buf.count, st.rated_rpm, cfg.hours);
            rec.len_cm = length_cm(buf.count, pick);
            rec.pick = pick.picks_per_inch;
            rec.rated_rpm = st.rated_rpm;
            rec.hours = cfg.hours;
            fx.record = rec;
            fx.tx = uart::frame_record(rec);
            st.pending_tx.insert(st.pending_tx.end(), fx.tx.begin(), fx.tx.end());
            st.display = HoldDisplay{t + kEfficiencyHoldUs, rec.eff_bp};
        }
    } else if (const auto* set = std::get_if<SetThumbwheel>(&ev)) {
        ThumbwheelState next{set->wheels};
        bcd_to_binary(next); // BcdError propagates, state untouched
        st.thumbwheel = next;
    } else if (std::holds_alternative<Tick>(ev)) {
        if (const auto* hold = std::get_if<HoldDisplay>(&st.display)) {
            if (t >= hold->until_us) {
                st.display = LiveMeters{};
            }
        }
    }

    fx.display = display_content(st);
    return res;
}

std::vector<std::uint8_t> drain_tx(MonitorState& state) {
    std::vector<std::uint8_t> out;
    out.swap(state.pending_tx);
    return out;
}

} // namespace loom::soc
