#include "loom/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "loom/errors.hpp"

namespace loom::sim {

using nlohmann::json;

std::uint64_t Scenario::total_duration_us() const {
    std::uint64_t total = 0;
    for (const auto& s : segments) {
        total += s.duration_us;
    }
    return total;
}

void validate(const Scenario& sc) {
    if (sc.rated_rpm < 1 || sc.rated_rpm > soc::kMaxShaftRpm) {
        throw ScenarioError("rated_rpm must be in 1..999");
    }
    if (sc.shifts.empty() || sc.shifts.size() > 3) {
        throw ScenarioError("shifts must list between one and three entries");
    }
    std::set<soc::ShiftId> seen;
    for (const auto& s : sc.shifts) {
        if (!seen.insert(s.shift_id).second) {
            throw ScenarioError("duplicate shift_id in shifts");
        }
        if (s.hours < 1 || s.hours > soc::kMaxShiftHours) {
            throw ScenarioError("shift hours must be in 1..12");
        }
    }
    for (auto w : sc.thumbwheel.wheels) {
        if (w > 9) {
            throw ScenarioError("thumbwheel wheels must be digits 0..9");
        }
    }
    uart::validate(sc.uart);
    signal::validate(sc.sensor);
    const double noise_limit = (sc.sensor.operate_mT - sc.sensor.release_mT) / 2.0;
    for (const auto& seg : sc.segments) {
        if (seg.duration_us == 0) {
            throw ScenarioError("segment duration must be positive");
        }
        if (seg.actual_rpm < 0 || seg.actual_rpm > soc::kMaxShaftRpm) {
            throw ScenarioError("segment actual_rpm must be in 0..999");
        }
        if (seg.noise_amp_mT < 0.0 || seg.noise_amp_mT >= noise_limit) {
            throw ScenarioError("noise_amp_mT must be below half the hysteresis window");
        }
    }
    const auto total = sc.total_duration_us();
    std::uint64_t prev_t = 0;
    for (const auto& ev : sc.events) {
        if (ev.t_us < prev_t) {
            throw ScenarioError("events must be ordered by time");
        }
        prev_t = ev.t_us;
        if (ev.t_us > total) {
            throw ScenarioError("event time beyond the scenario duration");
        }
        if (const auto* sel = std::get_if<SelectShiftAction>(&ev.action)) {
            if (!seen.count(sel->shift_id)) {
                throw ScenarioError("select_shift targets an unconfigured shift");
            }
        } else if (const auto* set = std::get_if<SetThumbwheelAction>(&ev.action)) {
            for (auto w : set->wheels) {
                if (w > 9) {
                    throw ScenarioError("set_thumbwheel wheels must be digits 0..9");
                }
            }
        }
    }
}

namespace {

[[noreturn]] void fail(const std::string& what) {
    throw ScenarioError("scenario: " + what);
}

void check_keys(const json& obj, const char* where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) {
        fail(std::string(where) + " must be a JSON object");
    }
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) {
            if (key == a) {
                ok = true;
                break;
            }
        }
        if (!ok) {
            fail(std::string("unknown field '") + key + "' in " + where);
        }
    }
}

int require_int(const json& obj, const char* where, const char* key, long long lo, long long hi) {
    if (!obj.contains(key)) {
        fail(std::string(where) + " is missing '" + key + "'");
    }
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) {
        fail(std::string("'") + key + "' in " + where + " must be an integer");
    }
    const auto n = v.get<long long>();
    if (n < lo || n > hi) {
        fail(std::string("'") + key + "' in " + where + " is out of range");
    }
    return static_cast<int>(n);
}

double require_number(const json& obj, const char* where, const char* key) {
    if (!obj.contains(key) || !obj.at(key).is_number()) {
        fail(std::string(where) + " needs numeric '" + key + "'");
    }
    return obj.at(key).get<double>();
}

std::uint64_t seconds_to_us(double s, const char* what) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
        fail(std::string(what) + " must be a non-negative number of seconds");
    }
    const double us = s * 1e6;
    if (us > 9.0e15) {
        fail(std::string(what) + " is implausibly large");
    }
    return static_cast<std::uint64_t>(std::llround(us));
}

soc::ShiftId require_shift_id(const json& obj, const char* where) {
    if (!obj.contains("shift_id") || !obj.at("shift_id").is_string()) {
        fail(std::string(where) + " needs a 'shift_id' string");
    }
    const auto s = obj.at("shift_id").get<std::string>();
    if (s.size() == 1) {
        if (const auto id = soc::shift_from_letter(s[0])) {
            return *id;
        }
    }
    fail(std::string(where) + ": shift_id must be \"A\", \"B\" or \"C\"");
}

std::array<std::uint8_t, 3> require_wheels(const json& obj, const char* where) {
    if (!obj.contains("wheels") || !obj.at("wheels").is_array() || obj.at("wheels").size() != 3) {
        fail(std::string(where) + " needs 'wheels' as an array of three digits");
    }
    std::array<std::uint8_t, 3> wheels{};
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& w = obj.at("wheels")[i];
        if (!w.is_number_integer() || w.get<long long>() < 0 || w.get<long long>() > 9) {
            fail(std::string(where) + ": each wheel must be a digit 0..9");
        }
        wheels[i] = static_cast<std::uint8_t>(w.get<long long>());
    }
    return wheels;
}

} // namespace

Scenario parse_scenario(std::string_view json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        fail(std::string("not valid JSON: ") + e.what());
    }
    check_keys(root, "scenario",
               {"seed", "rated_rpm", "shifts", "thumbwheel", "uart", "sensor", "segments",
                "events"});

    Scenario sc;
    if (root.contains("seed")) {
        if (!root.at("seed").is_number_unsigned()) {
            fail("'seed' must be a non-negative integer");
        }
        sc.seed = root.at("seed").get<std::uint64_t>();
    }
    sc.rated_rpm = require_int(root, "scenario", "rated_rpm", 1, soc::kMaxShaftRpm);

    if (!root.contains("shifts") || !root.at("shifts").is_array()) {
        fail("'shifts' must be an array");
    }
    for (const auto& s : root.at("shifts")) {
        check_keys(s, "shifts[]", {"shift_id", "hours"});
        soc::ShiftConfig cfg;
        cfg.shift_id = require_shift_id(s, "shifts[]");
        cfg.hours = require_int(s, "shifts[]", "hours", 1, soc::kMaxShiftHours);
        sc.shifts.push_back(cfg);
    }

    if (root.contains("thumbwheel")) {
        check_keys(root.at("thumbwheel"), "thumbwheel", {"wheels"});
        sc.thumbwheel.wheels = require_wheels(root.at("thumbwheel"), "thumbwheel");
    }
    if (root.contains("uart")) {
        check_keys(root.at("uart"), "uart", {"baud"});
        sc.uart.baud = static_cast<std::uint32_t>(
            require_int(root.at("uart"), "uart", "baud", uart::kMinBaud, uart::kMaxBaud));
    }
    if (root.contains("sensor")) {
        const auto& sensor = root.at("sensor");
        check_keys(sensor, "sensor", {"operate_mT", "release_mT"});
        sc.sensor.operate_mT = require_number(sensor, "sensor", "operate_mT");
        sc.sensor.release_mT = require_number(sensor, "sensor", "release_mT");
    }

    if (root.contains("segments")) {
        if (!root.at("segments").is_array()) {
            fail("'segments' must be an array");
        }
        for (const auto& s : root.at("segments")) {
            check_keys(s, "segments[]", {"duration_s", "actual_rpm", "noise_amp_mT"});
            Segment seg;
            seg.duration_us = seconds_to_us(require_number(s, "segments[]", "duration_s"),
                                            "segment duration_s");
            seg.actual_rpm = require_int(s, "segments[]", "actual_rpm", 0, soc::kMaxShaftRpm);
            if (s.contains("noise_amp_mT")) {
                seg.noise_amp_mT = require_number(s, "segments[]", "noise_amp_mT");
            }
            sc.segments.push_back(seg);
        }
    }

    if (root.contains("events")) {
        if (!root.at("events").is_array()) {
            fail("'events' must be an array");
        }
        for (const auto& e : root.at("events")) {
            check_keys(e, "events[]", {"t_s", "action", "shift_id", "wheels"});
            OperatorEvent ev;
            ev.t_us = seconds_to_us(require_number(e, "events[]", "t_s"), "event t_s");
            if (!e.contains("action") || !e.at("action").is_string()) {
                fail("events[] needs an 'action' string");
            }
            const auto action = e.at("action").get<std::string>();
            if (action == "select_shift") {
                ev.action = SelectShiftAction{require_shift_id(e, "select_shift event")};
            } else if (action == "efficiency_button") {
                if (e.contains("shift_id") || e.contains("wheels")) {
                    fail("efficiency_button takes no extra fields");
                }
                ev.action = EfficiencyButtonAction{};
            } else if (action == "set_thumbwheel") {
                if (e.contains("shift_id")) {
                    fail("set_thumbwheel takes no shift_id");
                }
                ev.action = SetThumbwheelAction{require_wheels(e, "set_thumbwheel event")};
            } else {
                fail("unknown action '" + action + "'");
            }
            if (action == "select_shift" && e.contains("wheels")) {
                fail("select_shift takes no wheels");
            }
            sc.events.push_back(ev);
        }
    }

    validate(sc);
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ScenarioError("cannot open scenario file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

} // namespace loom::sim
