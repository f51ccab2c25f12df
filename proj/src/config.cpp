// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "zotfs/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

namespace zotfs {

using nlohmann::json;

std::string_view to_string(CfoCorrection mode)
{
    return mode == CfoCorrection::TimeDomain ? "time_domain" : "channel_folded";
}

std::string_view to_string(NoiseVarMode mode)
{
    return mode == NoiseVarMode::Genie ? "genie" : "guard";
}

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& why)
{
    throw ConfigError(field + ": " + why);
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed)
{
    if (!obj.is_object())
        fail(where, "expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& item : obj.items()) {
        if (!ok.count(item.key()))
            fail(where.empty() ? item.key() : where + "." + item.key(), "unknown key");
    }
}

std::string join(const std::string& where, const char* key)
{
    return where.empty() ? std::string(key) : where + "." + key;
}

double get_number(const json& obj, const std::string& where, const char* key, double fallback)
{
    if (!obj.contains(key))
        return fallback;
    const json& v = obj.at(key);
    if (!v.is_number())
        fail(join(where, key), "expected a number");
    return v.get<double>();
}

std::int64_t get_int(const json& obj, const std::string& where, const char* key, std::int64_t fallback)
{
    if (!obj.contains(key))
        return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer())
        fail(join(where, key), "expected an integer");
    return v.get<std::int64_t>();
}

bool get_bool(const json& obj, const std::string& where, const char* key, bool fallback)
{
    if (!obj.contains(key))
        return fallback;
    const json& v = obj.at(key);
    if (!v.is_boolean())
        fail(join(where, key), "expected true or false");
    return v.get<bool>();
}

std::string get_string(const json& obj, const std::string& where, const char* key, const std::string& fallback)
{
    if (!obj.contains(key))
        return fallback;
    const json& v = obj.at(key);
    if (!v.is_string())
        fail(join(where, key), "expected a string");
    return v.get<std::string>();
}

// A quantity given either in physical units (`key`) or in bins (`key_bins`).
double get_scaled(const json& obj, const std::string& where, const char* key, double bin, double fallback)
{
    const std::string bins_key = std::string(key) + "_bins";
    const bool has_plain = obj.contains(key);
    const bool has_bins = obj.contains(bins_key);
    if (has_plain && has_bins)
        fail(join(where, key), "give either " + std::string(key) + " or " + bins_key + ", not both");
    if (has_bins)
        return get_number(obj, where, bins_key.c_str(), 0.0) * bin;
    return get_number(obj, where, key, fallback);
}

cd get_gain(const json& obj, const std::string& where)
{
    if (!obj.contains("gain"))
        return {1.0, 0.0};
    const json& v = obj.at("gain");
    if (v.is_number())
        return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    fail(where + ".gain", "expected a number or [re, im]");
}

} // namespace

ExperimentConfig default_config()
{
    ExperimentConfig cfg;
    cfg.channel.paths = {PathSpec{}};
    cfg.channel.tau_max = cfg.tau_max;
    cfg.channel.nu_max = cfg.frame.nu_p / 2.0;
    return cfg;
}

int ExperimentConfig::outer_guard_rows() const
{
    if (support != SupportKind::C2)
        return 0;
    return guard_spread_bins(frame, tau_max, dt_margin) + 1;
}

void ExperimentConfig::validate() const
{
    try {
        frame.validate();
        shape.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (Q < 2)
        fail("pulse.Q", "oversampling factor must be >= 2");
    if (Q < 4)
        fail("pulse.Q", "the channel's fractional-delay interpolator needs Q >= 4");
    if (!(tau_max >= 0.0) || !std::isfinite(tau_max))
        fail("layout.tau_max", "must be a finite non-negative delay");
    if (!(dt_margin >= 0.0) || !std::isfinite(dt_margin))
        fail("layout.dt_margin", "must be a finite non-negative delay");
    try {
        (void)build_layout(frame, tau_max, dt_margin, outer_guard_rows());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("layout: ") + e.what());
    }
    try {
        channel.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (modulation != 4 && modulation != 16)
        fail("modulation", "must be 4 or 16");
    if (snr_db.empty())
        fail("snr_db", "at least one SNR point is required");
    for (double s : snr_db)
        if (std::isnan(s))
            fail("snr_db", "values must be numbers");
    if (trials < 1)
        fail("trials", "must be >= 1");
    if (workers < 1)
        fail("workers", "must be >= 1");
    if (sync.preamble_length < 2)
        fail("sync.preamble_length", "must be >= 2");
    if (sync.root < 1 || std::gcd(sync.root, sync.preamble_length) != 1)
        fail("sync.root", "must be a positive integer coprime to the preamble length");
    if (sync.gap < 0)
        fail("sync.gap", "must be >= 0");
    if (!(sync.threshold > 0.0 && sync.threshold <= 1.0))
        fail("sync.threshold", "must lie in (0, 1]");
    if (sync.segments < 1 || sync.segments > sync.preamble_length)
        fail("sync.segments", "must lie in [1, preamble_length]");
    if (support == SupportKind::Custom)
        fail("support", "must be C1 or C2");
    if (!std::isfinite(pilot_boost_db))
        fail("pilot_boost_db", "must be finite");
}

ExperimentConfig parse_config(const std::string& text)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: not valid JSON (") + e.what() + ")");
    }
    check_keys(root, "", {"version", "frame", "layout", "pulse", "channel", "modulation", "snr_db", "trials", "sync",
                          "cfo_correction", "support", "pilot_boost_db", "noise_var", "seed", "workers", "output"});
    if (!root.contains("version"))
        fail("version", "missing (expected " + std::to_string(kConfigVersion) + ")");
    if (get_int(root, "", "version", 0) != kConfigVersion)
        fail("version", "unsupported config version (expected " + std::to_string(kConfigVersion) + ")");

    ExperimentConfig cfg = default_config();

    if (root.contains("frame")) {
        const json& f = root.at("frame");
        check_keys(f, "frame", {"M", "N", "nu_p", "tau_p"});
        const auto M = get_int(f, "frame", "M", cfg.frame.M);
        const auto N = get_int(f, "frame", "N", cfg.frame.N);
        if (M <= 0 || M > 4096)
            fail("frame.M", "must lie in [1, 4096]");
        if (N <= 0 || N > 4096)
            fail("frame.N", "must lie in [1, 4096]");
        const double nu_p = get_number(f, "frame", "nu_p", cfg.frame.nu_p);
        if (!(nu_p > 0.0))
            fail("frame.nu_p", "must be positive");
        cfg.frame = FrameParams::from_doppler_period(static_cast<int>(M), static_cast<int>(N), nu_p);
        if (f.contains("tau_p")) {
            cfg.frame.tau_p = get_number(f, "frame", "tau_p", cfg.frame.tau_p);
            cfg.frame.T = cfg.frame.N * cfg.frame.tau_p;
        }
    }
    const double delay_bin = 1.0 / cfg.frame.B;
    const double doppler_bin = cfg.frame.nu_p / cfg.frame.N;
    cfg.tau_max = 2.0 * delay_bin;
    cfg.dt_margin = delay_bin;

    if (root.contains("layout")) {
        const json& l = root.at("layout");
        check_keys(l, "layout", {"tau_max", "tau_max_bins", "dt_margin", "dt_margin_bins"});
        cfg.tau_max = get_scaled(l, "layout", "tau_max", delay_bin, cfg.tau_max);
        cfg.dt_margin = get_scaled(l, "layout", "dt_margin", delay_bin, cfg.dt_margin);
    }

    if (root.contains("pulse")) {
        const json& p = root.at("pulse");
        check_keys(p, "pulse", {"family", "beta", "w1_span", "w1_taper", "Q"});
        const std::string family = get_string(p, "pulse", "family", "rrc");
        if (family == "rrc")
            cfg.shape = PulseShape::rrc(get_number(p, "pulse", "beta", 0.5));
        else if (family == "sinc") {
            if (p.contains("beta"))
                fail("pulse.beta", "not used by the sinc family");
            cfg.shape = PulseShape::sinc();
        } else
            fail("pulse.family", "must be \"rrc\" or \"sinc\"");
        cfg.shape.w1_span = get_number(p, "pulse", "w1_span", cfg.shape.w1_span);
        cfg.shape.w1_taper = get_number(p, "pulse", "w1_taper", cfg.shape.w1_taper);
        cfg.Q = static_cast<int>(get_int(p, "pulse", "Q", cfg.Q));
    }

    cfg.channel.tau_max = cfg.tau_max;
    cfg.channel.nu_max = cfg.frame.nu_p / 2.0;
    if (root.contains("channel")) {
        const json& c = root.at("channel");
        check_keys(c, "channel", {"paths", "impairments", "nu_max", "nu_max_bins"});
        cfg.channel.nu_max = get_scaled(c, "channel", "nu_max", doppler_bin, cfg.frame.nu_p / 2.0);
        if (c.contains("paths")) {
            const json& paths = c.at("paths");
            if (!paths.is_array())
                fail("channel.paths", "expected an array");
            cfg.channel.paths.clear();
            for (std::size_t i = 0; i < paths.size(); ++i) {
                const std::string where = "channel.paths[" + std::to_string(i) + "]";
                const json& p = paths[i];
                check_keys(p, where, {"gain", "delay", "delay_bins", "doppler", "doppler_bins"});
                PathSpec ps;
                ps.gain = get_gain(p, where);
                ps.delay = get_scaled(p, where, "delay", delay_bin, 0.0);
                ps.doppler = get_scaled(p, where, "doppler", doppler_bin, 0.0);
                cfg.channel.paths.push_back(ps);
            }
        }
        if (c.contains("impairments")) {
            const json& im = c.at("impairments");
            const std::string where = "channel.impairments";
            check_keys(im, where, {"dt", "dt_bins", "eps0", "eps0_bins", "phi"});
            cfg.channel.impairments.dt = get_scaled(im, where, "dt", delay_bin, 0.0);
            cfg.channel.impairments.eps0 = get_scaled(im, where, "eps0", doppler_bin, 0.0);
            cfg.channel.impairments.phi = get_number(im, where, "phi", 0.0);
        }
    }

    cfg.modulation = static_cast<int>(get_int(root, "", "modulation", cfg.modulation));

    if (root.contains("snr_db")) {
        const json& s = root.at("snr_db");
        if (!s.is_array())
            fail("snr_db", "expected an array");
        cfg.snr_db.clear();
        for (const json& v : s) {
            if (v.is_number())
                cfg.snr_db.push_back(v.get<double>());
            else if (v.is_string() && v.get<std::string>() == "inf")
                cfg.snr_db.push_back(std::numeric_limits<double>::infinity());
            else
                fail("snr_db", "entries must be numbers or \"inf\"");
        }
    }
    cfg.trials = static_cast<int>(get_int(root, "", "trials", cfg.trials));

    if (root.contains("sync")) {
        const json& s = root.at("sync");
        check_keys(s, "sync", {"enabled", "preamble_length", "root", "gap", "threshold", "segments"});
        cfg.sync.enabled = get_bool(s, "sync", "enabled", cfg.sync.enabled);
        cfg.sync.preamble_length = static_cast<int>(get_int(s, "sync", "preamble_length", cfg.sync.preamble_length));
        cfg.sync.root = static_cast<int>(get_int(s, "sync", "root", cfg.sync.root));
        cfg.sync.gap = static_cast<int>(get_int(s, "sync", "gap", cfg.sync.gap));
        cfg.sync.threshold = get_number(s, "sync", "threshold", cfg.sync.threshold);
        cfg.sync.segments = static_cast<int>(get_int(s, "sync", "segments", cfg.sync.segments));
    }

    const std::string mode = get_string(root, "", "cfo_correction", "time_domain");
    if (mode == "time_domain")
        cfg.cfo_correction = CfoCorrection::TimeDomain;
    else if (mode == "channel_folded")
        cfg.cfo_correction = CfoCorrection::ChannelFolded;
    else
        fail("cfo_correction", "must be \"time_domain\" or \"channel_folded\"");

    const std::string support = get_string(root, "", "support", "C1");
    if (support == "C1")
        cfg.support = SupportKind::C1;
    else if (support == "C2")
        cfg.support = SupportKind::C2;
    else
        fail("support", "must be \"C1\" or \"C2\"");

    cfg.pilot_boost_db = get_number(root, "", "pilot_boost_db", cfg.pilot_boost_db);

    const std::string nv = get_string(root, "", "noise_var", "genie");
    if (nv == "genie")
        cfg.noise_var = NoiseVarMode::Genie;
    else if (nv == "guard")
        cfg.noise_var = NoiseVarMode::Guard;
    else
        fail("noise_var", "must be \"genie\" or \"guard\"");

    if (root.contains("seed")) {
        const json& s = root.at("seed");
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0))
            fail("seed", "expected a non-negative integer");
        cfg.seed = s.get<std::uint64_t>();
    }
    cfg.workers = static_cast<int>(get_int(root, "", "workers", cfg.workers));

    if (root.contains("output")) {
        const json& o = root.at("output");
        check_keys(o, "output", {"csv", "svg", "constellation_prefix"});
        cfg.output.csv = get_string(o, "output", "csv", "");
        cfg.output.svg = get_string(o, "output", "svg", "");
        cfg.output.constellation_prefix = get_string(o, "output", "constellation_prefix", "");
    }

    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("config: cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string to_json(const ExperimentConfig& cfg)
{
    json j;
    j["version"] = kConfigVersion;
    j["frame"] = {{"M", cfg.frame.M}, {"N", cfg.frame.N}, {"nu_p", cfg.frame.nu_p}, {"tau_p", cfg.frame.tau_p}};
    j["layout"] = {{"tau_max", cfg.tau_max}, {"dt_margin", cfg.dt_margin}};
    json pulse = {{"family", std::string(to_string(cfg.shape.family))}, {"w1_span", cfg.shape.w1_span},
                  {"w1_taper", cfg.shape.w1_taper}, {"Q", cfg.Q}};
    if (cfg.shape.family == PulseFamily::Rrc)
        pulse["beta"] = cfg.shape.beta;
    j["pulse"] = pulse;
    json paths = json::array();
    for (const auto& p : cfg.channel.paths)
        paths.push_back({{"gain", {p.gain.real(), p.gain.imag()}}, {"delay", p.delay}, {"doppler", p.doppler}});
    const auto& im = cfg.channel.impairments;
    j["channel"] = {{"paths", paths},
                    {"impairments", {{"dt", im.dt}, {"eps0", im.eps0}, {"phi", im.phi}}},
                    {"nu_max", cfg.channel.nu_max}};
    j["modulation"] = cfg.modulation;
    json snr = json::array();
    for (double s : cfg.snr_db) {
        if (std::isinf(s))
            snr.push_back("inf");
        else
            snr.push_back(s);
    }
    j["snr_db"] = snr;
    j["trials"] = cfg.trials;
    j["sync"] = {{"enabled", cfg.sync.enabled},
                 {"preamble_length", cfg.sync.preamble_length},
                 {"root", cfg.sync.root},
                 {"gap", cfg.sync.gap},
                 {"threshold", cfg.sync.threshold},
                 {"segments", cfg.sync.segments}};
    j["cfo_correction"] = std::string(to_string(cfg.cfo_correction));
    j["support"] = std::string(to_string(cfg.support));
    j["pilot_boost_db"] = cfg.pilot_boost_db;
    j["noise_var"] = std::string(to_string(cfg.noise_var));
    j["seed"] = cfg.seed;
    j["workers"] = cfg.workers;
    j["output"] = {{"csv", cfg.output.csv}, {"svg", cfg.output.svg}, {"constellation_prefix", cfg.output.constellation_prefix}};
    return j.dump(2);
}

} // namespace zotfs
