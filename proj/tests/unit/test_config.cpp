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

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <string>

using namespace zotfs;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::string error_of(const std::string& text)
{
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST_CASE("defaults follow the reference frame")
{
    const ExperimentConfig cfg = parse_config(R"({"version": 1})");
    CHECK(cfg.frame.M == 64);
    CHECK(cfg.frame.N == 64);
    CHECK_THAT(cfg.frame.B, WithinRel(1.92e6, 1e-12));
    CHECK_THAT(cfg.frame.T, WithinRel(64.0 / 30e3, 1e-12));
    CHECK(cfg.shape.family == PulseFamily::Rrc);
    CHECK(cfg.Q == 4);
    CHECK(cfg.support == SupportKind::C1);
    CHECK(cfg.channel.paths.size() == 1);
    CHECK_NOTHROW(cfg.validate());
    CHECK_NOTHROW(default_config().validate());
}

TEST_CASE("bin-valued fields are scaled")
{
    const ExperimentConfig cfg = parse_config(R"({
        "version": 1,
        "frame": {"M": 32, "N": 16, "nu_p": 15000},
        "layout": {"tau_max_bins": 3, "dt_margin_bins": 1},
        "channel": {
            "paths": [{"gain": [0, 1], "delay_bins": 2, "doppler_bins": -1.5},
                      {"gain": 0.5, "delay": 1e-6, "doppler": 100}],
            "impairments": {"dt_bins": 0.5, "eps0_bins": 0.25, "phi": 0.1},
            "nu_max_bins": 4
        },
        "snr_db": [0, "inf"],
        "support": "C2",
        "cfo_correction": "channel_folded",
        "noise_var": "guard"
    })");
    const double db = 1.0 / cfg.frame.B;
    const double nb = 15000.0 / 16;
    CHECK_THAT(cfg.tau_max, WithinRel(3 * db, 1e-12));
    CHECK(cfg.channel.paths[0].gain == cd(0.0, 1.0));
    CHECK_THAT(cfg.channel.paths[0].delay, WithinRel(2 * db, 1e-12));
    CHECK_THAT(cfg.channel.paths[0].doppler, WithinRel(-1.5 * nb, 1e-12));
    CHECK(cfg.channel.paths[1].gain == cd(0.5, 0.0));
    CHECK_THAT(cfg.channel.impairments.dt, WithinRel(0.5 * db, 1e-12));
    CHECK_THAT(cfg.channel.impairments.eps0, WithinRel(0.25 * nb, 1e-12));
    CHECK_THAT(cfg.channel.nu_max, WithinRel(4 * nb, 1e-12));
    CHECK(std::isinf(cfg.snr_db[1]));
    CHECK(cfg.support == SupportKind::C2);
    CHECK(cfg.cfo_correction == CfoCorrection::ChannelFolded);
    CHECK(cfg.noise_var == NoiseVarMode::Guard);
}

TEST_CASE("serialization round trip")
{
    ExperimentConfig cfg = default_config();
    cfg.shape = PulseShape::sinc();
    cfg.snr_db = {10, 15.5};
    cfg.channel.paths.push_back({cd(0.1, -0.2), cfg.tau_max, -cfg.channel.nu_max});
    const ExperimentConfig back = parse_config(to_json(cfg));
    CHECK(to_json(back) == to_json(cfg));
    CHECK(back.shape.family == PulseFamily::Sinc);
}

TEST_CASE("errors name the offending field")
{
    CHECK_THAT(error_of(R"({"frame": {}})"), ContainsSubstring("version"));
    CHECK_THAT(error_of(R"({"version": 2})"), ContainsSubstring("version"));
    CHECK_THAT(error_of("{not json"), ContainsSubstring("JSON"));
    CHECK_THAT(error_of(R"({"version": 1, "frame": {"M": 64, "N": 64, "nu_p": 30000, "tau_p": 3.3e-5}})"),
               ContainsSubstring("frame.tau_p"));
    CHECK_THAT(error_of(R"({"version": 1, "pulse": {"family": "rrc", "rolloff": 0.3}})"),
               ContainsSubstring("pulse.rolloff"));
    CHECK_THAT(error_of(R"({"version": 1, "pulse": {"family": "sinc", "beta": 0.3}})"),
               ContainsSubstring("pulse.beta"));
    CHECK_THAT(error_of(R"({"version": 1, "pulse": {"family": "gauss"}})"), ContainsSubstring("pulse.family"));
    CHECK_THAT(error_of(R"({"version": 1, "pulse": {"Q": 2}})"), ContainsSubstring("Q"));
    CHECK_THAT(error_of(R"({"version": 1, "modulation": 8})"), ContainsSubstring("modulation"));
    CHECK_THAT(error_of(R"({"version": 1, "snr_db": []})"), ContainsSubstring("snr_db"));
    CHECK_THAT(error_of(R"({"version": 1, "support": "C3"})"), ContainsSubstring("support"));
    CHECK_THAT(error_of(R"({"version": 1, "channel": {"paths": [{"delay_bins": 9}]}})"),
               ContainsSubstring("channel.paths[0].delay"));
    CHECK_THAT(error_of(R"({"version": 1, "channel": {"paths": [{"delay": 0, "delay_bins": 0}]}})"),
               ContainsSubstring("channel.paths[0].delay"));
    CHECK_THAT(error_of(R"({"version": 1, "channel": {"paths": [{"gain": "x"}]}})"),
               ContainsSubstring("channel.paths[0].gain"));
    CHECK_THAT(error_of(R"({"version": 1, "trials": 0})"), ContainsSubstring("trials"));
    CHECK_THAT(error_of(R"({"version": 1, "seed": -1})"), ContainsSubstring("seed"));
    CHECK_THAT(error_of(R"({"version": 1, "sync": {"root": 2}})"), ContainsSubstring("sync.root"));
}

TEST_CASE("files are loaded and missing files reported")
{
    const std::filesystem::path data = ZOTFS_TEST_DATA;
    CHECK_NOTHROW(load_config(data / "small_loopback.json"));
    CHECK_THROWS_AS(load_config(data / "bad_tau_p.json"), ConfigError);
    CHECK_THROWS_AS(load_config(data / "unknown_key.json"), ConfigError);
    CHECK_THROWS_AS(load_config(data / "does_not_exist.json"), ConfigError);
}
