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

#pragma once

#include "zotfs/channel.hpp"
#include "zotfs/dd_frame.hpp"
#include "zotfs/estimation.hpp"
#include "zotfs/waveform.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace zotfs {

/// Invalid or unreadable experiment configuration. The message names the
/// offending field (e.g. "frame.tau_p: ...").
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class CfoCorrection { TimeDomain, ChannelFolded };
enum class NoiseVarMode { Genie, Guard };

struct SyncConfig {
    bool enabled = true;
    int preamble_length = 256;
    int root = 25;
    int gap = 64;        // zero chips between preamble and frame window
    double threshold = 0.3;
    int segments = 8;    // non-coherent correlation pieces
};

struct OutputConfig {
    std::string csv;
    std::string svg;
    std::string constellation_prefix; // one "<prefix><snr>dB.svg" per SNR point
};

inline constexpr int kConfigVersion = 1;

struct ExperimentConfig {
    FrameParams frame = FrameParams::from_doppler_period(64, 64, 30e3);
    double tau_max = 2.0 / (64 * 30e3);
    double dt_margin = 1.0 / (64 * 30e3);
    PulseShape shape = PulseShape::rrc(0.5);
    int Q = 4;
    ChannelSpec channel;
    int modulation = 4;
    std::vector<double> snr_db{25.0};
    int trials = 1;
    SyncConfig sync;
    CfoCorrection cfo_correction = CfoCorrection::TimeDomain;
    SupportKind support = SupportKind::C1;
    double pilot_boost_db = 10.0;
    NoiseVarMode noise_var = NoiseVarMode::Genie;
    std::uint64_t seed = 1;
    int workers = 1;
    OutputConfig output;

    /// Throws ConfigError.
    void validate() const;

    /// Extra guard rows the support needs: none for C1; for C2 the widest
    /// spill of a data row into [kappa1, kappa4), ceil(B(tau_max+dt)) + 1.
    int outer_guard_rows() const;
};

/// 64 x 64 frame at 30 kHz, RRC 0.5, Q = 4, a single unit path.
ExperimentConfig default_config();

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string to_json(const ExperimentConfig& cfg);

std::string_view to_string(CfoCorrection mode);
std::string_view to_string(NoiseVarMode mode);

} // namespace zotfs
