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
#include "zotfs/config.hpp"
#include "zotfs/dd_frame.hpp"
#include "zotfs/estimation.hpp"
#include "zotfs/report.hpp"
#include "zotfs/sync.hpp"
#include "zotfs/waveform.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace zotfs {

struct TrialOptions {
    bool keep_waveform = false; // store the received waveform in the report
};

struct TrialReport {
    std::uint64_t trial_index = 0;
    double snr_db = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t bit_errors = 0;
    std::uint64_t bits = 0;
    bool sync_failed = false;
    SyncResult sync;
    double signal_power = 0.0; // mean |r|^2 over the frame window, before noise
    double noise_psd = 0.0;    // per-sample noise variance at rate QB
    double noise_var = 0.0;    // per-cell variance handed to the equalizer
    DDGrid received;
    DDGrid equalized;
    EffectiveChannelEstimate channel;
    std::vector<cd> data_symbols; // equalized data cells, layout order
    std::optional<AnalogSignal> waveform;
};

/// Everything that depends only on the configuration: layout, filters,
/// preamble. Immutable and shared by all trials of a sweep.
class Transceiver {
public:
    explicit Transceiver(ExperimentConfig cfg);

    const ExperimentConfig& config() const { return cfg_; }
    const FrameLayout& layout() const { return layout_; }
    const PulseShaper& shaper() const { return shaper_; }
    const Constellation& constellation() const { return constellation_; }
    const Preamble& preamble() const { return preamble_; }
    double pilot_amp() const { return pilot_amp_; }
    bool sends_preamble() const;
    /// Nominal absolute sample index of the first preamble chip.
    std::int64_t preamble_start() const { return preamble_q0_ * shaper_.Q(); }

    /// Frame waveform, plus the preamble when one is sent, zero padded.
    AnalogSignal transmit(const DDGrid& s_dd) const;

    /// Matched filter, sampling, periodization and DZT of a time-aligned signal.
    DDGrid demodulate(const AnalogSignal& aligned) const;

    /// Runs one trial. Seeds depend on (config seed, trial_index) only, so
    /// the same index reuses its bits and noise shape at every SNR.
    TrialReport run(double snr_db, std::uint64_t trial_index, const TrialOptions& options = {}) const;

private:
    ExperimentConfig cfg_;
    FrameLayout layout_;
    PulseShaper shaper_;
    Constellation constellation_;
    Preamble preamble_;
    CVec reference_;
    double pilot_amp_;
    std::int64_t preamble_q0_;
};

TrialReport run_trial(const ExperimentConfig& cfg, double snr_db, std::uint64_t trial_index,
                      const TrialOptions& options = {});

struct SweepResult {
    BerCurve curve;
    std::vector<std::vector<cd>> constellations; // equalized data of trial 0, per SNR point
};

/// Monte-Carlo sweep over cfg.snr_db using cfg.workers threads. The result is
/// independent of the worker count.
SweepResult sweep(const ExperimentConfig& cfg);

/// CSV, BER chart and constellation plots at the paths named in cfg.output.
void write_sweep_outputs(const ExperimentConfig& cfg, const SweepResult& result);

std::string curve_label(const ExperimentConfig& cfg);

} // namespace zotfs
