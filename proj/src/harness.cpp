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

#include "zotfs/harness.hpp"

#include "zotfs/zak.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace zotfs {

namespace {

constexpr std::uint64_t kStreamBits = 0;
constexpr std::uint64_t kStreamNoise = 1;
constexpr std::int64_t kPadChips = 128;

} // namespace

Transceiver::Transceiver(ExperimentConfig cfg)
    : cfg_(std::move(cfg)),
      layout_((cfg_.validate(), build_layout(cfg_.frame, cfg_.tau_max, cfg_.dt_margin, cfg_.outer_guard_rows()))),
      shaper_(cfg_.frame, cfg_.shape, cfg_.Q),
      constellation_(cfg_.modulation),
      preamble_(make_preamble(cfg_.sync.preamble_length, cfg_.sync.root)),
      pilot_amp_(db_to_amplitude(cfg_.pilot_boost_db))
{
    reference_ = shaped_reference(preamble_, shaper_);
    preamble_q0_ = -shaper_.window_half_extent() - cfg_.sync.gap - cfg_.sync.preamble_length;
}

bool Transceiver::sends_preamble() const
{
    return cfg_.sync.enabled || cfg_.cfo_correction == CfoCorrection::TimeDomain;
}

AnalogSignal Transceiver::transmit(const DDGrid& s_dd) const
{
    AnalogSignal tx = shaper_.synthesize(idzt(s_dd, cfg_.frame.B));
    if (sends_preamble())
        accumulate(tx, shaper_.shape_chips(preamble_.samples, preamble_q0_));
    const std::int64_t pad = kPadChips * shaper_.Q();
    CVec padded(tx.samples.size() + static_cast<std::size_t>(2 * pad), cd{});
    std::copy(tx.samples.begin(), tx.samples.end(), padded.begin() + pad);
    tx.samples = std::move(padded);
    tx.start -= pad;
    return tx;
}

DDGrid Transceiver::demodulate(const AnalogSignal& aligned) const
{
    const AnalogSignal y = shaper_.matched_filter(aligned);
    return dzt(shaper_.sample_and_periodize(y), cfg_.frame.M, cfg_.frame.N, GridRole::Received);
}

TrialReport Transceiver::run(double snr_db, std::uint64_t trial_index, const TrialOptions& options) const
{
    TrialReport rep;
    rep.trial_index = trial_index;
    rep.snr_db = snr_db;
    rep.seed = derive_seed(cfg_.seed, trial_index);

    Rng bit_rng(derive_seed(cfg_.seed, trial_index, kStreamBits));
    const std::size_t nbits = layout_.data_cells.size() * static_cast<std::size_t>(constellation_.bits_per_symbol());
    Bits bits(nbits);
    for (std::size_t i = 0; i < nbits; i += 64) {
        std::uint64_t word = bit_rng();
        for (std::size_t b = i; b < std::min(nbits, i + 64); ++b, word >>= 1)
            bits[b] = static_cast<std::uint8_t>(word & 1u);
    }
    rep.bits = nbits;

    const DDGrid s_dd = map_bits(bits, constellation_, layout_, pilot_amp_);
    const AnalogSignal tx = transmit(s_dd);

    Rng noise_rng(derive_seed(cfg_.seed, trial_index, kStreamNoise));
    AnalogSignal rx = apply_paths(tx, cfg_.channel.paths);
    rx = apply_impairments(rx, cfg_.channel.impairments, 0.0, noise_rng);

    // Received SNR reference: mean power over t in [-T/2, T/2).
    const std::int64_t half = static_cast<std::int64_t>(cfg_.frame.size() / 2) * shaper_.Q();
    double power = 0.0;
    for (std::int64_t n = -half; n < half; ++n)
        power += std::norm(rx.at(n));
    rep.signal_power = power / static_cast<double>(2 * half);
    rep.noise_psd = std::isinf(snr_db) && snr_db > 0 ? 0.0 : rep.signal_power * std::pow(10.0, -snr_db / 10.0);
    add_noise(rx, rep.noise_psd, noise_rng);

    // Timing and carrier offset handling.
    SyncResult sync;
    sync.start_index = preamble_start();
    sync.detected = true;
    if (cfg_.sync.enabled) {
        sync = detect_timing(rx, reference_, cfg_.sync.threshold, cfg_.sync.segments);
        if (!sync.detected) {
            rep.sync = sync;
            rep.sync_failed = true;
            rep.bit_errors = nbits / 2;
            if (options.keep_waveform)
                rep.waveform = std::move(rx);
            return rep;
        }
    }
    if (cfg_.cfo_correction == CfoCorrection::TimeDomain) {
        const CVec tone = despread_preamble(rx, preamble_, shaper_, sync.start_index);
        sync.cfo_hat = kay_cfo(tone, cfg_.frame.B);
    }
    rep.sync = sync;
    AnalogSignal aligned = rx;
    if (cfg_.sync.enabled || sync.cfo_hat != 0.0) {
        aligned = correct(rx, sync);
        aligned.start = preamble_start();
    }

    rep.received = demodulate(aligned);
    const SupportRegion support = SupportRegion::for_kind(cfg_.support, layout_);
    rep.channel = estimate(rep.received, layout_, support, pilot_amp_);

    const double genie = rep.noise_psd / shaper_.Q();
    rep.noise_var = genie;
    if (cfg_.noise_var == NoiseVarMode::Guard) {
        // Falls back to the genie value when the support leaves no guard rows.
        if (auto est = estimate_noise_var(rep.received, layout_, support))
            rep.noise_var = *est;
    }
    // Noiseless runs still get a small regularizer (40 dB per-cell SNR):
    // pilot-region taps carry data leakage, and without it the normal
    // equations can be too ill conditioned for CG.
    const double reg = std::max(rep.noise_var, 1e-4);

    // Hard decisions do not need the library's default residual; stricter
    // targets can stall on round-off when the regularizer is this small.
    MmseOptions mmse_opt;
    mmse_opt.tolerance = 1e-6;
    const ZakDomainOperator H(rep.channel);
    rep.equalized = mmse_equalize(rep.received, H, reg, mmse_opt);
    const Bits decided = demap_symbols(rep.equalized, layout_, constellation_);
    for (std::size_t i = 0; i < nbits; ++i)
        rep.bit_errors += decided[i] != bits[i];
    rep.data_symbols.reserve(layout_.data_cells.size());
    for (const Cell& c : layout_.data_cells)
        rep.data_symbols.push_back(rep.equalized(c.k, c.l));
    if (options.keep_waveform)
        rep.waveform = std::move(rx);
    return rep;
}

TrialReport run_trial(const ExperimentConfig& cfg, double snr_db, std::uint64_t trial_index, const TrialOptions& options)
{
    return Transceiver(cfg).run(snr_db, trial_index, options);
}

SweepResult sweep(const ExperimentConfig& cfg)
{
    const Transceiver trx(cfg);
    const std::size_t npts = cfg.snr_db.size();
    const std::size_t ntrials = static_cast<std::size_t>(cfg.trials);
    const std::size_t ntasks = npts * ntrials;

    struct Outcome {
        std::uint64_t errors = 0;
        std::uint64_t bits = 0;
    };
    std::vector<Outcome> outcomes(ntasks);
    std::vector<std::vector<cd>> constellations(npts);

    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::size_t err_task = ntasks;
    std::exception_ptr err;

    auto worker = [&] {
        for (;;) {
            const std::size_t task = next.fetch_add(1);
            if (task >= ntasks)
                return;
            const std::size_t p = task / ntrials;
            const std::size_t t = task % ntrials;
            try {
                TrialReport r = trx.run(cfg.snr_db[p], t);
                outcomes[task] = {r.bit_errors, r.bits};
                if (t == 0)
                    constellations[p] = std::move(r.data_symbols);
            } catch (...) {
                // Report the failure of the lowest task index so the error
                // does not depend on scheduling.
                std::lock_guard lock(err_mutex);
                if (task < err_task) {
                    err_task = task;
                    err = std::current_exception();
                }
            }
        }
    };

    const int nworkers = std::max(1, std::min<int>(cfg.workers, static_cast<int>(ntasks)));
    if (nworkers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(nworkers));
        for (int i = 0; i < nworkers; ++i)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }
    if (err)
        std::rethrow_exception(err);

    SweepResult res;
    res.curve.label = curve_label(cfg);
    for (std::size_t p = 0; p < npts; ++p) {
        std::uint64_t errors = 0;
        std::uint64_t bits = 0;
        for (std::size_t t = 0; t < ntrials; ++t) {
            errors += outcomes[p * ntrials + t].errors;
            bits += outcomes[p * ntrials + t].bits;
        }
        res.curve.points.push_back(make_ber_point(cfg.snr_db[p], errors, bits, cfg.trials));
    }
    res.constellations = std::move(constellations);
    return res;
}

std::string curve_label(const ExperimentConfig& cfg)
{
    std::ostringstream os;
    os << to_string(cfg.shape.family);
    if (cfg.shape.family == PulseFamily::Rrc)
        os << " beta=" << cfg.shape.beta;
    os << ", " << cfg.modulation << "-QAM";
    return os.str();
}

void write_sweep_outputs(const ExperimentConfig& cfg, const SweepResult& result)
{
    if (!cfg.output.csv.empty())
        write_text_file(cfg.output.csv, format_csv(result.curve));
    if (!cfg.output.svg.empty()) {
        const std::vector<BerCurve> curves{result.curve};
        write_text_file(cfg.output.svg, render_ber_svg(curves, "BER vs SNR"));
    }
    if (!cfg.output.constellation_prefix.empty()) {
        const Constellation c(cfg.modulation);
        for (std::size_t p = 0; p < result.curve.points.size(); ++p) {
            const double snr = result.curve.points[p].snr_db;
            std::ostringstream snr_text;
            if (std::isinf(snr))
                snr_text << "inf";
            else
                snr_text << snr;
            const std::string path = cfg.output.constellation_prefix + snr_text.str() + "dB.svg";
            const std::string title = curve_label(cfg) + ", SNR " + snr_text.str() + " dB";
            write_text_file(path, render_constellation_svg(result.constellations[p], c.points(), title));
        }
    }
}

} // namespace zotfs
