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

// zotfs: command-line front end for the simulator.
//
//   zotfs sweep  --config exp.json
//   zotfs trial  --config exp.json --index 3 --dump-dir out/ [--snr 20]
//   zotfs iq-info capture.zoiq
//   zotfs selftest
//
// Exit codes: 0 success, 1 configuration or usage error, 2 runtime failure.

#include "selftest.hpp"

#include "zotfs/config.hpp"
#include "zotfs/harness.hpp"
#include "zotfs/iq_file.hpp"
#include "zotfs/report.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace zotfs;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

int cmd_sweep(const std::string& config_path, int workers)
{
    ExperimentConfig cfg = load_config(config_path);
    if (workers > 0)
        cfg.workers = workers;
    const auto t0 = std::chrono::steady_clock::now();
    const SweepResult res = sweep(cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_sweep_outputs(cfg, res);
    std::cout << format_csv(res.curve);
    std::fprintf(stderr, "sweep: %zu point(s) x %d trial(s) in %.1f s\n", res.curve.points.size(), cfg.trials, secs);
    return kExitOk;
}

std::string grid_csv(const DDGrid& g, const std::vector<Cell>& cells)
{
    std::ostringstream os;
    os.precision(9);
    os << "k,l,re,im\n";
    for (const Cell& c : cells)
        os << c.k << "," << c.l << "," << g(c.k, c.l).real() << "," << g(c.k, c.l).imag() << "\n";
    return os.str();
}

int cmd_trial(const std::string& config_path, std::uint64_t index, const std::string& dump_dir,
              std::optional<double> snr)
{
    const ExperimentConfig cfg = load_config(config_path);
    const Transceiver trx(cfg);
    const double snr_db = snr ? *snr : cfg.snr_db.front();
    TrialOptions opt;
    opt.keep_waveform = true;
    const TrialReport r = trx.run(snr_db, index, opt);

    const fs::path dir(dump_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());

    nlohmann::json summary = {
        {"trial_index", r.trial_index},
        {"snr_db", std::isinf(snr_db) ? nlohmann::json("inf") : nlohmann::json(snr_db)},
        {"seed", r.seed},
        {"bit_errors", r.bit_errors},
        {"bits", r.bits},
        {"ber", r.bits ? static_cast<double>(r.bit_errors) / static_cast<double>(r.bits) : 0.0},
        {"sync_failed", r.sync_failed},
        {"sync", {{"start_index", r.sync.start_index}, {"cfo_hat_hz", r.sync.cfo_hat}, {"peak_metric", r.sync.peak_metric}}},
        {"signal_power", r.signal_power},
        {"noise_psd", r.noise_psd},
        {"noise_var", r.noise_var},
    };
    write_text_file(dir / "summary.json", summary.dump(2) + "\n");
    if (r.waveform)
        write_iq(dir / "received.zoiq", *r.waveform);
    if (!r.sync_failed) {
        write_text_file(dir / "equalized.csv", grid_csv(r.equalized, trx.layout().data_cells));
        std::vector<Cell> support;
        for (int k = r.channel.support.k_lo; k < r.channel.support.k_hi; ++k)
            for (int l = -cfg.frame.N / 2; l < cfg.frame.N - cfg.frame.N / 2; ++l)
                support.push_back({static_cast<int>(pos_mod(k, cfg.frame.M)), static_cast<int>(pos_mod(l, cfg.frame.N))});
        write_text_file(dir / "channel.csv", grid_csv(r.channel.taps, support));
        write_text_file(dir / "constellation.svg",
                        render_constellation_svg(r.data_symbols, trx.constellation().points(),
                                                 curve_label(cfg) + ", trial " + std::to_string(index)));
    }
    std::cout << summary.dump(2) << "\n";
    return kExitOk;
}

int cmd_iq_info(const std::string& path)
{
    const IqData d = read_iq(path);
    double power = 0.0;
    double peak = 0.0;
    for (const cd& v : d.samples) {
        power += std::norm(v);
        peak = std::max(peak, std::abs(v));
    }
    const double n = static_cast<double>(d.samples.size());
    std::printf("file:        %s\n", path.c_str());
    std::printf("version:     %u\n", static_cast<unsigned>(kIqVersion));
    std::printf("sample_rate: %.6f Hz\n", d.sample_rate);
    std::printf("samples:     %zu\n", d.samples.size());
    std::printf("duration:    %.9f s\n", d.sample_rate > 0 ? n / d.sample_rate : 0.0);
    std::printf("mean_power:  %.6e\n", n > 0 ? power / n : 0.0);
    std::printf("peak_abs:    %.6e\n", peak);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Zak-OTFS transceiver simulator"};
    app.require_subcommand(1);

    std::string config_path;
    int workers = 0;
    auto* sweep_cmd = app.add_subcommand("sweep", "Monte-Carlo BER sweep over the configured SNR points");
    sweep_cmd->add_option("--config", config_path, "experiment config (JSON)")->required();
    sweep_cmd->add_option("--workers", workers, "override the configured worker count");

    std::uint64_t index = 0;
    std::string dump_dir;
    std::optional<double> snr;
    auto* trial_cmd = app.add_subcommand("trial", "run one trial and dump its intermediate products");
    trial_cmd->add_option("--config", config_path, "experiment config (JSON)")->required();
    trial_cmd->add_option("--index", index, "trial index")->required();
    trial_cmd->add_option("--dump-dir", dump_dir, "output directory")->required();
    trial_cmd->add_option("--snr", snr, "SNR in dB (default: first configured point)");

    std::string iq_path;
    auto* iq_cmd = app.add_subcommand("iq-info", "print the header and statistics of an IQ file");
    iq_cmd->add_option("file", iq_path, "IQ file")->required();

    auto* self_cmd = app.add_subcommand("selftest", "run the built-in oracle checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (sweep_cmd->parsed())
            return cmd_sweep(config_path, workers);
        if (trial_cmd->parsed())
            return cmd_trial(config_path, index, dump_dir, snr);
        if (iq_cmd->parsed())
            return cmd_iq_info(iq_path);
        if (self_cmd->parsed())
            return cli::run_selftest(std::cout) == 0 ? kExitOk : kExitRuntime;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitRuntime;
}
