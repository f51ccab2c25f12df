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

#include "zotfs/types.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace zotfs {

/// Delay-Doppler frame geometry. Periods satisfy tau_p * nu_p = 1, the delay
/// period is split into M bins of 1/B and the Doppler period into N bins of 1/T.
struct FrameParams {
    int M = 64;
    int N = 64;
    double nu_p = 30e3;     // Doppler period, Hz
    double tau_p = 1.0 / 30e3; // delay period, s
    double B = 64 * 30e3;   // bandwidth, Hz
    double T = 64 / 30e3;   // frame duration, s

    /// Derives tau_p, B and T from M, N and the Doppler period.
    static FrameParams from_doppler_period(int M, int N, double nu_p);

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;

    int size() const { return M * N; }
    double delay_bin() const { return 1.0 / B; }
    double doppler_bin() const { return nu_p / N; }
};

enum class CellKind : std::uint8_t { Data, Guard, Pilot };

struct Cell {
    int k = 0; // delay index
    int l = 0; // Doppler index
    friend bool operator==(const Cell&, const Cell&) = default;
};

/// Pilot/guard/data partition of the M x N grid.
///
/// The pilot sits at (k_p, l_p). Delay rows [kappa1, kappa4) are reserved for
/// the pilot region across every Doppler bin; all of them except the pilot
/// cell are zero guards. Everything else carries data.
struct FrameLayout {
    int M = 0;
    int N = 0;
    int k_p = 0;
    int l_p = 0;
    int kappa1 = 0;
    int kappa2 = 0;
    int kappa3 = 0;
    int kappa4 = 0;
    std::vector<CellKind> kinds; // row-major, index k * N + l
    std::vector<Cell> data_cells;
    std::vector<Cell> guard_cells;
    std::vector<Cell> pilot_cells;

    CellKind kind(int k, int l) const { return kinds[static_cast<std::size_t>(k * N + l)]; }

    /// Builds a layout from an explicit cell map (kappa bounds describe the
    /// pilot region around k_p and must be supplied by the caller).
    static FrameLayout from_kinds(int M, int N, int k_p, int l_p, std::vector<CellKind> kinds);
};

/// ceil(B * (tau_max + dt_margin)): the delay spread in bins the guard must cover.
int guard_spread_bins(const FrameParams& params, double tau_max, double dt_margin);

/// `outer_guard` extra zero rows on each side of [kappa1, kappa4). Reading the
/// wide support [kappa1, kappa4) needs them: without them data in the rows
/// next to the guard spills into its outer rows through the channel spread.
FrameLayout build_layout(const FrameParams& params, double tau_max, double dt_margin, int outer_guard = 0);

enum class GridRole { Symbols, Received, Channel, Equalized };

/// M x N complex grid, row-major in delay (value(k, l) at k * N + l).
class DDGrid {
public:
    DDGrid() = default;
    DDGrid(int M, int N, GridRole role = GridRole::Symbols);
    DDGrid(int M, int N, CVec values, GridRole role);

    int M() const { return M_; }
    int N() const { return N_; }
    std::size_t size() const { return values_.size(); }
    GridRole role() const { return role_; }
    void set_role(GridRole role) { role_ = role; }

    cd& operator()(int k, int l) { return values_[static_cast<std::size_t>(k * N_ + l)]; }
    const cd& operator()(int k, int l) const { return values_[static_cast<std::size_t>(k * N_ + l)]; }

    std::span<cd> values() { return values_; }
    std::span<const cd> values() const { return values_; }

    bool all_finite() const;
    double energy() const;

private:
    int M_ = 0;
    int N_ = 0;
    GridRole role_ = GridRole::Symbols;
    CVec values_;
};

/// Unit-average-energy square QAM with a fixed Gray labeling.
///
/// Labels are read MSB first from the bit stream. The first half of the label
/// bits selects the in-phase level, the second half the quadrature level, each
/// through the Gray sequence 0, 1, 3, 2 -> lowest to highest amplitude.
class Constellation {
public:
    explicit Constellation(int order);

    int order() const { return order_; }
    int bits_per_symbol() const { return bits_; }
    std::span<const cd> points() const { return points_; }
    cd point(unsigned label) const { return points_[label]; }

    /// Nearest point; on exact ties the smallest label wins.
    unsigned decide(cd z) const;

private:
    int order_;
    int bits_;
    CVec points_;
};

double db_to_amplitude(double db);

DDGrid map_bits(std::span<const std::uint8_t> bits, const Constellation& constellation,
                const FrameLayout& layout, double pilot_amp);

Bits demap_symbols(const DDGrid& grid, const FrameLayout& layout, const Constellation& constellation);

} // namespace zotfs
