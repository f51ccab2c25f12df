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

#include "zotfs/dd_frame.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

namespace zotfs {

FrameParams FrameParams::from_doppler_period(int M, int N, double nu_p)
{
    FrameParams p;
    p.M = M;
    p.N = N;
    p.nu_p = nu_p;
    p.tau_p = 1.0 / nu_p;
    p.B = M * nu_p;
    p.T = N * p.tau_p;
    return p;
}

void FrameParams::validate() const
{
    auto fail = [](const std::string& field, const std::string& why) {
        throw std::invalid_argument("frame." + field + ": " + why);
    };
    if (M <= 0)
        fail("M", "must be positive");
    if (N <= 0)
        fail("N", "must be positive");
    if (M % 2 != 0)
        fail("M", "must be even");
    if (N % 2 != 0)
        fail("N", "must be even");
    if (!(nu_p > 0.0) || !std::isfinite(nu_p))
        fail("nu_p", "must be a positive finite frequency");
    if (!(tau_p > 0.0) || !std::isfinite(tau_p))
        fail("tau_p", "must be a positive finite duration");
    if (std::abs(tau_p * nu_p - 1.0) > 1e-12) {
        std::ostringstream os;
        os.precision(17);
        os << "tau_p * nu_p must equal 1 (got " << tau_p * nu_p << ")";
        fail("tau_p", os.str());
    }
    if (std::abs(B - M * nu_p) > 1e-9 * M * nu_p)
        fail("B", "must equal M * nu_p");
    if (std::abs(T - N * tau_p) > 1e-9 * N * tau_p)
        fail("T", "must equal N * tau_p");
}

FrameLayout FrameLayout::from_kinds(int M, int N, int k_p, int l_p, std::vector<CellKind> kinds)
{
    if (M <= 0 || N <= 0 || kinds.size() != static_cast<std::size_t>(M * N))
        throw std::invalid_argument("layout: cell map must have M*N entries");
    FrameLayout layout;
    layout.M = M;
    layout.N = N;
    layout.k_p = k_p;
    layout.l_p = l_p;
    layout.kinds = std::move(kinds);
    for (int k = 0; k < M; ++k) {
        for (int l = 0; l < N; ++l) {
            switch (layout.kind(k, l)) {
            case CellKind::Data: layout.data_cells.push_back({k, l}); break;
            case CellKind::Guard: layout.guard_cells.push_back({k, l}); break;
            case CellKind::Pilot: layout.pilot_cells.push_back({k, l}); break;
            }
        }
    }
    return layout;
}

int guard_spread_bins(const FrameParams& params, double tau_max, double dt_margin)
{
    // The small slack keeps exact multiples of 1/B (2/B * B = 2.0000000000000004) from rounding up.
    const double bins = params.B * (tau_max + dt_margin);
    return static_cast<int>(std::ceil(bins - 1e-9));
}

FrameLayout build_layout(const FrameParams& params, double tau_max, double dt_margin, int outer_guard)
{
    params.validate();
    if (!(tau_max >= 0.0) || !std::isfinite(tau_max))
        throw std::invalid_argument("layout.tau_max: must be finite and >= 0");
    if (!(dt_margin >= 0.0) || !std::isfinite(dt_margin))
        throw std::invalid_argument("layout.dt_margin: must be finite and >= 0");

    const double spread = params.B * (tau_max + dt_margin);
    if (!(spread < params.M / 2.0 - 2.0)) {
        std::ostringstream os;
        os << "layout: delay spread B*(tau_max+dt_margin) = " << spread
           << " bins does not fit the pilot region (need < M/2 - 2 = " << params.M / 2.0 - 2.0 << ")";
        throw std::invalid_argument(os.str());
    }

    const int c = guard_spread_bins(params, tau_max, dt_margin);
    const int M = params.M;
    const int N = params.N;
    const int k_p = (M + 1) / 2;
    const int l_p = (N + 1) / 2;

    std::vector<CellKind> kinds(static_cast<std::size_t>(M * N), CellKind::Data);
    const int kappa1 = k_p - 1 - c;
    const int kappa4 = k_p + 1 + c;
    if (outer_guard < 0 || kappa1 - outer_guard < 0 || kappa4 + outer_guard > M) {
        std::ostringstream os;
        os << "layout: outer guard of " << outer_guard << " rows around [" << kappa1 << ", " << kappa4
           << ") does not fit " << M << " delay rows";
        throw std::invalid_argument(os.str());
    }
    for (int k = kappa1 - outer_guard; k < kappa4 + outer_guard; ++k)
        for (int l = 0; l < N; ++l)
            kinds[static_cast<std::size_t>(k * N + l)] = CellKind::Guard;
    kinds[static_cast<std::size_t>(k_p * N + l_p)] = CellKind::Pilot;

    FrameLayout layout = FrameLayout::from_kinds(M, N, k_p, l_p, std::move(kinds));
    layout.kappa1 = kappa1;
    layout.kappa2 = k_p - 1;
    layout.kappa3 = k_p + c;
    layout.kappa4 = kappa4;
    if (layout.data_cells.empty())
        throw std::invalid_argument("layout: guard region covers the whole delay axis, no data cells remain");
    return layout;
}

DDGrid::DDGrid(int M, int N, GridRole role)
    : M_(M), N_(N), role_(role), values_(static_cast<std::size_t>(M) * static_cast<std::size_t>(N), cd{})
{
    if (M <= 0 || N <= 0)
        throw std::invalid_argument("DDGrid: dimensions must be positive");
}

DDGrid::DDGrid(int M, int N, CVec values, GridRole role)
    : M_(M), N_(N), role_(role), values_(std::move(values))
{
    if (M <= 0 || N <= 0 || values_.size() != static_cast<std::size_t>(M) * static_cast<std::size_t>(N))
        throw std::invalid_argument("DDGrid: value count must equal M*N");
}

bool DDGrid::all_finite() const
{
    for (const auto& v : values_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            return false;
    return true;
}

double DDGrid::energy() const
{
    double e = 0.0;
    for (const auto& v : values_)
        e += std::norm(v);
    return e;
}

namespace {

// Gray sequence 0,1,3,2 mapped onto increasing PAM levels.
int gray_to_level_index(unsigned g, int levels)
{
    unsigned b = g;
    for (unsigned shift = 1; shift < static_cast<unsigned>(levels); shift <<= 1)
        b ^= b >> shift;
    return static_cast<int>(b);
}

} // namespace

Constellation::Constellation(int order) : order_(order)
{
    if (order != 4 && order != 16)
        throw std::invalid_argument("constellation: order must be 4 or 16");
    bits_ = order == 4 ? 2 : 4;
    const int half = bits_ / 2;
    const int levels = 1 << half;
    // Average energy of the square grid {+-1, +-3, ...}^2 is 2(L^2-1)/3.
    const double scale = 1.0 / std::sqrt(2.0 * (levels * levels - 1) / 3.0);
    points_.resize(static_cast<std::size_t>(order));
    for (unsigned label = 0; label < static_cast<unsigned>(order); ++label) {
        const unsigned gi = label >> half;
        const unsigned gq = label & ((1u << half) - 1u);
        const double i = 2.0 * gray_to_level_index(gi, levels) - (levels - 1);
        const double q = 2.0 * gray_to_level_index(gq, levels) - (levels - 1);
        points_[label] = cd{i * scale, q * scale};
    }
}

unsigned Constellation::decide(cd z) const
{
    unsigned best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (unsigned label = 0; label < points_.size(); ++label) {
        const double d = std::norm(z - points_[label]);
        if (d < best_d) {
            best_d = d;
            best = label;
        }
    }
    return best;
}

double db_to_amplitude(double db) { return std::pow(10.0, db / 20.0); }

DDGrid map_bits(std::span<const std::uint8_t> bits, const Constellation& constellation,
                const FrameLayout& layout, double pilot_amp)
{
    const auto bps = static_cast<std::size_t>(constellation.bits_per_symbol());
    if (bits.size() != layout.data_cells.size() * bps) {
        std::ostringstream os;
        os << "map_bits: expected " << layout.data_cells.size() * bps << " bits for "
           << layout.data_cells.size() << " data cells, got " << bits.size();
        throw std::invalid_argument(os.str());
    }
    DDGrid grid(layout.M, layout.N, GridRole::Symbols);
    for (std::size_t i = 0; i < layout.data_cells.size(); ++i) {
        unsigned label = 0;
        for (std::size_t b = 0; b < bps; ++b)
            label = (label << 1) | (bits[i * bps + b] & 1u);
        const Cell c = layout.data_cells[i];
        grid(c.k, c.l) = constellation.point(label);
    }
    for (const Cell& c : layout.pilot_cells)
        grid(c.k, c.l) = pilot_amp;
    return grid;
}

Bits demap_symbols(const DDGrid& grid, const FrameLayout& layout, const Constellation& constellation)
{
    if (grid.M() != layout.M || grid.N() != layout.N)
        throw std::invalid_argument("demap_symbols: grid and layout dimensions differ");
    const int bps = constellation.bits_per_symbol();
    Bits bits;
    bits.reserve(layout.data_cells.size() * static_cast<std::size_t>(bps));
    for (const Cell& c : layout.data_cells) {
        const unsigned label = constellation.decide(grid(c.k, c.l));
        for (int b = bps - 1; b >= 0; --b)
            bits.push_back(static_cast<std::uint8_t>((label >> b) & 1u));
    }
    return bits;
}

} // namespace zotfs
