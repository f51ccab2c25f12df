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

#include "zotfs/estimation.hpp"

#include "zotfs/dsp.hpp"
#include "zotfs/zak.hpp"

#include <cmath>
#include <sstream>

namespace zotfs {

std::string_view to_string(SupportKind kind)
{
    switch (kind) {
    case SupportKind::C1:
        return "C1";
    case SupportKind::C2:
        return "C2";
    case SupportKind::Custom:
        break;
    }
    return "custom";
}

SupportRegion SupportRegion::c1(const FrameLayout& layout)
{
    return {SupportKind::C1, layout.kappa2 - layout.k_p, layout.kappa3 - layout.k_p};
}

SupportRegion SupportRegion::c2(const FrameLayout& layout)
{
    return {SupportKind::C2, layout.kappa1 - layout.k_p, layout.kappa4 - layout.k_p};
}

SupportRegion SupportRegion::for_kind(SupportKind kind, const FrameLayout& layout)
{
    if (kind == SupportKind::C2)
        return c2(layout);
    if (kind == SupportKind::C1)
        return c1(layout);
    throw std::invalid_argument("support: custom regions need explicit bounds");
}

SupportRegion SupportRegion::custom(int k_lo, int k_hi)
{
    if (k_hi <= k_lo)
        throw std::invalid_argument("support: empty delay range");
    return {SupportKind::Custom, k_lo, k_hi};
}

SupportRegion SupportRegion::full(int M)
{
    return custom(-M / 2, M - M / 2);
}

cd EffectiveChannelEstimate::tap(int k, int l) const
{
    return taps(static_cast<int>(pos_mod(k, M())), static_cast<int>(pos_mod(l, N())));
}

void EffectiveChannelEstimate::set_tap(int k, int l, cd value)
{
    taps(static_cast<int>(pos_mod(k, M())), static_cast<int>(pos_mod(l, N()))) = value;
}

EffectiveChannelEstimate EffectiveChannelEstimate::zeros(int M, int N, const SupportRegion& support)
{
    if (support.k_lo < -M / 2 || support.k_hi > M - M / 2 || support.k_hi <= support.k_lo)
        throw std::invalid_argument("support: delay range exceeds the grid");
    EffectiveChannelEstimate h;
    h.taps = DDGrid(M, N, GridRole::Channel);
    h.support = support;
    return h;
}

EffectiveChannelEstimate estimate(const DDGrid& y_dd, const FrameLayout& layout, const SupportRegion& support,
                                  double pilot_amp)
{
    const int M = y_dd.M();
    const int N = y_dd.N();
    if (layout.M != M || layout.N != N)
        throw std::invalid_argument("estimate: layout and grid dimensions differ");
    if (layout.k_p != M / 2 || layout.l_p != N / 2)
        throw std::invalid_argument("estimate: pilot must sit at (M/2, N/2)");
    if (!(pilot_amp > 0.0))
        throw std::invalid_argument("estimate: pilot amplitude must be positive");

    EffectiveChannelEstimate h = EffectiveChannelEstimate::zeros(M, N, support);
    h.pilot_amp = pilot_amp;
    for (int k = support.k_lo; k < support.k_hi; ++k)
        for (int l = -N / 2; l < N - N / 2; ++l)
            h.set_tap(k, l, y_dd(k + M / 2, l + N / 2) * expj(-kPi * l / N) / pilot_amp);
    return h;
}

std::optional<double> estimate_noise_var(const DDGrid& y_dd, const FrameLayout& layout, const SupportRegion& support)
{
    double acc = 0.0;
    std::size_t count = 0;
    for (const Cell& c : layout.guard_cells) {
        if (support.contains_delay(c.k - layout.k_p))
            continue;
        acc += std::norm(y_dd(c.k, c.l));
        ++count;
    }
    if (count == 0)
        return std::nullopt;
    return acc / static_cast<double>(count);
}

DDGrid predict_io(const DDGrid& s_dd, const EffectiveChannelEstimate& h)
{
    const int M = s_dd.M();
    const int N = s_dd.N();
    if (h.M() != M || h.N() != N)
        throw std::invalid_argument("predict_io: channel and frame dimensions differ");
    const double MN = static_cast<double>(M) * N;
    DDGrid y(M, N, GridRole::Received);
    for (int kp = h.support.k_lo; kp < h.support.k_hi; ++kp) {
        for (int lp = -N / 2; lp < N - N / 2; ++lp) {
            const cd g = h.tap(kp, lp);
            if (g == cd{})
                continue;
            for (int k = 0; k < M; ++k) {
                const cd rot = g * expj(2.0 * kPi * (k - kp) * lp / MN);
                for (int l = 0; l < N; ++l)
                    y(k, l) += rot * extend(s_dd, k - kp, l - lp);
            }
        }
    }
    return y;
}

SparseIoMatrix build_io_matrix(const EffectiveChannelEstimate& h)
{
    const int M = h.M();
    const int N = h.N();
    const double MN = static_cast<double>(M) * N;
    const Eigen::Index n = static_cast<Eigen::Index>(M) * N;
    SparseIoMatrix H(n, n);
    H.reserve(Eigen::VectorXi::Constant(n, static_cast<int>(h.support_size())));
    for (int k = 0; k < M; ++k) {
        for (int l = 0; l < N; ++l) {
            const Eigen::Index row = static_cast<Eigen::Index>(k) * N + l;
            for (int kp = h.support.k_lo; kp < h.support.k_hi; ++kp) {
                const std::int64_t a = k - kp;
                const std::int64_t wraps = floor_div(a, M);
                const int k0 = static_cast<int>(a - wraps * M);
                for (int lp = -N / 2; lp < N - N / 2; ++lp) {
                    const int l0 = static_cast<int>(pos_mod(l - lp, N));
                    // Quasi-periodic wrap phase exp(j 2 pi n l / N) times the twist.
                    const double phase = 2.0 * kPi * (static_cast<double>(wraps) * l0 / N + static_cast<double>(a) * lp / MN);
                    H.insert(row, static_cast<Eigen::Index>(k0) * N + l0) = h.tap(kp, lp) * expj(phase);
                }
            }
        }
    }
    H.makeCompressed();
    return H;
}

Eigen::MatrixXcd LinearOperator::to_dense() const
{
    const Eigen::Index n = size();
    Eigen::MatrixXcd D(n, n);
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        e[j] = 1.0;
        D.col(j) = apply(e);
        e[j] = 0.0;
    }
    return D;
}

namespace {

Eigen::VectorXcd dd_to_dt(const Eigen::VectorXcd& x, int M, int N)
{
    DDGrid g(M, N, CVec(x.data(), x.data() + x.size()), GridRole::Symbols);
    const DTSignal s = idzt(g, 1.0);
    return Eigen::Map<const Eigen::VectorXcd>(s.samples.data(), static_cast<Eigen::Index>(s.samples.size()));
}

Eigen::VectorXcd dt_to_dd(const Eigen::VectorXcd& y, int M, int N)
{
    DTSignal s{CVec(y.data(), y.data() + y.size()), 1.0};
    const DDGrid g = dzt(s, M, N);
    const auto v = g.values();
    return Eigen::Map<const Eigen::VectorXcd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

} // namespace

ZakDomainOperator::ZakDomainOperator(const EffectiveChannelEstimate& h) : M_(h.M()), N_(h.N())
{
    const std::int64_t MN = static_cast<std::int64_t>(M_) * N_;
    for (int kp = h.support.k_lo; kp < h.support.k_hi; ++kp) {
        CVec spectrum(static_cast<std::size_t>(MN), cd{});
        bool any = false;
        for (int lp = -N_ / 2; lp < N_ - N_ / 2; ++lp) {
            const cd g = h.tap(kp, lp);
            if (g == cd{})
                continue;
            spectrum[static_cast<std::size_t>(pos_mod(lp, MN))] = g;
            any = true;
        }
        if (!any)
            continue;
        // Backward FFT: m[p] = sum_l spectrum[l] exp(+j 2 pi l p / MN).
        dsp::fft_inplace(spectrum, dsp::FftDirection::Backward);
        shifts_.push_back(kp);
        mods_.emplace_back(Eigen::Map<const Eigen::VectorXcd>(spectrum.data(), static_cast<Eigen::Index>(MN)));
    }
}

Eigen::VectorXcd ZakDomainOperator::apply(const Eigen::VectorXcd& x) const
{
    const std::int64_t MN = static_cast<std::int64_t>(M_) * N_;
    const Eigen::VectorXcd s = dd_to_dt(x, M_, N_);
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(MN));
    for (std::size_t i = 0; i < shifts_.size(); ++i) {
        const Eigen::VectorXcd& m = mods_[i];
        const std::int64_t shift = pos_mod(shifts_[i], MN);
        for (std::int64_t p = 0; p < MN; ++p) {
            const std::int64_t q = p + shift < MN ? p + shift : p + shift - MN;
            y[q] += m[p] * s[p];
        }
    }
    return dt_to_dd(y, M_, N_);
}

Eigen::VectorXcd ZakDomainOperator::apply_adjoint(const Eigen::VectorXcd& y) const
{
    const std::int64_t MN = static_cast<std::int64_t>(M_) * N_;
    const Eigen::VectorXcd t = dd_to_dt(y, M_, N_);
    Eigen::VectorXcd s = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(MN));
    for (std::size_t i = 0; i < shifts_.size(); ++i) {
        const Eigen::VectorXcd& m = mods_[i];
        const std::int64_t shift = pos_mod(shifts_[i], MN);
        for (std::int64_t p = 0; p < MN; ++p) {
            const std::int64_t q = p + shift < MN ? p + shift : p + shift - MN;
            s[p] += std::conj(m[p]) * t[q];
        }
    }
    return dt_to_dd(s, M_, N_);
}

ConvergenceError::ConvergenceError(double residual_, int iterations_)
    : std::runtime_error([&] {
          std::ostringstream os;
          os << "mmse: conjugate gradient did not converge after " << iterations_
             << " iterations (relative residual " << residual_ << ")";
          return os.str();
      }()),
      residual(residual_), iterations(iterations_)
{
}

namespace {

// Solves (H H^H + s I) u = y by conjugate gradient.
Eigen::VectorXcd cg_solve(const LinearOperator& H, double noise_var, const Eigen::VectorXcd& y, const MmseOptions& opt)
{
    auto A = [&](const Eigen::VectorXcd& v) -> Eigen::VectorXcd {
        Eigen::VectorXcd r = H.apply(H.apply_adjoint(v));
        if (noise_var != 0.0)
            r += noise_var * v;
        return r;
    };
    const double ynorm = y.norm();
    Eigen::VectorXcd u = Eigen::VectorXcd::Zero(y.size());
    if (ynorm == 0.0)
        return u;
    Eigen::VectorXcd r = y;
    Eigen::VectorXcd p = r;
    double rr = r.squaredNorm();
    for (int it = 0; it < opt.max_iterations; ++it) {
        if (std::sqrt(rr) <= opt.tolerance * ynorm)
            return u;
        const Eigen::VectorXcd Ap = A(p);
        const cd pAp = p.dot(Ap);
        if (!(std::abs(pAp) > 0.0))
            throw ConvergenceError(std::sqrt(rr) / ynorm, it);
        const cd alpha = rr / pAp;
        u += alpha * p;
        r -= alpha * Ap;
        const double rr_new = r.squaredNorm();
        p = r + (rr_new / rr) * p;
        rr = rr_new;
    }
    // Recompute the true residual before giving up.
    const double res = (y - A(u)).norm() / ynorm;
    if (res <= opt.tolerance)
        return u;
    throw ConvergenceError(res, opt.max_iterations);
}

} // namespace

DDGrid mmse_equalize(const DDGrid& y_dd, const LinearOperator& H, double noise_var, const MmseOptions& options)
{
    if (!(noise_var >= 0.0))
        throw std::invalid_argument("mmse: noise variance must be >= 0");
    const Eigen::Index n = H.size();
    if (static_cast<Eigen::Index>(y_dd.size()) != n)
        throw std::invalid_argument("mmse: operator and grid dimensions differ");
    const auto v = y_dd.values();
    const Eigen::VectorXcd y = Eigen::Map<const Eigen::VectorXcd>(v.data(), n);

    MmseMethod method = options.method;
    if (method == MmseMethod::Auto)
        method = n <= options.direct_max_size ? MmseMethod::Direct : MmseMethod::ConjugateGradient;

    Eigen::VectorXcd u;
    if (method == MmseMethod::Direct) {
        const Eigen::MatrixXcd D = H.to_dense();
        Eigen::MatrixXcd A = D * D.adjoint();
        A.diagonal().array() += noise_var;
        Eigen::LLT<Eigen::MatrixXcd> llt(A);
        if (llt.info() == Eigen::Success)
            u = llt.solve(y);
        else
            u = A.completeOrthogonalDecomposition().solve(y);
    } else {
        u = cg_solve(H, noise_var, y, options);
    }
    const Eigen::VectorXcd x = H.apply_adjoint(u);
    return DDGrid(y_dd.M(), y_dd.N(), CVec(x.data(), x.data() + x.size()), GridRole::Equalized);
}

} // namespace zotfs
