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

#include "zotfs/dd_frame.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <memory>
#include <optional>
#include <stdexcept>
#include <string_view>

namespace zotfs {

enum class SupportKind { C1, C2, Custom };

std::string_view to_string(SupportKind kind);

/// Delay-Doppler region assumed to hold every effective-channel tap.
///
/// Delay bounds are relative to the pilot row: tap (k, l) covers received row
/// k_p + k. The Doppler range is always [-N/2, N/2).
struct SupportRegion {
    SupportKind kind = SupportKind::C1;
    int k_lo = 0; // inclusive
    int k_hi = 1; // exclusive

    /// Rows [kappa2, kappa3).
    static SupportRegion c1(const FrameLayout& layout);
    /// Rows [kappa1, kappa4).
    static SupportRegion c2(const FrameLayout& layout);
    static SupportRegion for_kind(SupportKind kind, const FrameLayout& layout);
    static SupportRegion custom(int k_lo, int k_hi);
    /// Whole delay axis [-M/2, M/2).
    static SupportRegion full(int M);

    bool contains_delay(int k) const { return k >= k_lo && k < k_hi; }
    int delay_extent() const { return k_hi - k_lo; }
};

/// Effective channel taps h[k, l] with k, l signed; stored wrapped, i.e. tap
/// (k, l) lives at grid cell (k mod M, l mod N).
struct EffectiveChannelEstimate {
    DDGrid taps;
    SupportRegion support;
    double pilot_amp = 1.0;

    int M() const { return taps.M(); }
    int N() const { return taps.N(); }
    cd tap(int k, int l) const;
    void set_tap(int k, int l, cd value);
    std::size_t support_size() const { return static_cast<std::size_t>(support.delay_extent()) * static_cast<std::size_t>(N()); }

    /// Empty estimate over `support` for an M x N frame.
    static EffectiveChannelEstimate zeros(int M, int N, const SupportRegion& support);
};

EffectiveChannelEstimate estimate(const DDGrid& y_dd, const FrameLayout& layout, const SupportRegion& support,
                                  double pilot_amp);

/// Mean |y_dd|^2 over guard cells whose rows fall outside `support`, or
/// nullopt when the support covers every guard row.
std::optional<double> estimate_noise_var(const DDGrid& y_dd, const FrameLayout& layout, const SupportRegion& support);

/// Twisted convolution of h with the quasi-periodic extension of s_dd.
DDGrid predict_io(const DDGrid& s_dd, const EffectiveChannelEstimate& h);

using SparseIoMatrix = Eigen::SparseMatrix<cd, Eigen::RowMajor>;

/// Matrix form of predict_io on the row-major vectorization (k * N + l).
/// Every row stores exactly |support| entries, explicit zeros included.
SparseIoMatrix build_io_matrix(const EffectiveChannelEstimate& h);

/// Square operator on vectorized M x N grids.
class LinearOperator {
public:
    virtual ~LinearOperator() = default;
    virtual Eigen::Index size() const = 0;
    virtual Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const = 0;
    virtual Eigen::VectorXcd apply_adjoint(const Eigen::VectorXcd& y) const = 0;
    virtual Eigen::MatrixXcd to_dense() const;
};

class SparseIoOperator final : public LinearOperator {
public:
    explicit SparseIoOperator(SparseIoMatrix H) : H_(std::move(H)) {}
    Eigen::Index size() const override { return H_.rows(); }
    Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const override { return H_ * x; }
    Eigen::VectorXcd apply_adjoint(const Eigen::VectorXcd& y) const override { return H_.adjoint() * y; }
    Eigen::MatrixXcd to_dense() const override { return Eigen::MatrixXcd(H_); }
    const SparseIoMatrix& matrix() const { return H_; }

private:
    SparseIoMatrix H_;
};

/// The same operator evaluated in the time domain: the channel becomes
/// y[q] = sum_k' m_k'[q - k'] s[q - k'] on the MN-periodic Zak signal, with
/// m_k'[p] = sum_l' h[k', l'] exp(j 2 pi l' p / MN). Cost per product is
/// O(MN (log N + delay extent)) instead of O(MN |support|).
class ZakDomainOperator final : public LinearOperator {
public:
    explicit ZakDomainOperator(const EffectiveChannelEstimate& h);
    Eigen::Index size() const override { return static_cast<Eigen::Index>(M_) * N_; }
    Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const override;
    Eigen::VectorXcd apply_adjoint(const Eigen::VectorXcd& y) const override;

private:
    int M_;
    int N_;
    std::vector<int> shifts_;              // k' per modulation row
    std::vector<Eigen::VectorXcd> mods_;   // m_k'[p], p in [0, MN)
};

enum class MmseMethod { Auto, Direct, ConjugateGradient };

struct MmseOptions {
    MmseMethod method = MmseMethod::Auto;
    Eigen::Index direct_max_size = 1024;
    double tolerance = 1e-8;   // relative residual for CG
    int max_iterations = 5000;
};

struct ConvergenceError : std::runtime_error {
    ConvergenceError(double residual, int iterations);
    double residual;
    int iterations;
};

/// x = H^H (H H^H + noise_var I)^{-1} y.
DDGrid mmse_equalize(const DDGrid& y_dd, const LinearOperator& H, double noise_var, const MmseOptions& options = {});

} // namespace zotfs
