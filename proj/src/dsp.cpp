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

#include "zotfs/dsp.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace zotfs::dsp {

namespace {

// fftw_plan_* is not thread-safe, fftw_execute_dft on an existing plan is.
class PlanCache {
public:
    ~PlanCache()
    {
        for (auto& [key, plan] : plans_)
            fftw_destroy_plan(plan);
    }

    fftw_plan get(std::size_t n, FftDirection dir)
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto key = std::make_pair(n, dir == FftDirection::Forward ? 0 : 1);
        auto it = plans_.find(key);
        if (it != plans_.end())
            return it->second;
        auto* buf = fftw_alloc_complex(n);
        fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf,
                                          dir == FftDirection::Forward ? FFTW_FORWARD : FFTW_BACKWARD,
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(buf);
        if (!plan)
            throw std::runtime_error("fftw: plan creation failed");
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

PlanCache& plan_cache()
{
    static PlanCache cache;
    return cache;
}

} // namespace

void fft_inplace(std::span<cd> data, FftDirection dir)
{
    if (data.size() <= 1)
        return;
    fftw_plan plan = plan_cache().get(data.size(), dir);
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, p, p);
}

std::size_t next_pow2(std::size_t n)
{
    std::size_t p = 1;
    while (p < n)
        p <<= 1;
    return p;
}

CVec convolve_direct(std::span<const cd> x, std::span<const cd> h)
{
    if (x.empty() || h.empty())
        return {};
    CVec y(x.size() + h.size() - 1, cd{});
    for (std::size_t i = 0; i < x.size(); ++i) {
        const cd xi = x[i];
        if (xi == cd{})
            continue;
        cd* out = y.data() + i;
        for (std::size_t k = 0; k < h.size(); ++k)
            out[k] += xi * h[k];
    }
    return y;
}

CVec convolve_fft(std::span<const cd> x, std::span<const cd> h)
{
    if (x.empty() || h.empty())
        return {};
    if (h.size() > x.size())
        return convolve_fft(h, x);
    const std::size_t nh = h.size();
    const std::size_t ny = x.size() + nh - 1;
    const std::size_t nfft = next_pow2(std::max<std::size_t>(4 * nh, 1024));
    const std::size_t step = nfft - nh + 1;

    CVec hf(nfft, cd{});
    std::copy(h.begin(), h.end(), hf.begin());
    fft_inplace(hf, FftDirection::Forward);
    const double scale = 1.0 / static_cast<double>(nfft);

    CVec y(ny, cd{});
    CVec block(nfft);
    // Input is read as if padded with nh-1 leading zeros; each block yields `step` outputs.
    for (std::size_t out0 = 0; out0 < ny; out0 += step) {
        for (std::size_t i = 0; i < nfft; ++i) {
            // padded index out0 + i maps to x index out0 + i - (nh - 1)
            const auto xi = static_cast<std::int64_t>(out0 + i) - static_cast<std::int64_t>(nh - 1);
            block[i] = (xi >= 0 && xi < static_cast<std::int64_t>(x.size())) ? x[static_cast<std::size_t>(xi)] : cd{};
        }
        fft_inplace(block, FftDirection::Forward);
        for (std::size_t i = 0; i < nfft; ++i)
            block[i] *= hf[i];
        fft_inplace(block, FftDirection::Backward);
        const std::size_t count = std::min(step, ny - out0);
        for (std::size_t i = 0; i < count; ++i)
            y[out0 + i] = block[nh - 1 + i] * scale;
    }
    return y;
}

CVec convolve(std::span<const cd> x, std::span<const cd> h)
{
    if (std::min(x.size(), h.size()) <= kDirectConvolutionMaxTaps)
        return x.size() < h.size() ? convolve_direct(h, x) : convolve_direct(x, h);
    return convolve_fft(x, h);
}

} // namespace zotfs::dsp
