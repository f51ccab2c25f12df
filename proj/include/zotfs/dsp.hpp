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

namespace zotfs::dsp {

enum class FftDirection { Forward, Backward };

// Unnormalized in-place DFT (FFTW backend). Forward uses e^{-j2pi nk/L}.
// Safe to call concurrently; plans are cached per (length, direction).
void fft_inplace(std::span<cd> data, FftDirection dir);

// Full linear convolution, length x.size() + h.size() - 1.
CVec convolve_direct(std::span<const cd> x, std::span<const cd> h);
CVec convolve_fft(std::span<const cd> x, std::span<const cd> h); // overlap-save

// Picks direct evaluation for short kernels, overlap-save otherwise.
CVec convolve(std::span<const cd> x, std::span<const cd> h);

inline constexpr std::size_t kDirectConvolutionMaxTaps = 48;

std::size_t next_pow2(std::size_t n);

} // namespace zotfs::dsp
