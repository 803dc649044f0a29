// SPDX-License-Identifier: Apache-2.0
//
// ltvchan - singular functions of underspread linear time-varying channels
// Copyright (C) 2026 ltvchan contributors
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

#ifndef ltv_fft_H
#define ltv_fft_H

#include <complex>
#include <vector>

namespace ltv
{

// In-place DFT, X[k] = sum_n x[n] e^{-j 2 pi k n / N}. Radix-2 when N is a power of
// two, direct evaluation otherwise (sizes here are desk scale).
void fft(std::vector<std::complex<double>> &x, bool inverse = false);

// Inverse transform including the 1/N factor
void ifft(std::vector<std::complex<double>> &x);

// Band-limited (trigonometric) upsampling by an integer factor: output has
// factor * x.size() samples, out[factor * n] == x[n] up to rounding.
std::vector<std::complex<double>> upsample(const std::vector<std::complex<double>> &x, int factor);

} // namespace ltv

#endif
