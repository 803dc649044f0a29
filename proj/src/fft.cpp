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

#include "ltv/fft.hpp"

#include <cmath>

namespace ltv
{

static const double pi = 3.14159265358979323846;

static bool is_pow2(size_t n)
{
    return n != 0 && (n & (n - 1)) == 0;
}

static void fft_radix2(std::vector<std::complex<double>> &x, bool inverse)
{
    const size_t n = x.size();

    // bit reversal permutation
    for (size_t i = 1, j = 0; i < n; i++)
    {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1)
            j ^= bit;
        j ^= bit;
        if (i < j)
            std::swap(x[i], x[j]);
    }

    for (size_t len = 2; len <= n; len <<= 1)
    {
        double ang = 2.0 * pi / double(len) * (inverse ? 1.0 : -1.0);
        std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len)
        {
            std::complex<double> w(1.0, 0.0);
            for (size_t k = 0; k < len / 2; k++)
            {
                std::complex<double> a = x[i + k];
                std::complex<double> b = x[i + k + len / 2] * w;
                x[i + k] = a + b;
                x[i + k + len / 2] = a - b;
                w *= wlen;
            }
        }
    }
}

static void dft_direct(std::vector<std::complex<double>> &x, bool inverse)
{
    const size_t n = x.size();
    std::vector<std::complex<double>> out(n, {0.0, 0.0});
    double sgn = inverse ? 1.0 : -1.0;
    for (size_t k = 0; k < n; k++)
    {
        for (size_t m = 0; m < n; m++)
        {
            double ang = sgn * 2.0 * pi * double(k) * double(m) / double(n);
            out[k] += x[m] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
    }
    x = std::move(out);
}

void fft(std::vector<std::complex<double>> &x, bool inverse)
{
    if (x.size() < 2)
        return;
    if (is_pow2(x.size()))
        fft_radix2(x, inverse);
    else
        dft_direct(x, inverse);
}

void ifft(std::vector<std::complex<double>> &x)
{
    fft(x, true);
    const double s = 1.0 / double(x.size());
    for (auto &v : x)
        v *= s;
}

std::vector<std::complex<double>> upsample(const std::vector<std::complex<double>> &x, int factor)
{
    if (factor <= 1)
        return x;
    const size_t n = x.size();
    std::vector<std::complex<double>> spec = x;
    fft(spec);

    // re-center the spectrum into a longer buffer; the Nyquist bin of an even-length
    // input is split between the two edges to keep real signals real
    std::vector<std::complex<double>> pad(n * size_t(factor), {0.0, 0.0});
    size_t half = n / 2;
    for (size_t k = 0; k < half; k++)
        pad[k] = spec[k];
    for (size_t k = half + 1; k < n; k++)
        pad[pad.size() - (n - k)] = spec[k];
    if (n % 2 == 0)
    {
        pad[half] = spec[half] * 0.5;
        pad[pad.size() - half] = spec[half] * 0.5;
    }
    else
    {
        pad[half] = spec[half];
    }

    ifft(pad);
    for (auto &v : pad)
        v *= double(factor);
    return pad;
}

} // namespace ltv
