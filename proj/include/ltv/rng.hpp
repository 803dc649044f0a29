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

#ifndef ltv_rng_H
#define ltv_rng_H

#include <complex>
#include <cstdint>
#include <random>

namespace ltv
{

// Deterministic random source. The engine is std::mt19937_64, whose output sequence is
// fixed by the C++ standard, so a seed reproduces the same stream on every platform.
// Distribution transforms are spelled out here instead of using std:: distributions,
// because those are implementation-defined and would break cross-toolchain determinism.
class rng
{
  public:
    explicit rng(std::uint64_t seed) : eng(seed) {}

    std::uint64_t raw() { return eng(); }

    // Uniform double in [0, 1): top 53 bits of the engine output
    double uniform()
    {
        return double(eng() >> 11) * 0x1.0p-53;
    }

    // Uniform double in [a, b)
    double uniform(double a, double b)
    {
        return a + (b - a) * uniform();
    }

    // Standard normal via the basic Box-Muller transform (consumes exactly two uniforms
    // per pair; the second value is cached)
    double gauss()
    {
        if (have_spare)
        {
            have_spare = false;
            return spare;
        }
        double u1 = 1.0 - uniform(); // (0, 1], keeps the log finite
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        spare = r * std::sin(2.0 * 3.14159265358979323846 * u2);
        have_spare = true;
        return r * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    // Circular complex Gaussian with E|z|^2 = 1: z = sqrt(-ln u1) * e^{j 2 pi u2}
    std::complex<double> cgauss()
    {
        double u1 = 1.0 - uniform();
        double u2 = uniform();
        double r = std::sqrt(-std::log(u1));
        return std::polar(r, 2.0 * 3.14159265358979323846 * u2);
    }

  private:
    std::mt19937_64 eng;
    double spare = 0.0;
    bool have_spare = false;
};

} // namespace ltv

#endif
