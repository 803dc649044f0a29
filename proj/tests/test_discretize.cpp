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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include <Eigen/Eigenvalues>

#include "ltv/channel.hpp"
#include "ltv/discretize.hpp"
#include "ltv/errors.hpp"
#include "ltv/rng.hpp"

using ltv::cplx;

namespace
{

const double pi = 3.14159265358979323846;

// Reference for one matrix entry, independent of the closed form in the
// library: the band-limited projection integral
//   gain * int_{B} e^{j 2 pi f n} e^{-j 2 pi (f - f_d) (k + tau)} df
// over the overlap B of the output band |f| < 1/2 with the input band
// shifted by the Doppler f_d, evaluated by Simpson quadrature.
cplx entry_quadrature(const ltv::tap &t, double n, double k)
{
    double lo = std::max(-0.5, t.doppler - 0.5);
    double hi = std::min(0.5, t.doppler + 0.5);
    if (hi <= lo)
        return cplx(0.0, 0.0);

    int steps = 4000; // even
    double h = (hi - lo) / double(steps);
    auto integrand = [&](double f) {
        double phase = 2.0 * pi * (f * n - (f - t.doppler) * (k + t.delay));
        return std::polar(1.0, phase);
    };
    cplx acc = integrand(lo) + integrand(hi);
    for (int i = 1; i < steps; i++)
        acc += integrand(lo + h * double(i)) * ((i % 2) ? 4.0 : 2.0);
    return t.gain * acc * (h / 3.0);
}

} // namespace

TEST_CASE("identity channel discretizes to the identity matrix")
{
    ltv::multipath_model m;
    m.taps.push_back({cplx(1.0, 0.0), 0.0, 0.0});
    ltv::channel_matrix h = ltv::build_channel_matrix(m, 8);
    REQUIRE(h.n() == 8);
    CHECK((h.m - Eigen::MatrixXcd::Identity(8, 8)).norm() < 1e-14);
}

TEST_CASE("integer delay discretizes to a shift matrix")
{
    ltv::multipath_model m;
    m.taps.push_back({cplx(1.0, 0.0), 2.0, 0.0});
    ltv::channel_matrix h = ltv::build_channel_matrix(m, 8);
    for (int n = 0; n < 8; n++)
        for (int k = 0; k < 8; k++)
        {
            cplx want = (n - k == 2) ? cplx(1.0, 0.0) : cplx(0.0, 0.0);
            CHECK(std::abs(h.m(n, k) - want) < 1e-12);
        }
}

TEST_CASE("fractional delay produces the shifted interpolation kernel")
{
    ltv::multipath_model m;
    m.taps.push_back({cplx(1.0, 0.0), 0.5, 0.0});
    ltv::channel_matrix h = ltv::build_channel_matrix(m, 64);

    for (int n = 0; n < 64; n++)
    {
        double x = pi * (double(n) - 32.0 - 0.5);
        double want = std::sin(x) / x; // never zero at half-integer offsets
        CHECK(std::abs(h.m(n, 32) - want) < 1e-12);

        cplx oracle = entry_quadrature(m.taps[0], double(n), 32.0);
        CHECK(std::abs(h.m(n, 32) - oracle) < 1e-6);
    }
}

TEST_CASE("matrix entries match the projection-integral quadrature with doppler")
{
    ltv::tap t{cplx(0.8, -0.6), 1.7, 0.02};
    ltv::rng r(31);
    for (int trial = 0; trial < 40; trial++)
    {
        double n = std::floor(r.uniform(0.0, 48.0));
        double k = std::floor(r.uniform(0.0, 48.0));
        cplx got = ltv::tap_entry(t, n, k);
        cplx want = entry_quadrature(t, n, k);
        CHECK(std::abs(got - want) < 1e-6);
    }
}

TEST_CASE("time offset equals a diagonal sub-block of the longer window")
{
    ltv::experiment_config cfg;
    cfg.q = 4;
    cfg.seed = 17;
    ltv::multipath_model m = ltv::sample_multipath(cfg);

    int n = 24, shift = 16;
    ltv::kernel_options opt;
    opt.t_offset = double(shift);
    ltv::channel_matrix sub = ltv::build_channel_matrix(m, n, opt);
    ltv::channel_matrix full = ltv::build_channel_matrix(m, n + shift);

    CHECK((sub.m - full.m.block(shift, shift, n, n)).norm() <
          1e-12 * full.m.norm());
}

TEST_CASE("sinc tail truncation zeroes far entries and keeps the near field")
{
    ltv::multipath_model m;
    m.taps.push_back({cplx(1.0, 0.0), 0.3, 0.01});

    ltv::kernel_options opt;
    opt.sinc_tail = 6;
    ltv::channel_matrix trunc = ltv::build_channel_matrix(m, 48, opt);
    ltv::channel_matrix full = ltv::build_channel_matrix(m, 48);

    for (int n = 0; n < 48; n++)
        for (int k = 0; k < 48; k++)
        {
            double d = std::abs(double(n - k) - 0.3);
            if (d > 6.0)
                CHECK(trunc.m(n, k) == cplx(0.0, 0.0));
            else
                CHECK(std::abs(trunc.m(n, k) - full.m(n, k)) < 1e-14);
        }
}

TEST_CASE("unit impulses reproduce matrix columns")
{
    ltv::experiment_config cfg;
    cfg.q = 5;
    cfg.seed = 23;
    ltv::channel_model m = ltv::sample_multipath(cfg);
    int n = 40;
    ltv::channel_matrix h = ltv::build_channel_matrix(m, n);

    for (int k = 0; k < n; k += 7)
    {
        Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n);
        e(k) = 1.0;
        Eigen::VectorXcd col = ltv::apply_channel(m, e);
        CHECK((col - h.m.col(k)).norm() < 1e-8);
    }
}

TEST_CASE("mean squared frobenius norm tracks the path count")
{
    // E ||H||_F^2 = N * sum_q E|h_q|^2 * (1 - |f_q|), and |f_q| <= 2/N here,
    // so N*Q is the target within Monte-Carlo error.
    int n = 64, seeds = 50;
    ltv::experiment_config cfg;
    cfg.n = n;
    cfg.q = 6;
    cfg.delta_tau = 4.0;
    cfg.delta_f = 4.0;

    double mean = 0.0, m2 = 0.0;
    for (int s = 0; s < seeds; s++)
    {
        cfg.seed = 1000 + std::uint64_t(s);
        ltv::channel_matrix h = ltv::build_channel_matrix(ltv::sample_multipath(cfg), n);
        double v = h.m.squaredNorm() / double(n);
        mean += v;
        m2 += v * v;
    }
    mean /= seeds;
    m2 /= seeds;
    double sd = std::sqrt((m2 - mean * mean) / double(seeds - 1));
    CHECK(std::abs(mean - double(cfg.q)) <= 3.0 * sd);
}

TEST_CASE("band limiter at full bandwidth is the identity")
{
    ltv::channel_matrix h = ltv::time_band_limiter(16, 0.5);
    CHECK((h.m - Eigen::MatrixXcd::Identity(16, 16)).norm() < 1e-12);
}

TEST_CASE("band limiter is real symmetric with the stated diagonal")
{
    ltv::channel_matrix h = ltv::time_band_limiter(32, 0.2);
    for (int i = 0; i < 32; i++)
    {
        CHECK(h.m(i, i) == cplx(0.4, 0.0));
        for (int k = 0; k < 32; k++)
        {
            CHECK(h.m(i, k).imag() == 0.0);
            CHECK(h.m(i, k) == h.m(k, i));
        }
    }
}

TEST_CASE("band limiter concentration: eigenvalue count matches the area")
{
    // independent oracle: real symmetric eigensolver, not the SVD path
    int n = 64;
    double w = 0.125;
    ltv::channel_matrix h = ltv::time_band_limiter(n, w);
    Eigen::MatrixXd a = h.m.real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    REQUIRE(es.info() == Eigen::Success);

    int count = 0;
    for (int i = 0; i < n; i++)
    {
        CHECK(es.eigenvalues()(i) > -1e-10);
        CHECK(es.eigenvalues()(i) < 1.0 + 1e-10);
        if (es.eigenvalues()(i) > 0.5)
            count++;
    }
    int target = int(std::lround(2.0 * w * double(n)));
    CHECK(std::abs(count - target) <= 1);
}

TEST_CASE("band limiter rejects out-of-range bandwidth")
{
    CHECK_THROWS_AS((void)ltv::time_band_limiter(16, 0.0), ltv::config_error);
    CHECK_THROWS_AS((void)ltv::time_band_limiter(16, 0.7), ltv::config_error);
    CHECK_THROWS_AS((void)ltv::time_band_limiter(1, 0.2), ltv::config_error);
}

TEST_CASE("tabulated models discretize by direct summation")
{
    // h[n, m]: time-varying two-tap response
    int n = 12;
    Eigen::MatrixXcd tab(n, 2);
    for (int i = 0; i < n; i++)
    {
        tab(i, 0) = cplx(1.0, 0.0) * double(i + 1) / double(n);
        tab(i, 1) = cplx(0.0, 0.5);
    }
    ltv::tabulated_model m{tab};
    ltv::channel_matrix h = ltv::build_channel_matrix(m, n);

    for (int i = 0; i < n; i++)
        for (int k = 0; k < n; k++)
        {
            cplx want(0.0, 0.0);
            if (i - k == 0)
                want = tab(i, 0);
            else if (i - k == 1)
                want = tab(i, 1);
            CHECK(std::abs(h.m(i, k) - want) < 1e-14);
        }
}

TEST_CASE("too small a window is truncation, not an error")
{
    ltv::multipath_model m;
    m.taps.push_back({cplx(1.0, 0.0), 10.0, 0.0});
    ltv::channel_matrix h = ltv::build_channel_matrix(m, 4);
    CHECK(h.n() == 4);
    CHECK(h.m.norm() < 0.5); // the peak lies outside the window
}
