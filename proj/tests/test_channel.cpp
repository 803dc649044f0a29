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

#include "ltv/channel.hpp"
#include "ltv/errors.hpp"
#include "ltv/rng.hpp"

using ltv::cplx;

namespace
{

const double pi = 3.14159265358979323846;

ltv::multipath_model identity_channel()
{
    ltv::multipath_model m;
    m.taps.push_back({cplx(1.0, 0.0), 0.0, 0.0});
    return m;
}

Eigen::VectorXcd random_vec(ltv::rng &r, int n)
{
    Eigen::VectorXcd x(n);
    for (int i = 0; i < n; i++)
        x(i) = r.cgauss();
    return x;
}

} // namespace

TEST_CASE("multipath sampling is deterministic and respects the spreads")
{
    ltv::experiment_config cfg;
    cfg.n = 256;
    cfg.q = 10;
    cfg.delta_tau = 4.0;
    cfg.delta_f = 4.0;
    cfg.seed = 7;

    ltv::multipath_model a = ltv::sample_multipath(cfg);
    ltv::multipath_model b = ltv::sample_multipath(cfg);

    REQUIRE(a.taps.size() == 10);
    REQUIRE(b.taps.size() == 10);
    for (size_t i = 0; i < a.taps.size(); i++)
    {
        CHECK(a.taps[i].gain == b.taps[i].gain);
        CHECK(a.taps[i].delay == b.taps[i].delay);
        CHECK(a.taps[i].doppler == b.taps[i].doppler);

        CHECK(a.taps[i].delay >= 0.0);
        CHECK(a.taps[i].delay <= 4.0);
        // Doppler spread 4/(N Ts) means shifts in [-2/N, +2/N] cycles/sample
        CHECK(std::abs(a.taps[i].doppler) <= 2.0 / 256.0);
    }

    cfg.seed = 8;
    ltv::multipath_model c = ltv::sample_multipath(cfg);
    bool same = true;
    for (size_t i = 0; i < a.taps.size(); i++)
        same = same && a.taps[i].gain == c.taps[i].gain;
    CHECK_FALSE(same);
}

TEST_CASE("multipath gains are unit-variance complex Gaussian on average")
{
    ltv::experiment_config cfg;
    cfg.q = 2000;
    cfg.delta_tau = 1.0;
    cfg.delta_f = 1.0;
    cfg.seed = 42;
    ltv::multipath_model m = ltv::sample_multipath(cfg);

    double e2 = 0.0;
    cplx mean = 0.0;
    for (const ltv::tap &t : m.taps)
    {
        e2 += std::norm(t.gain);
        mean += t.gain;
    }
    e2 /= double(m.taps.size());
    mean /= double(m.taps.size());
    // E|h|^2 = 1 with var(|h|^2) = 1: 3 sigma over 2000 draws is ~0.067
    CHECK(std::abs(e2 - 1.0) < 0.07);
    CHECK(std::abs(mean) < 0.08);
}

TEST_CASE("zero path count is rejected")
{
    ltv::experiment_config cfg;
    cfg.q = 0;
    CHECK_THROWS_AS((void)ltv::sample_multipath(cfg), ltv::config_error);
}

TEST_CASE("transfer function of a single unit tap is identically one")
{
    ltv::channel_model m = identity_channel();
    for (double t : {0.0, 3.5, 100.0})
        for (double f : {-0.4, 0.0, 0.23})
        {
            cplx h = ltv::transfer_function(m, t, f);
            CHECK(std::abs(h - cplx(1.0, 0.0)) < 1e-15);
        }
}

TEST_CASE("two equal paths cancel at half the inverse delay difference")
{
    ltv::multipath_model m;
    m.taps.push_back({cplx(1.0, 0.0), 0.0, 0.0});
    m.taps.push_back({cplx(1.0, 0.0), 3.0, 0.0});
    // e^{-j 2 pi f 3} = -1 at f = 1/6
    cplx h = ltv::transfer_function(m, 17.0, 1.0 / 6.0);
    CHECK(std::abs(h) < 1e-12);
}

TEST_CASE("multipath transfer function matches a term-by-term reference sum")
{
    ltv::experiment_config cfg;
    cfg.seed = 3;
    ltv::multipath_model m = ltv::sample_multipath(cfg);

    ltv::rng r(99);
    for (int trial = 0; trial < 25; trial++)
    {
        double t = r.uniform(0.0, 256.0);
        double f = r.uniform(-0.5, 0.5);
        cplx ref = 0.0;
        for (const ltv::tap &tp : m.taps)
            ref += tp.gain * std::exp(cplx(0.0, 2.0 * pi * (tp.doppler * t - tp.delay * f)));
        cplx got = ltv::transfer_function(ltv::channel_model(m), t, f);
        CHECK(std::abs(got - ref) <= 1e-12 * (1.0 + std::abs(ref)));
    }
}

TEST_CASE("line-spread transfer function is the shifted profile spectrum")
{
    // two delay masses -> G(f) = w0 + w1 e^{-j 2 pi f tau1}
    ltv::line_spread_model m;
    m.g.push_back({cplx(1.0, 0.0), 0.0});
    m.g.push_back({cplx(0.5, -0.25), 2.0});
    m.mu = 1.0 / 256.0;
    m.f0 = 0.01;

    auto G = [&](double f) {
        return cplx(1.0, 0.0) + cplx(0.5, -0.25) * std::exp(cplx(0.0, -2.0 * pi * f * 2.0));
    };

    ltv::rng r(5);
    for (int trial = 0; trial < 20; trial++)
    {
        double t = r.uniform(0.0, 256.0);
        double f = r.uniform(-0.5, 0.5);
        cplx want = std::exp(cplx(0.0, 2.0 * pi * m.f0 * t)) * G(f - m.mu * t);
        cplx got = ltv::transfer_function(ltv::channel_model(m), t, f);
        CHECK(std::abs(got - want) <= 1e-12 * (1.0 + std::abs(want)));
    }
}

TEST_CASE("spreading function of a multipath model is its tap measure")
{
    ltv::multipath_model m;
    m.taps.push_back({cplx(2.0, 1.0), 1.25, 0.01});

    ltv::spreading_result s = ltv::spreading_function(ltv::channel_model(m), 0.0, 0.0);
    auto *masses = std::get_if<std::vector<ltv::spread_mass>>(&s);
    REQUIRE(masses != nullptr);
    REQUIRE(masses->size() == 1);
    CHECK((*masses)[0].weight == cplx(2.0, 1.0));
    CHECK((*masses)[0].delay == 1.25);
    CHECK((*masses)[0].doppler == 0.01);
}

TEST_CASE("line-spread masses sit on the doppler line")
{
    ltv::line_spread_model m;
    m.g.push_back({cplx(1.0, 0.0), 0.0});
    m.g.push_back({cplx(1.0, 0.0), 2.0});
    m.mu = 0.003;
    m.f0 = -0.01;

    ltv::spreading_result s = ltv::spreading_function(ltv::channel_model(m), 0.0, 0.0);
    auto *masses = std::get_if<std::vector<ltv::spread_mass>>(&s);
    REQUIRE(masses != nullptr);
    REQUIRE(masses->size() == 2);
    for (const ltv::spread_mass &p : *masses)
        CHECK(p.doppler == doctest::Approx(m.mu * p.delay + m.f0).epsilon(1e-15));
}

TEST_CASE("time-invariant tabulated channel has all spreading mass at zero doppler")
{
    // constant-in-time response h[n, m] = g[m]
    int n = 16;
    Eigen::MatrixXcd h(n, 3);
    for (int i = 0; i < n; i++)
    {
        h(i, 0) = cplx(1.0, 0.0);
        h(i, 1) = cplx(0.3, 0.1);
        h(i, 2) = cplx(-0.2, 0.0);
    }
    ltv::tabulated_model m{h};

    // S(tau, nu) = sum_n h[n, tau] e^{-j 2 pi nu n}: zero at any nonzero DFT bin
    for (int m_idx = 0; m_idx < 3; m_idx++)
    {
        ltv::spreading_result s0 =
            ltv::spreading_function(ltv::channel_model(m), double(m_idx), 0.0);
        auto *v0 = std::get_if<cplx>(&s0);
        REQUIRE(v0 != nullptr);
        CHECK(std::abs(*v0 - double(n) * h(0, m_idx)) < 1e-10);

        ltv::spreading_result s1 =
            ltv::spreading_function(ltv::channel_model(m), double(m_idx), 3.0 / double(n));
        auto *v1 = std::get_if<cplx>(&s1);
        REQUIRE(v1 != nullptr);
        CHECK(std::abs(*v1) < 1e-10);
    }
}

TEST_CASE("identity channel application returns the input")
{
    ltv::channel_model m = identity_channel();
    ltv::rng r(11);
    Eigen::VectorXcd x = random_vec(r, 32);
    Eigen::VectorXcd y = ltv::apply_channel(m, x);
    REQUIRE(y.size() == x.size());
    CHECK((y - x).norm() < 1e-12 * x.norm());
}

TEST_CASE("integer delay shifts the sequence")
{
    ltv::multipath_model mp;
    mp.taps.push_back({cplx(1.0, 0.0), 2.0, 0.0});
    ltv::channel_model m = mp;

    ltv::rng r(12);
    Eigen::VectorXcd x = random_vec(r, 24);
    Eigen::VectorXcd y = ltv::apply_channel(m, x);
    for (int i = 2; i < 24; i++)
        CHECK(std::abs(y(i) - x(i - 2)) < 1e-9);
    CHECK(std::abs(y(0)) < 1e-9);
    CHECK(std::abs(y(1)) < 1e-9);

    // adjoint advances
    Eigen::VectorXcd z = ltv::apply_adjoint(m, x);
    for (int i = 0; i < 22; i++)
        CHECK(std::abs(z(i) - x(i + 2)) < 1e-9);
}

TEST_CASE("adjoint identity holds for random models and vectors")
{
    ltv::experiment_config cfg;
    cfg.q = 6;
    cfg.seed = 21;
    ltv::channel_model m = ltv::sample_multipath(cfg);

    ltv::rng r(22);
    for (int trial = 0; trial < 100; trial++)
    {
        Eigen::VectorXcd x = random_vec(r, 48);
        Eigen::VectorXcd y = random_vec(r, 48);
        cplx lhs = (ltv::apply_channel(m, x).adjoint() * y)(0);
        cplx rhs = (x.adjoint() * ltv::apply_adjoint(m, y))(0);
        CHECK(std::abs(lhs - rhs) <= 1e-10 * x.norm() * y.norm());
    }
}

TEST_CASE("empty input gives empty output")
{
    ltv::channel_model m = identity_channel();
    Eigen::VectorXcd x(0);
    CHECK(ltv::apply_channel(m, x).size() == 0);
    CHECK(ltv::apply_adjoint(m, x).size() == 0);
}

TEST_CASE("tabulated transfer function round-trips through the spreading transform")
{
    // h[n, m] with genuine time variation
    int n = 16;
    Eigen::MatrixXcd h(n, 2);
    for (int i = 0; i < n; i++)
    {
        h(i, 0) = std::exp(cplx(0.0, 2.0 * pi * 0.05 * i));
        h(i, 1) = 0.4 * std::exp(cplx(0.0, -2.0 * pi * 0.11 * i));
    }
    ltv::tabulated_model m{h};

    // H(t, f) at sample times = sum_m h[t, m] e^{-j 2 pi f m}
    for (int t = 0; t < n; t += 3)
        for (double f : {-0.37, 0.0, 0.18})
        {
            cplx want = h(t, 0) + h(t, 1) * std::exp(cplx(0.0, -2.0 * pi * f));
            cplx got = ltv::transfer_function(ltv::channel_model(m), double(t), f);
            CHECK(std::abs(got - want) < 1e-10);
        }
}

TEST_CASE("rng streams are reproducible and box-muller moments are sane")
{
    ltv::rng a(123), b(123);
    for (int i = 0; i < 10; i++)
        CHECK(a.raw() == b.raw());

    ltv::rng r(9);
    double m1 = 0.0, m2 = 0.0;
    int n = 20000;
    for (int i = 0; i < n; i++)
    {
        double g = r.gauss();
        m1 += g;
        m2 += g * g;
    }
    m1 /= n;
    m2 /= n;
    CHECK(std::abs(m1) < 0.03);
    CHECK(std::abs(m2 - 1.0) < 0.04);

    double e2 = 0.0;
    for (int i = 0; i < n; i++)
        e2 += std::norm(r.cgauss());
    CHECK(std::abs(e2 / n - 1.0) < 0.03);
}
