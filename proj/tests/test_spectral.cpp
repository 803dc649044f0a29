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

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "ltv/channel.hpp"
#include "ltv/discretize.hpp"
#include "ltv/errors.hpp"
#include "ltv/rng.hpp"
#include "ltv/spectral.hpp"

using ltv::cplx;

namespace
{

// Cyclic-sweep complex Jacobi eigensolver for Hermitian matrices. Kept
// deliberately separate from the library's LAPACK route so eigenvalues of
// H H^H provide an independent reference for the singular values.
std::vector<double> jacobi_eigenvalues(Eigen::MatrixXcd a)
{
    const int n = int(a.rows());
    for (int sweep = 0; sweep < 100; sweep++)
    {
        double off = 0.0;
        for (int p = 0; p < n; p++)
            for (int q = p + 1; q < n; q++)
                off += std::norm(a(p, q));
        if (off < 1e-28 * a.norm() * a.norm() + 1e-300)
            break;

        for (int p = 0; p < n; p++)
            for (int q = p + 1; q < n; q++)
            {
                double apq = std::abs(a(p, q));
                if (apq < 1e-300)
                    continue;
                cplx phase = a(p, q) / apq;
                double app = a(p, p).real();
                double aqq = a(q, q).real();
                double tau = (aqq - app) / (2.0 * apq);
                double t = (tau >= 0.0 ? -1.0 : 1.0) /
                           (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = t * c;

                Eigen::MatrixXcd r = Eigen::MatrixXcd::Identity(n, n);
                r(p, p) = c;
                r(p, q) = -s * phase;
                r(q, p) = s * std::conj(phase);
                r(q, q) = c;
                a = (r.adjoint() * a * r).eval();
            }
    }
    std::vector<double> ev(static_cast<size_t>(n));
    for (int i = 0; i < n; i++)
        ev[size_t(i)] = a(i, i).real();
    std::sort(ev.begin(), ev.end(), std::greater<double>());
    return ev;
}

Eigen::MatrixXcd random_matrix(ltv::rng &r, int n)
{
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; i++)
        for (int k = 0; k < n; k++)
            m(i, k) = r.cgauss();
    return m;
}

ltv::channel_matrix wrap(const Eigen::MatrixXcd &m)
{
    ltv::channel_matrix h;
    h.m = m;
    return h;
}

} // namespace

TEST_CASE("identity matrix has unit spectrum and matching bases")
{
    ltv::svd_result s = ltv::svd(wrap(Eigen::MatrixXcd::Identity(12, 12)));
    for (int i = 0; i < 12; i++)
        CHECK(s.sigmas(i) == doctest::Approx(1.0).epsilon(1e-12));
    // H = U V^H = I forces U = V even inside the degenerate cluster
    CHECK((s.u - s.v).norm() < 1e-10);
}

TEST_CASE("shift matrix is a partial isometry")
{
    int n = 10;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (int k = 0; k + 2 < n; k++)
        m(k + 2, k) = 1.0;
    ltv::svd_result s = ltv::svd(wrap(m));
    for (int i = 0; i < n - 2; i++)
        CHECK(s.sigmas(i) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.sigmas(n - 2) < 1e-12);
    CHECK(s.sigmas(n - 1) < 1e-12);
}

TEST_CASE("singular values square to the eigenvalues of the composite kernel")
{
    ltv::rng r(77);
    for (int trial = 0; trial < 5; trial++)
    {
        Eigen::MatrixXcd m = random_matrix(r, 6);
        ltv::svd_result s = ltv::svd(wrap(m));
        std::vector<double> ev = jacobi_eigenvalues(ltv::composite_kernel(m));
        REQUIRE(ev.size() == 6);
        for (int i = 0; i < 6; i++)
            CHECK(std::abs(s.sigmas(i) * s.sigmas(i) - ev[size_t(i)]) <=
                  1e-10 * std::max(1.0, ev[0]));
    }
}

TEST_CASE("decomposition invariants on a random channel matrix")
{
    ltv::experiment_config cfg;
    cfg.n = 48;
    cfg.q = 8;
    cfg.seed = 5;
    ltv::channel_matrix h = ltv::build_channel_matrix(ltv::sample_multipath(cfg), 48);
    ltv::svd_result s = ltv::svd(h);

    Eigen::MatrixXcd rec = s.u * s.sigmas.asDiagonal() * s.v.adjoint();
    CHECK((rec - h.m).norm() <= 1e-8 * h.m.norm());

    Eigen::MatrixXcd iu = s.u.adjoint() * s.u - Eigen::MatrixXcd::Identity(48, 48);
    Eigen::MatrixXcd iv = s.v.adjoint() * s.v - Eigen::MatrixXcd::Identity(48, 48);
    CHECK(iu.cwiseAbs().maxCoeff() < 1e-10);
    CHECK(iv.cwiseAbs().maxCoeff() < 1e-10);

    for (int i = 0; i + 1 < 48; i++)
        CHECK(s.sigmas(i) >= s.sigmas(i + 1));
    CHECK(s.sigmas(47) >= 0.0);

    double e = 0.0;
    for (int i = 0; i < 48; i++)
        e += s.sigmas(i) * s.sigmas(i);
    CHECK(std::abs(e - h.m.squaredNorm()) <= 1e-9 * h.m.squaredNorm());
}

TEST_CASE("phase convention pins the dominant entry of each right vector")
{
    ltv::rng r(13);
    Eigen::MatrixXcd m = random_matrix(r, 9);
    ltv::svd_result s = ltv::svd(wrap(m));

    for (int i = 0; i < 9; i++)
    {
        Eigen::Index at = 0;
        s.v.col(i).cwiseAbs().maxCoeff(&at);
        cplx top = s.v(at, i);
        CHECK(std::abs(top.imag()) <= 1e-12 * std::abs(top));
        CHECK(top.real() > 0.0);

        // the pairing H v = sigma u must survive the rephasing
        CHECK((m * s.v.col(i) - s.sigmas(i) * s.u.col(i)).norm() <=
              1e-9 * s.sigmas(0));
    }
}

TEST_CASE("composite kernel is hermitian and definitionally consistent")
{
    ltv::rng r(29);
    Eigen::MatrixXcd m = random_matrix(r, 7);
    Eigen::MatrixXcd k = ltv::composite_kernel(m);
    CHECK((k - k.adjoint()).cwiseAbs().maxCoeff() < 1e-14 * k.norm());
    CHECK((k - m * m.adjoint()).norm() <= 1e-12 * k.norm());

    Eigen::MatrixXcd id = ltv::composite_kernel(Eigen::MatrixXcd::Identity(5, 5));
    CHECK((id - Eigen::MatrixXcd::Identity(5, 5)).norm() < 1e-14);
}

TEST_CASE("triple residuals are tiny for decomposition output and scale with noise")
{
    ltv::rng r(41);
    Eigen::MatrixXcd m = random_matrix(r, 16);
    ltv::svd_result s = ltv::svd(wrap(m));

    for (int i = 0; i < 16; i += 5)
    {
        auto res = ltv::verify_singular_triple(m, s.u.col(i), s.v.col(i), s.sigmas(i));
        CHECK(res.first <= 1e-8 * s.sigmas(0));
        CHECK(res.second <= 1e-8 * s.sigmas(0));
    }

    // perturbing u by 1e-3 moves the residual to that scale
    Eigen::VectorXcd u = s.u.col(0);
    for (int i = 0; i < 16; i++)
        u(i) += 1e-3 * r.cgauss();
    u /= u.norm();
    auto res = ltv::verify_singular_triple(m, u, s.v.col(0), s.sigmas(0));
    CHECK(res.first > 1e-5 * s.sigmas(0));
    CHECK(res.first < 1e-1 * s.sigmas(0));
}

TEST_CASE("degenerate-norm and malformed inputs are rejected")
{
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(4, 4);
    Eigen::VectorXcd z = Eigen::VectorXcd::Zero(4);
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(4);
    e(0) = 1.0;
    CHECK_THROWS_AS((void)ltv::verify_singular_triple(m, z, e, 1.0), ltv::contract_error);
    CHECK_THROWS_AS((void)ltv::verify_singular_triple(m, e, z, 1.0), ltv::contract_error);

    Eigen::MatrixXcd bad = m;
    bad(1, 2) = cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
    CHECK_THROWS_AS((void)ltv::svd(wrap(bad)), ltv::contract_error);
}

TEST_CASE("small perturbations move singular values by at most the perturbation norm")
{
    ltv::rng r(53);
    Eigen::MatrixXcd m = random_matrix(r, 12);
    ltv::svd_result s0 = ltv::svd(wrap(m));

    Eigen::MatrixXcd e = 1e-3 * random_matrix(r, 12);
    double bound = e.operatorNorm();
    ltv::svd_result s1 = ltv::svd(wrap(m + e));

    for (int i = 0; i < 12; i++)
        CHECK(std::abs(s1.sigmas(i) - s0.sigmas(i)) <= bound * (1.0 + 1e-10));
}
