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

#include "ltv/spectral.hpp"

#include <cmath>
#include <complex>
#include <vector>

#include "ltv/errors.hpp"

// LAPACK divide-and-conquer SVD for double-complex matrices (column-major)
extern "C" void zgesdd_(const char *jobz, const int *m, const int *n, std::complex<double> *a,
                        const int *lda, double *s, std::complex<double> *u, const int *ldu,
                        std::complex<double> *vt, const int *ldvt, std::complex<double> *work,
                        const int *lwork, double *rwork, int *iwork, int *info);

namespace ltv
{

svd_result svd(const Eigen::MatrixXcd &h)
{
    if (h.rows() != h.cols() || h.rows() < 1)
        throw contract_error("svd: expected a non-empty square matrix");
    if (!h.allFinite())
        throw contract_error("svd: matrix has non-finite entries");

    const int n = int(h.rows());
    Eigen::MatrixXcd a = h; // zgesdd destroys its input
    svd_result out;
    out.sigmas.resize(n);
    out.u.resize(n, n);
    out.v.resize(n, n);
    Eigen::MatrixXcd vt(n, n);

    std::vector<int> iwork(8 * size_t(n));
    // size from the zgesdd documentation for jobz='A', m = n
    std::vector<double> rwork(std::max<size_t>(1, size_t(n) * std::max<size_t>(5 * size_t(n) + 7, 2 * size_t(n) * 2 + 2 * size_t(n) + 1)));

    int info = 0, lwork = -1;
    std::complex<double> wkopt;
    const char jobz = 'A';
    zgesdd_(&jobz, &n, &n, a.data(), &n, out.sigmas.data(), out.u.data(), &n, vt.data(), &n, &wkopt,
            &lwork, rwork.data(), iwork.data(), &info);
    if (info != 0)
        throw numerical_error("svd: workspace query failed");

    lwork = int(wkopt.real());
    std::vector<std::complex<double>> work(static_cast<size_t>(lwork));
    zgesdd_(&jobz, &n, &n, a.data(), &n, out.sigmas.data(), out.u.data(), &n, vt.data(), &n,
            work.data(), &lwork, rwork.data(), iwork.data(), &info);
    if (info != 0)
        throw numerical_error("svd: zgesdd did not converge, info=" + std::to_string(info));

    out.v = vt.adjoint();

    // phase convention: largest-magnitude entry of each v column real positive
    for (int i = 0; i < n; i++)
    {
        Eigen::Index imax = 0;
        double best = -1.0;
        for (Eigen::Index r = 0; r < n; r++)
        {
            double mag = std::abs(out.v(r, i));
            if (mag > best + 1e-15)
            {
                best = mag;
                imax = r;
            }
        }
        cplx pivot = out.v(imax, i);
        if (std::abs(pivot) > 0.0)
        {
            cplx rot = std::conj(pivot) / std::abs(pivot);
            out.v.col(i) *= rot;
            out.u.col(i) *= rot;
        }
    }
    return out;
}

svd_result svd(const channel_matrix &h)
{
    return svd(h.m);
}

Eigen::MatrixXcd composite_kernel(const Eigen::MatrixXcd &h)
{
    if (h.rows() != h.cols() || h.rows() < 1)
        throw contract_error("composite_kernel: expected a non-empty square matrix");
    Eigen::MatrixXcd k = h * h.adjoint();
    k = 0.5 * (k + Eigen::MatrixXcd(k.adjoint())); // scrub rounding skew
    return k;
}

std::pair<double, double> verify_singular_triple(const Eigen::MatrixXcd &h, const Eigen::VectorXcd &u,
                                                 const Eigen::VectorXcd &v, double sigma)
{
    if (h.rows() != h.cols())
        throw contract_error("verify_singular_triple: matrix must be square");
    if (u.size() != h.rows() || v.size() != h.rows())
        throw contract_error("verify_singular_triple: vector lengths do not match the matrix");
    if (sigma < 0.0)
        throw contract_error("verify_singular_triple: sigma must be non-negative");
    const double tol = 1e-8;
    if (std::abs(u.norm() - 1.0) > tol || std::abs(v.norm() - 1.0) > tol)
        throw contract_error("verify_singular_triple: vectors must be unit norm");

    double r1 = (h * v - sigma * u).norm();
    double r2 = (h.adjoint() * u - sigma * v).norm();
    return {r1, r2};
}

} // namespace ltv
