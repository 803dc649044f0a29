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

#ifndef ltv_spectral_H
#define ltv_spectral_H

#include <utility>

#include <Eigen/Dense>

#include "ltv/discretize.hpp"

namespace ltv
{

// Full singular system H = U diag(s) V^H with s[0] >= s[1] >= ... >= 0.
// Phase convention: the largest-magnitude entry of each right singular vector is
// real positive (ties: first such entry); the left vector carries the matching phase
// so the triple relation H v = s u is preserved. Vectors inside a degenerate sigma
// cluster are an arbitrary orthonormal basis of the subspace.
struct svd_result
{
    Eigen::VectorXd sigmas;
    Eigen::MatrixXcd u;
    Eigen::MatrixXcd v;

    int n() const { return int(sigmas.size()); }
};

svd_result svd(const channel_matrix &h);
svd_result svd(const Eigen::MatrixXcd &h);

// K = H H^H, symmetrized to be Hermitian to machine precision
Eigen::MatrixXcd composite_kernel(const Eigen::MatrixXcd &h);

// Residual norms (|| H v - sigma u ||, || H^H u - sigma v ||) of a candidate triple;
// inputs must be unit-norm vectors of matching length and sigma >= 0
std::pair<double, double> verify_singular_triple(const Eigen::MatrixXcd &h, const Eigen::VectorXcd &u,
                                                 const Eigen::VectorXcd &v, double sigma);

} // namespace ltv

#endif
