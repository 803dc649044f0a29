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

#ifndef ltv_discretize_H
#define ltv_discretize_H

#include <string>

#include <Eigen/Dense>

#include "ltv/channel.hpp"

namespace ltv
{

// Dense matrix form of a windowed channel: row n = output sample, column k = input
// sample, entry H[n, k] = h[n, n - k] of the band-limited projection of the
// continuous response.
struct channel_matrix
{
    Eigen::MatrixXcd m;
    double ts = 1.0;
    std::string provenance;

    int n() const { return int(m.rows()); }
};

// Projects the continuous response of `model` onto an n-sample window (band-limited
// input, time-limited output). Columns agree with apply_channel on unit impulses.
channel_matrix build_channel_matrix(const channel_model &model, int n, const kernel_options &opt = {});

// Kernel of the band-then-time limiting operator: A[n, k] = sin(2 pi w (n-k)) / (pi (n-k)),
// diagonal 2w. Real symmetric; about 2 w n eigenvalues are close to 1. Valid for
// 0 < w <= 1/2 (w = 1/2 gives the identity).
channel_matrix time_band_limiter(int n, double w);

} // namespace ltv

#endif
