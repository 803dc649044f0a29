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

#include "ltv/tfgrid.hpp"

#include <algorithm>
#include <cmath>

#include "ltv/errors.hpp"

namespace ltv
{

tf_grid make_grid(int nt, int nf, double t0, double dt, double f0, double df)
{
    if (nt < 2 || nf < 2)
        throw config_error("tf_grid: need at least 2 samples per axis");
    if (!(dt > 0.0) || !(df > 0.0))
        throw config_error("tf_grid: axis steps must be positive");
    tf_grid g;
    g.nt = nt;
    g.nf = nf;
    g.t0 = t0;
    g.dt = dt;
    g.f0 = f0;
    g.df = df;
    g.v.assign(size_t(nt) * size_t(nf), 0.0);
    return g;
}

double tf_grid::max_value() const
{
    return *std::max_element(v.begin(), v.end());
}

double tf_grid::min_value() const
{
    return *std::min_element(v.begin(), v.end());
}

double tf_grid::bilinear(double t, double f) const
{
    double x = (t - t0) / dt;
    double y = (f - f0) / df;
    x = std::clamp(x, 0.0, double(nt - 1));
    y = std::clamp(y, 0.0, double(nf - 1));
    int ix = std::min(int(x), nt - 2);
    int iy = std::min(int(y), nf - 2);
    double ax = x - double(ix), ay = y - double(iy);
    return (1 - ax) * (1 - ay) * at(ix, iy) + ax * (1 - ay) * at(ix + 1, iy) +
           (1 - ax) * ay * at(ix, iy + 1) + ax * ay * at(ix + 1, iy + 1);
}

} // namespace ltv
