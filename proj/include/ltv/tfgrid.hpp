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

#ifndef ltv_tfgrid_H
#define ltv_tfgrid_H

#include <vector>

namespace ltv
{

// Real-valued time-frequency raster. Row index it walks the time axis, column index
// jf the frequency axis; value(it, jf) sits at (t0 + it*dt, f0 + jf*df).
struct tf_grid
{
    int nt = 0, nf = 0;
    double t0 = 0.0, dt = 1.0;
    double f0 = -0.5, df = 0.0;
    std::vector<double> v;

    double &at(int it, int jf) { return v[size_t(it) * size_t(nf) + size_t(jf)]; }
    double at(int it, int jf) const { return v[size_t(it) * size_t(nf) + size_t(jf)]; }

    double t_of(int it) const { return t0 + dt * double(it); }
    double f_of(int jf) const { return f0 + df * double(jf); }

    double max_value() const;
    double min_value() const;

    // Bilinear sample at physical coordinates, clamped to the grid hull
    double bilinear(double t, double f) const;
};

tf_grid make_grid(int nt, int nf, double t0, double dt, double f0, double df);

} // namespace ltv

#endif
