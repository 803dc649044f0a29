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

#include "ltv/discretize.hpp"

#include <cmath>

#include "ltv/errors.hpp"

namespace ltv
{

static const double pi = 3.14159265358979323846;

static void fill_from_taps(Eigen::MatrixXcd &m, const std::vector<tap> &taps, const kernel_options &opt)
{
    const Eigen::Index n = m.rows();
    m.setZero();
    for (const auto &t : taps)
        for (Eigen::Index i = 0; i < n; i++)
            for (Eigen::Index k = 0; k < n; k++)
                m(i, k) += tap_entry(t, double(i), double(k), opt);
}

channel_matrix build_channel_matrix(const channel_model &model, int n, const kernel_options &opt)
{
    if (n < 2)
        throw config_error("build_channel_matrix: n must be at least 2");

    channel_matrix out;
    out.m.resize(n, n);

    if (const auto *mp = std::get_if<multipath_model>(&model))
    {
        if (mp->taps.empty())
            throw config_error("build_channel_matrix: multipath model has no taps");
        fill_from_taps(out.m, mp->taps, opt);
        out.provenance = "multipath q=" + std::to_string(mp->taps.size());
    }
    else if (const auto *ls = std::get_if<line_spread_model>(&model))
    {
        fill_from_taps(out.m, line_spread_taps(*ls), opt);
        out.provenance = "line_spread nodes=" + std::to_string(ls->g.size());
    }
    else
    {
        const auto &tb = std::get<tabulated_model>(model);
        if (tb.h.rows() < n)
            throw contract_error("build_channel_matrix: tabulated response shorter than requested window");
        out.m.setZero();
        const Eigen::Index nd = tb.h.cols();
        for (Eigen::Index i = 0; i < n; i++)
            for (Eigen::Index md = 0; md < nd && md <= i; md++)
                out.m(i, i - md) = tb.h(i, md);
        out.provenance = "tabulated";
    }

    if (!out.m.allFinite())
        throw numerical_error("build_channel_matrix: non-finite entries");
    return out;
}

channel_matrix time_band_limiter(int n, double w)
{
    if (n < 2)
        throw config_error("time_band_limiter: n must be at least 2");
    if (!(w > 0.0) || w > 0.5)
        throw config_error("time_band_limiter: w must lie in (0, 1/2]");

    channel_matrix out;
    out.m.resize(n, n);
    for (Eigen::Index i = 0; i < n; i++)
    {
        for (Eigen::Index k = 0; k < n; k++)
        {
            double d = double(i - k);
            double v = (i == k) ? 2.0 * w : std::sin(2.0 * pi * w * d) / (pi * d);
            out.m(i, k) = cplx(v, 0.0);
        }
    }
    out.provenance = "time_band_limiter w=" + std::to_string(w);
    return out;
}

} // namespace ltv
