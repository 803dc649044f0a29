// SPDX-License-Identifier: Apache-2.0
//
// ltvchan - singular functions of underspread linear time-varying channels
// Copyright (C) 2026 ltvchan contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ltv_tfa_H
#define ltv_tfa_H

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ltv/tfgrid.hpp"
#include "ltv/wkb.hpp"

namespace ltv
{

// Real time-frequency distribution over the window: rows = time samples,
// columns = frequency bins on [-1/2, 1/2) cycles per sample.
struct tf_distribution
{
    tf_grid grid;
    std::string kind; // "spwvd" or "rspwvd"
    int t_win = 0;    // time-smoothing window length (odd)
    int f_win = 0;    // frequency-smoothing (lag) window length (odd)
};

struct spwvd_options
{
    int t_win = 0;         // 0: N/8 + 1, forced odd
    int f_win = 0;         // 0: N/4 + 1, forced odd
    bool analytic = false; // analytic-signal preprocessing
};

// Smoothed pseudo Wigner-Ville distribution with separable Gaussian
// smoothing. The signal is trigonometrically doubled internally so odd lags
// exist and the full band [-1/2, 1/2) is alias-free; total mass
// sum(W)/nf equals ||x||^2 exactly.
tf_distribution spwvd(const Eigen::VectorXcd &x, const spwvd_options &opt = {});

// Reassigned SPWVD: every cell's value moves to the local centroid computed
// from the time-weighted and derivative-window companion distributions,
// accumulated by nearest-cell binning. Mass is conserved.
tf_distribution reassign(const Eigen::VectorXcd &x,
                         const tf_distribution &dist);

struct ridge_point
{
    double t = 0.0, f = 0.0;
    double w = 0.0; // cell mass
    int it = 0, jf = 0;
};

// Cells with mass above threshold * max, as weighted points with the source
// grid's geometry attached.
struct ridge_set
{
    std::vector<ridge_point> pts;
    double t0 = 0.0, dt = 1.0, f0 = -0.5, df = 0.0;
    int nt = 0, nf = 0;
};

ridge_set ridge_extract(const tf_distribution &dist, double threshold);

struct ridge_metrics
{
    double mean_cells = 0.0; // mass-weighted mean distance to the level curve
    double p90_cells = 0.0;  // mass-weighted 90th percentile distance
    double mass = 0.0;       // total mass of the compared points
};

// Distances from the weighted points to the bubble's level curve (window
// border arcs of clipped bubbles excluded), in grid cells of the ridge axes.
// The bubble must lie inside the ridge window.
ridge_metrics compare_ridge_to_bubble(const ridge_set &points, const bubble &b);

// Same metric against a whole level set: each point measures distance to the
// nearest curve among all bubbles.
ridge_metrics compare_ridge_to_level(const ridge_set &points,
                                     const std::vector<bubble> &bs);

struct amplitude_metrics
{
    double pearson_r = 0.0;
    double rel_l2 = 0.0;
    int n_used = 0;
};

// Magnitude envelope of u against the model's combined branch amplitude on
// the model's valid mask, both unit-normalized there. smooth_len > 1 applies
// a moving-RMS envelope of that (odd) length before comparing.
amplitude_metrics compare_amplitude(const Eigen::VectorXcd &u_numeric,
                                    const eigenfunction_model &model,
                                    int smooth_len = 1);

} // namespace ltv

#endif
