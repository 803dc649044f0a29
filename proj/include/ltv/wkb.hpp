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

#ifndef ltv_wkb_H
#define ltv_wkb_H

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "ltv/channel.hpp"
#include "ltv/discretize.hpp"
#include "ltv/tfgrid.hpp"

namespace ltv
{

struct vec2
{
    double t = 0.0;
    double f = 0.0;
};

enum class turn_kind
{
    convex,
    concave
};

// Fold of a level curve where the frequency derivative of |H|^2 vanishes.
// The fold sits on the polyline segment (vertex, vertex+1) at fraction frac.
struct turning_point
{
    double t = 0.0;
    double f = 0.0;
    turn_kind kind = turn_kind::convex;
    std::size_t vertex = 0;
    double frac = 0.0;
};

// One connected level curve of |H(t,f)| together with the region data the
// area rule and the eigenfunction synthesis need.
//
// Closed curves are stored counterclockwise; "hole" marks curves that bound a
// below-level island inside a larger region (their area subtracts). Curves cut
// by the window edge are stored with the closing border arc included so the
// shoelace area is the clipped area; on_border[i] flags the edge from vertex i
// to vertex i+1 as part of that closing arc (not part of the level curve) and
// "boundary_points" records where the curve meets the window edge.
struct bubble
{
    std::vector<vec2> polyline; // closed implicitly (last connects to first)
    std::vector<std::uint8_t> on_border;
    double level = 0.0;
    double area = 0.0;
    bool clipped = false;
    bool hole = false;
    std::vector<turning_point> turning_points;
    std::vector<vec2> boundary_points;
};

// |H(t, f)| over t in [0, N*Ts) and f in [-1/(2Ts), 1/(2Ts)), oversampled by
// the given factor along both axes.
tf_grid magnitude_grid(const channel_model &model, int n, double ts = 1.0,
                       int oversample = 4);

// Marching-squares contours of the grid at the given level, stitched into
// closed loops or window-clipped arcs. Bubbles come back sorted by
// descending area. A level above the grid maximum yields an empty list.
std::vector<bubble> extract_level_set(const tf_grid &grid, double level);

// Area of {(t,f) : grid >= level} inside the window, from the oriented
// contour polygons (holes subtract, clipped regions are closed along the
// window edge).
double superlevel_area(const tf_grid &grid, double level);

// Locate the folds of the curve (sign changes of d|H|^2/df along the
// polyline) and classify each one convex or concave from the local turn
// direction of the counterclockwise traversal.
void annotate_turning_points(bubble &b, const tf_grid &grid);

// A point strictly on the level curve (midpoint of the first non-border
// edge). For clipped curves this avoids the window border, where containment
// tests are unreliable.
vec2 curve_probe(const bubble &b);

// True if the point lies inside the closed polygon of the bubble (window
// closure arcs included, so a clipped region tests as its clipped area).
bool bubble_contains(const bubble &b, vec2 p);

// Monotone non-increasing area function sigma -> superlevel area, built from
// the sorted grid values (each sample cell contributes dt*df).
class area_function
{
  public:
    explicit area_function(const tf_grid &grid);

    double operator()(double sigma) const;

    double cell_area() const { return cell_; }
    double window_area() const { return cell_ * double(sorted_.size()); }
    double max_value() const { return sorted_.empty() ? 0.0 : sorted_.front(); }

  private:
    std::vector<double> sorted_; // descending
    double cell_ = 0.0;
};

struct level_entry
{
    double sigma = 0.0;
    int n = 0;
};

struct quantize_options
{
    int max_levels = -1;     // < 0: as many as the window area admits
    bool cross_check = true; // contour-area validation of each level
    double check_abs = 0.5;  // tolerated |contour - counted| area mismatch
    double check_rel = 0.05;
};

// Levels sigma_n with superlevel area n + 1/2, found by bisection on the
// monotone area function, for n = 0, 1, ... while the window admits them.
// With cross_check the counted areas are validated against contour areas at
// each returned level; a mismatch or a non-monotone contour-area sequence
// raises numerical_error advising a finer grid.
std::vector<level_entry> quantized_levels(const tf_grid &grid, double sigma_max,
                                          const quantize_options &opt = {});

// One predicted mode of the per-curve quantization: as the level falls, every
// connected superlevel component emits a mode each time its enclosed area
// (holes subtracted) crosses a half integer. Near-degenerate components emit
// interleaved modes; the hosting curve tells where the mode localizes.
struct mode_entry
{
    double sigma = 0.0;      // interpolated crossing level
    double orbit_area = 0.0; // host curve area at the crossing (k + 1/2)
    bubble orbit;            // host curve snapshot at the nearest table level
};

// Per-curve mode table over the range of the global level table: curves are
// tracked between consecutive levels by containment, their area growth is
// interpolated linearly, and every half-integer crossing becomes one entry.
// Entries come back sorted by descending level; entry n predicts mode n.
std::vector<mode_entry> mode_table(const tf_grid &grid,
                                   const std::vector<level_entry> &levels);

// Closed-form singular triple of a line-concentrated channel at modulation
// frequency f_i, sampled on n time points spaced ts and normalized to unit
// norm over the window.
struct singular_triple
{
    Eigen::VectorXcd v;
    Eigen::VectorXcd u;
    double sigma = 0.0;
    cplx k = 0.0; // complex coupling integral; sigma = |k|
};

singular_triple theorem1_solution(const line_spread_model &model, double f_i,
                                  int n);

// One single-valued-in-t piece of a level curve between consecutive folds.
// Samples sit at integer multiples of the grid's time step origin: index i of
// the arrays corresponds to t = (n_start + i) * ts.
struct branch_model
{
    std::int64_t n_start = 0;
    std::vector<double> freq;  // instantaneous frequency f_m(t)
    std::vector<double> amp;   // |d|H|^2/df|^(-1/2), unnormalized
    std::vector<double> phase; // radians, trapezium-integrated 2*pi*f_m
    std::vector<std::uint8_t> valid;
};

struct eigenfunction_model
{
    double sigma = 0.0;
    double ts = 1.0;
    bubble orbit;
    std::vector<branch_model> components;

    // Sum of the branch contributions A_m e^{j phi_m} on [0, n_total),
    // restricted to valid samples, normalized to unit norm.
    Eigen::VectorXcd synthesize(int n_total) const;

    // sqrt(sum_m A_m(t)^2) over valid samples, normalized to unit norm on
    // its support; zero elsewhere.
    std::vector<double> combined_amplitude(int n_total) const;

    // True where at least one branch covers the sample and none of the
    // covering branches is inside an excluded fold neighborhood.
    std::vector<std::uint8_t> valid_mask(int n_total) const;
};

struct synthesis_options
{
    // Half-width of the neighborhood around each fold whose samples are
    // dropped from the valid mask, in time samples. The stationary-phase
    // amplitude diverges at folds; the transition zone spans a few samples.
    double exclude_time = 3.0;
};

// Split an annotated bubble into branches at its folds, integrate the phase
// (with +pi/2 jumps at convex folds and -pi/2 at concave ones, following the
// counterclockwise traversal), and tabulate amplitude and frequency per
// branch. The bubble must carry fold annotations unless it is clipped.
eigenfunction_model synthesize_eigenfunction(const bubble &b,
                                             const tf_grid &grid, double sigma,
                                             const synthesis_options &opt = {});

// Right singular function from a synthesized left one through the adjoint
// kernel: v = H^* u / ||H^* u||. Also returns the norm, which estimates the
// singular value when u is close to a true left singular function.
std::pair<Eigen::VectorXcd, double> right_from_left(const channel_matrix &h,
                                                    const Eigen::VectorXcd &u);

// Discrete symmetrized time-frequency symbol of the composite kernel
// K = H H^*: ktilde(p, q) = sum_u K(q + u/2, q - u/2) e^{-j 2 pi p u}, with
// the half-sample kernel values supplied by trigonometric interpolation.
// Result grid: t axis = q (n rows, step ts), f axis = p (n bins over
// [-1/(2ts), 1/(2ts))). The symbol of a composite kernel is real; an
// imaginary residue above 1e-8 of the peak raises numerical_error.
tf_grid wigner_symbol(const channel_matrix &h);

} // namespace ltv

#endif
