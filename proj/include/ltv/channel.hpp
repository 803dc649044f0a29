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

#ifndef ltv_channel_H
#define ltv_channel_H

#include <complex>
#include <cstdint>
#include <functional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace ltv
{

// All internal quantities are in normalized units: time and delay in samples (Ts = 1),
// frequency and Doppler in cycles per sample. Conversions from physical units happen
// at the tool boundary.

using cplx = std::complex<double>;

// One propagation path: gain, delay (samples, >= 0), Doppler shift (cycles/sample)
struct tap
{
    cplx gain{0.0, 0.0};
    double delay = 0.0;
    double doppler = 0.0;
};

struct multipath_model
{
    std::vector<tap> taps;
};

// Point mass on the delay axis; `weight` carries the quadrature weight, so a smooth
// profile tabulated with step d tau enters as weight = g(tau) * d tau.
struct delay_node
{
    cplx weight{0.0, 0.0};
    double delay = 0.0;
};

// Spreading function concentrated on the line nu = mu * tau + f0: S(tau, nu) =
// g(tau) delta(nu - mu tau - f0). The impulse response is h(t, tau) =
// g(tau) e^{j 2 pi mu tau t} e^{j 2 pi f0 t}.
struct line_spread_model
{
    std::vector<delay_node> g;
    double mu = 0.0;
    double f0 = 0.0;

    // Optional closed-form delay profile density. When set, frequency-domain
    // quantities (G, K) are integrated by Simpson quadrature over
    // [eval_lo, eval_hi] at 8x the tabulated node density; the tabulated nodes
    // remain authoritative for discretization.
    std::function<cplx(double)> eval;
    double eval_lo = 0.0, eval_hi = 0.0;
};

// Sampled impulse response h[n, m]: row n = time, column m = delay, both on the
// Ts grid.
struct tabulated_model
{
    Eigen::MatrixXcd h;
};

using channel_model = std::variant<multipath_model, line_spread_model, tabulated_model>;

// Random multipath experiment: q paths, gains iid circular complex Gaussian with
// unit variance, delays uniform on [0, delta_tau * Ts], Dopplers uniform on
// [-delta_f / (2 N Ts), +delta_f / (2 N Ts)].
struct experiment_config
{
    int n = 256;
    double ts = 1.0;
    int q = 10;
    double delta_tau = 4.0; // delay spread in units of Ts
    double delta_f = 4.0;   // Doppler spread in units of 1/(N Ts)
    std::uint64_t seed = 1;
};

// Draws a multipath realization. Deterministic for a given seed. Emits a warning on
// stderr when the spread product delta_tau * delta_f / N reaches 1 (channel no longer
// underspread); sampling still proceeds.
multipath_model sample_multipath(const experiment_config &cfg);

// Time-varying transfer function H(t, f)
cplx transfer_function(const channel_model &model, double t, double f);

// Fourier transform of the tabulated delay profile, G(f) = integral of
// g(tau) e^{-j 2 pi f tau} d tau
cplx line_profile_spectrum(const line_spread_model &m, double f);

// The line-spread model acts on chirps as multiplication by
// K(f, mu) = integral of g(tau) e^{-j 2 pi f tau} e^{j pi mu tau^2} d tau
cplx line_kernel(const line_spread_model &m, double f);

// Equivalent discrete-path representation of a line-spread model: one tap per
// tabulated node, Doppler mu * tau + f0
std::vector<tap> line_spread_taps(const line_spread_model &m);

// Delay-Doppler spreading function. Models with singular (delta-mass) spreading
// return the measure itself rather than a pointwise value.
struct spread_mass
{
    cplx weight{0.0, 0.0};
    double delay = 0.0;
    double doppler = 0.0;
};

using spreading_result = std::variant<cplx, std::vector<spread_mass>>;

spreading_result spreading_function(const channel_model &model, double tau, double nu);

// Kernel application options shared with the discretizer. sinc_tail = 0 keeps the
// full kernel; a positive value zeroes it beyond that many samples from the peak
// (used by the link simulator to give the channel a finite order). t_offset shifts
// the absolute time of sample 0, so consecutive blocks see coherent Doppler phases.
struct kernel_options
{
    int sinc_tail = 0;
    double t_offset = 0.0;
};

// y = H x on the sample grid; output has the same length as the input
Eigen::VectorXcd apply_channel(const channel_model &model, const Eigen::VectorXcd &x,
                               const kernel_options &opt = {});

// y = H* x (adjoint)
Eigen::VectorXcd apply_adjoint(const channel_model &model, const Eigen::VectorXcd &x,
                               const kernel_options &opt = {});

// Exact sample-domain kernel of one path: the (n, k) entry of the discretized
// operator, i.e. the double-sinc projection integral evaluated in closed form
cplx tap_entry(const tap &t, double n, double k, const kernel_options &opt = {});

} // namespace ltv

#endif
