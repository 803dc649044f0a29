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

#include "ltv/channel.hpp"

#include <cmath>
#include <cstdio>

#include "ltv/errors.hpp"
#include "ltv/rng.hpp"

namespace ltv
{

static const double pi = 3.14159265358979323846;

static double sinc(double x)
{
    if (std::abs(x) < 1e-12)
        return 1.0;
    return std::sin(pi * x) / (pi * x);
}

multipath_model sample_multipath(const experiment_config &cfg)
{
    if (cfg.n < 2)
        throw config_error("experiment config: n must be at least 2");
    if (cfg.q < 1)
        throw config_error("experiment config: q must be at least 1");
    if (cfg.ts <= 0.0)
        throw config_error("experiment config: ts must be positive");
    if (cfg.delta_tau < 0.0 || cfg.delta_f < 0.0)
        throw config_error("experiment config: spreads must be non-negative");

    // spread product in dimensionless units; >= 1 means no underspread guarantee
    double product = cfg.delta_tau * cfg.delta_f / double(cfg.n);
    if (product >= 1.0)
        std::fprintf(stderr, "warning: spread product %.3f >= 1, channel is not underspread\n", product);

    rng gen(cfg.seed);
    multipath_model m;
    m.taps.resize(cfg.q);
    double df = cfg.delta_f / double(cfg.n); // cycles/sample
    for (auto &t : m.taps)
    {
        t.gain = gen.cgauss();
        t.delay = gen.uniform(0.0, cfg.delta_tau);
        t.doppler = gen.uniform(-0.5 * df, 0.5 * df);
    }
    return m;
}

// --- transfer function -------------------------------------------------------------

static cplx transfer_multipath(const multipath_model &m, double t, double f)
{
    cplx acc(0.0, 0.0);
    for (const auto &p : m.taps)
        acc += p.gain * std::polar(1.0, 2.0 * pi * (p.doppler * t - f * p.delay));
    return acc;
}

// Simpson weights over the closed-form profile; the tabulated node spacing sets the
// base resolution which is refined 8x
static cplx profile_integral(const line_spread_model &m, const std::function<cplx(double)> &phase)
{
    if (m.eval)
    {
        double lo = m.eval_lo, hi = m.eval_hi;
        if (!(hi > lo))
            throw config_error("line-spread model: eval support is empty");
        size_t base = m.g.size() >= 2 ? m.g.size() : 128;
        size_t segs = 8 * base;
        if (segs % 2)
            segs++;
        double h = (hi - lo) / double(segs);
        cplx acc = m.eval(lo) * phase(lo) + m.eval(hi) * phase(hi);
        for (size_t i = 1; i < segs; i++)
            acc += m.eval(lo + double(i) * h) * phase(lo + double(i) * h) * ((i % 2) ? 4.0 : 2.0);
        return acc * (h / 3.0);
    }
    cplx acc(0.0, 0.0);
    for (const auto &node : m.g)
        acc += node.weight * phase(node.delay);
    return acc;
}

cplx line_profile_spectrum(const line_spread_model &m, double f)
{
    return profile_integral(m, [&](double tau) { return std::polar(1.0, -2.0 * pi * f * tau); });
}

cplx line_kernel(const line_spread_model &m, double f)
{
    return profile_integral(
        m, [&](double tau) { return std::polar(1.0, -2.0 * pi * f * tau + pi * m.mu * tau * tau); });
}

std::vector<tap> line_spread_taps(const line_spread_model &m)
{
    if (m.g.empty())
        throw config_error("line-spread model: tabulated profile is empty");
    std::vector<tap> taps;
    taps.reserve(m.g.size());
    for (const auto &node : m.g)
        taps.push_back({node.weight, node.delay, m.mu * node.delay + m.f0});
    return taps;
}

// H(t, f) for a sampled response: band interpolation along time, exact transform
// along delay
static cplx transfer_tabulated(const tabulated_model &m, double t, double f)
{
    const Eigen::Index nt = m.h.rows(), nd = m.h.cols();
    cplx acc(0.0, 0.0);
    double nearest = std::round(t);
    bool on_grid = std::abs(t - nearest) < 1e-9 && nearest >= 0 && nearest < double(nt);
    for (Eigen::Index md = 0; md < nd; md++)
    {
        cplx ht;
        if (on_grid)
        {
            ht = m.h(Eigen::Index(nearest), md);
        }
        else
        {
            ht = cplx(0.0, 0.0);
            for (Eigen::Index n = 0; n < nt; n++)
                ht += m.h(n, md) * sinc(t - double(n));
        }
        acc += ht * std::polar(1.0, -2.0 * pi * f * double(md));
    }
    return acc;
}

cplx transfer_function(const channel_model &model, double t, double f)
{
    if (const auto *mp = std::get_if<multipath_model>(&model))
        return transfer_multipath(*mp, t, f);
    if (const auto *ls = std::get_if<line_spread_model>(&model))
        return std::polar(1.0, 2.0 * pi * ls->f0 * t) * line_profile_spectrum(*ls, f - ls->mu * t);
    return transfer_tabulated(std::get<tabulated_model>(model), t, f);
}

// --- spreading function ------------------------------------------------------------

spreading_result spreading_function(const channel_model &model, double tau, double nu)
{
    if (const auto *mp = std::get_if<multipath_model>(&model))
    {
        // delta masses; pointwise values are not defined, return the measure
        std::vector<spread_mass> masses;
        masses.reserve(mp->taps.size());
        for (const auto &t : mp->taps)
            masses.push_back({t.gain, t.delay, t.doppler});
        return masses;
    }
    if (const auto *ls = std::get_if<line_spread_model>(&model))
    {
        // line measure nu = mu tau + f0, discretized over the tabulated nodes
        std::vector<spread_mass> masses;
        masses.reserve(ls->g.size());
        for (const auto &node : ls->g)
            masses.push_back({node.weight, node.delay, ls->mu * node.delay + ls->f0});
        return masses;
    }

    const auto &tb = std::get<tabulated_model>(model);
    const Eigen::Index nt = tb.h.rows(), nd = tb.h.cols();
    cplx acc(0.0, 0.0);
    double nearest = std::round(tau);
    bool on_grid = std::abs(tau - nearest) < 1e-9;
    for (Eigen::Index md = 0; md < nd; md++)
    {
        double w = on_grid ? (double(md) == nearest ? 1.0 : 0.0) : sinc(tau - double(md));
        if (w == 0.0)
            continue;
        cplx s(0.0, 0.0);
        for (Eigen::Index n = 0; n < nt; n++)
            s += tb.h(n, md) * std::polar(1.0, -2.0 * pi * nu * double(n));
        acc += w * s;
    }
    return acc;
}

// --- sample-domain kernel and application ------------------------------------------

// Entry (n, k) of the discretized operator for one path. Projecting the Doppler-shifted,
// delayed band-limited input onto the output band gives, exactly,
//     (1 - |f|) e^{j pi f (n + k + tau)} sinc((1 - |f|)(n - k - tau)),
// the overlap of the two unit-band rect spectra with offset f. For |f| << 1 this is the
// familiar h e^{j 2 pi f n} sinc(n - k - tau) up to O(f) terms.
cplx tap_entry(const tap &t, double n, double k, const kernel_options &opt)
{
    double d = n - k - t.delay;
    if (opt.sinc_tail > 0 && std::abs(d) > double(opt.sinc_tail))
        return cplx(0.0, 0.0);
    double w = 1.0 - std::abs(t.doppler);
    if (w <= 0.0)
        return cplx(0.0, 0.0); // Doppler beyond the band: no spectral overlap survives
    double na = n + opt.t_offset, ka = k + opt.t_offset;
    return t.gain * std::polar(w * sinc(w * d), pi * t.doppler * (na + ka + t.delay));
}

static Eigen::VectorXcd apply_taps(const std::vector<tap> &taps, const Eigen::VectorXcd &x,
                                   const kernel_options &opt, bool adjoint)
{
    const Eigen::Index n = x.size();
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(n);
    for (const auto &t : taps)
    {
        for (Eigen::Index i = 0; i < n; i++)
        {
            cplx acc(0.0, 0.0);
            if (!adjoint)
            {
                for (Eigen::Index k = 0; k < n; k++)
                    acc += tap_entry(t, double(i), double(k), opt) * x[k];
            }
            else
            {
                for (Eigen::Index k = 0; k < n; k++)
                    acc += std::conj(tap_entry(t, double(k), double(i), opt)) * x[k];
            }
            y[i] += acc;
        }
    }
    return y;
}

static Eigen::VectorXcd apply_tabulated(const tabulated_model &m, const Eigen::VectorXcd &x, bool adjoint)
{
    const Eigen::Index n = x.size(), nd = m.h.cols();
    if (m.h.rows() < n)
        throw contract_error("tabulated model: response has fewer time samples than the input");
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(n);
    if (!adjoint)
    {
        for (Eigen::Index i = 0; i < n; i++)
            for (Eigen::Index md = 0; md < nd && md <= i; md++)
                y[i] += m.h(i, md) * x[i - md];
    }
    else
    {
        for (Eigen::Index k = 0; k < n; k++)
            for (Eigen::Index md = 0; md < nd && k + md < n; md++)
                y[k] += std::conj(m.h(k + md, md)) * x[k + md];
    }
    return y;
}

Eigen::VectorXcd apply_channel(const channel_model &model, const Eigen::VectorXcd &x, const kernel_options &opt)
{
    if (x.size() == 0)
        return Eigen::VectorXcd(0);
    if (const auto *mp = std::get_if<multipath_model>(&model))
        return apply_taps(mp->taps, x, opt, false);
    if (const auto *ls = std::get_if<line_spread_model>(&model))
        return apply_taps(line_spread_taps(*ls), x, opt, false);
    return apply_tabulated(std::get<tabulated_model>(model), x, false);
}

Eigen::VectorXcd apply_adjoint(const channel_model &model, const Eigen::VectorXcd &x, const kernel_options &opt)
{
    if (x.size() == 0)
        return Eigen::VectorXcd(0);
    if (const auto *mp = std::get_if<multipath_model>(&model))
        return apply_taps(mp->taps, x, opt, true);
    if (const auto *ls = std::get_if<line_spread_model>(&model))
        return apply_taps(line_spread_taps(*ls), x, opt, true);
    return apply_tabulated(std::get<tabulated_model>(model), x, true);
}

} // namespace ltv
