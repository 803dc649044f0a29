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

#include "ltv/linksim.hpp"

#include <cmath>
#include <cstdlib>

#include "ltv/errors.hpp"
#include "ltv/rng.hpp"

namespace ltv
{

static const double inv_sqrt2 = 0.70710678118654752440;
static const double inv_sqrt10 = 0.31622776601683793320;

// 16-QAM per-dimension Gray levels, indexed by the 2-bit pattern:
// 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3 (adjacent levels differ in one bit)
static const double qam_level[4] = {-3.0, -1.0, +3.0, +1.0};

static int qam_slice_dim(double x)
{
    if (x < -2.0)
        return 0; // 00
    if (x < 0.0)
        return 1; // 01
    if (x < 2.0)
        return 3; // 11
    return 2;     // 10
}

int bits_per_symbol(constellation_kind kind)
{
    return kind == constellation_kind::qpsk ? 2 : 4;
}

cplx map_symbol(constellation_kind kind, int sym)
{
    if (kind == constellation_kind::qpsk)
    {
        if (sym < 0 || sym > 3)
            throw contract_error("map_symbol: QPSK symbol index out of range");
        double i = (sym & 1) ? -1.0 : 1.0;
        double q = (sym & 2) ? -1.0 : 1.0;
        return cplx(i * inv_sqrt2, q * inv_sqrt2);
    }
    if (sym < 0 || sym > 15)
        throw contract_error("map_symbol: 16-QAM symbol index out of range");
    return cplx(qam_level[sym & 3] * inv_sqrt10, qam_level[(sym >> 2) & 3] * inv_sqrt10);
}

int slice_symbol(constellation_kind kind, cplx soft)
{
    if (kind == constellation_kind::qpsk)
        return (soft.real() < 0.0 ? 1 : 0) | (soft.imag() < 0.0 ? 2 : 0);
    int bi = qam_slice_dim(soft.real() / inv_sqrt10);
    int bq = qam_slice_dim(soft.imag() / inv_sqrt10);
    return (bq << 2) | bi;
}

static int usable_rank(const svd_result &s)
{
    if (s.n() == 0)
        return 0;
    double floor_sigma = 1e-12 * s.sigmas(0);
    int r = 0;
    while (r < s.n() && s.sigmas(r) > floor_sigma)
        r++;
    return r;
}

Eigen::VectorXcd transmit_block(const Eigen::VectorXcd &s, const svd_result &svd,
                                const std::vector<double> &c, int l)
{
    const int k = int(s.size());
    if (k < 1)
        throw config_error("transmit_block: no symbols");
    if (l < 0)
        throw config_error("transmit_block: negative guard length");
    if (k > usable_rank(svd))
        throw config_error("transmit_block: more subchannels requested than nonzero singular values");
    if (!c.empty() && int(c.size()) < k)
        throw config_error("transmit_block: coefficient vector shorter than the symbol vector");

    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(svd.n() + l);
    for (int m = 0; m < k; m++)
    {
        double cm = c.empty() ? 1.0 : c[size_t(m)];
        x.head(svd.n()) += (cm * s(m)) * svd.v.col(m);
    }
    return x;
}

block_estimate receive_block(const Eigen::VectorXcd &y, const svd_result &svd,
                             const std::vector<double> &c, int k)
{
    const int n = svd.n();
    if (int(y.size()) < n)
        throw contract_error("receive_block: received window shorter than the channel dimension");
    if (k < 1 || k > n)
        throw config_error("receive_block: subchannel count out of range");
    if (!c.empty() && int(c.size()) < k)
        throw config_error("receive_block: coefficient vector shorter than the subchannel count");

    double floor_gain = 1e-12 * (n > 0 ? svd.sigmas(0) : 0.0);
    block_estimate out;
    out.soft = Eigen::VectorXcd::Zero(k);
    out.usable.assign(size_t(k), 1);
    for (int m = 0; m < k; m++)
    {
        double cm = c.empty() ? 1.0 : c[size_t(m)];
        double gain = svd.sigmas(m) * cm;
        if (!(gain > floor_gain))
        {
            out.usable[size_t(m)] = 0;
            continue;
        }
        out.soft(m) = (svd.u.col(m).adjoint() * y.head(n))(0) / gain;
    }
    return out;
}

// Delay spread and time variation of a model, for guard validation and SVD reuse.
namespace
{
struct model_shape
{
    double max_delay = 0.0;
    bool integer_delays = true;
    bool time_invariant = true;
    bool tabulated = false;
    int tab_order = 0;
};

model_shape shape_of_taps(const std::vector<tap> &taps)
{
    model_shape s;
    for (const auto &t : taps)
    {
        s.max_delay = std::max(s.max_delay, t.delay);
        if (std::abs(t.delay - std::round(t.delay)) > 1e-12)
            s.integer_delays = false;
        if (t.doppler != 0.0)
            s.time_invariant = false;
    }
    return s;
}

model_shape shape_of(const channel_model &model)
{
    if (const auto *mp = std::get_if<multipath_model>(&model))
        return shape_of_taps(mp->taps);
    if (const auto *ls = std::get_if<line_spread_model>(&model))
        return shape_of_taps(line_spread_taps(*ls));

    const auto &tb = std::get<tabulated_model>(model);
    model_shape s;
    s.tabulated = true;
    s.tab_order = int(tb.h.cols()) - 1;
    s.max_delay = double(s.tab_order);
    for (Eigen::Index i = 1; i < tb.h.rows() && s.time_invariant; i++)
        if (tb.h.row(i) != tb.h.row(0))
            s.time_invariant = false;
    return s;
}
} // namespace

link_report run_link(const channel_model &model, const link_config &cfg, int n)
{
    if (n < 2)
        throw config_error("run_link: n must be at least 2");
    if (cfg.k < 1)
        throw config_error("run_link: k must be at least 1");
    if (cfg.l < 0)
        throw config_error("run_link: guard length must be nonnegative");
    if (cfg.k + cfg.l > n)
        throw config_error("run_link: k + l exceeds the block length n");
    if (cfg.num_blocks < 1)
        throw config_error("run_link: num_blocks must be at least 1");
    if (cfg.n0 < 0.0)
        throw config_error("run_link: noise variance must be nonnegative");
    if (!cfg.c.empty())
    {
        if (int(cfg.c.size()) != cfg.k)
            throw config_error("run_link: coefficient vector must have k entries");
        for (double v : cfg.c)
            if (!(v >= 0.0))
                throw config_error("run_link: power coefficients must be nonnegative");
    }

    // The guard must cover the order of the discretized channel. Integer-delay
    // time-invariant models are exactly banded; everything else gets its kernel
    // truncated to fit, so the simulated channel has zero reach past the guard.
    const model_shape shape = shape_of(model);
    kernel_options opt;
    if (shape.tabulated)
    {
        if (cfg.l < shape.tab_order)
            throw config_error("run_link: guard shorter than the tabulated channel order");
    }
    else if (shape.integer_delays && shape.time_invariant)
    {
        if (cfg.l < int(std::lround(shape.max_delay)))
            throw config_error("run_link: guard shorter than the channel delay spread");
    }
    else
    {
        int tail = cfg.l - int(std::ceil(shape.max_delay));
        if (tail < 1)
            throw config_error("run_link: guard leaves no room for the kernel tail; "
                               "increase l past the delay spread");
        opt.sinc_tail = tail;
    }

    const int bps = bits_per_symbol(cfg.constellation);
    const int nsym = 1 << bps;
    rng gen(cfg.seed);

    link_report rep;
    rep.sub.resize(size_t(cfg.k));

    svd_result cached;
    bool have_cached = false;

    for (int b = 0; b < cfg.num_blocks; b++)
    {
        opt.t_offset = double(b) * double(n + cfg.l);

        const svd_result *sv;
        if (shape.time_invariant && have_cached)
        {
            sv = &cached;
        }
        else
        {
            cached = svd(build_channel_matrix(model, n, opt));
            have_cached = true;
            sv = &cached;
        }

        if (cfg.k > usable_rank(*sv))
            throw config_error("run_link: more subchannels requested than nonzero singular values");

        std::vector<int> sent(size_t(cfg.k));
        Eigen::VectorXcd s(cfg.k);
        for (int m = 0; m < cfg.k; m++)
        {
            sent[size_t(m)] = int(gen.uniform() * nsym);
            if (sent[size_t(m)] == nsym)
                sent[size_t(m)] = nsym - 1;
            s(m) = map_symbol(cfg.constellation, sent[size_t(m)]);
        }

        Eigen::VectorXcd x = transmit_block(s, *sv, cfg.c, cfg.l);
        Eigen::VectorXcd y = sv->u * (sv->sigmas.asDiagonal() * (sv->v.adjoint() * x.head(n)));
        if (cfg.n0 > 0.0)
        {
            double scale = std::sqrt(cfg.n0);
            for (int i = 0; i < n; i++)
                y(i) += scale * gen.cgauss();
        }

        block_estimate est = receive_block(y, *sv, cfg.c, cfg.k);
        for (int m = 0; m < cfg.k; m++)
        {
            auto &st = rep.sub[size_t(m)];
            st.sigma = sv->sigmas(m);
            st.coeff = cfg.c.empty() ? 1.0 : cfg.c[size_t(m)];
            if (!est.usable[size_t(m)])
            {
                st.usable = false;
                continue;
            }
            int hat = slice_symbol(cfg.constellation, est.soft(m));
            int diff = hat ^ sent[size_t(m)];
            st.trials++;
            st.symbol_errors += diff != 0;
            st.bit_errors += __builtin_popcount(unsigned(diff));
            st.noise_var_est += std::norm(est.soft(m) - s(m));
        }
    }

    for (auto &st : rep.sub)
    {
        if (!st.usable)
        {
            rep.unusable_subchannels++;
            continue;
        }
        rep.total_symbols += st.trials;
        rep.total_symbol_errors += st.symbol_errors;
        rep.total_bits += st.trials * bps;
        rep.total_bit_errors += st.bit_errors;
        if (st.trials > 0)
        {
            st.noise_var_est /= double(st.trials);
            st.snr_est = st.noise_var_est > 0.0 ? 1.0 / st.noise_var_est : HUGE_VAL;
        }
    }
    rep.ber = rep.total_bits > 0 ? double(rep.total_bit_errors) / double(rep.total_bits) : 0.0;
    return rep;
}

double q_function(double x)
{
    return 0.5 * std::erfc(x * inv_sqrt2);
}

double qpsk_ber(double es_n0)
{
    // Each rail is antipodal with distance sqrt(Es/2) and per-dimension noise N0/2
    return q_function(std::sqrt(es_n0));
}

} // namespace ltv
