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

#include "ltv/tfa.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ltv/errors.hpp"
#include "ltv/fft.hpp"

namespace ltv
{

namespace
{

constexpr double pi = 3.14159265358979323846;

int force_odd(int v)
{
    return (v % 2 == 0) ? v + 1 : v;
}

std::vector<double> gauss_window(int len)
{
    // length 1 degenerates to the identity window
    std::vector<double> w(std::size_t(len), 1.0);
    if (len <= 1)
        return w;
    double s = double(len - 1) / 6.0;
    int half = (len - 1) / 2;
    for (int i = 0; i < len; ++i)
    {
        double d = double(i - half);
        w[std::size_t(i)] = std::exp(-0.5 * d * d / (s * s));
    }
    return w;
}

std::vector<cplx> analytic_signal(const Eigen::VectorXcd &x)
{
    int n = int(x.size());
    std::vector<cplx> s(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        s[std::size_t(i)] = x(i);
    fft(s);
    // zero the negative-frequency half, double the strictly positive bins
    for (int k = 1; k < n; ++k)
    {
        bool nyq = (n % 2 == 0) && (k == n / 2);
        if (k < (n + 1) / 2)
            s[std::size_t(k)] *= 2.0;
        else if (!nyq)
            s[std::size_t(k)] = 0.0;
    }
    ifft(s);
    return s;
}

// Core SPWVD evaluator shared by spwvd() and reassign(): time-smoothing
// window wg over sample offsets, lag window wh over integer sample lags.
// Returns the complex distribution before taking real parts.
Eigen::MatrixXcd spwvd_core(const std::vector<cplx> &x2, int n,
                            const std::vector<double> &wg,
                            const std::vector<double> &wh)
{
    int m2 = 2 * n;
    int pg = (int(wg.size()) - 1) / 2;
    int ph = (int(wh.size()) - 1) / 2;
    auto wrap2 = [&](std::int64_t i) {
        return std::size_t(((i % m2) + m2) % m2);
    };

    // lag-domain accumulation, then one FFT per time row
    Eigen::MatrixXcd w(n, n);
    std::vector<cplx> c(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t)
    {
        std::fill(c.begin(), c.end(), cplx(0.0, 0.0));
        for (int m = -ph; m <= ph; ++m)
        {
            double hw = wh[std::size_t(m + ph)];
            if (hw == 0.0)
                continue;
            cplx acc(0.0, 0.0);
            for (int p = -pg; p <= pg; ++p)
            {
                double gw = wg[std::size_t(p + pg)];
                if (gw == 0.0)
                    continue;
                std::int64_t base = 2 * std::int64_t(t - p);
                acc += gw * x2[wrap2(base + m)] * std::conj(x2[wrap2(base - m)]);
            }
            c[std::size_t(((m % n) + n) % n)] += hw * acc;
        }
        for (int i = 1; i < n; i += 2)
            c[std::size_t(i)] = -c[std::size_t(i)]; // center the band
        fft(c);
        for (int k = 0; k < n; ++k)
            w(t, k) = c[std::size_t(k)];
    }
    return w;
}

void check_windows(int n, int t_win, int f_win)
{
    if (t_win >= n || f_win >= n)
        throw config_error("spwvd: smoothing window must be shorter than the "
                           "signal");
    if (t_win < 1 || f_win < 1)
        throw config_error("spwvd: window lengths must be positive");
}

} // namespace

tf_distribution spwvd(const Eigen::VectorXcd &x, const spwvd_options &opt)
{
    int n = int(x.size());
    if (n < 4)
        throw config_error("spwvd: signal too short");
    if (n % 2 != 0)
        throw config_error("spwvd: even signal length required");
    int t_win = opt.t_win > 0 ? force_odd(opt.t_win) : force_odd(n / 8 + 1);
    int f_win = opt.f_win > 0 ? force_odd(opt.f_win) : force_odd(n / 4 + 1);
    check_windows(n, t_win, f_win);

    std::vector<cplx> base(static_cast<std::size_t>(n));
    if (opt.analytic)
        base = analytic_signal(x);
    else
        for (int i = 0; i < n; ++i)
            base[std::size_t(i)] = x(i);
    std::vector<cplx> x2 = upsample(base, 2);

    std::vector<double> wg = gauss_window(t_win);
    double gs = std::accumulate(wg.begin(), wg.end(), 0.0);
    for (double &v : wg)
        v /= gs; // unit-sum time smoothing keeps total mass exact
    std::vector<double> wh = gauss_window(f_win); // peak-normalized lag window

    Eigen::MatrixXcd w = spwvd_core(x2, n, wg, wh);

    tf_distribution d;
    d.kind = "spwvd";
    d.t_win = t_win;
    d.f_win = f_win;
    d.grid = make_grid(n, n, 0.0, 1.0, -0.5, 1.0 / double(n));
    for (int t = 0; t < n; ++t)
        for (int k = 0; k < n; ++k)
            d.grid.at(t, k) = w(t, k).real();
    return d;
}

tf_distribution reassign(const Eigen::VectorXcd &x, const tf_distribution &dist)
{
    int n = int(x.size());
    if (dist.t_win < 1 || dist.f_win < 1)
        throw contract_error("reassign: distribution lacks window metadata");
    if (dist.grid.nt != n || dist.grid.nf != n)
        throw contract_error("reassign: distribution does not match signal");
    if (dist.kind != "spwvd")
        throw contract_error("reassign: expected an spwvd distribution");
    check_windows(n, dist.t_win, dist.f_win);

    std::vector<cplx> base(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        base[std::size_t(i)] = x(i);
    std::vector<cplx> x2 = upsample(base, 2);

    std::vector<double> wg = gauss_window(dist.t_win);
    double gs = std::accumulate(wg.begin(), wg.end(), 0.0);
    for (double &v : wg)
        v /= gs;
    std::vector<double> wh = gauss_window(dist.f_win);

    // companion windows: time-weighted smoothing for the time centroid,
    // lag-derivative for the frequency centroid
    int pg = (int(wg.size()) - 1) / 2;
    std::vector<double> wg_t(wg.size());
    for (int p = -pg; p <= pg; ++p)
        wg_t[std::size_t(p + pg)] = double(p) * wg[std::size_t(p + pg)];
    int ph = (int(wh.size()) - 1) / 2;
    std::vector<double> wh_d(wh.size());
    if (dist.f_win > 1)
    {
        double s = double(dist.f_win - 1) / 6.0;
        for (int m = -ph; m <= ph; ++m)
            wh_d[std::size_t(m + ph)] =
                -double(m) / (s * s) * wh[std::size_t(m + ph)];
    }

    Eigen::MatrixXcd d0 = spwvd_core(x2, n, wg, wh);
    Eigen::MatrixXcd dt = spwvd_core(x2, n, wg_t, wh);
    Eigen::MatrixXcd df = spwvd_core(x2, n, wg, wh_d);

    double peak = 0.0;
    for (int t = 0; t < n; ++t)
        for (int k = 0; k < n; ++k)
            peak = std::max(peak, std::abs(d0(t, k)));
    double floor_ = 1e-12 * peak;

    tf_distribution out;
    out.kind = "rspwvd";
    out.t_win = dist.t_win;
    out.f_win = dist.f_win;
    out.grid = make_grid(n, n, 0.0, 1.0, -0.5, 1.0 / double(n));

    for (int t = 0; t < n; ++t)
    {
        for (int k = 0; k < n; ++k)
        {
            double mass = d0(t, k).real();
            if (mass == 0.0)
                continue;
            int ti = t, ki = k;
            if (std::abs(d0(t, k)) > floor_)
            {
                cplx r_t = dt(t, k) / d0(t, k);
                cplx r_f = df(t, k) / d0(t, k);
                double t_hat = double(t) - r_t.real();
                double f_hat =
                    (double(k) - 0.5 * double(n)) / double(n) -
                    r_f.imag() / (2.0 * pi);
                ti = int(std::lround(t_hat));
                ki = int(std::lround((f_hat + 0.5) * double(n)));
                ti = std::min(std::max(ti, 0), n - 1);
                ki = std::min(std::max(ki, 0), n - 1);
            }
            out.grid.at(ti, ki) += mass;
        }
    }
    return out;
}

ridge_set ridge_extract(const tf_distribution &dist, double threshold)
{
    // threshold 1 is allowed and selects nothing: no cell exceeds the max
    if (!(threshold > 0.0) || !(threshold <= 1.0))
        throw config_error("ridge_extract: threshold must be in (0, 1]");
    const tf_grid &g = dist.grid;
    double mx = g.max_value();
    double cut = threshold * mx;
    ridge_set rs;
    rs.t0 = g.t0;
    rs.dt = g.dt;
    rs.f0 = g.f0;
    rs.df = g.df;
    rs.nt = g.nt;
    rs.nf = g.nf;
    for (int i = 0; i < g.nt; ++i)
        for (int j = 0; j < g.nf; ++j)
        {
            double v = g.at(i, j);
            if (v > cut)
                rs.pts.push_back({g.t_of(i), g.f_of(j), v, i, j});
        }
    return rs;
}

ridge_metrics compare_ridge_to_level(const ridge_set &points,
                                     const std::vector<bubble> &bs)
{
    if (points.nt < 1 || points.nf < 1 || !(points.dt > 0.0) ||
        !(points.df > 0.0))
        throw contract_error("compare_ridge_to_bubble: missing ridge axes");
    if (bs.empty())
        throw contract_error("compare_ridge_to_bubble: empty level set");

    double t_lo = points.t0 - points.dt;
    double t_hi = points.t0 + points.dt * double(points.nt);
    double f_lo = points.f0 - points.df;
    double f_hi = points.f0 + points.df * double(points.nf);

    // level-curve segments only; border closure arcs are not part of the curve
    struct segc
    {
        double x0, y0, x1, y1;
    };
    std::vector<segc> segs;
    for (const bubble &b : bs)
    {
        if (b.polyline.size() < 2)
            throw contract_error("compare_ridge_to_bubble: degenerate bubble");
        for (const vec2 &p : b.polyline)
            if (p.t < t_lo || p.t > t_hi || p.f < f_lo || p.f > f_hi)
                throw contract_error(
                    "compare_ridge_to_bubble: bubble outside the ridge axes");
        std::size_t m = b.polyline.size();
        for (std::size_t i = 0; i < m; ++i)
        {
            if (!b.on_border.empty() && b.on_border[i])
                continue;
            const vec2 &p = b.polyline[i];
            const vec2 &q = b.polyline[(i + 1) % m];
            segs.push_back({p.t / points.dt, p.f / points.df, q.t / points.dt,
                            q.f / points.df});
        }
    }
    if (segs.empty())
        throw contract_error("compare_ridge_to_bubble: bubble has no curve "
                             "segments");

    auto seg_dist = [](double px, double py, const segc &s) {
        double vx = s.x1 - s.x0, vy = s.y1 - s.y0;
        double wx = px - s.x0, wy = py - s.y0;
        double vv = vx * vx + vy * vy;
        double t = vv > 0.0 ? (wx * vx + wy * vy) / vv : 0.0;
        t = std::min(std::max(t, 0.0), 1.0);
        double dx = wx - t * vx, dy = wy - t * vy;
        return std::hypot(dx, dy);
    };

    struct wd
    {
        double d, w;
    };
    std::vector<wd> dists;
    dists.reserve(points.pts.size());
    double mass = 0.0, acc = 0.0;
    for (const ridge_point &p : points.pts)
    {
        double px = p.t / points.dt, py = p.f / points.df;
        double best = std::numeric_limits<double>::infinity();
        for (const segc &s : segs)
            best = std::min(best, seg_dist(px, py, s));
        double w = std::abs(p.w);
        dists.push_back({best, w});
        mass += w;
        acc += best * w;
    }
    ridge_metrics rm;
    rm.mass = mass;
    if (mass <= 0.0 || dists.empty())
        return rm;
    rm.mean_cells = acc / mass;
    std::sort(dists.begin(), dists.end(),
              [](const wd &a, const wd &b) { return a.d < b.d; });
    double run = 0.0;
    rm.p90_cells = dists.back().d;
    for (const wd &e : dists)
    {
        run += e.w;
        if (run >= 0.9 * mass)
        {
            rm.p90_cells = e.d;
            break;
        }
    }
    return rm;
}

ridge_metrics compare_ridge_to_bubble(const ridge_set &points, const bubble &b)
{
    return compare_ridge_to_level(points, std::vector<bubble>{b});
}

amplitude_metrics compare_amplitude(const Eigen::VectorXcd &u_numeric,
                                    const eigenfunction_model &model,
                                    int smooth_len)
{
    int n = int(u_numeric.size());
    std::vector<std::uint8_t> mask = model.valid_mask(n);
    int used = 0;
    for (std::uint8_t v : mask)
        used += v;
    if (used == 0)
        throw contract_error("compare_amplitude: empty valid mask");

    // envelope: moving RMS of the magnitude (length 1 = raw magnitude)
    std::vector<double> env(std::size_t(n), 0.0);
    int half = std::max(smooth_len, 1) / 2;
    for (int i = 0; i < n; ++i)
    {
        double s = 0.0;
        int cnt = 0;
        for (int j = i - half; j <= i + half; ++j)
        {
            if (j < 0 || j >= n)
                continue;
            s += std::norm(u_numeric(j));
            ++cnt;
        }
        env[std::size_t(i)] = std::sqrt(s / double(cnt));
    }
    std::vector<double> amp = model.combined_amplitude(n);

    double ea = 0.0, eb = 0.0;
    for (int i = 0; i < n; ++i)
        if (mask[std::size_t(i)])
        {
            ea += env[std::size_t(i)] * env[std::size_t(i)];
            eb += amp[std::size_t(i)] * amp[std::size_t(i)];
        }
    if (ea <= 0.0 || eb <= 0.0)
        throw contract_error("compare_amplitude: zero energy on valid mask");
    double sa = 1.0 / std::sqrt(ea), sb = 1.0 / std::sqrt(eb);

    double ma = 0.0, mb = 0.0;
    for (int i = 0; i < n; ++i)
        if (mask[std::size_t(i)])
        {
            ma += env[std::size_t(i)] * sa;
            mb += amp[std::size_t(i)] * sb;
        }
    ma /= double(used);
    mb /= double(used);

    double sxy = 0.0, sxx = 0.0, syy = 0.0, l2 = 0.0;
    for (int i = 0; i < n; ++i)
        if (mask[std::size_t(i)])
        {
            double a = env[std::size_t(i)] * sa - ma;
            double c = amp[std::size_t(i)] * sb - mb;
            sxy += a * c;
            sxx += a * a;
            syy += c * c;
            double d = env[std::size_t(i)] * sa - amp[std::size_t(i)] * sb;
            l2 += d * d;
        }
    amplitude_metrics am;
    am.n_used = used;
    am.rel_l2 = std::sqrt(l2); // both sides unit-normalized on the mask
    am.pearson_r =
        (sxx > 0.0 && syy > 0.0) ? sxy / std::sqrt(sxx * syy) : 0.0;
    return am;
}

} // namespace ltv
