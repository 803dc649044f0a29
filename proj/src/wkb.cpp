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

#include "ltv/wkb.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <unordered_map>

#include "ltv/errors.hpp"
#include "ltv/fft.hpp"

namespace ltv
{

namespace
{

constexpr double pi = 3.14159265358979323846;

// Model evaluation works in per-sample units (t in samples, f in cycles per
// sample); ts only scales the reported axes, so areas t*f stay dimensionless.

// ---------------------------------------------------------------- magnitude

void multipath_grid(const multipath_model &m, tf_grid &g, int oversample)
{
    int nt = g.nt, nf = g.nf;
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(nt, nf);
    Eigen::VectorXcd a(nt), b(nf);
    for (const tap &tp : m.taps)
    {
        for (int i = 0; i < nt; ++i)
            a(i) = tp.gain *
                   std::polar(1.0, 2.0 * pi * tp.doppler * double(i) /
                                       double(oversample));
        for (int j = 0; j < nf; ++j)
        {
            double fn = -0.5 + double(j) / double(nf);
            b(j) = std::polar(1.0, -2.0 * pi * tp.delay * fn);
        }
        acc.noalias() += a * b.transpose();
    }
    for (int i = 0; i < nt; ++i)
        for (int j = 0; j < nf; ++j)
            g.at(i, j) = std::abs(acc(i, j));
}

// |G| tabulated once over the range of f - mu*t the grid visits, then
// linearly interpolated; the profile spectrum is smooth on the scale of one
// table step.
struct profile_table
{
    double lo = 0.0, step = 0.0;
    std::vector<double> mag;

    double operator()(double x) const
    {
        double u = (x - lo) / step;
        if (u <= 0.0)
            return mag.front();
        double last = double(mag.size() - 1);
        if (u >= last)
            return mag.back();
        int i = int(u);
        double w = u - double(i);
        return mag[std::size_t(i)] * (1.0 - w) + mag[std::size_t(i) + 1] * w;
    }
};

void line_spread_grid(const line_spread_model &m, tf_grid &g, int n,
                      int oversample)
{
    double t_max = double(n); // samples
    double shift_lo = std::min(0.0, m.mu * t_max);
    double shift_hi = std::max(0.0, m.mu * t_max);
    double x_lo = -0.5 - shift_hi, x_hi = 0.5 - shift_lo;

    profile_table tb;
    tb.lo = x_lo;
    tb.step = 0.5 / double(g.nf); // half a frequency bin, in per-sample units
    int count = int(std::ceil((x_hi - x_lo) / tb.step)) + 2;
    tb.mag.resize(std::size_t(count));
    for (int i = 0; i < count; ++i)
        tb.mag[std::size_t(i)] =
            std::abs(line_profile_spectrum(m, x_lo + tb.step * double(i)));

    for (int i = 0; i < g.nt; ++i)
    {
        double tn = double(i) / double(oversample);
        for (int j = 0; j < g.nf; ++j)
        {
            double fn = -0.5 + double(j) / double(g.nf);
            g.at(i, j) = tb(fn - m.mu * tn);
        }
    }
}

void tabulated_grid(const tabulated_model &m, tf_grid &g, int n, int oversample)
{
    // H(i, f) rows by padded FFT along the delay axis, then trigonometric
    // upsampling of each frequency column along time (periodic wrap at the
    // window ends is accepted).
    int nd = int(m.h.cols());
    int nf = g.nf;
    Eigen::MatrixXcd rows(n, nf);
    std::vector<cplx> buf;
    for (int i = 0; i < n; ++i)
    {
        buf.assign(std::size_t(nf), cplx(0.0, 0.0));
        for (int mm = 0; mm < nd && mm < nf; ++mm)
        {
            double sgn = (mm % 2 == 0) ? 1.0 : -1.0; // band starts at -1/2
            buf[std::size_t(mm)] = m.h(i, mm) * sgn;
        }
        fft(buf);
        for (int j = 0; j < nf; ++j)
            rows(i, j) = buf[std::size_t(j)];
    }
    std::vector<cplx> col(static_cast<std::size_t>(n));
    for (int j = 0; j < nf; ++j)
    {
        for (int i = 0; i < n; ++i)
            col[std::size_t(i)] = rows(i, j);
        std::vector<cplx> up = upsample(col, oversample);
        for (int i = 0; i < g.nt; ++i)
            g.at(i, j) = std::abs(up[std::size_t(i)]);
    }
}

// ----------------------------------------------------- marching squares core

struct ms_pt
{
    double x = 0.0, y = 0.0;
};

struct ms_seg
{
    std::int64_t es = 0, ee = 0;
    ms_pt a, b;
};

struct ms_poly
{
    std::vector<ms_pt> pts;
    std::vector<std::uint8_t> arc; // edge i -> i+1 runs along the window border
    std::vector<ms_pt> bpts;       // where the curve meets the border
    bool clipped = false;
    bool hole = false;
    double signed_area = 0.0; // index units; clipped polygons always positive
};

struct ms_result
{
    std::vector<ms_poly> polys;
    bool any_open = false;
    bool border_above = false;
};

double shoelace(const std::vector<ms_pt> &p)
{
    double s = 0.0;
    std::size_t m = p.size();
    for (std::size_t i = 0; i < m; ++i)
    {
        const ms_pt &u = p[i];
        const ms_pt &w = p[(i + 1) % m];
        s += u.x * w.y - w.x * u.y;
    }
    return 0.5 * s;
}

void dedup(std::vector<ms_pt> &p, std::vector<std::uint8_t> *flags)
{
    std::vector<ms_pt> q;
    std::vector<std::uint8_t> fq;
    for (std::size_t i = 0; i < p.size(); ++i)
    {
        if (!q.empty() && std::abs(p[i].x - q.back().x) < 1e-9 &&
            std::abs(p[i].y - q.back().y) < 1e-9)
        {
            if (flags) // surviving edge is the one leaving the kept vertex
                fq.back() = (*flags)[i];
            continue;
        }
        q.push_back(p[i]);
        if (flags)
            fq.push_back((*flags)[i]);
    }
    while (q.size() > 1 && std::abs(q.front().x - q.back().x) < 1e-9 &&
           std::abs(q.front().y - q.back().y) < 1e-9)
    {
        q.pop_back();
        if (flags)
            fq.pop_back();
    }
    p.swap(q);
    if (flags)
        flags->swap(fq);
}

ms_result extract_polys(const tf_grid &g, double level)
{
    ms_result out;
    std::int64_t nt = g.nt, nf = g.nf;
    auto sval = [&](std::int64_t ix, std::int64_t iy) {
        return g.at(int(ix), int(iy)) - level;
    };
    auto h_edge = [&](std::int64_t ix, std::int64_t iy) {
        return ((iy * nt + ix) << 1);
    };
    auto v_edge = [&](std::int64_t ix, std::int64_t iy) {
        return ((iy * nt + ix) << 1) | 1;
    };
    auto border_edge = [&](std::int64_t key) {
        std::int64_t idx = key >> 1, ix = idx % nt, iy = idx / nt;
        if (key & 1)
            return ix == 0 || ix == nt - 1;
        return iy == 0 || iy == nf - 1;
    };

    std::vector<ms_seg> segs;
    for (std::int64_t iy = 0; iy + 1 < nf; ++iy)
    {
        for (std::int64_t ix = 0; ix + 1 < nt; ++ix)
        {
            double sbl = sval(ix, iy), sbr = sval(ix + 1, iy);
            double str = sval(ix + 1, iy + 1), stl = sval(ix, iy + 1);
            int mask = (sbl >= 0.0 ? 1 : 0) | (sbr >= 0.0 ? 2 : 0) |
                       (str >= 0.0 ? 4 : 0) | (stl >= 0.0 ? 8 : 0);
            if (mask == 0 || mask == 15)
                continue;
            double xd = double(ix), yd = double(iy);
            auto pb = [&]() { return ms_pt{xd + sbl / (sbl - sbr), yd}; };
            auto pt_ = [&]() { return ms_pt{xd + stl / (stl - str), yd + 1.0}; };
            auto pl = [&]() { return ms_pt{xd, yd + sbl / (sbl - stl)}; };
            auto pr = [&]() { return ms_pt{xd + 1.0, yd + sbr / (sbr - str)}; };
            std::int64_t eb = h_edge(ix, iy), et = h_edge(ix, iy + 1);
            std::int64_t el = v_edge(ix, iy), er = v_edge(ix + 1, iy);
            auto emit = [&](std::int64_t e0, ms_pt p0, std::int64_t e1,
                            ms_pt p1) { segs.push_back({e0, e1, p0, p1}); };
            // oriented so the region at or above the level lies on the left
            switch (mask)
            {
            case 1: emit(eb, pb(), el, pl()); break;
            case 2: emit(er, pr(), eb, pb()); break;
            case 3: emit(er, pr(), el, pl()); break;
            case 4: emit(et, pt_(), er, pr()); break;
            case 6: emit(et, pt_(), eb, pb()); break;
            case 7: emit(et, pt_(), el, pl()); break;
            case 8: emit(el, pl(), et, pt_()); break;
            case 9: emit(eb, pb(), et, pt_()); break;
            case 11: emit(er, pr(), et, pt_()); break;
            case 12: emit(el, pl(), er, pr()); break;
            case 13: emit(eb, pb(), er, pr()); break;
            case 14: emit(el, pl(), eb, pb()); break;
            case 5:
                if (sbl + sbr + str + stl >= 0.0)
                {
                    emit(et, pt_(), el, pl());
                    emit(eb, pb(), er, pr());
                }
                else
                {
                    emit(eb, pb(), el, pl());
                    emit(et, pt_(), er, pr());
                }
                break;
            case 10:
                if (sbl + sbr + str + stl >= 0.0)
                {
                    emit(el, pl(), eb, pb());
                    emit(er, pr(), et, pt_());
                }
                else
                {
                    emit(er, pr(), eb, pb());
                    emit(el, pl(), et, pt_());
                }
                break;
            default: break;
            }
        }
    }

    out.border_above = sval(0, 0) >= 0.0;
    if (segs.empty())
        return out;

    std::unordered_map<std::int64_t, std::size_t> head;
    head.reserve(segs.size() * 2);
    for (std::size_t i = 0; i < segs.size(); ++i)
        head[segs[i].es] = i;
    std::vector<char> used(segs.size(), 0);

    struct chain
    {
        std::vector<ms_pt> pts;
    };
    std::vector<chain> chains;

    for (std::size_t i = 0; i < segs.size(); ++i)
    {
        if (used[i] || !border_edge(segs[i].es))
            continue;
        chain c;
        c.pts.push_back(segs[i].a);
        std::size_t cur = i;
        while (true)
        {
            used[cur] = 1;
            c.pts.push_back(segs[cur].b);
            auto it = head.find(segs[cur].ee);
            if (it == head.end() || used[it->second])
                break;
            cur = it->second;
        }
        dedup(c.pts, nullptr);
        if (c.pts.size() >= 2)
            chains.push_back(std::move(c));
    }
    out.any_open = !chains.empty();

    for (std::size_t i = 0; i < segs.size(); ++i)
    {
        if (used[i])
            continue;
        std::vector<ms_pt> pts;
        std::size_t cur = i;
        while (true)
        {
            used[cur] = 1;
            pts.push_back(segs[cur].b);
            auto it = head.find(segs[cur].ee);
            if (it == head.end())
                break;
            cur = it->second;
            if (cur == i)
                break;
        }
        dedup(pts, nullptr);
        if (pts.size() < 3)
            continue;
        double sa = shoelace(pts);
        if (std::abs(sa) < 1e-12)
            continue;
        ms_poly p;
        p.hole = sa < 0.0;
        p.signed_area = sa;
        if (p.hole)
            std::reverse(pts.begin(), pts.end()); // store counterclockwise
        p.pts = std::move(pts);
        p.arc.assign(p.pts.size(), 0);
        out.polys.push_back(std::move(p));
    }

    if (chains.empty())
        return out;

    // Close clipped chains along the window border, walked counterclockwise,
    // linking each exit to the next entry.
    double bx = double(nt - 1), by = double(nf - 1);
    double per = 2.0 * (bx + by);
    auto param = [&](const ms_pt &p) {
        if (p.y == 0.0)
            return p.x;
        if (p.x == bx)
            return bx + p.y;
        if (p.y == by)
            return bx + by + (bx - p.x);
        return 2.0 * bx + by + (by - p.y);
    };
    const double cpar[4] = {bx, bx + by, 2.0 * bx + by, per};
    const ms_pt cpt[4] = {{bx, 0.0}, {bx, by}, {0.0, by}, {0.0, 0.0}};
    auto cyc = [&](double d) {
        double r = std::fmod(d, per);
        return r < 0.0 ? r + per : r;
    };

    std::vector<double> pin(chains.size()), pout(chains.size());
    for (std::size_t c = 0; c < chains.size(); ++c)
    {
        pin[c] = param(chains[c].pts.front());
        pout[c] = param(chains[c].pts.back());
    }
    std::vector<char> cused(chains.size(), 0);

    for (std::size_t c0 = 0; c0 < chains.size(); ++c0)
    {
        if (cused[c0])
            continue;
        ms_poly p;
        p.clipped = true;
        std::size_t cur = c0;
        while (true)
        {
            cused[cur] = 1;
            const std::vector<ms_pt> &cp = chains[cur].pts;
            for (std::size_t k = 0; k < cp.size(); ++k)
            {
                p.pts.push_back(cp[k]);
                p.arc.push_back(k + 1 == cp.size() ? 1 : 0);
            }
            p.bpts.push_back(cp.front());
            p.bpts.push_back(cp.back());

            // next entry, cyclically ahead of this exit
            double so = pout[cur];
            double best = std::numeric_limits<double>::infinity();
            std::size_t nxt = c0;
            for (std::size_t c = 0; c < chains.size(); ++c)
            {
                if (c != c0 && cused[c])
                    continue;
                double d = cyc(pin[c] - so);
                if (c != c0 && d == 0.0)
                    d = per; // tangent touch: treat as farthest, not nearest
                if (d < best)
                {
                    best = d;
                    nxt = c;
                }
            }
            double din = cyc(pin[nxt] - so);
            struct corner_hit
            {
                double d;
                int k;
            };
            corner_hit hits[4];
            int nhits = 0;
            for (int k = 0; k < 4; ++k)
            {
                double d = cyc(cpar[k] - so);
                if (d > 0.0 && d < din)
                    hits[nhits++] = {d, k};
            }
            std::sort(hits, hits + nhits,
                      [](const corner_hit &u, const corner_hit &w) {
                          return u.d < w.d;
                      });
            for (int k = 0; k < nhits; ++k)
            {
                p.pts.push_back(cpt[hits[k].k]);
                p.arc.push_back(1);
            }
            if (nxt == c0)
                break;
            cur = nxt;
        }
        dedup(p.pts, &p.arc);
        if (p.pts.size() < 3)
            continue;
        p.signed_area = shoelace(p.pts);
        if (p.signed_area <= 1e-12)
            continue;
        out.polys.push_back(std::move(p));
    }
    return out;
}

// --------------------------------------------- derivative of |H|^2 along f

double node_d2(const tf_grid &g, int ix, int iy)
{
    auto v2 = [&](int a, int b) {
        double v = g.at(a, b);
        return v * v;
    };
    if (iy == 0)
        return (v2(ix, 1) - v2(ix, 0)) / g.df;
    if (iy == g.nf - 1)
        return (v2(ix, iy) - v2(ix, iy - 1)) / g.df;
    return (v2(ix, iy + 1) - v2(ix, iy - 1)) / (2.0 * g.df);
}

double dv2_df(const tf_grid &g, double t, double f)
{
    double x = (t - g.t0) / g.dt, y = (f - g.f0) / g.df;
    x = std::min(std::max(x, 0.0), double(g.nt - 1));
    y = std::min(std::max(y, 0.0), double(g.nf - 1));
    int ix = std::min(int(x), g.nt - 2), iy = std::min(int(y), g.nf - 2);
    double wx = x - double(ix), wy = y - double(iy);
    double d00 = node_d2(g, ix, iy), d10 = node_d2(g, ix + 1, iy);
    double d01 = node_d2(g, ix, iy + 1), d11 = node_d2(g, ix + 1, iy + 1);
    return (1.0 - wx) * ((1.0 - wy) * d00 + wy * d01) +
           wx * ((1.0 - wy) * d10 + wy * d11);
}

} // namespace

// ------------------------------------------------------------------- public

tf_grid magnitude_grid(const channel_model &model, int n, double ts,
                       int oversample)
{
    if (n < 2)
        throw config_error("magnitude_grid: need at least 2 samples");
    if (oversample < 1)
        throw config_error("magnitude_grid: oversample must be >= 1");
    if (!(ts > 0.0))
        throw config_error("magnitude_grid: ts must be positive");
    int nt = n * oversample, nf = n * oversample;
    tf_grid g = make_grid(nt, nf, 0.0, ts / double(oversample), -0.5 / ts,
                          1.0 / (double(nf) * ts));

    if (const auto *mp = std::get_if<multipath_model>(&model))
    {
        multipath_grid(*mp, g, oversample);
    }
    else if (const auto *ls = std::get_if<line_spread_model>(&model))
    {
        line_spread_grid(*ls, g, n, oversample);
    }
    else
    {
        const auto &tb = std::get<tabulated_model>(model);
        if (tb.h.rows() != n)
            throw config_error("magnitude_grid: tabulated rows != n");
        tabulated_grid(tb, g, n, oversample);
    }
    for (double v : g.v)
        if (!std::isfinite(v))
            throw numerical_error("magnitude_grid: non-finite value");
    return g;
}

std::vector<bubble> extract_level_set(const tf_grid &grid, double level)
{
    if (!(level > 0.0))
        throw config_error("extract_level_set: level must be positive");
    ms_result r = extract_polys(grid, level);
    std::vector<bubble> out;
    out.reserve(r.polys.size());
    for (ms_poly &p : r.polys)
    {
        bubble b;
        b.level = level;
        b.clipped = p.clipped;
        b.hole = p.hole;
        b.area = std::abs(p.signed_area) * grid.dt * grid.df;
        b.polyline.reserve(p.pts.size());
        for (const ms_pt &q : p.pts)
            b.polyline.push_back(
                {grid.t0 + q.x * grid.dt, grid.f0 + q.y * grid.df});
        b.on_border = std::move(p.arc);
        for (const ms_pt &q : p.bpts)
            b.boundary_points.push_back(
                {grid.t0 + q.x * grid.dt, grid.f0 + q.y * grid.df});
        out.push_back(std::move(b));
    }
    std::sort(out.begin(), out.end(),
              [](const bubble &a, const bubble &b) { return a.area > b.area; });
    return out;
}

double superlevel_area(const tf_grid &grid, double level)
{
    ms_result r = extract_polys(grid, level);
    double a = 0.0;
    for (const ms_poly &p : r.polys)
        a += p.signed_area;
    if (!r.any_open && r.border_above)
        a += double(grid.nt - 1) * double(grid.nf - 1);
    return a * grid.dt * grid.df;
}

void annotate_turning_points(bubble &b, const tf_grid &grid)
{
    b.turning_points.clear();
    std::size_t m = b.polyline.size();
    if (m < 3)
        return;
    auto arc = [&](std::size_t i) {
        return !b.on_border.empty() && b.on_border[i % m] != 0;
    };

    std::vector<double> d(m);
    for (std::size_t i = 0; i < m; ++i)
        d[i] = dv2_df(grid, b.polyline[i].t, b.polyline[i].f);

    std::vector<double> cum(m + 1, 0.0); // path length in cell units
    for (std::size_t i = 0; i < m; ++i)
    {
        std::size_t j = (i + 1) % m;
        double dx = (b.polyline[j].t - b.polyline[i].t) / grid.dt;
        double dy = (b.polyline[j].f - b.polyline[i].f) / grid.df;
        cum[i + 1] = cum[i] + std::hypot(dx, dy);
    }
    double total = cum[m];

    struct crossing
    {
        std::size_t v;
        double frac, path;
    };
    std::vector<crossing> cr;
    for (std::size_t i = 0; i < m; ++i)
    {
        std::size_t j = (i + 1) % m;
        if (arc(i))
            continue;
        if ((d[i] >= 0.0) == (d[j] >= 0.0))
            continue;
        double den = std::abs(d[i]) + std::abs(d[j]);
        double fr = den > 0.0 ? std::abs(d[i]) / den : 0.5;
        cr.push_back({i, fr, cum[i] + fr * (cum[i + 1] - cum[i])});
    }
    if (cr.empty())
        return;

    // Merge flicker: crossings closer than one cell along the curve collapse.
    // An even cluster is a grazing tangency, an odd one a single fold.
    const double merge_dist = 1.0;
    std::vector<std::vector<crossing>> groups;
    for (const crossing &c : cr)
    {
        if (!groups.empty() && c.path - groups.back().back().path < merge_dist)
            groups.back().push_back(c);
        else
            groups.push_back({c});
    }
    if (!b.clipped && groups.size() > 1)
    {
        double gap =
            (total - groups.back().back().path) + groups.front().front().path;
        if (gap < merge_dist)
        {
            for (crossing &c : groups.back())
                groups.front().push_back(c);
            groups.pop_back();
        }
    }

    auto point_at = [&](std::size_t v, double fr) {
        const vec2 &p = b.polyline[v];
        const vec2 &q = b.polyline[(v + 1) % m];
        return vec2{p.t + fr * (q.t - p.t), p.f + fr * (q.f - p.f)};
    };
    // position at a signed path offset, for the local turn direction
    auto probe = [&](double path0, double delta) {
        double target = path0 + delta;
        if (!b.clipped)
            target = std::fmod(std::fmod(target, total) + total, total);
        else
            target = std::min(std::max(target, 0.0), total * (1.0 - 1e-12));
        std::size_t lo = 0, hi = m;
        while (lo + 1 < hi)
        {
            std::size_t mid = (lo + hi) / 2;
            if (cum[mid] <= target)
                lo = mid;
            else
                hi = mid;
        }
        double span = cum[lo + 1] - cum[lo];
        double fr = span > 0.0 ? (target - cum[lo]) / span : 0.0;
        return point_at(lo, fr);
    };

    for (const std::vector<crossing> &grp : groups)
    {
        if (grp.size() % 2 == 0)
            continue;
        const crossing &c = grp[grp.size() / 2];
        vec2 pos = point_at(c.v, c.frac);
        vec2 pa = probe(c.path, -1.5);
        vec2 pc = probe(c.path, +1.5);
        double ux = (pos.t - pa.t) / grid.dt, uy = (pos.f - pa.f) / grid.df;
        double wx = (pc.t - pos.t) / grid.dt, wy = (pc.f - pos.f) / grid.df;
        double cross = ux * wy - uy * wx;
        turning_point tp;
        tp.t = pos.t;
        tp.f = pos.f;
        tp.kind = cross >= 0.0 ? turn_kind::convex : turn_kind::concave;
        tp.vertex = c.v;
        tp.frac = c.frac;
        b.turning_points.push_back(tp);
    }
    std::sort(b.turning_points.begin(), b.turning_points.end(),
              [](const turning_point &a, const turning_point &c) {
                  return a.vertex < c.vertex ||
                         (a.vertex == c.vertex && a.frac < c.frac);
              });
}

// --------------------------------------------------------------- area rule

area_function::area_function(const tf_grid &grid)
{
    sorted_ = grid.v;
    std::sort(sorted_.begin(), sorted_.end(), std::greater<double>());
    cell_ = grid.dt * grid.df;
}

double area_function::operator()(double sigma) const
{
    if (sorted_.empty())
        return 0.0;
    if (sigma > sorted_.front())
        return 0.0;
    if (sigma <= sorted_.back())
        return cell_ * double(sorted_.size());
    // first index with value < sigma (array is descending)
    auto it = std::lower_bound(sorted_.begin(), sorted_.end(), sigma,
                               [](double a, double v) { return a >= v; });
    std::size_t p = std::size_t(it - sorted_.begin());
    double hi = sorted_[p - 1], lo = sorted_[p];
    double frac = (hi - sigma) / (hi - lo);
    return cell_ * (double(p - 1) + frac);
}

std::vector<level_entry> quantized_levels(const tf_grid &grid, double sigma_max,
                                          const quantize_options &opt)
{
    if (!(sigma_max > 0.0))
        throw config_error("quantized_levels: sigma_max must be positive");
    area_function area(grid);
    // largest area any positive level can enclose; grids with negative cells
    // (synthetic landscapes) reach it before the window area does
    double reach = area(0.0);
    double a_at_max = area(sigma_max);

    std::vector<level_entry> out;
    for (int n = 0;; ++n)
    {
        if (opt.max_levels >= 0 && int(out.size()) >= opt.max_levels)
            break;
        double target = double(n) + 0.5;
        if (target > reach - 1e-12)
            break;
        if (a_at_max > target)
            continue; // this level would sit above sigma_max
        double lo = 0.0, hi = sigma_max;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it)
        {
            double mid = 0.5 * (lo + hi);
            if (area(mid) >= target)
                lo = mid;
            else
                hi = mid;
        }
        out.push_back({0.5 * (lo + hi), n});
    }

    if (opt.cross_check && !out.empty())
    {
        double prev = -1.0;
        for (const level_entry &e : out)
        {
            double contour = superlevel_area(grid, e.sigma);
            double target = double(e.n) + 0.5;
            double tol = std::max(opt.check_abs, opt.check_rel * target);
            if (std::abs(contour - target) > tol)
            {
                std::ostringstream os;
                os << "quantized_levels: contour area " << contour
                   << " disagrees with counted area " << target << " at level "
                   << e.sigma << "; grid too coarse, increase oversampling";
                throw numerical_error(os.str());
            }
            if (contour < prev - tol)
                throw numerical_error(
                    "quantized_levels: non-monotone contour areas; grid too "
                    "coarse, increase oversampling");
            prev = contour;
        }
    }
    return out;
}

// --------------------------------------------------------------- mode table

namespace
{

// ray casting along the t axis
bool point_in_poly(const std::vector<vec2> &poly, double t, double f)
{
    bool in = false;
    std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++)
    {
        if ((poly[i].f > f) == (poly[j].f > f))
            continue;
        double tx = poly[j].t + (poly[i].t - poly[j].t) * (f - poly[j].f) /
                                    (poly[i].f - poly[j].f);
        if (t < tx)
            in = !in;
    }
    return in;
}

} // namespace

vec2 curve_probe(const bubble &b)
{
    std::size_t m = b.polyline.size();
    for (std::size_t i = 0; i + 1 < m; ++i)
    {
        if (!b.on_border.empty() && b.on_border[i])
            continue;
        return {0.5 * (b.polyline[i].t + b.polyline[i + 1].t),
                0.5 * (b.polyline[i].f + b.polyline[i + 1].f)};
    }
    return b.polyline.empty() ? vec2{} : b.polyline[0];
}

bool bubble_contains(const bubble &b, vec2 p)
{
    return point_in_poly(b.polyline, p.t, p.f);
}

namespace
{

// enclosed area per non-hole curve, holes inside it subtracted
std::vector<double> effective_areas(const std::vector<bubble> &bs)
{
    std::vector<double> eff(bs.size(), 0.0);
    for (std::size_t i = 0; i < bs.size(); ++i)
        if (!bs[i].hole)
            eff[i] = bs[i].area;
    for (std::size_t h = 0; h < bs.size(); ++h)
    {
        if (!bs[h].hole || bs[h].polyline.empty())
            continue;
        vec2 probe = curve_probe(bs[h]);
        for (std::size_t i = 0; i < bs.size(); ++i)
        {
            if (bs[i].hole)
                continue;
            if (point_in_poly(bs[i].polyline, probe.t, probe.f))
            {
                eff[i] -= bs[h].area;
                break;
            }
        }
    }
    return eff;
}

} // namespace

std::vector<mode_entry> mode_table(const tf_grid &grid,
                                   const std::vector<level_entry> &levels)
{
    std::vector<mode_entry> out;
    if (levels.empty())
        return out;

    // synthetic starting point just above the first level: empty level set
    double sigma_hi = grid.max_value();
    std::vector<bubble> prev_bs;
    std::vector<double> prev_eff;

    for (const level_entry &lv : levels)
    {
        double sigma_lo = lv.sigma;
        std::vector<bubble> bs = extract_level_set(grid, sigma_lo);
        std::vector<double> eff = effective_areas(bs);

        for (std::size_t j = 0; j < bs.size(); ++j)
        {
            if (bs[j].hole)
                continue;

            // children: curves of the previous (higher) level inside this one
            double start = 0.0;
            std::size_t best_child = prev_bs.size();
            for (std::size_t i = 0; i < prev_bs.size(); ++i)
            {
                if (prev_bs[i].hole || prev_bs[i].polyline.empty())
                    continue;
                vec2 probe = curve_probe(prev_bs[i]);
                if (!point_in_poly(bs[j].polyline, probe.t, probe.f))
                    continue;
                start += prev_eff[i];
                if (best_child == prev_bs.size() ||
                    prev_eff[i] > prev_eff[best_child])
                    best_child = i;
            }

            double end = eff[j];
            if (end <= start)
                continue; // numeric jitter; superlevel regions only grow

            // every half integer passed inside this step emits one mode
            double h = std::floor(start + 0.5) + 0.5;
            if (h <= start)
                h += 1.0;
            for (; h <= end; h += 1.0)
            {
                double frac = (h - start) / (end - start);
                mode_entry me;
                me.sigma = sigma_hi + (sigma_lo - sigma_hi) * frac;
                me.orbit_area = h;
                // snapshot from the nearer tabulated level; the birth step has
                // no earlier snapshot to offer
                if (frac > 0.5 || best_child == prev_bs.size())
                    me.orbit = bs[j];
                else
                    me.orbit = prev_bs[best_child];
                out.push_back(std::move(me));
            }
        }

        prev_bs = std::move(bs);
        prev_eff = std::move(eff);
        sigma_hi = sigma_lo;
    }

    std::sort(out.begin(), out.end(),
              [](const mode_entry &a, const mode_entry &b) { return a.sigma > b.sigma; });
    return out;
}

// ---------------------------------------------------------------- theorem 1

singular_triple theorem1_solution(const line_spread_model &model, double f_i,
                                  int n)
{
    if (n < 1)
        throw config_error("theorem1_solution: need n >= 1");
    singular_triple s;
    s.k = line_kernel(model, f_i);
    s.sigma = std::abs(s.k);
    double ph_k = (s.sigma > 0.0) ? std::arg(s.k) : 0.0;
    s.v.resize(n);
    s.u.resize(n);
    double scale = 1.0 / std::sqrt(double(n));
    for (int i = 0; i < n; ++i)
    {
        double t = double(i);
        double ph = 2.0 * pi * f_i * t + pi * model.mu * t * t;
        s.v(i) = std::polar(scale, ph);
        s.u(i) = std::polar(scale, ph + 2.0 * pi * model.f0 * t + ph_k);
    }
    return s;
}

// ---------------------------------------------------------------- synthesis

namespace
{

struct walk_item
{
    vec2 p;
    int tp = -1;            // index into bubble.turning_points
    bool arc_after = false; // edge to the next item lies on the window border
};

std::vector<walk_item> augmented_cycle(const bubble &b)
{
    std::size_t m = b.polyline.size();
    std::vector<walk_item> items;
    items.reserve(m + b.turning_points.size());
    std::size_t k = 0; // turning points are sorted by (vertex, frac)
    for (std::size_t i = 0; i < m; ++i)
    {
        bool arc = !b.on_border.empty() && b.on_border[i] != 0;
        items.push_back({b.polyline[i], -1, arc});
        while (k < b.turning_points.size() && b.turning_points[k].vertex == i)
        {
            const turning_point &tp = b.turning_points[k];
            items.push_back({{tp.t, tp.f}, int(k), arc});
            ++k;
        }
    }
    return items;
}

double phase_step(const vec2 &a, const vec2 &c)
{
    return 2.0 * pi * 0.5 * (a.f + c.f) * (c.t - a.t);
}

} // namespace

eigenfunction_model synthesize_eigenfunction(const bubble &b,
                                             const tf_grid &grid, double sigma,
                                             const synthesis_options &opt)
{
    if (!b.clipped && b.turning_points.empty())
        throw contract_error(
            "synthesize_eigenfunction: closed bubble without turning points; "
            "annotate_turning_points first or malformed level curve");
    if (b.polyline.size() < 2)
        throw contract_error("synthesize_eigenfunction: degenerate bubble");

    // Sample spacing matched to the grid's band: full f-span = one over the
    // sample period, so the standard window lands on integer sample times.
    double ts = 1.0 / (grid.df * double(grid.nf));

    eigenfunction_model model;
    model.sigma = sigma;
    model.ts = ts;

    std::vector<walk_item> items = augmented_cycle(b);
    std::size_t m = items.size();

    struct run_pt
    {
        vec2 p;
        double phi;
    };
    std::vector<std::vector<run_pt>> runs;

    auto jump = [&](int tp_idx) {
        return b.turning_points[std::size_t(tp_idx)].kind == turn_kind::convex
                   ? 0.5 * pi
                   : -0.5 * pi;
    };

    bool any_arc = false;
    for (const walk_item &it : items)
        any_arc = any_arc || it.arc_after;

    if (!any_arc)
    {
        // cyclic traversal, starting at the first fold
        std::size_t start = m;
        for (std::size_t i = 0; i < m; ++i)
            if (items[i].tp >= 0)
            {
                start = i;
                break;
            }
        if (start == m)
            start = 0; // fold-free cycle (clipped flag set by the caller)
        double phi = items[start].tp >= 0 ? jump(items[start].tp) : 0.0;
        runs.emplace_back();
        runs.back().push_back({items[start].p, phi});
        for (std::size_t s = 1; s <= m; ++s)
        {
            const walk_item &prev = items[(start + s - 1) % m];
            const walk_item &cur = items[(start + s) % m];
            phi += phase_step(prev.p, cur.p);
            runs.back().push_back({cur.p, phi});
            if (cur.tp >= 0 && s < m)
            {
                phi += jump(cur.tp);
                runs.emplace_back();
                runs.back().push_back({cur.p, phi});
            }
        }
    }
    else
    {
        // linear interior paths delimited by border arcs; the phase restarts
        // at each path head
        std::vector<char> edge_contour(m, 0);
        for (std::size_t i = 0; i < m; ++i)
            edge_contour[i] = items[i].arc_after ? 0 : 1;
        std::vector<char> visited(m, 0);
        for (std::size_t h = 0; h < m; ++h)
        {
            std::size_t hp = (h + m - 1) % m;
            bool is_head = edge_contour[h] && !edge_contour[hp];
            if (!is_head || visited[h])
                continue;
            double phi = items[h].tp >= 0 ? jump(items[h].tp) : 0.0;
            runs.emplace_back();
            runs.back().push_back({items[h].p, phi});
            std::size_t i = h;
            while (edge_contour[i])
            {
                visited[i] = 1;
                std::size_t j = (i + 1) % m;
                phi += phase_step(items[i].p, items[j].p);
                runs.back().push_back({items[j].p, phi});
                if (items[j].tp >= 0)
                {
                    phi += jump(items[j].tp);
                    runs.emplace_back();
                    runs.back().push_back({items[j].p, phi});
                }
                i = j;
                if (i == h)
                    break;
            }
        }
    }

    // sample each run at integer multiples of the sample spacing
    for (const std::vector<run_pt> &run : runs)
    {
        std::map<std::int64_t, std::pair<double, double>> samples; // k -> f, phi
        for (std::size_t i = 0; i + 1 < run.size(); ++i)
        {
            const run_pt &a = run[i];
            const run_pt &c = run[i + 1];
            double tlo = std::min(a.p.t, c.p.t), thi = std::max(a.p.t, c.p.t);
            if (thi - tlo < 1e-300)
            {
                double k_at = a.p.t / ts;
                std::int64_t k = std::llround(k_at);
                if (std::abs(k_at - double(k)) < 1e-9)
                    samples.emplace(k, std::make_pair(a.p.f, a.phi));
                continue;
            }
            std::int64_t klo = std::int64_t(std::ceil(tlo / ts - 1e-12));
            std::int64_t khi = std::int64_t(std::floor(thi / ts + 1e-12));
            for (std::int64_t k = klo; k <= khi; ++k)
            {
                double tk = double(k) * ts;
                double w = (tk - a.p.t) / (c.p.t - a.p.t);
                if (w < -1e-9 || w > 1.0 + 1e-9)
                    continue;
                w = std::min(std::max(w, 0.0), 1.0);
                samples.emplace(k, std::make_pair(a.p.f + w * (c.p.f - a.p.f),
                                                  a.phi + w * (c.phi - a.phi)));
            }
        }
        branch_model br;
        if (!samples.empty())
        {
            std::int64_t klo = samples.begin()->first;
            std::int64_t khi = samples.rbegin()->first;
            br.n_start = klo;
            std::size_t len = std::size_t(khi - klo + 1);
            br.freq.assign(len, 0.0);
            br.amp.assign(len, 0.0);
            br.phase.assign(len, 0.0);
            br.valid.assign(len, 0);
            for (const auto &kv : samples)
            {
                std::size_t idx = std::size_t(kv.first - klo);
                double tk = double(kv.first) * ts;
                double fk = kv.second.first;
                br.freq[idx] = fk;
                br.phase[idx] = kv.second.second;
                double dd = dv2_df(grid, tk, fk);
                bool ok = std::abs(dd) > 1e-300;
                br.amp[idx] = ok ? 1.0 / std::sqrt(std::abs(dd)) : 0.0;
                for (const turning_point &tp : b.turning_points)
                {
                    if (std::abs(tk - tp.t) <= opt.exclude_time * ts)
                    {
                        ok = false;
                        break;
                    }
                }
                br.valid[idx] = ok ? 1 : 0;
            }
        }
        model.components.push_back(std::move(br));
    }
    model.orbit = b;
    return model;
}

Eigen::VectorXcd eigenfunction_model::synthesize(int n_total) const
{
    Eigen::VectorXcd u = Eigen::VectorXcd::Zero(n_total);
    for (const branch_model &br : components)
        for (std::size_t i = 0; i < br.freq.size(); ++i)
        {
            std::int64_t k = br.n_start + std::int64_t(i);
            if (k < 0 || k >= n_total || !br.valid[i])
                continue;
            u(Eigen::Index(k)) += std::polar(br.amp[i], br.phase[i]);
        }
    double nrm = u.norm();
    if (nrm > 0.0)
        u /= nrm;
    return u;
}

std::vector<double> eigenfunction_model::combined_amplitude(int n_total) const
{
    std::vector<double> a(std::size_t(n_total), 0.0);
    for (const branch_model &br : components)
        for (std::size_t i = 0; i < br.amp.size(); ++i)
        {
            std::int64_t k = br.n_start + std::int64_t(i);
            if (k < 0 || k >= n_total || !br.valid[i])
                continue;
            a[std::size_t(k)] += br.amp[i] * br.amp[i];
        }
    double ss = 0.0;
    for (double &x : a)
    {
        x = std::sqrt(x);
        ss += x * x;
    }
    if (ss > 0.0)
    {
        double inv = 1.0 / std::sqrt(ss);
        for (double &x : a)
            x *= inv;
    }
    return a;
}

std::vector<std::uint8_t> eigenfunction_model::valid_mask(int n_total) const
{
    std::vector<std::uint8_t> covered(std::size_t(n_total), 0);
    std::vector<std::uint8_t> tainted(std::size_t(n_total), 0);
    for (const branch_model &br : components)
        for (std::size_t i = 0; i < br.freq.size(); ++i)
        {
            std::int64_t k = br.n_start + std::int64_t(i);
            if (k < 0 || k >= n_total)
                continue;
            if (br.valid[i])
                covered[std::size_t(k)] = 1;
            else
                tainted[std::size_t(k)] = 1;
        }
    std::vector<std::uint8_t> mask(std::size_t(n_total), 0);
    for (std::size_t i = 0; i < mask.size(); ++i)
        mask[i] = std::uint8_t(covered[i] && !tainted[i]);
    return mask;
}

std::pair<Eigen::VectorXcd, double> right_from_left(const channel_matrix &h,
                                                    const Eigen::VectorXcd &u)
{
    if (u.size() != h.m.rows())
        throw contract_error("right_from_left: length mismatch");
    Eigen::VectorXcd w = h.m.adjoint() * u;
    double nrm = w.norm();
    if (nrm > 0.0)
        w /= nrm;
    return {w, nrm};
}

// ------------------------------------------------------------- Weyl symbol

namespace
{

// Zero-pad the spectrum without splitting the Nyquist bin: the bin at n/2
// keeps its full weight at -n/2. A split half at +n/2 would beat against
// its mirror in the quadratic form below (their frequencies sum to 0 mod n)
// and stamp a spurious standing wave onto the symbol of any kernel with
// energy at the band edge, the identity included.
std::vector<cplx> upsample_nosplit(std::vector<cplx> x, int factor)
{
    const int n = int(x.size());
    const int m = n * factor;
    fft(x);
    std::vector<cplx> pad(std::size_t(m), cplx(0.0, 0.0));
    for (int k = 0; k < n; ++k)
    {
        int ks = (2 * k < n) ? k : k - n;
        pad[std::size_t(((ks % m) + m) % m)] = x[std::size_t(k)];
    }
    ifft(pad);
    for (auto &v : pad)
        v *= double(factor);
    return pad;
}

} // namespace

tf_grid wigner_symbol(const channel_matrix &h)
{
    const Eigen::MatrixXcd &mm = h.m;
    if (mm.rows() != mm.cols() || mm.rows() < 2)
        throw contract_error("wigner_symbol: square matrix required");
    int n = int(mm.rows());

    // place the composite kernel on the half-sample grid by upsampling the
    // output-time axis of H itself and forming H2 H2* afterwards; this keeps
    // the kernel exactly Hermitian even though the interpolant is complex
    int n2 = 2 * n;
    Eigen::MatrixXcd h2(n2, n);
    std::vector<cplx> buf(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
    {
        for (int i = 0; i < n; ++i)
            buf[std::size_t(i)] = mm(i, j);
        std::vector<cplx> up = upsample_nosplit(buf, 2);
        for (int i = 0; i < n2; ++i)
            h2(i, j) = up[std::size_t(i)];
    }
    Eigen::MatrixXcd k2 = h2 * h2.adjoint();

    // For each output row, sum the kernel along the anti-diagonal through
    // (2q, 2q) over one n-point lag window, indices wrapping mod 2n. The
    // window is symmetric; for even n the shared endpoints u = +-n/2 land in
    // the same residue and carry half weight each, which keeps the sum real
    // (they are conjugates) and time-invariant kernels exact. The factor
    // (-1)^u re-centers the frequency axis so FFT bin p sits at p/n - 1/2.
    tf_grid g =
        make_grid(n, n, 0.0, h.ts, -0.5 / h.ts, 1.0 / (double(n) * h.ts));
    double peak = 0.0, resid = 0.0;
    std::vector<cplx> c(static_cast<std::size_t>(n));
    int ulim = n / 2;
    for (int q = 0; q < n; ++q)
    {
        std::fill(c.begin(), c.end(), cplx(0.0, 0.0));
        for (int u = -ulim; u <= ulim; ++u)
        {
            int a = ((2 * q + u) % n2 + n2) % n2;
            int b = ((2 * q - u) % n2 + n2) % n2;
            double w = (n % 2 == 0 && std::abs(u) == ulim) ? 0.5 : 1.0;
            if (std::abs(u) % 2 == 1)
                w = -w;
            int idx = ((u % n) + n) % n;
            c[std::size_t(idx)] += w * k2(a, b);
        }
        fft(c);
        for (int p = 0; p < n; ++p)
        {
            peak = std::max(peak, std::abs(c[std::size_t(p)].real()));
            resid = std::max(resid, std::abs(c[std::size_t(p)].imag()));
            g.at(q, p) = c[std::size_t(p)].real();
        }
    }
    if (resid > 1e-8 * std::max(peak, 1e-30))
        throw numerical_error(
            "wigner_symbol: imaginary residue above tolerance");
    return g;
}

} // namespace ltv
