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

#include "ltv/io.hpp"

#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "ltv/errors.hpp"

namespace ltv
{

using nlohmann::json;
using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// binary container

namespace
{

const char ltvm_magic[4] = {'L', 'T', 'V', 'M'};
const std::uint32_t ltvm_version = 1;

enum ltvm_kind : std::uint32_t
{
    kind_matrix = 0,
    kind_svd = 1,
    kind_grid = 2
};

struct ltvm_header
{
    std::uint32_t version = ltvm_version;
    std::uint32_t kind = 0;
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    double ts = 1.0;
    double aux[4] = {0.0, 0.0, 0.0, 0.0};
};

void put_u32(std::ofstream &os, std::uint32_t v)
{
    unsigned char b[4] = {(unsigned char)(v & 0xff), (unsigned char)((v >> 8) & 0xff),
                          (unsigned char)((v >> 16) & 0xff), (unsigned char)((v >> 24) & 0xff)};
    os.write(reinterpret_cast<const char *>(b), 4);
}

std::uint32_t get_u32(std::ifstream &is)
{
    unsigned char b[4];
    is.read(reinterpret_cast<char *>(b), 4);
    return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
           (std::uint32_t(b[3]) << 24);
}

void put_f64(std::ofstream &os, double v)
{
    std::uint64_t u;
    std::memcpy(&u, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; i++)
        b[i] = (unsigned char)((u >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char *>(b), 8);
}

double get_f64(std::ifstream &is)
{
    unsigned char b[8];
    is.read(reinterpret_cast<char *>(b), 8);
    std::uint64_t u = 0;
    for (int i = 0; i < 8; i++)
        u |= std::uint64_t(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &u, 8);
    return v;
}

std::ofstream open_out(const std::string &path)
{
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        throw io_error("cannot open for writing: " + path);
    return os;
}

std::ifstream open_in(const std::string &path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw io_error("cannot open for reading: " + path);
    return is;
}

void write_header(std::ofstream &os, const ltvm_header &h)
{
    os.write(ltvm_magic, 4);
    put_u32(os, h.version);
    put_u32(os, h.kind);
    put_u32(os, h.rows);
    put_u32(os, h.cols);
    put_f64(os, h.ts);
    for (double a : h.aux)
        put_f64(os, a);
}

ltvm_header read_header(std::ifstream &is, const std::string &path, std::uint32_t want_kind)
{
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, ltvm_magic, 4) != 0)
        throw io_error("not an LTVM container: " + path);
    ltvm_header h;
    h.version = get_u32(is);
    if (h.version != ltvm_version)
        throw io_error("unsupported container version in " + path);
    h.kind = get_u32(is);
    h.rows = get_u32(is);
    h.cols = get_u32(is);
    h.ts = get_f64(is);
    for (double &a : h.aux)
        a = get_f64(is);
    if (!is)
        throw io_error("truncated container header: " + path);
    if (h.kind != want_kind)
        throw io_error("container holds a different payload kind: " + path);
    return h;
}

void put_cmatrix(std::ofstream &os, const Eigen::MatrixXcd &m)
{
    for (Eigen::Index i = 0; i < m.rows(); i++)
        for (Eigen::Index j = 0; j < m.cols(); j++)
        {
            put_f64(os, m(i, j).real());
            put_f64(os, m(i, j).imag());
        }
}

Eigen::MatrixXcd get_cmatrix(std::ifstream &is, std::uint32_t rows, std::uint32_t cols,
                             const std::string &path)
{
    Eigen::MatrixXcd m(rows, cols);
    for (std::uint32_t i = 0; i < rows; i++)
        for (std::uint32_t j = 0; j < cols; j++)
        {
            double re = get_f64(is);
            double im = get_f64(is);
            m(i, j) = cplx(re, im);
        }
    if (!is)
        throw io_error("truncated payload: " + path);
    return m;
}

} // namespace

void write_matrix(const std::string &path, const channel_matrix &h)
{
    auto os = open_out(path);
    ltvm_header hd;
    hd.kind = kind_matrix;
    hd.rows = std::uint32_t(h.m.rows());
    hd.cols = std::uint32_t(h.m.cols());
    hd.ts = h.ts;
    write_header(os, hd);
    put_cmatrix(os, h.m);
    if (!os)
        throw io_error("write failed: " + path);
}

channel_matrix read_matrix(const std::string &path)
{
    auto is = open_in(path);
    ltvm_header hd = read_header(is, path, kind_matrix);
    channel_matrix out;
    out.m = get_cmatrix(is, hd.rows, hd.cols, path);
    out.ts = hd.ts;
    out.provenance = "file " + path;
    return out;
}

void write_svd(const std::string &path, const svd_result &s, double ts)
{
    auto os = open_out(path);
    ltvm_header hd;
    hd.kind = kind_svd;
    hd.rows = std::uint32_t(s.u.rows());
    hd.cols = std::uint32_t(s.v.rows());
    hd.ts = ts;
    write_header(os, hd);
    for (Eigen::Index i = 0; i < s.sigmas.size(); i++)
        put_f64(os, s.sigmas(i));
    put_cmatrix(os, s.u);
    put_cmatrix(os, s.v);
    if (!os)
        throw io_error("write failed: " + path);
}

svd_result read_svd(const std::string &path, double *ts)
{
    auto is = open_in(path);
    ltvm_header hd = read_header(is, path, kind_svd);
    if (hd.rows != hd.cols)
        throw io_error("singular-system container must be square: " + path);
    svd_result s;
    s.sigmas.resize(hd.rows);
    for (std::uint32_t i = 0; i < hd.rows; i++)
        s.sigmas(i) = get_f64(is);
    s.u = get_cmatrix(is, hd.rows, hd.rows, path);
    s.v = get_cmatrix(is, hd.rows, hd.rows, path);
    if (ts)
        *ts = hd.ts;
    return s;
}

void write_grid(const std::string &path, const tf_grid &g)
{
    auto os = open_out(path);
    ltvm_header hd;
    hd.kind = kind_grid;
    hd.rows = std::uint32_t(g.nt);
    hd.cols = std::uint32_t(g.nf);
    hd.ts = g.dt;
    hd.aux[0] = g.t0;
    hd.aux[1] = g.dt;
    hd.aux[2] = g.f0;
    hd.aux[3] = g.df;
    write_header(os, hd);
    for (double v : g.v)
        put_f64(os, v);
    if (!os)
        throw io_error("write failed: " + path);
}

tf_grid read_grid(const std::string &path)
{
    auto is = open_in(path);
    ltvm_header hd = read_header(is, path, kind_grid);
    tf_grid g = make_grid(int(hd.rows), int(hd.cols), hd.aux[0], hd.aux[1], hd.aux[2], hd.aux[3]);
    for (double &v : g.v)
        v = get_f64(is);
    if (!is)
        throw io_error("truncated payload: " + path);
    return g;
}

// ---------------------------------------------------------------------------
// JSON schemas

namespace
{

const json &need(const json &j, const char *field, const char *where)
{
    auto it = j.find(field);
    if (it == j.end())
        throw config_error(std::string(where) + ": missing field \"" + field + "\"");
    return *it;
}

double need_num(const json &j, const char *field, const char *where)
{
    const json &v = need(j, field, where);
    if (!v.is_number())
        throw config_error(std::string(where) + ": field \"" + field + "\" must be a number");
    return v.get<double>();
}

double opt_num(const json &j, const char *field, double fallback)
{
    auto it = j.find(field);
    return it == j.end() ? fallback : it->get<double>();
}

} // namespace

json model_to_json(const channel_model &m)
{
    json j;
    if (const auto *mp = std::get_if<multipath_model>(&m))
    {
        j["type"] = "multipath";
        json taps = json::array();
        for (const auto &t : mp->taps)
            taps.push_back({{"gain_re", t.gain.real()},
                            {"gain_im", t.gain.imag()},
                            {"delay", t.delay},
                            {"doppler", t.doppler}});
        j["taps"] = std::move(taps);
    }
    else if (const auto *ls = std::get_if<line_spread_model>(&m))
    {
        j["type"] = "line_spread";
        j["mu"] = ls->mu;
        j["f0"] = ls->f0;
        json nodes = json::array();
        for (const auto &nd : ls->g)
            nodes.push_back({{"weight_re", nd.weight.real()},
                             {"weight_im", nd.weight.imag()},
                             {"delay", nd.delay}});
        j["nodes"] = std::move(nodes);
    }
    else
    {
        const auto &tb = std::get<tabulated_model>(m);
        j["type"] = "tabulated";
        j["rows"] = tb.h.rows();
        j["cols"] = tb.h.cols();
        json re = json::array(), im = json::array();
        for (Eigen::Index i = 0; i < tb.h.rows(); i++)
            for (Eigen::Index k = 0; k < tb.h.cols(); k++)
            {
                re.push_back(tb.h(i, k).real());
                im.push_back(tb.h(i, k).imag());
            }
        j["h_re"] = std::move(re);
        j["h_im"] = std::move(im);
    }
    return j;
}

channel_model model_from_json(const json &j)
{
    const json &ty = need(j, "type", "model");
    if (!ty.is_string())
        throw config_error("model: field \"type\" must be a string");
    const std::string type = ty.get<std::string>();

    if (type == "multipath")
    {
        multipath_model m;
        const json &taps = need(j, "taps", "model");
        if (!taps.is_array() || taps.empty())
            throw config_error("model: \"taps\" must be a non-empty array");
        for (const auto &t : taps)
        {
            tap p;
            p.gain = cplx(need_num(t, "gain_re", "model.taps[]"), opt_num(t, "gain_im", 0.0));
            p.delay = need_num(t, "delay", "model.taps[]");
            p.doppler = opt_num(t, "doppler", 0.0);
            if (p.delay < 0.0)
                throw config_error("model.taps[]: \"delay\" must be nonnegative");
            m.taps.push_back(p);
        }
        return m;
    }
    if (type == "line_spread")
    {
        line_spread_model m;
        m.mu = opt_num(j, "mu", 0.0);
        m.f0 = opt_num(j, "f0", 0.0);
        const json &nodes = need(j, "nodes", "model");
        if (!nodes.is_array() || nodes.empty())
            throw config_error("model: \"nodes\" must be a non-empty array");
        for (const auto &nd : nodes)
        {
            delay_node d;
            d.weight = cplx(need_num(nd, "weight_re", "model.nodes[]"), opt_num(nd, "weight_im", 0.0));
            d.delay = need_num(nd, "delay", "model.nodes[]");
            if (d.delay < 0.0)
                throw config_error("model.nodes[]: \"delay\" must be nonnegative");
            m.g.push_back(d);
        }
        return m;
    }
    if (type == "tabulated")
    {
        auto rows = Eigen::Index(need_num(j, "rows", "model"));
        auto cols = Eigen::Index(need_num(j, "cols", "model"));
        if (rows < 1 || cols < 1)
            throw config_error("model: tabulated dimensions must be positive");
        const json &re = need(j, "h_re", "model");
        const json &im = need(j, "h_im", "model");
        if (!re.is_array() || !im.is_array() || Eigen::Index(re.size()) != rows * cols ||
            Eigen::Index(im.size()) != rows * cols)
            throw config_error("model: \"h_re\"/\"h_im\" must be rows*cols arrays");
        tabulated_model m;
        m.h.resize(rows, cols);
        for (Eigen::Index i = 0; i < rows; i++)
            for (Eigen::Index k = 0; k < cols; k++)
            {
                size_t idx = size_t(i * cols + k);
                m.h(i, k) = cplx(re[idx].get<double>(), im[idx].get<double>());
            }
        return m;
    }
    throw config_error("model: unknown \"type\" \"" + type + "\"");
}

json experiment_to_json(const experiment_config &c)
{
    return json{{"n", c.n},           {"ts", c.ts},
                {"q", c.q},           {"delta_tau", c.delta_tau},
                {"delta_f", c.delta_f}, {"seed", c.seed}};
}

experiment_config experiment_from_json(const json &j)
{
    experiment_config c;
    c.n = int(opt_num(j, "n", c.n));
    c.ts = opt_num(j, "ts", c.ts);
    c.q = int(opt_num(j, "q", c.q));
    c.delta_tau = opt_num(j, "delta_tau", c.delta_tau);
    c.delta_f = opt_num(j, "delta_f", c.delta_f);
    if (auto it = j.find("seed"); it != j.end())
        c.seed = it->get<std::uint64_t>();
    if (c.n < 2)
        throw config_error("experiment: \"n\" must be at least 2");
    if (c.q < 1)
        throw config_error("experiment: \"q\" must be at least 1");
    if (!(c.ts > 0.0))
        throw config_error("experiment: \"ts\" must be positive");
    if (c.delta_tau < 0.0 || c.delta_f < 0.0)
        throw config_error("experiment: spreads must be nonnegative");
    return c;
}

json link_to_json(const link_config &c)
{
    json j{{"k", c.k},
           {"l", c.l},
           {"constellation", c.constellation == constellation_kind::qpsk ? "qpsk" : "16qam"},
           {"n0", c.n0},
           {"seed", c.seed},
           {"num_blocks", c.num_blocks}};
    if (!c.c.empty())
        j["c"] = c.c;
    return j;
}

link_config link_from_json(const json &j)
{
    link_config c;
    c.k = int(opt_num(j, "k", c.k));
    c.l = int(opt_num(j, "l", c.l));
    if (auto it = j.find("constellation"); it != j.end())
    {
        std::string s = it->get<std::string>();
        if (s == "qpsk")
            c.constellation = constellation_kind::qpsk;
        else if (s == "16qam" || s == "qam16")
            c.constellation = constellation_kind::qam16;
        else
            throw config_error("link: unknown \"constellation\" \"" + s + "\"");
    }
    c.n0 = opt_num(j, "n0", c.n0);
    if (auto it = j.find("seed"); it != j.end())
        c.seed = it->get<std::uint64_t>();
    c.num_blocks = int(opt_num(j, "num_blocks", c.num_blocks));
    if (auto it = j.find("c"); it != j.end())
    {
        if (!it->is_array())
            throw config_error("link: \"c\" must be an array");
        c.c = it->get<std::vector<double>>();
    }
    return c;
}

json bubble_to_json(const bubble &b)
{
    json t = json::array(), f = json::array(), border = json::array();
    for (const auto &p : b.polyline)
    {
        t.push_back(p.t);
        f.push_back(p.f);
    }
    for (auto e : b.on_border)
        border.push_back(int(e));
    json tps = json::array();
    for (const auto &tp : b.turning_points)
        tps.push_back({{"t", tp.t},
                       {"f", tp.f},
                       {"kind", tp.kind == turn_kind::convex ? "convex" : "concave"}});
    return json{{"level", b.level}, {"area", b.area},     {"clipped", b.clipped},
                {"hole", b.hole},   {"t", std::move(t)},  {"f", std::move(f)},
                {"on_border", std::move(border)},         {"turning_points", std::move(tps)}};
}

json eigenfunction_to_json(const eigenfunction_model &m)
{
    json comps = json::array();
    for (const auto &br : m.components)
        comps.push_back({{"n_start", br.n_start},
                         {"freq", br.freq},
                         {"amp", br.amp},
                         {"phase", br.phase},
                         {"valid", br.valid}});
    return json{{"sigma", m.sigma}, {"ts", m.ts}, {"orbit", bubble_to_json(m.orbit)},
                {"components", std::move(comps)}};
}

json link_report_to_json(const link_report &r)
{
    json subs = json::array();
    for (const auto &s : r.sub)
        subs.push_back({{"sigma", s.sigma},
                        {"coeff", s.coeff},
                        {"trials", s.trials},
                        {"symbol_errors", s.symbol_errors},
                        {"bit_errors", s.bit_errors},
                        {"noise_var_est", s.noise_var_est},
                        {"snr_est", s.snr_est},
                        {"usable", s.usable}});
    return json{{"subchannels", std::move(subs)},
                {"total_symbols", r.total_symbols},
                {"total_symbol_errors", r.total_symbol_errors},
                {"total_bits", r.total_bits},
                {"total_bit_errors", r.total_bit_errors},
                {"ber", r.ber},
                {"unusable_subchannels", r.unusable_subchannels}};
}

json load_json(const std::string &path)
{
    auto is = open_in(path);
    json j;
    try
    {
        is >> j;
    }
    catch (const json::parse_error &e)
    {
        throw config_error("invalid JSON in " + path + ": " + e.what());
    }
    return j;
}

void save_json(const std::string &path, const json &j)
{
    auto os = open_out(path);
    os << j.dump(2) << "\n";
    if (!os)
        throw io_error("write failed: " + path);
}

// ---------------------------------------------------------------------------
// CSV

namespace
{

class csv_file
{
  public:
    explicit csv_file(const std::string &path) : path_(path), fp_(std::fopen(path.c_str(), "wb"))
    {
        if (!fp_)
            throw io_error("cannot open for writing: " + path);
    }
    ~csv_file()
    {
        if (fp_)
            std::fclose(fp_);
    }
    csv_file(const csv_file &) = delete;
    csv_file &operator=(const csv_file &) = delete;

    void line(const char *fmt, ...) __attribute__((format(printf, 2, 3)))
    {
        va_list ap;
        va_start(ap, fmt);
        int r = std::vfprintf(fp_, fmt, ap);
        va_end(ap);
        if (r < 0)
            throw io_error("write failed: " + path_);
    }

  private:
    std::string path_;
    std::FILE *fp_;
};

} // namespace

void write_sigmas_csv(const std::string &path, const Eigen::VectorXd &sigmas)
{
    csv_file f(path);
    f.line("index,sigma\n");
    for (Eigen::Index i = 0; i < sigmas.size(); i++)
        f.line("%lld,%.17g\n", (long long)i, sigmas(i));
}

void write_levels_csv(const std::string &path, const std::vector<level_entry> &levels)
{
    csv_file f(path);
    f.line("n,sigma\n");
    for (const auto &e : levels)
        f.line("%d,%.17g\n", e.n, e.sigma);
}

void write_branches_csv(const std::string &path, const eigenfunction_model &m, int n)
{
    csv_file f(path);
    f.line("branch,t,freq,amp,phase,valid\n");
    for (size_t br = 0; br < m.components.size(); br++)
    {
        const auto &c = m.components[br];
        for (size_t i = 0; i < c.freq.size(); i++)
        {
            auto idx = double(c.n_start + std::int64_t(i));
            if (n > 0 && (idx < 0 || idx >= n))
                continue;
            f.line("%zu,%.17g,%.17g,%.17g,%.17g,%d\n", br, idx * m.ts, c.freq[i], c.amp[i],
                   c.phase[i], int(c.valid[i]));
        }
    }
}

void write_grid_csv(const std::string &path, const tf_grid &g)
{
    csv_file f(path);
    f.line("t,f,value\n");
    for (int it = 0; it < g.nt; it++)
        for (int jf = 0; jf < g.nf; jf++)
            f.line("%.17g,%.17g,%.17g\n", g.t_of(it), g.f_of(jf), g.at(it, jf));
}

// ---------------------------------------------------------------------------
// manifest

std::uint64_t fnv1a64_file(const std::string &path)
{
    auto is = open_in(path);
    std::uint64_t h = 0xcbf29ce484222325ull;
    char buf[1 << 16];
    while (is)
    {
        is.read(buf, sizeof buf);
        std::streamsize got = is.gcount();
        for (std::streamsize i = 0; i < got; i++)
        {
            h ^= std::uint64_t((unsigned char)buf[i]);
            h *= 0x100000001b3ull;
        }
    }
    return h;
}

void write_manifest(const std::string &dir, const std::string &command, const json &config,
                    const std::vector<std::string> &outputs)
{
    ordered_json m;
    m["tool"] = "ltvchan";
    m["version"] = "0.1.0";
    m["command"] = command;
    m["config"] = config;
    ordered_json files = ordered_json::array();
    for (const auto &p : outputs)
    {
        char hex[17];
        std::snprintf(hex, sizeof hex, "%016llx", (unsigned long long)fnv1a64_file(p));
        std::string base = p;
        if (auto pos = base.find_last_of('/'); pos != std::string::npos)
            base = base.substr(pos + 1);
        files.push_back({{"path", base}, {"fnv1a64", hex}});
    }
    m["outputs"] = std::move(files);

    std::string path = dir.empty() ? "manifest.json" : dir + "/manifest.json";
    auto os = open_out(path);
    os << m.dump(2) << "\n";
    if (!os)
        throw io_error("write failed: " + path);
}

} // namespace ltv
