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
//
// Command-line front end. One subcommand per pipeline stage; every run drops
// a manifest.json with the effective configuration and a content hash per
// output, so identical configs reproduce identical bytes.

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ltv/channel.hpp"
#include "ltv/discretize.hpp"
#include "ltv/errors.hpp"
#include "ltv/io.hpp"
#include "ltv/linksim.hpp"
#include "ltv/spectral.hpp"
#include "ltv/tfa.hpp"
#include "ltv/wkb.hpp"

using nlohmann::json;

namespace
{

struct cli_opts
{
    std::string config;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
    std::optional<int> n;
    std::optional<int> oversample;
};

void add_common(CLI::App *cmd, cli_opts &o, bool config_required = true)
{
    auto *c = cmd->add_option("--config", o.config, "JSON configuration file");
    if (config_required)
        c->required();
    cmd->add_option("--out", o.out, "output directory (default: current)");
    cmd->add_option("--seed", o.seed, "override the seed in the configuration");
    cmd->add_option("--n", o.n, "override the window length n");
    cmd->add_option("--oversample", o.oversample, "override the grid oversampling factor");
}

std::string join(const std::string &dir, const std::string &name)
{
    return dir.empty() || dir == "." ? name : dir + "/" + name;
}

json load_config(const cli_opts &o)
{
    std::error_code ec;
    std::filesystem::create_directories(o.out, ec);
    if (ec)
        throw ltv::io_error("cannot create output directory: " + o.out);
    json cfg = ltv::load_json(o.config);
    if (!cfg.is_object())
        throw ltv::config_error("config: top level must be a JSON object");
    if (o.n)
        cfg["n"] = *o.n;
    if (o.oversample)
        cfg["oversample"] = *o.oversample;
    return cfg;
}

ltv::channel_model model_from_cfg(const json &cfg)
{
    if (cfg.contains("model"))
        return ltv::model_from_json(cfg["model"]);
    if (cfg.contains("model_file"))
        return ltv::model_from_json(ltv::load_json(cfg["model_file"].get<std::string>()));
    throw ltv::config_error("config: needs \"model\" or \"model_file\"");
}

int int_field(const json &cfg, const char *name, int fallback)
{
    auto it = cfg.find(name);
    if (it == cfg.end())
        return fallback;
    if (!it->is_number())
        throw ltv::config_error(std::string("config: \"") + name + "\" must be a number");
    return it->get<int>();
}

double num_field(const json &cfg, const char *name, double fallback)
{
    auto it = cfg.find(name);
    if (it == cfg.end())
        return fallback;
    if (!it->is_number())
        throw ltv::config_error(std::string("config: \"") + name + "\" must be a number");
    return it->get<double>();
}

std::vector<int> indices_from(const json &cfg)
{
    std::vector<int> idx;
    if (auto it = cfg.find("indices"); it != cfg.end())
    {
        if (!it->is_array())
            throw ltv::config_error("config: \"indices\" must be an array");
        for (const auto &v : *it)
        {
            int i = v.get<int>();
            if (i < 0)
                throw ltv::config_error("config: \"indices\" entries must be nonnegative");
            idx.push_back(i);
        }
    }
    return idx;
}

// ---------------------------------------------------------------------------
// prediction pipeline shared by `predict` and `compare`

struct prediction
{
    double sigma_global = 0.0;        // level with total superlevel area n + 1/2
    double sigma_mode = 0.0;          // per-curve half-integer crossing
    std::vector<ltv::bubble> bubbles; // full level set at sigma_mode, annotated
    ltv::bubble host;                 // curve the mode localizes on, annotated
    ltv::eigenfunction_model model;   // synthesized on the host curve
};

prediction predict_index(const ltv::tf_grid &grid, const std::vector<ltv::level_entry> &table,
                         const std::vector<ltv::mode_entry> &modes, int idx)
{
    prediction p;
    p.sigma_global = table[size_t(idx)].sigma;
    p.sigma_mode = modes[size_t(idx)].sigma;
    p.bubbles = ltv::extract_level_set(grid, p.sigma_mode);
    for (auto &b : p.bubbles)
        ltv::annotate_turning_points(b, grid);

    // The mode entry carries its host curve as a snapshot from a neighboring
    // table level. Re-associate it with the curve of the exact-level set:
    // one of the two contains the other (they wrap the same orbit), with the
    // crossing area breaking ties when curves have merged in between.
    const ltv::mode_entry &me = modes[size_t(idx)];
    ltv::vec2 sp = ltv::curve_probe(me.orbit);
    int hosti = -1;
    double best_gap = 0.0;
    for (int i = 0; i < int(p.bubbles.size()); i++)
    {
        const ltv::bubble &c = p.bubbles[size_t(i)];
        if (c.hole || c.polyline.size() < 2)
            continue;
        if (!ltv::bubble_contains(c, sp) &&
            !ltv::bubble_contains(me.orbit, ltv::curve_probe(c)))
            continue;
        double gap = std::abs(c.area - me.orbit_area);
        if (hosti < 0 || gap < best_gap)
        {
            hosti = i;
            best_gap = gap;
        }
    }
    if (hosti >= 0)
    {
        p.host = p.bubbles[size_t(hosti)];
    }
    else
    {
        // exact-level curve vanished between samples; keep the snapshot
        p.host = me.orbit;
        ltv::annotate_turning_points(p.host, grid);
    }
    p.model = ltv::synthesize_eigenfunction(p.host, grid, p.sigma_mode);
    return p;
}

// ---------------------------------------------------------------------------
// subcommands

int run_synth(const cli_opts &o)
{
    json cfg = load_config(o);
    json effective;
    ltv::channel_model model;

    if (cfg.contains("experiment"))
    {
        ltv::experiment_config exp = ltv::experiment_from_json(cfg["experiment"]);
        if (o.seed)
            exp.seed = *o.seed;
        model = ltv::sample_multipath(exp);
        effective["experiment"] = ltv::experiment_to_json(exp);
    }
    else if (cfg.contains("model"))
    {
        model = ltv::model_from_json(cfg["model"]);
        effective["model"] = ltv::model_to_json(model);
    }
    else
    {
        throw ltv::config_error("synth: config needs \"experiment\" or \"model\"");
    }

    std::string model_path = join(o.out, "model.json");
    ltv::save_json(model_path, ltv::model_to_json(model));
    ltv::write_manifest(o.out, "synth", effective, {model_path});
    return 0;
}

int run_svd(const cli_opts &o)
{
    json cfg = load_config(o);
    ltv::channel_model model = model_from_cfg(cfg);
    int n = int_field(cfg, "n", 256);
    double ts = num_field(cfg, "ts", 1.0);

    ltv::channel_matrix h = ltv::build_channel_matrix(model, n);
    h.ts = ts;
    ltv::svd_result sv = ltv::svd(h);

    std::string mat_path = join(o.out, "matrix.ltvm");
    std::string svd_path = join(o.out, "svd.ltvm");
    std::string sig_path = join(o.out, "sigmas.csv");
    ltv::write_matrix(mat_path, h);
    ltv::write_svd(svd_path, sv, ts);
    ltv::write_sigmas_csv(sig_path, sv.sigmas);

    json effective{{"model", ltv::model_to_json(model)}, {"n", n}, {"ts", ts}};
    ltv::write_manifest(o.out, "svd", effective, {mat_path, svd_path, sig_path});
    return 0;
}

int run_area_rule(const cli_opts &o, const char *command = "area-rule")
{
    json cfg = load_config(o);
    ltv::channel_model model = model_from_cfg(cfg);
    int n = int_field(cfg, "n", 256);
    double ts = num_field(cfg, "ts", 1.0);
    int oversample = int_field(cfg, "oversample", 4);

    ltv::tf_grid grid = ltv::magnitude_grid(model, n, ts, oversample);
    ltv::quantize_options qopt;
    qopt.max_levels = int_field(cfg, "max_levels", -1);
    auto levels = ltv::quantized_levels(grid, grid.max_value(), qopt);

    std::string lev_path = join(o.out, "levels.csv");
    ltv::write_levels_csv(lev_path, levels);

    json effective{{"model", ltv::model_to_json(model)},
                   {"n", n},
                   {"ts", ts},
                   {"oversample", oversample},
                   {"max_levels", qopt.max_levels}};
    ltv::write_manifest(o.out, command, effective, {lev_path});
    return 0;
}

int run_predict(const cli_opts &o)
{
    json cfg = load_config(o);
    ltv::channel_model model = model_from_cfg(cfg);
    int n = int_field(cfg, "n", 256);
    double ts = num_field(cfg, "ts", 1.0);
    int oversample = int_field(cfg, "oversample", 4);
    std::vector<int> indices = indices_from(cfg);

    std::vector<double> levels;
    if (auto it = cfg.find("levels"); it != cfg.end())
        levels = it->get<std::vector<double>>();
    if (indices.empty() && levels.empty())
        throw ltv::config_error("predict: config needs \"indices\" or \"levels\"");

    ltv::tf_grid grid = ltv::magnitude_grid(model, n, ts, oversample);
    std::vector<std::string> outputs;

    std::vector<ltv::level_entry> table;
    std::vector<ltv::mode_entry> modes;
    if (!indices.empty())
    {
        ltv::quantize_options qopt;
        int deepest = 0;
        for (int i : indices)
            deepest = std::max(deepest, i);
        qopt.max_levels = std::max(int_field(cfg, "max_levels", deepest + 8), deepest + 8);
        table = ltv::quantized_levels(grid, grid.max_value(), qopt);
        modes = ltv::mode_table(grid, table);

        std::string lev_path = join(o.out, "levels.csv");
        ltv::write_levels_csv(lev_path, table);
        outputs.push_back(lev_path);
    }

    for (int idx : indices)
    {
        if (idx >= int(table.size()) || idx >= int(modes.size()))
        {
            std::fprintf(stderr, "predict: index %d is beyond the deepest admissible level; skipped\n",
                         idx);
            continue;
        }
        prediction p = predict_index(grid, table, modes, idx);
        if (p.bubbles.empty())
        {
            std::fprintf(stderr, "predict: level for index %d has an empty level set; skipped\n", idx);
            continue;
        }

        json bj{{"index", idx},
                {"sigma", p.sigma_global},
                {"sigma_mode", p.sigma_mode},
                {"host", ltv::bubble_to_json(p.host)}};
        json arr = json::array();
        for (const auto &b : p.bubbles)
            arr.push_back(ltv::bubble_to_json(b));
        bj["bubbles"] = std::move(arr);

        std::string bpath = join(o.out, "bubble_" + std::to_string(idx) + ".json");
        ltv::save_json(bpath, bj);
        outputs.push_back(bpath);

        std::string mpath = join(o.out, "model_" + std::to_string(idx) + ".json");
        ltv::save_json(mpath, ltv::eigenfunction_to_json(p.model));
        outputs.push_back(mpath);

        std::string cpath = join(o.out, "branches_" + std::to_string(idx) + ".csv");
        ltv::write_branches_csv(cpath, p.model, n);
        outputs.push_back(cpath);
    }

    for (size_t k = 0; k < levels.size(); k++)
    {
        auto bs = ltv::extract_level_set(grid, levels[k]);
        for (auto &b : bs)
            ltv::annotate_turning_points(b, grid);
        if (bs.empty())
            std::fprintf(stderr, "predict: level %.6g is above the grid maximum; empty level set\n",
                         levels[k]);
        json bj{{"level", levels[k]}};
        json arr = json::array();
        for (const auto &b : bs)
            arr.push_back(ltv::bubble_to_json(b));
        bj["bubbles"] = std::move(arr);
        std::string bpath = join(o.out, "bubble_L" + std::to_string(k) + ".json");
        ltv::save_json(bpath, bj);
        outputs.push_back(bpath);
    }

    json effective{{"model", ltv::model_to_json(model)}, {"n", n},
                   {"ts", ts},                           {"oversample", oversample},
                   {"indices", indices},                 {"levels", levels}};
    ltv::write_manifest(o.out, "predict", effective, outputs);
    return 0;
}

int run_tfa(const cli_opts &o)
{
    json cfg = load_config(o);
    if (!cfg.contains("svd_file"))
        throw ltv::config_error("tfa: config needs \"svd_file\"");
    ltv::svd_result sv = ltv::read_svd(cfg["svd_file"].get<std::string>());
    std::vector<int> indices = indices_from(cfg);
    if (indices.empty())
        throw ltv::config_error("tfa: config needs \"indices\"");

    ltv::spwvd_options sopt;
    sopt.t_win = int_field(cfg, "t_win", 0);
    sopt.f_win = int_field(cfg, "f_win", 0);
    sopt.analytic = cfg.value("analytic", false);
    bool do_reassign = cfg.value("reassign", true);
    double threshold = num_field(cfg, "threshold", 0.0);

    std::vector<std::string> outputs;
    for (int idx : indices)
    {
        if (idx < 0 || idx >= sv.n())
            throw ltv::config_error("tfa: index out of range for the singular system");
        Eigen::VectorXcd u = sv.u.col(idx);
        ltv::tf_distribution d = ltv::spwvd(u, sopt);
        if (do_reassign)
            d = ltv::reassign(u, d);

        std::string gpath = join(o.out, "tfd_" + std::to_string(idx) + ".ltvm");
        ltv::write_grid(gpath, d.grid);
        outputs.push_back(gpath);

        if (threshold > 0.0)
        {
            ltv::ridge_set r = ltv::ridge_extract(d, threshold);
            std::string rpath = join(o.out, "ridge_" + std::to_string(idx) + ".csv");
            std::FILE *fp = std::fopen(rpath.c_str(), "wb");
            if (!fp)
                throw ltv::io_error("cannot open for writing: " + rpath);
            std::fprintf(fp, "t,f,mass\n");
            for (const auto &pt : r.pts)
                std::fprintf(fp, "%.17g,%.17g,%.17g\n", pt.t, pt.f, pt.w);
            std::fclose(fp);
            outputs.push_back(rpath);
        }
    }

    json effective{{"svd_file", cfg["svd_file"]}, {"indices", indices},
                   {"t_win", sopt.t_win},         {"f_win", sopt.f_win},
                   {"analytic", sopt.analytic},   {"reassign", do_reassign},
                   {"threshold", threshold}};
    ltv::write_manifest(o.out, "tfa", effective, outputs);
    return 0;
}

int run_compare(const cli_opts &o)
{
    json cfg = load_config(o);
    if (!cfg.contains("svd_file"))
        throw ltv::config_error("compare: config needs \"svd_file\"");
    ltv::svd_result sv = ltv::read_svd(cfg["svd_file"].get<std::string>());
    ltv::channel_model model = model_from_cfg(cfg);
    std::vector<int> indices = indices_from(cfg);
    if (indices.empty())
        throw ltv::config_error("compare: config needs \"indices\"");

    int n = int_field(cfg, "n", sv.n());
    if (n != sv.n())
        throw ltv::contract_error("compare: window length does not match the singular system");
    double ts = num_field(cfg, "ts", 1.0);
    int oversample = int_field(cfg, "oversample", 4);
    double threshold = num_field(cfg, "threshold", 0.2);
    int smooth_len = int_field(cfg, "smooth_len", 13);

    ltv::spwvd_options sopt;
    sopt.t_win = int_field(cfg, "t_win", 0);
    sopt.f_win = int_field(cfg, "f_win", 0);

    ltv::tf_grid grid = ltv::magnitude_grid(model, n, ts, oversample);
    int deepest = 0;
    for (int i : indices)
        deepest = std::max(deepest, i);
    ltv::quantize_options qopt;
    qopt.max_levels = deepest + 8;
    auto table = ltv::quantized_levels(grid, grid.max_value(), qopt);
    auto modes = ltv::mode_table(grid, table);

    // Numeric vectors inside a near-degenerate sigma cluster come in arbitrary
    // order, so each index may match any predicted mode whose level lies
    // within the prediction accuracy of its numeric sigma.
    int cluster_span = int_field(cfg, "cluster_span", 3);
    double cluster_tol = num_field(cfg, "cluster_tol", 0.02);

    std::vector<std::string> outputs;
    json metrics = json::array();
    for (int idx : indices)
    {
        if (idx < 0 || idx >= sv.n())
            throw ltv::config_error("compare: index out of range for the singular system");
        if (idx >= int(table.size()) || idx >= int(modes.size()))
            throw ltv::contract_error("compare: index beyond the deepest admissible level");

        Eigen::VectorXcd u = sv.u.col(idx);
        ltv::tf_distribution d = ltv::reassign(u, ltv::spwvd(u, sopt));
        ltv::ridge_set ridge = ltv::ridge_extract(d, threshold);

        double sig_num = sv.sigmas(idx);
        int best = -1;
        prediction best_p;
        ltv::ridge_metrics best_host;
        for (int k = std::max(0, idx - cluster_span);
             k <= std::min(int(modes.size()) - 1, idx + cluster_span); k++)
        {
            if (std::abs(modes[size_t(k)].sigma - sig_num) > cluster_tol * sig_num)
                continue;
            prediction p = predict_index(grid, table, modes, k);
            ltv::ridge_metrics rm = ltv::compare_ridge_to_bubble(ridge, p.host);
            if (best < 0 || rm.mean_cells < best_host.mean_cells)
            {
                best = k;
                best_p = std::move(p);
                best_host = rm;
            }
        }
        if (best < 0)
            throw ltv::contract_error("compare: no predicted mode near the numeric level");

        prediction &p = best_p;
        ltv::ridge_metrics rm = ltv::compare_ridge_to_level(ridge, p.bubbles);
        ltv::amplitude_metrics am = ltv::compare_amplitude(u, p.model, smooth_len);

        metrics.push_back({{"index", idx},
                           {"matched_entry", best},
                           {"sigma_predicted", p.sigma_mode},
                           {"sigma_level", p.sigma_global},
                           {"sigma_numeric", sig_num},
                           {"ridge_mean_cells", rm.mean_cells},
                           {"ridge_p90_cells", rm.p90_cells},
                           {"ridge_mass", rm.mass},
                           {"host_mean_cells", best_host.mean_cells},
                           {"pearson_r", am.pearson_r},
                           {"rel_l2", am.rel_l2},
                           {"n_used", am.n_used}});

        // plot data: numeric envelope next to the model envelope
        auto env = p.model.combined_amplitude(n);
        auto mask = p.model.valid_mask(n);
        std::string apath = join(o.out, "amp_" + std::to_string(idx) + ".csv");
        std::FILE *fp = std::fopen(apath.c_str(), "wb");
        if (!fp)
            throw ltv::io_error("cannot open for writing: " + apath);
        std::fprintf(fp, "t,u_abs,model_amp,valid\n");
        for (int i = 0; i < n; i++)
            std::fprintf(fp, "%.17g,%.17g,%.17g,%d\n", double(i) * ts, std::abs(u(i)), env[size_t(i)],
                         int(mask[size_t(i)]));
        std::fclose(fp);
        outputs.push_back(apath);
    }

    std::string mpath = join(o.out, "metrics.json");
    ltv::save_json(mpath, json{{"per_index", metrics}});
    outputs.push_back(mpath);

    json effective{{"svd_file", cfg["svd_file"]},
                   {"model", ltv::model_to_json(model)},
                   {"n", n},
                   {"ts", ts},
                   {"oversample", oversample},
                   {"indices", indices},
                   {"threshold", threshold},
                   {"smooth_len", smooth_len}};
    ltv::write_manifest(o.out, "compare", effective, outputs);
    return 0;
}

int run_link(const cli_opts &o)
{
    json cfg = load_config(o);
    ltv::channel_model model = model_from_cfg(cfg);
    int n = int_field(cfg, "n", 256);
    if (!cfg.contains("link"))
        throw ltv::config_error("link: config needs a \"link\" object");
    ltv::link_config lc = ltv::link_from_json(cfg["link"]);
    if (o.seed)
        lc.seed = *o.seed;

    ltv::link_report rep = ltv::run_link(model, lc, n);

    std::string rpath = join(o.out, "report.json");
    ltv::save_json(rpath, ltv::link_report_to_json(rep));

    json effective{{"model", ltv::model_to_json(model)}, {"n", n}, {"link", ltv::link_to_json(lc)}};
    ltv::write_manifest(o.out, "link", effective, {rpath});
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"singular functions of slowly time-varying channels: synthesis, "
                 "validation, and link simulation"};
    app.require_subcommand(1);

    cli_opts o;
    add_common(app.add_subcommand("synth", "sample or validate a channel model"), o);
    add_common(app.add_subcommand("svd", "discretize a model and compute its singular system"), o);
    add_common(app.add_subcommand("predict", "level sets, folds, and synthesized eigenfunctions"), o);
    add_common(app.add_subcommand("area-rule", "quantized level table sigma_n"), o);
    add_common(app.add_subcommand("tfa", "reassigned smoothed pseudo Wigner-Ville of singular vectors"),
               o);
    add_common(app.add_subcommand("compare", "ridge and amplitude metrics against predictions"), o);
    add_common(app.add_subcommand("link", "singular-waveform transmission simulation"), o);

    try
    {
        app.parse(argc, argv);
        if (app.got_subcommand("synth"))
            return run_synth(o);
        if (app.got_subcommand("svd"))
            return run_svd(o);
        if (app.got_subcommand("predict"))
            return run_predict(o);
        if (app.got_subcommand("area-rule"))
            return run_area_rule(o);
        if (app.got_subcommand("tfa"))
            return run_tfa(o);
        if (app.got_subcommand("compare"))
            return run_compare(o);
        if (app.got_subcommand("link"))
            return run_link(o);
        return 1;
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        return 2;
    }
    catch (const ltv::config_error &e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    catch (const ltv::io_error &e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    catch (const ltv::contract_error &e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    }
    catch (const ltv::numerical_error &e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    }
    catch (const std::exception &e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
