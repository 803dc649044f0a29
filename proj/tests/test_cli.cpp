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

// End-to-end tests for the ltvchan command line tool. Each case drives the
// real binary through std::system and inspects exit codes and output files.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "json.hpp"

#include "ltv/channel.hpp"
#include "ltv/discretize.hpp"
#include "ltv/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

#ifndef LTV_CLI_PATH
#error "LTV_CLI_PATH must point at the ltvchan binary"
#endif

namespace {

struct scratch {
    fs::path dir;
    explicit scratch(const std::string& tag) {
        dir = fs::temp_directory_path() /
              ("ltv_cli_" + tag + "_" + std::to_string(::getpid()));
        fs::create_directories(dir);
    }
    ~scratch() {
        std::error_code ec;
        fs::remove_all(dir, ec);
    }
    fs::path operator/(const char* leaf) const { return dir / leaf; }
};

int run_cli(const std::string& args) {
    std::string cmd = std::string(LTV_CLI_PATH) + " " + args +
                      " >/dev/null 2>/dev/null";
    int rc = std::system(cmd.c_str());
    if (rc == -1 || !WIFEXITED(rc)) return -1;
    return WEXITSTATUS(rc);
}

void put_text(const fs::path& p, const std::string& body) {
    std::ofstream out(p);
    out << body;
}

std::string get_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

std::size_t line_count(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) ++n;
    return n;
}

// two-tap time-invariant channel used by several cases
const char* two_tap_model =
    R"({"type": "multipath", "taps": [
        {"gain_re": 1.0, "delay": 0.0},
        {"gain_re": 0.6, "gain_im": 0.1, "delay": 1.0}]})";

} // namespace

TEST_CASE("cli: usage errors exit 2") {
    scratch s("usage");
    put_text(s / "empty.json", "{}");

    CHECK(run_cli("") == 2);                    // subcommand required
    CHECK(run_cli("synth") == 2);               // --config required
    CHECK(run_cli("bogus --config " + (s / "empty.json").string()) == 2);
    CHECK(run_cli("--help") == 0);
}

TEST_CASE("cli: config loading errors") {
    scratch s("cfg");
    put_text(s / "bad.json", "not json {");
    put_text(s / "empty.json", "{}");
    put_text(s / "arr.json", "[1, 2]");

    // absent file is an I/O failure, not a config failure
    CHECK(run_cli("synth --config " + (s / "nope.json").string()) == 3);
    CHECK(run_cli("synth --config " + (s / "bad.json").string()) == 2);
    CHECK(run_cli("synth --config " + (s / "arr.json").string()) == 2);
    // no model and no experiment
    CHECK(run_cli("synth --config " + (s / "empty.json").string()) == 2);
    CHECK(run_cli("svd --config " + (s / "empty.json").string()) == 2);
}

TEST_CASE("cli: synth echoes an inline model and manifests it") {
    scratch s("synth");
    put_text(s / "cfg.json", std::string("{\"model\": ") + two_tap_model + "}");
    fs::path out = s / "out";

    REQUIRE(run_cli("synth --config " + (s / "cfg.json").string() +
                    " --out " + out.string()) == 0);
    REQUIRE(fs::exists(out / "model.json"));
    REQUIRE(fs::exists(out / "manifest.json"));

    ltv::channel_model m = ltv::load_model(out / "model.json");
    auto* mp = std::get_if<ltv::multipath_model>(&m);
    REQUIRE(mp != nullptr);
    REQUIRE(mp->taps.size() == 2);
    CHECK(mp->taps[0].gain == std::complex<double>(1.0, 0.0));
    CHECK(mp->taps[1].gain == std::complex<double>(0.6, 0.1));
    CHECK(mp->taps[1].delay == 1.0);

    json man = json::parse(get_bytes(out / "manifest.json"));
    CHECK(man.at("tool") == "ltvchan");
    CHECK(man.at("command") == "synth");
    REQUIRE(man.at("outputs").is_array());
    for (const auto& o : man.at("outputs")) {
        fs::path p = out / o.at("path").get<std::string>();
        REQUIRE(fs::exists(p));
        CHECK(o.at("fnv1a64") == ltv::fnv1a64_file(p));
    }
}

TEST_CASE("cli: synth samples experiments and honors --seed") {
    scratch s("sample");
    put_text(s / "exp.json", R"({"experiment": {"n": 64, "q": 5, "seed": 1}})");
    fs::path a = s / "a", b = s / "b", c = s / "c";

    REQUIRE(run_cli("synth --config " + (s / "exp.json").string() +
                    " --out " + a.string()) == 0);
    REQUIRE(run_cli("synth --config " + (s / "exp.json").string() +
                    " --out " + b.string()) == 0);
    REQUIRE(run_cli("synth --config " + (s / "exp.json").string() +
                    " --out " + c.string() + " --seed 7") == 0);

    auto ma = std::get<ltv::multipath_model>(ltv::load_model(a / "model.json"));
    auto mb = std::get<ltv::multipath_model>(ltv::load_model(b / "model.json"));
    auto mc = std::get<ltv::multipath_model>(ltv::load_model(c / "model.json"));
    REQUIRE(ma.taps.size() == 5);

    // same seed reproduces the draw exactly, a new seed changes it
    CHECK(get_bytes(a / "model.json") == get_bytes(b / "model.json"));
    bool differs = false;
    for (std::size_t i = 0; i < 5; ++i)
        if (ma.taps[i].gain != mc.taps[i].gain) differs = true;
    CHECK(differs);
}

TEST_CASE("cli: svd outputs match the library and reruns are byte-identical") {
    scratch s("svd");
    put_text(s / "cfg.json",
             std::string("{\"model\": ") + two_tap_model + ", \"n\": 32}");
    fs::path o1 = s / "one", o2 = s / "two";

    REQUIRE(run_cli("svd --config " + (s / "cfg.json").string() +
                    " --out " + o1.string()) == 0);
    REQUIRE(run_cli("svd --config " + (s / "cfg.json").string() +
                    " --out " + o2.string()) == 0);

    auto mat = ltv::read_matrix(o1 / "matrix.ltvm");
    REQUIRE(mat.h.rows() == 32);
    REQUIRE(mat.h.cols() == 32);

    // the container holds exactly the matrix the library builds
    ltv::channel_model m = ltv::load_model_json(json::parse(two_tap_model));
    Eigen::MatrixXcd href = ltv::channel_matrix(m, 32, mat.ts);
    CHECK((mat.h - href).cwiseAbs().maxCoeff() == 0.0);

    auto sv = ltv::read_svd(o1 / "svd.ltvm");
    REQUIRE(sv.sigma.size() == 32);
    for (int i = 0; i + 1 < int(sv.sigma.size()); ++i)
        CHECK(sv.sigma[i] >= sv.sigma[i + 1]);
    CHECK(line_count(o1 / "sigmas.csv") == 33); // header + one row per value

    for (const char* leaf :
         {"matrix.ltvm", "svd.ltvm", "sigmas.csv", "manifest.json"})
        CHECK(get_bytes(o1 / leaf) == get_bytes(o2 / leaf));
}

TEST_CASE("cli: area-rule tabulates level thresholds") {
    scratch s("area");
    put_text(s / "cfg.json", std::string("{\"model\": ") + two_tap_model +
                                 ", \"n\": 64, \"max_levels\": 5}");
    fs::path out = s / "out";

    REQUIRE(run_cli("area-rule --config " + (s / "cfg.json").string() +
                    " --out " + out.string()) == 0);
    REQUIRE(fs::exists(out / "levels.csv"));
    CHECK(line_count(out / "levels.csv") == 6);

    std::ifstream in(out / "levels.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "n,sigma");
    double prev = 1e300;
    while (std::getline(in, line)) {
        double sig = std::strtod(line.c_str() + line.find(',') + 1, nullptr);
        CHECK(sig > 0.0);
        CHECK(sig <= prev);
        prev = sig;
    }
}

TEST_CASE("cli: tfa renders distributions and ridge tables") {
    scratch s("tfa");
    put_text(s / "svd.json",
             std::string("{\"model\": ") + two_tap_model + ", \"n\": 32}");
    fs::path svd_out = s / "svd";
    REQUIRE(run_cli("svd --config " + (s / "svd.json").string() +
                    " --out " + svd_out.string()) == 0);

    json cfg = {{"svd_file", (svd_out / "svd.ltvm").string()},
                {"indices", {0, 1}},
                {"threshold", 0.3}};
    put_text(s / "tfa.json", cfg.dump());
    fs::path out = s / "out";
    REQUIRE(run_cli("tfa --config " + (s / "tfa.json").string() +
                    " --out " + out.string()) == 0);

    for (int idx : {0, 1}) {
        auto g = ltv::read_grid(out / ("tfd_" + std::to_string(idx) + ".ltvm"));
        CHECK(g.v.rows() == 32);
        CHECK(g.v.cols() == 32);
        CHECK(g.v.maxCoeff() > 0.0);
        fs::path ridge = out / ("ridge_" + std::to_string(idx) + ".csv");
        REQUIRE(fs::exists(ridge));
        CHECK(line_count(ridge) > 1);
    }

    // index past the window is a config error; a matrix container where an
    // svd container is expected is an I/O error
    json oor = cfg;
    oor["indices"] = {99};
    put_text(s / "oor.json", oor.dump());
    CHECK(run_cli("tfa --config " + (s / "oor.json").string() + " --out " +
                  (s / "x1").string()) == 2);

    json wrong = cfg;
    wrong["svd_file"] = (svd_out / "matrix.ltvm").string();
    put_text(s / "wrong.json", wrong.dump());
    CHECK(run_cli("tfa --config " + (s / "wrong.json").string() + " --out " +
                  (s / "x2").string()) == 3);
}

TEST_CASE("cli: compare pipeline scores predictions against the svd") {
    scratch s("cmp");
    put_text(s / "exp.json", R"({"experiment": {"n": 64, "q": 5, "seed": 1}})");
    fs::path synth_out = s / "synth", svd_out = s / "svd", out = s / "out";
    REQUIRE(run_cli("synth --config " + (s / "exp.json").string() + " --out " +
                    synth_out.string()) == 0);

    json svdcfg = {{"model_file", (synth_out / "model.json").string()},
                   {"n", 64}};
    put_text(s / "svd.json", svdcfg.dump());
    REQUIRE(run_cli("svd --config " + (s / "svd.json").string() + " --out " +
                    svd_out.string()) == 0);

    json cfg = {{"model_file", (synth_out / "model.json").string()},
                {"svd_file", (svd_out / "svd.ltvm").string()},
                {"n", 64},
                {"indices", {3}}};
    put_text(s / "cmp.json", cfg.dump());
    REQUIRE(run_cli("compare --config " + (s / "cmp.json").string() +
                    " --out " + out.string()) == 0);

    REQUIRE(fs::exists(out / "amp_3.csv"));
    json metrics = json::parse(get_bytes(out / "metrics.json"));
    REQUIRE(metrics.at("per_index").size() == 1);
    const json& row = metrics.at("per_index")[0];
    CHECK(row.at("index") == 3);
    CHECK(row.at("n_used").get<int>() >= 4);
    double pred = row.at("sigma_predicted").get<double>();
    double num = row.at("sigma_numeric").get<double>();
    CHECK(std::abs(pred - num) / num < 0.1);
    CHECK(row.at("rel_l2").get<double>() < 0.5);
    CHECK(row.at("ridge_mean_cells").get<double>() < 3.0);

    // window length disagreement with the stored svd is a contract violation
    json bad = cfg;
    bad["n"] = 48;
    put_text(s / "bad.json", bad.dump());
    CHECK(run_cli("compare --config " + (s / "bad.json").string() + " --out " +
                  (s / "x").string()) == 4);
}

TEST_CASE("cli: link simulation writes a full report") {
    scratch s("link");
    json cfg = {{"model", json::parse(two_tap_model)},
                {"n", 64},
                {"link",
                 {{"k", 16},
                  {"l", 8},
                  {"n0", 0.0},
                  {"num_blocks", 5},
                  {"seed", 3}}}};
    put_text(s / "cfg.json", cfg.dump());
    fs::path out = s / "out";

    REQUIRE(run_cli("link --config " + (s / "cfg.json").string() + " --out " +
                    out.string()) == 0);
    json rep = json::parse(get_bytes(out / "report.json"));
    CHECK(rep.at("ber").get<double>() == 0.0); // noiseless run is error free
    REQUIRE(rep.at("subchannels").size() == 16);
    for (const auto& sub : rep.at("subchannels")) {
        CHECK(sub.at("sigma").get<double>() >= 0.0);
        CHECK(sub.at("trials").get<int>() == 5);
        CHECK(sub.contains("usable"));
        if (sub.at("usable").get<bool>())
            CHECK(sub.at("bit_errors").get<int>() == 0);
    }
}
