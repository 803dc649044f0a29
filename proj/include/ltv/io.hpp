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

#ifndef ltv_io_H
#define ltv_io_H

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "ltv/channel.hpp"
#include "ltv/discretize.hpp"
#include "ltv/linksim.hpp"
#include "ltv/spectral.hpp"
#include "ltv/tfgrid.hpp"
#include "ltv/wkb.hpp"

namespace ltv
{

// Binary container ("LTVM"): little-endian header
//   char[4] magic, u32 version, u32 kind, u32 rows, u32 cols, f64 ts, f64 aux[4]
// followed by a row-major payload. kind 0 = complex matrix (re/im f64 pairs),
// kind 1 = singular system (sigmas, then U, then V), kind 2 = real grid
// (aux = t0, dt, f0, df).

void write_matrix(const std::string &path, const channel_matrix &h);
channel_matrix read_matrix(const std::string &path);

void write_svd(const std::string &path, const svd_result &s, double ts = 1.0);
svd_result read_svd(const std::string &path, double *ts = nullptr);

void write_grid(const std::string &path, const tf_grid &g);
tf_grid read_grid(const std::string &path);

// JSON schemas. Parsers reject unknown "type" tags and missing required fields
// with a config_error naming the offending field. Closed-form profile hooks on
// line-spread models do not survive a round trip; the tabulated nodes do.

nlohmann::json model_to_json(const channel_model &m);
channel_model model_from_json(const nlohmann::json &j);

nlohmann::json experiment_to_json(const experiment_config &c);
experiment_config experiment_from_json(const nlohmann::json &j);

nlohmann::json link_to_json(const link_config &c);
link_config link_from_json(const nlohmann::json &j);

nlohmann::json bubble_to_json(const bubble &b);
nlohmann::json eigenfunction_to_json(const eigenfunction_model &m);
nlohmann::json link_report_to_json(const link_report &r);

nlohmann::json load_json(const std::string &path);
void save_json(const std::string &path, const nlohmann::json &j);

// CSV writers; all floating-point fields are printed with %.17g so files are
// bit-reproducible across runs.

void write_sigmas_csv(const std::string &path, const Eigen::VectorXd &sigmas);
void write_levels_csv(const std::string &path, const std::vector<level_entry> &levels);
void write_branches_csv(const std::string &path, const eigenfunction_model &m, int n);
void write_grid_csv(const std::string &path, const tf_grid &g);

// FNV-1a 64-bit content hash, used by the run manifest
std::uint64_t fnv1a64_file(const std::string &path);

// manifest.json written next to every tool output: tool name/version, the
// subcommand, the exact configuration used, and a content hash per output file.
// No timestamps, so reruns produce identical bytes.
void write_manifest(const std::string &dir, const std::string &command,
                    const nlohmann::json &config, const std::vector<std::string> &outputs);

} // namespace ltv

#endif
