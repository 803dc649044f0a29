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

#ifndef ltv_linksim_H
#define ltv_linksim_H

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "ltv/channel.hpp"
#include "ltv/spectral.hpp"

namespace ltv
{

enum class constellation_kind
{
    qpsk,
    qam16
};

int bits_per_symbol(constellation_kind kind);

// Gray-coded unit-energy constellation point for a symbol index.
cplx map_symbol(constellation_kind kind, int sym);

// Minimum-distance slicer, inverse of map_symbol.
int slice_symbol(constellation_kind kind, cplx soft);

struct link_config
{
    int k = 64;                 // symbols (subchannels) per block
    int l = 8;                  // guard length, samples
    constellation_kind constellation = constellation_kind::qpsk;
    std::vector<double> c;      // power coefficients; empty = all ones
    double n0 = 0.0;            // complex noise variance per sample
    std::uint64_t seed = 1;
    int num_blocks = 1;
};

// Block waveform sum_k c_k s_k v_k followed by l guard zeros.
Eigen::VectorXcd transmit_block(const Eigen::VectorXcd &s,
                                const svd_result &svd,
                                const std::vector<double> &c, int l);

struct block_estimate
{
    Eigen::VectorXcd soft;            // scalar projections 1/(sigma_m c_m) <y, u_m>
    std::vector<std::uint8_t> usable; // sigma_m c_m above threshold
};

// Projections of the received window onto the left singular vectors,
// rescaled per subchannel. Subchannels with sigma_m c_m <= 1e-12 sigma_1
// are marked unusable and their soft value is zero.
block_estimate receive_block(const Eigen::VectorXcd &y, const svd_result &svd,
                             const std::vector<double> &c, int k);

struct subchannel_stats
{
    double sigma = 0.0;
    double coeff = 1.0;
    long trials = 0;
    long symbol_errors = 0;
    long bit_errors = 0;
    double noise_var_est = 0.0; // mean |soft - sent|^2
    double snr_est = 0.0;       // 1 / noise_var_est for unit-energy symbols
    bool usable = true;
};

struct link_report
{
    std::vector<subchannel_stats> sub;
    long total_symbols = 0;
    long total_symbol_errors = 0;
    long total_bits = 0;
    long total_bit_errors = 0;
    double ber = 0.0;
    int unusable_subchannels = 0;
};

// Per-block pipeline: channel matrix at the block's absolute time offset,
// SVD (cached when the channel has no Doppler), random symbols, AWGN of
// variance n0, projection detection. Deterministic for a given seed.
link_report run_link(const channel_model &model, const link_config &cfg,
                     int n);

// Gaussian tail probability and the matching QPSK-over-AWGN reference.
double q_function(double x);
double qpsk_ber(double es_n0);

} // namespace ltv

#endif
