/*
 * Copyright 2026 The pairnet Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "pairnet/scenario.hpp"
#include "pairnet/wcg.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>

// Unsupervised clique-selection network: a stack of GIN convolution blocks,
// a two-layer scoring head, graph-wide min-max normalization, the
// probabilistic penalty loss, and greedy sequential decoding.
namespace pairnet::gnn {

/// y = weight * x + bias.
struct Affine {
    RMatrix weight;
    RVector bias;
};

/// One convolution block: weighted GIN aggregation, size normalization, MLP.
struct FcbParams {
    double eps = 0.0;
    Affine first;  // d -> d, followed by ReLU
    Affine second; // d -> d
};

struct GnnParams {
    std::vector<FcbParams> blocks;
    Affine head_hidden; // d -> d, followed by ReLU
    Affine head_out;    // d -> 1

    int depth() const { return static_cast<int>(blocks.size()); }
    int width() const { return static_cast<int>(head_hidden.weight.cols()); }

    /// All tensors zero.
    static GnnParams zeros(int depth, int width);
    /// Every entry uniform on (-1/sqrt(width), 1/sqrt(width)); eps included.
    static GnnParams random(int depth, int width, Rng& rng);

    std::size_t parameter_count() const;
    /// Flat view in the persisted order: per block eps, first.weight
    /// (row major), first.bias, second.weight, second.bias; then head_hidden
    /// weight/bias and head_out weight/bias.
    RVector flatten() const;
    void assign(const RVector& flat);

    bool all_finite() const;
};

inline constexpr int default_depth = 8;
inline constexpr int default_width = 16;

/// Per-node selection probabilities in [0, 1].
struct NodeProbabilities {
    RVector p;
};

/// gamma and beta of the penalty loss (beta_loss is unrelated to beta_sparsify).
struct LossCoefficients {
    double gamma = 0.0;
    double beta_loss = 0.0;

    /// gamma = beta_loss = K (K - 1) / 2, an upper bound on any clique's normalized weight.
    static LossCoefficients for_graph(int num_nodes);
};

/// One block on features h_in (K x d) with an explicit aggregation matrix.
/// `aggregation` is the weighted adjacency used for neighbor sums; passing a
/// masked matrix restricts which neighbors contribute.
RMatrix fcb_forward(const RMatrix& aggregation, const RMatrix& h_in, const FcbParams& block);

/// One block using the graph's normalized weights on E.
RMatrix fcb_forward(const wcg::Wcg& g, const RMatrix& h_in, const FcbParams& block);

/// Raw head scores s_v before normalization.
RVector scores(const wcg::Wcg& g, const GnnParams& params);

/// Full network: p_v = (s_v - min s) / (max s - min s), or 0.5 everywhere
/// when the scores are constant.
NodeProbabilities forward(const wcg::Wcg& g, const GnnParams& params);

/// gamma - (beta+1) sum_{(i,j) in E} w_ij p_i p_j + beta sum_{i<j} p_i p_j.
double erdos_loss(const NodeProbabilities& p, const wcg::Wcg& g, const LossCoefficients& c);

struct LossGradient {
    double loss = 0.0;
    NodeProbabilities probabilities;
    GnnParams gradient;
};

/// Reverse-mode gradient of erdos_loss(forward(g, params)) for every parameter.
LossGradient loss_gradient(const wcg::Wcg& g, const GnnParams& params, const LossCoefficients& c);

/// Training instance n of epoch e.
using InstanceSource = std::function<wcg::Wcg(int epoch, int index)>;

struct TrainConfig {
    double learning_rate = 3e-3;
    int epochs = 200;
    int instances_per_epoch = 16;
    std::uint64_t seed = 1;
    int depth = default_depth;
    int width = default_width;
    /// When unset each instance uses LossCoefficients::for_graph.
    std::optional<LossCoefficients> coefficients;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    /// Independent initializations trained on the same instance stream; the
    /// one with the lowest held-out loss is kept.
    int restarts = 4;
    /// Held-out graphs, drawn as epoch index `epochs` of the stream.
    int validation_instances = 32;
};

struct TrainResult {
    GnnParams params;
    /// Mean loss over each epoch's instances, each taken before its own update.
    std::vector<double> loss_trace;
    /// Index of the kept initialization.
    int restart = 0;
    /// Held-out mean loss per initialization; empty for a single explicit start.
    std::vector<double> validation_loss;
};

/// Adam on the per-instance loss, one update per instance. Initialization r
/// is drawn from derive_seed(seed, r).
TrainResult train(const InstanceSource& instances, const TrainConfig& config);

/// Start from `initial` instead of a seeded random draw.
TrainResult train(const InstanceSource& instances, const TrainConfig& config, GnnParams initial);

/// Fresh sparsified graphs drawn from the scenario, one sub-stream per instance.
InstanceSource scenario_instances(const Scenario& scenario, std::uint64_t seed, int feature_dim);

/// Greedy pass over nodes by descending probability (ties: lower index
/// first), adding each node adjacent to every node already chosen.
UserSubset decode_max_clique(const NodeProbabilities& p, const wcg::Wcg& g);

struct DecodeResult {
    UserSubset nodes;
    /// False when fewer than k nodes could be added.
    bool complete = true;
};

/// Same pass, stopping once k nodes are chosen.
DecodeResult decode_k_clique(const NodeProbabilities& p, const wcg::Wcg& g, int k);

/// Graph construction, sparsification, inference, k-limited decoding and
/// equal-power ZFBF evaluation of the chosen group.
PairingResult pair_users(const channel::ChannelSet& channels,
                         int k,
                         double beta_sparsify,
                         const GnnParams& params);

// Model file (little endian): "PNNW" u8 version=1 u32 depth u32 width, then
// flatten() as f64.
void write_params(std::ostream& out, const GnnParams& params);
GnnParams read_params(std::istream& in);
void save_params(const std::filesystem::path& path, const GnnParams& params);
/// Throws IoError when the stored depth/width differ from the expected ones (if given).
GnnParams load_params(const std::filesystem::path& path,
                      std::optional<int> expected_depth = std::nullopt,
                      std::optional<int> expected_width = std::nullopt);

} // namespace pairnet::gnn
