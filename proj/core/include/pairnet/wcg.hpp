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

#include "pairnet/channel.hpp"
#include "pairnet/precoding.hpp"

#include <iosfwd>
#include <utility>

// Wireless communication graph: users are nodes, edge weights are the
// pairwise ZFBF sum rate under a scaled share of the power budget.
namespace pairnet::wcg {

inline constexpr int default_feature_dim = 16;

/// Per-pair share of the budget: each of the C(k,2) pairs of a k-group gets
/// P * delta, and every user appears in k - 1 pairs.
struct PairPowerScale {
    double delta = 1.0;
    int k = 2;
};

PairPowerScale pair_power_scale(int k);

struct Edge {
    int i;
    int j;
};

class Wcg {
public:
    Wcg() = default;

    int num_nodes() const { return num_nodes_; }
    int k_target() const { return k_target_; }
    double beta_sparsify() const { return beta_sparsify_; }

    /// d_S(i, j) in bps/Hz; kept for every pair even after sparsification.
    double raw_weight(int i, int j) const { return raw_(i, j); }
    /// raw / max raw over the complete graph.
    double norm_weight(int i, int j) const { return norm_(i, j); }
    double max_raw_weight() const { return max_raw_; }
    /// Mean normalized weight over all C(K, 2) pairs of the complete graph.
    double mean_weight() const { return mean_weight_; }

    bool has_edge(int i, int j) const;
    const std::vector<int>& neighbors(int v) const { return neighbors_[static_cast<std::size_t>(v)]; }
    int num_edges() const { return num_edges_; }
    /// Edge set E as (i < j) pairs in lexicographic order.
    std::vector<Edge> edges() const;

    /// Normalized weights on E, zero elsewhere; symmetric K x K.
    RMatrix weighted_adjacency() const;

    const RMatrix& raw_weights() const { return raw_; }
    const RMatrix& node_features() const { return features_; }
    const std::vector<Edge>& unschedulable_pairs() const { return unschedulable_; }

    /// Graph over arbitrary symmetric non-negative raw weights (complete, unsparsified).
    static Wcg from_raw_weights(const RMatrix& raw, int k_target, int feature_dim = default_feature_dim);

    /// Same weights, edge set restricted to `edges`.
    Wcg with_edges(const std::vector<Edge>& edges) const;

    /// Relabel nodes: node v of the result is node perm[v] of this graph.
    Wcg permuted(const std::vector<int>& perm) const;

private:
    friend Wcg sparsify(const Wcg& g, double beta_sparsify);
    friend Wcg build_wcg(const channel::ChannelSet&, int, int, precoding::PowerMode);

    void set_edges(const std::vector<Edge>& edges);
    void normalize();

    int num_nodes_ = 0;
    int k_target_ = 2;
    double beta_sparsify_ = 0.0;
    RMatrix raw_;
    RMatrix norm_;
    double max_raw_ = 0.0;
    double mean_weight_ = 0.0;
    std::vector<char> adjacency_;
    std::vector<std::vector<int>> neighbors_;
    int num_edges_ = 0;
    RMatrix features_;
    std::vector<Edge> unschedulable_;
};

/// Sum-rate distance of users i and j: pairwise ZFBF sum rate with budget
/// P * delta(k). The default split gives each user |w|^2 P = P * delta / 2.
/// A pair that cannot be zero-forced yields 0 with schedulable = false.
precoding::Capacity sum_rate_distance(const channel::ChannelSet& channels,
                                      int i,
                                      int j,
                                      int k,
                                      precoding::PowerMode mode = precoding::PowerMode::equal);

/// Complete graph with all C(K, 2) weights, normalized, all-ones features.
Wcg build_wcg(const channel::ChannelSet& channels,
              int k,
              int feature_dim = default_feature_dim,
              precoding::PowerMode mode = precoding::PowerMode::equal);

/// Keeps edges with norm_weight > beta_sparsify * mean_weight.
/// Requires 0 <= beta_sparsify < 1 / mean_weight.
Wcg sparsify(const Wcg& g, double beta_sparsify);

/// (1 / (k - 1)) * sum over pairs i < j of raw weights. The subset must be a
/// clique of size k_target in E.
double clique_capacity(const Wcg& g, const UserSubset& subset);

/// Total raw weight over pairs of the subset, ignoring E.
double subset_weight(const Wcg& g, const UserSubset& subset);

/// Edge list: header "K k beta", then "i j raw_weight norm_weight" per edge of E.
void write_edge_list(std::ostream& out, const Wcg& g);

} // namespace pairnet::wcg
