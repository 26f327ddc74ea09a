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

#include <optional>
#include <string>
#include <utility>

// Closed-form floating-point operation counts per scheduler phase.
//
// Conventions: a real multiply-add is 2 flops; a complex multiply-add is 8;
// |z|^2 of a complex number is 3 (+1 to accumulate); log2/sqrt/compare count
// as 1. Counts are analytic, not measured.
namespace pairnet::flops {

struct FlopsLedger {
    Method method = Method::kclique;
    std::vector<std::pair<std::string, std::uint64_t>> phases;

    std::uint64_t total() const;
    /// 0 when the phase is absent.
    std::uint64_t phase(const std::string& name) const;
};

struct FlopsScenario {
    int num_users = 40;
    int group_size = 4;
    int num_antennas = 16;
    int gnn_depth = 8;
    int gnn_width = 16;
    /// Edges surviving sparsification; C(K, 2) when unset.
    std::optional<std::uint64_t> num_edges;
    /// Average eigenbasis rank entering chordal distances.
    double mean_rank = 2.0;
    int kmeans_iterations = 10;
};

FlopsScenario from_scenario(const Scenario& scenario);

/// kclique phases: graph_setup O(K^2 M), edge_reduction O(K^2),
/// aggregation O(|E| F), inference O(K F^2), decoding O(K log K).
/// kmeans: eigendecomposition O(K M^3), clustering distances.
/// sus: selection O(k K M). exhaustive: C(K, k) zero-forcing solves.
FlopsLedger count_flops(Method method, const FlopsScenario& scenario);

/// Individual terms, shared with the schedulers' own accounting.
std::uint64_t pair_distance_flops(int num_antennas);
std::uint64_t gnn_inference_flops(int num_users, int depth, int width);
std::uint64_t gnn_aggregation_flops(int num_users, std::uint64_t num_edges, int depth, int width);
std::uint64_t eigendecomposition_flops(int num_antennas);
std::uint64_t chordal_distance_flops(int num_antennas, double rank_a, double rank_b);
std::uint64_t zero_forcing_flops(int group_size, int num_antennas);

} // namespace pairnet::flops
