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

#include "pairnet/precoding.hpp"
#include "pairnet/scenario.hpp"

// Reference schedulers the learned pairing is compared against.
namespace pairnet::baselines {

/// ||U_a U_a^H - U_b U_b^H||_F^2 for orthonormal bases.
double chordal_distance(const channel::EigenBasis& a, const channel::EigenBasis& b);

inline constexpr int default_kmeans_iterations = 50;
inline constexpr double default_sus_alpha = 0.3;
inline constexpr double exhaustive_limit = 1e6;

struct KmeansOutcome {
    PairingResult result;
    /// Cluster index per user.
    std::vector<int> assignment;
    int iterations = 0;
};

/// k-medoids over the users' eigenbases under chordal distance with
/// k-means++ seeding; the medoid of each cluster is scheduled.
KmeansOutcome kmeans_cluster(const channel::ChannelSet& channels,
                             int k,
                             int max_iters = default_kmeans_iterations,
                             std::uint64_t seed = 1);

PairingResult kmeans_pair(const channel::ChannelSet& channels,
                          int k,
                          int max_iters = default_kmeans_iterations,
                          std::uint64_t seed = 1);

/// Semi-orthogonal user selection: greedy on the norm of each candidate's
/// component orthogonal to the users already chosen; a candidate stays
/// eligible while |h_i g_j^H| / (|h_i| |g_j|) < alpha for every chosen g_j.
PairingResult sus_pair(const channel::ChannelSet& channels, int k, double alpha = default_sus_alpha);

/// Best k-subset by ZFBF sum rate; lexicographically smallest wins ties.
/// Refuses when C(K, k) exceeds exhaustive_limit.
PairingResult exhaustive_pair(const channel::ChannelSet& channels,
                              int k,
                              precoding::PowerMode mode = precoding::PowerMode::equal);

} // namespace pairnet::baselines
