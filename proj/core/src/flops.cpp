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

#include "pairnet/flops.hpp"

#include <fmt/format.h>

#include <cmath>

namespace pairnet::flops {

namespace {

using u64 = std::uint64_t;

u64 pairs(int n)
{
    return static_cast<u64>(n) * static_cast<u64>(n - 1) / 2;
}

void check(const FlopsScenario& s)
{
    if (s.num_users < 2 || s.group_size < 1 || s.group_size > s.num_users || s.num_antennas < 1) {
        throw DomainError(fmt::format("invalid FLOPs scenario K={} k={} M={}", s.num_users, s.group_size,
                                      s.num_antennas));
    }
    if (s.gnn_depth < 0 || s.gnn_width < 1 || s.kmeans_iterations < 1 || !(s.mean_rank > 0.0)) {
        throw DomainError("invalid FLOPs scenario model settings");
    }
}

} // namespace

u64 FlopsLedger::total() const
{
    u64 sum = 0;
    for (const auto& [name, count] : phases) {
        sum += count;
    }
    return sum;
}

u64 FlopsLedger::phase(const std::string& name) const
{
    for (const auto& [n, count] : phases) {
        if (n == name) {
            return count;
        }
    }
    return 0;
}

FlopsScenario from_scenario(const Scenario& scenario)
{
    FlopsScenario s;
    s.num_users = scenario.num_users;
    s.group_size = scenario.group_size;
    s.num_antennas = scenario.num_antennas;
    return s;
}

// |h_i|^2, |h_j|^2 at 4M each, h_i^H h_j at 8M, residual of h_j at 8M + 4M;
// 2x2 inverse, powers, two logs
u64 pair_distance_flops(int num_antennas)
{
    return 28 * static_cast<u64>(num_antennas) + 30;
}

// per block two d x d affine maps and a ReLU per node; head d -> d -> 1;
// min-max normalization 3 per node
u64 gnn_inference_flops(int num_users, int depth, int width)
{
    const u64 k = static_cast<u64>(num_users);
    const u64 d = static_cast<u64>(width);
    const u64 block = k * (4 * d * d + 3 * d);
    const u64 head = k * (2 * d * d + 4 * d + 1);
    return static_cast<u64>(depth) * block + head + 3 * k;
}

// weighted neighbour sum over both directions of every edge, then
// (1 + eps) h + sum and the 1/K scaling
u64 gnn_aggregation_flops(int num_users, u64 num_edges, int depth, int width)
{
    const u64 d = static_cast<u64>(width);
    return static_cast<u64>(depth) * (4 * num_edges * d + 3 * static_cast<u64>(num_users) * d);
}

// Hermitian eigensolver, about 9 M^3 real flops scaled by 4 for complex arithmetic
u64 eigendecomposition_flops(int num_antennas)
{
    const u64 m = static_cast<u64>(num_antennas);
    return 36 * m * m * m;
}

u64 chordal_distance_flops(int num_antennas, double rank_a, double rank_b)
{
    const double rr = rank_a * rank_b;
    return static_cast<u64>(std::llround(8.0 * num_antennas * rr + 4.0 * rr + 3.0));
}

// Gram H H^H, its inverse, W = H^H G^-1, column norms, rates
u64 zero_forcing_flops(int group_size, int num_antennas)
{
    const u64 k = static_cast<u64>(group_size);
    const u64 m = static_cast<u64>(num_antennas);
    return 16 * m * k * k + 8 * k * k * k + 4 * m * k + 3 * k;
}

FlopsLedger count_flops(Method method, const FlopsScenario& s)
{
    check(s);
    FlopsLedger ledger;
    ledger.method = method;
    const u64 K = static_cast<u64>(s.num_users);
    const u64 k = static_cast<u64>(s.group_size);
    const u64 M = static_cast<u64>(s.num_antennas);

    switch (method) {
    case Method::kclique: {
        const u64 edges = s.num_edges.value_or(pairs(s.num_users));
        ledger.phases = {
            {"graph_setup", pairs(s.num_users) * pair_distance_flops(s.num_antennas)},
            // max scan, normalization, mean, threshold
            {"edge_reduction", 4 * pairs(s.num_users)},
            {"aggregation", gnn_aggregation_flops(s.num_users, edges, s.gnn_depth, s.gnn_width)},
            {"inference", gnn_inference_flops(s.num_users, s.gnn_depth, s.gnn_width)},
            {"decoding", static_cast<u64>(std::llround(K * std::log2(static_cast<double>(K)))) + K * k},
        };
        break;
    }
    case Method::kmeans: {
        const u64 distance = chordal_distance_flops(s.num_antennas, s.mean_rank, s.mean_rank);
        // seeding K k, then per iteration K k assignments and ~K^2 / k medoid costs
        const u64 per_iter = K * k + (K * K + k - 1) / k;
        const u64 evaluations = K * k + static_cast<u64>(s.kmeans_iterations) * per_iter;
        ledger.phases = {
            {"eigendecomposition", K * eigendecomposition_flops(s.num_antennas)},
            {"clustering", evaluations * distance},
        };
        break;
    }
    case Method::sus:
        ledger.phases = {
            {"channel_norms", 4 * M * K},
            // per round: residual norms 4M and projection test 28M per candidate
            {"selection", k * K * 32 * M},
        };
        break;
    case Method::exhaustive:
        ledger.phases = {
            {"enumeration", static_cast<u64>(binomial(s.num_users, s.group_size))
                                * zero_forcing_flops(s.group_size, s.num_antennas)},
        };
        break;
    }
    return ledger;
}

} // namespace pairnet::flops
