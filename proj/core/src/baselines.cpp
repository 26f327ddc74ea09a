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

#include "pairnet/baselines.hpp"

#include "pairnet/flops.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace pairnet::baselines {

double chordal_distance(const channel::EigenBasis& a, const channel::EigenBasis& b)
{
    if (a.vectors.rows() != b.vectors.rows()) {
        throw DomainError("chordal distance between bases of different dimension");
    }
    // tr(P_a) + tr(P_b) - 2 tr(P_a P_b)
    const double overlap = (a.vectors.adjoint() * b.vectors).squaredNorm();
    return std::max(0.0, a.rank() + b.rank() - 2.0 * overlap);
}

namespace {

// Lazily filled symmetric distance table.
class DistanceCache {
public:
    DistanceCache(const std::vector<channel::EigenBasis>& bases, int num_antennas)
        : bases_(bases),
          num_antennas_(num_antennas),
          n_(static_cast<int>(bases.size())),
          table_(static_cast<std::size_t>(n_ * n_), std::numeric_limits<double>::quiet_NaN())
    {
    }

    double operator()(int i, int j)
    {
        if (i == j) {
            return 0.0;
        }
        double& slot = table_[static_cast<std::size_t>(i * n_ + j)];
        if (std::isnan(slot)) {
            const auto& a = bases_[static_cast<std::size_t>(i)];
            const auto& b = bases_[static_cast<std::size_t>(j)];
            slot = chordal_distance(a, b);
            table_[static_cast<std::size_t>(j * n_ + i)] = slot;
            flops_ += flops::chordal_distance_flops(num_antennas_, a.rank(), b.rank());
        }
        return slot;
    }

    std::uint64_t flops() const { return flops_; }

private:
    const std::vector<channel::EigenBasis>& bases_;
    int num_antennas_;
    int n_;
    std::vector<double> table_;
    std::uint64_t flops_ = 0;
};

void finish(PairingResult& result, const channel::ChannelSet& channels)
{
    if (result.subset.empty()) {
        result.sum_rate = 0.0;
        result.schedulable = false;
        return;
    }
    const precoding::Capacity c = precoding::zfbf_capacity(channels, result.subset);
    result.sum_rate = c.sum_rate;
    result.schedulable = c.schedulable;
}

} // namespace

KmeansOutcome kmeans_cluster(const channel::ChannelSet& channels, int k, int max_iters, std::uint64_t seed)
{
    const Stopwatch clock;
    const int n = channels.num_users();
    if (k < 1 || k > n) {
        throw DomainError(fmt::format("k-means needs 1 <= k <= K, got k={} K={}", k, n));
    }
    if (max_iters < 1) {
        throw DomainError("k-means needs at least one iteration");
    }
    if (static_cast<int>(channels.users.size()) != n) {
        throw DomainError("channel set is missing per-user correlation matrices");
    }

    std::vector<channel::EigenBasis> bases;
    bases.reserve(static_cast<std::size_t>(n));
    for (const auto& user : channels.users) {
        bases.push_back(channel::kl_decompose(user.correlation));
    }
    DistanceCache dist(bases, channels.num_antennas());
    Rng rng(seed);

    // k-means++ seeding; chordal distance is already a squared norm
    std::vector<int> medoids;
    medoids.push_back(std::uniform_int_distribution<int>(0, n - 1)(rng));
    std::vector<double> nearest(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
    while (static_cast<int>(medoids.size()) < k) {
        const int last = medoids.back();
        double total = 0.0;
        for (int v = 0; v < n; ++v) {
            nearest[static_cast<std::size_t>(v)] = std::min(nearest[static_cast<std::size_t>(v)], dist(v, last));
            total += nearest[static_cast<std::size_t>(v)];
        }
        int pick = -1;
        if (total > 0.0) {
            double target = std::uniform_real_distribution<double>(0.0, total)(rng);
            for (int v = 0; v < n; ++v) {
                target -= nearest[static_cast<std::size_t>(v)];
                if (nearest[static_cast<std::size_t>(v)] > 0.0 && target <= 0.0) {
                    pick = v;
                    break;
                }
            }
        }
        if (pick < 0) {
            // identical subspaces everywhere or round-off at the tail
            for (int v = n - 1; v >= 0 && pick < 0; --v) {
                if (std::find(medoids.begin(), medoids.end(), v) == medoids.end()
                    && (total <= 0.0 || nearest[static_cast<std::size_t>(v)] > 0.0)) {
                    pick = v;
                }
            }
        }
        medoids.push_back(pick);
    }

    KmeansOutcome out;
    out.assignment.assign(static_cast<std::size_t>(n), -1);
    for (int iter = 0; iter < max_iters; ++iter) {
        out.iterations = iter + 1;

        for (int v = 0; v < n; ++v) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                const double d = dist(v, medoids[static_cast<std::size_t>(c)]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            out.assignment[static_cast<std::size_t>(v)] = best;
        }
        for (int c = 0; c < k; ++c) {
            out.assignment[static_cast<std::size_t>(medoids[static_cast<std::size_t>(c)])] = c;
        }

        // re-seed empty clusters at the point farthest from every center
        for (int c = 0; c < k; ++c) {
            if (std::find(out.assignment.begin(), out.assignment.end(), c) != out.assignment.end()) {
                continue;
            }
            int far = -1;
            double far_d = -1.0;
            for (int v = 0; v < n; ++v) {
                if (std::find(medoids.begin(), medoids.end(), v) != medoids.end()) {
                    continue;
                }
                double d_min = std::numeric_limits<double>::infinity();
                for (int m : medoids) {
                    d_min = std::min(d_min, dist(v, m));
                }
                if (d_min > far_d) {
                    far_d = d_min;
                    far = v;
                }
            }
            if (far >= 0) {
                medoids[static_cast<std::size_t>(c)] = far;
                out.assignment[static_cast<std::size_t>(far)] = c;
            }
        }

        std::vector<int> updated = medoids;
        for (int c = 0; c < k; ++c) {
            double best_cost = std::numeric_limits<double>::infinity();
            for (int v = 0; v < n; ++v) {
                if (out.assignment[static_cast<std::size_t>(v)] != c) {
                    continue;
                }
                double cost = 0.0;
                for (int u = 0; u < n; ++u) {
                    if (out.assignment[static_cast<std::size_t>(u)] == c) {
                        cost += dist(v, u);
                    }
                }
                if (cost < best_cost) {
                    best_cost = cost;
                    updated[static_cast<std::size_t>(c)] = v;
                }
            }
        }
        if (updated == medoids) {
            break;
        }
        medoids = std::move(updated);
    }

    out.result.method = Method::kmeans;
    out.result.subset = medoids;
    out.result.complete = static_cast<int>(medoids.size()) == k;
    finish(out.result, channels);
    out.result.wall_time = clock.seconds();
    out.result.flops = dist.flops()
                     + static_cast<std::uint64_t>(n) * flops::eigendecomposition_flops(channels.num_antennas());
    return out;
}

PairingResult kmeans_pair(const channel::ChannelSet& channels, int k, int max_iters, std::uint64_t seed)
{
    return kmeans_cluster(channels, k, max_iters, seed).result;
}

PairingResult sus_pair(const channel::ChannelSet& channels, int k, double alpha)
{
    const Stopwatch clock;
    const int n = channels.num_users();
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw DomainError(fmt::format("SUS alpha must lie in (0, 1), got {}", alpha));
    }
    if (k < 1 || k > n) {
        throw DomainError(fmt::format("SUS needs 1 <= k <= K, got k={} K={}", k, n));
    }
    const int m = channels.num_antennas();
    const CMatrix& h = channels.realizations;

    std::vector<int> candidates(static_cast<std::size_t>(n));
    std::iota(candidates.begin(), candidates.end(), 0);
    std::vector<CVector> basis; // orthogonal components g_j of the chosen users
    std::vector<double> channel_norm(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) {
        channel_norm[static_cast<std::size_t>(v)] = h.col(v).norm();
    }
    // orthogonal component of every user w.r.t. span of the chosen g_j
    CMatrix residual = h;

    PairingResult result;
    result.method = Method::sus;
    std::uint64_t ops = static_cast<std::uint64_t>(4) * m * n;

    while (static_cast<int>(result.subset.size()) < k && !candidates.empty()) {
        int best = -1;
        double best_norm = -1.0;
        for (int v : candidates) {
            const double r = residual.col(v).norm();
            if (r > best_norm) {
                best_norm = r;
                best = v;
            }
        }
        ops += static_cast<std::uint64_t>(4) * m * candidates.size();
        if (!(best_norm > 0.0)) {
            break;
        }
        result.subset.push_back(best);
        const CVector g = residual.col(best);
        const double g_norm2 = g.squaredNorm();
        basis.push_back(g);

        std::vector<int> next;
        for (int v : candidates) {
            if (v == best) {
                continue;
            }
            // |h_v g^H| = |g^H h_v| for column vectors
            const cd inner = g.dot(h.col(v));
            const double correlation = std::abs(inner) / (channel_norm[static_cast<std::size_t>(v)] * std::sqrt(g_norm2));
            if (correlation < alpha) {
                residual.col(v) -= (g.dot(residual.col(v)) / g_norm2) * g;
                next.push_back(v);
            }
        }
        ops += static_cast<std::uint64_t>(28) * m * candidates.size();
        candidates = std::move(next);
    }

    result.complete = static_cast<int>(result.subset.size()) == k;
    finish(result, channels);
    result.wall_time = clock.seconds();
    result.flops = ops;
    return result;
}

PairingResult exhaustive_pair(const channel::ChannelSet& channels, int k, precoding::PowerMode mode)
{
    const Stopwatch clock;
    const int n = channels.num_users();
    if (k < 1 || k > n) {
        throw DomainError(fmt::format("exhaustive search needs 1 <= k <= K, got k={} K={}", k, n));
    }
    const double count = binomial(n, k);
    if (count > exhaustive_limit) {
        throw DomainError(fmt::format("exhaustive search over C({}, {}) = {:.0f} subsets exceeds the limit of {:.0f}",
                                      n, k, count, exhaustive_limit));
    }

    PairingResult result;
    result.method = Method::exhaustive;
    result.sum_rate = -1.0;

    UserSubset current(static_cast<std::size_t>(k));
    std::iota(current.begin(), current.end(), 0);
    while (true) {
        const precoding::Capacity c = precoding::zfbf_capacity(channels, current, mode);
        if (c.sum_rate > result.sum_rate) {
            result.sum_rate = c.sum_rate;
            result.subset = current;
            result.schedulable = c.schedulable;
        }
        // next combination in lexicographic order
        int pos = k - 1;
        while (pos >= 0 && current[static_cast<std::size_t>(pos)] == n - k + pos) {
            --pos;
        }
        if (pos < 0) {
            break;
        }
        ++current[static_cast<std::size_t>(pos)];
        for (int q = pos + 1; q < k; ++q) {
            current[static_cast<std::size_t>(q)] = current[static_cast<std::size_t>(q - 1)] + 1;
        }
    }
    result.wall_time = clock.seconds();
    result.flops = static_cast<std::uint64_t>(count) * flops::zero_forcing_flops(k, channels.num_antennas());
    return result;
}

} // namespace pairnet::baselines
