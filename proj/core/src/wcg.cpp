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

#include "pairnet/wcg.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace pairnet::wcg {

PairPowerScale pair_power_scale(int k)
{
    if (k < 2) {
        throw DomainError(fmt::format("pair power scale needs k >= 2, got {}", k));
    }
    return PairPowerScale{(k - 1) / binomial(k, 2), k};
}

bool Wcg::has_edge(int i, int j) const
{
    if (i < 0 || j < 0 || i >= num_nodes_ || j >= num_nodes_) {
        return false;
    }
    return adjacency_[static_cast<std::size_t>(i * num_nodes_ + j)] != 0;
}

std::vector<Edge> Wcg::edges() const
{
    std::vector<Edge> out;
    out.reserve(static_cast<std::size_t>(num_edges_));
    for (int i = 0; i < num_nodes_; ++i) {
        for (int j : neighbors(i)) {
            if (j > i) {
                out.push_back({i, j});
            }
        }
    }
    return out;
}

RMatrix Wcg::weighted_adjacency() const
{
    RMatrix a = RMatrix::Zero(num_nodes_, num_nodes_);
    for (int i = 0; i < num_nodes_; ++i) {
        for (int j : neighbors(i)) {
            a(i, j) = norm_(i, j);
        }
    }
    return a;
}

void Wcg::set_edges(const std::vector<Edge>& edges)
{
    adjacency_.assign(static_cast<std::size_t>(num_nodes_ * num_nodes_), 0);
    neighbors_.assign(static_cast<std::size_t>(num_nodes_), {});
    num_edges_ = 0;
    for (const Edge& e : edges) {
        if (e.i == e.j) {
            throw DomainError(fmt::format("self-loop at node {}", e.i));
        }
        if (e.i < 0 || e.j < 0 || e.i >= num_nodes_ || e.j >= num_nodes_) {
            throw DomainError(fmt::format("edge ({}, {}) out of range", e.i, e.j));
        }
        char& slot = adjacency_[static_cast<std::size_t>(e.i * num_nodes_ + e.j)];
        if (slot != 0) {
            continue;
        }
        slot = 1;
        adjacency_[static_cast<std::size_t>(e.j * num_nodes_ + e.i)] = 1;
        neighbors_[static_cast<std::size_t>(e.i)].push_back(e.j);
        neighbors_[static_cast<std::size_t>(e.j)].push_back(e.i);
        ++num_edges_;
    }
    for (auto& n : neighbors_) {
        std::sort(n.begin(), n.end());
    }
}

void Wcg::normalize()
{
    max_raw_ = 0.0;
    double sum = 0.0;
    for (int i = 0; i < num_nodes_; ++i) {
        for (int j = i + 1; j < num_nodes_; ++j) {
            max_raw_ = std::max(max_raw_, raw_(i, j));
        }
    }
    norm_ = max_raw_ > 0.0 ? RMatrix(raw_ / max_raw_) : RMatrix(RMatrix::Zero(num_nodes_, num_nodes_));
    for (int i = 0; i < num_nodes_; ++i) {
        for (int j = i + 1; j < num_nodes_; ++j) {
            sum += norm_(i, j);
        }
    }
    const double pairs = binomial(num_nodes_, 2);
    mean_weight_ = pairs > 0 ? sum / pairs : 0.0;
}

Wcg Wcg::from_raw_weights(const RMatrix& raw, int k_target, int feature_dim)
{
    if (raw.rows() != raw.cols() || raw.rows() < 1) {
        throw DomainError("raw weight matrix must be square and non-empty");
    }
    if (k_target < 1 || feature_dim < 1) {
        throw DomainError("k_target and feature_dim must be positive");
    }
    const int n = static_cast<int>(raw.rows());
    Wcg g;
    g.num_nodes_ = n;
    g.k_target_ = k_target;
    g.raw_ = RMatrix::Zero(n, n);
    std::vector<Edge> all;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double w = raw(i, j);
            if (!(w >= 0.0) || !std::isfinite(w) || w != raw(j, i)) {
                throw DomainError(fmt::format("raw weight ({}, {}) must be finite, non-negative and symmetric", i, j));
            }
            g.raw_(i, j) = w;
            g.raw_(j, i) = w;
            all.push_back({i, j});
        }
    }
    g.normalize();
    g.set_edges(all);
    g.features_ = RMatrix::Ones(n, feature_dim);
    return g;
}

Wcg Wcg::with_edges(const std::vector<Edge>& edges) const
{
    Wcg g = *this;
    g.set_edges(edges);
    return g;
}

Wcg Wcg::permuted(const std::vector<int>& perm) const
{
    if (static_cast<int>(perm.size()) != num_nodes_) {
        throw DomainError("permutation size mismatch");
    }
    std::vector<int> inverse(perm.size(), -1);
    for (std::size_t v = 0; v < perm.size(); ++v) {
        if (perm[v] < 0 || perm[v] >= num_nodes_ || inverse[static_cast<std::size_t>(perm[v])] != -1) {
            throw DomainError("not a permutation");
        }
        inverse[static_cast<std::size_t>(perm[v])] = static_cast<int>(v);
    }

    Wcg g = *this;
    for (int a = 0; a < num_nodes_; ++a) {
        for (int b = 0; b < num_nodes_; ++b) {
            g.raw_(a, b) = raw_(perm[static_cast<std::size_t>(a)], perm[static_cast<std::size_t>(b)]);
            g.norm_(a, b) = norm_(perm[static_cast<std::size_t>(a)], perm[static_cast<std::size_t>(b)]);
        }
    }
    std::vector<Edge> relabeled;
    for (const Edge& e : edges()) {
        relabeled.push_back({inverse[static_cast<std::size_t>(e.i)], inverse[static_cast<std::size_t>(e.j)]});
    }
    g.set_edges(relabeled);
    g.unschedulable_.clear();
    for (const Edge& e : unschedulable_) {
        g.unschedulable_.push_back({inverse[static_cast<std::size_t>(e.i)], inverse[static_cast<std::size_t>(e.j)]});
    }
    return g;
}

precoding::Capacity sum_rate_distance(const channel::ChannelSet& channels,
                                      int i,
                                      int j,
                                      int k,
                                      precoding::PowerMode mode)
{
    if (i == j) {
        throw DomainError(fmt::format("sum-rate distance needs distinct users, got {} twice", i));
    }
    if (i < 0 || j < 0 || i >= channels.num_users() || j >= channels.num_users()) {
        throw DomainError(fmt::format("users ({}, {}) out of range", i, j));
    }
    const double budget = channels.total_power * pair_power_scale(k).delta;
    if (i > j) {
        std::swap(i, j);
    }

    // 2x2 Gram matrix of the rows h_i^T, h_j^T
    const auto hi = channels.realizations.col(i);
    const auto hj = channels.realizations.col(j);
    const double a = hi.squaredNorm();
    const double c = hj.squaredNorm();
    const cd b = hj.dot(hi); // sum_m h_i[m] conj(h_j[m])
    // det = a |r|^2 with r the part of h_j orthogonal to h_i; avoids a c - |b|^2 cancelling
    const double det = a > 0.0 ? a * (hj - (std::conj(b) / a) * hi).squaredNorm() : 0.0;
    const double half_trace = 0.5 * (a + c);
    const double lambda_max = half_trace + std::sqrt(0.25 * (a - c) * (a - c) + std::norm(b));
    const double lambda_min = lambda_max > 0.0 ? det / lambda_max : 0.0;
    const double tol = precoding::rank_tolerance * precoding::rank_tolerance;
    if (!(lambda_max > 0.0) || !(lambda_min > tol * lambda_max)) {
        return {0.0, false, fmt::format("users {} and {} cannot be zero-forced together", i, j)};
    }

    // diagonal of (H H^H)^-1
    RVector norms(2);
    norms << c / det, a / det;
    const precoding::PowerAllocation alloc = mode == precoding::PowerMode::equal
                                                 ? precoding::equal_power(budget, norms)
                                                 : precoding::waterfill(budget, norms);
    const double rate = std::log2(1.0 + alloc.per_user(0)) + std::log2(1.0 + alloc.per_user(1));
    return {rate, true, {}};
}

Wcg build_wcg(const channel::ChannelSet& channels, int k, int feature_dim, precoding::PowerMode mode)
{
    const int n = channels.num_users();
    if (n < 2) {
        throw DomainError(fmt::format("graph needs at least 2 users, got {}", n));
    }
    if (k < 2) {
        throw DomainError(fmt::format("group size k must be >= 2, got {}", k));
    }
    if (feature_dim < 1) {
        throw DomainError("feature dimension must be positive");
    }

    Wcg g;
    g.num_nodes_ = n;
    g.k_target_ = k;
    g.raw_ = RMatrix::Zero(n, n);
    std::vector<Edge> all;
    all.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const precoding::Capacity d = sum_rate_distance(channels, i, j, k, mode);
            g.raw_(i, j) = d.sum_rate;
            g.raw_(j, i) = d.sum_rate;
            if (!d.schedulable) {
                g.unschedulable_.push_back({i, j});
            }
            all.push_back({i, j});
        }
    }
    g.normalize();
    g.set_edges(all);
    g.features_ = RMatrix::Ones(n, feature_dim);
    return g;
}

Wcg sparsify(const Wcg& g, double beta_sparsify)
{
    const double mean = g.mean_weight();
    if (!(beta_sparsify >= 0.0) || (mean > 0.0 && !(beta_sparsify * mean < 1.0))) {
        throw DomainError(fmt::format("beta_sparsify {} outside [0, 1/mean_weight) with mean_weight {}",
                                      beta_sparsify, mean));
    }
    const double threshold = beta_sparsify * mean;
    std::vector<Edge> kept;
    for (const Edge& e : g.edges()) {
        if (g.norm_weight(e.i, e.j) > threshold) {
            kept.push_back(e);
        }
    }
    Wcg out = g;
    out.beta_sparsify_ = beta_sparsify;
    out.set_edges(kept);
    return out;
}

double subset_weight(const Wcg& g, const UserSubset& subset)
{
    double total = 0.0;
    for (std::size_t a = 0; a < subset.size(); ++a) {
        for (std::size_t b = a + 1; b < subset.size(); ++b) {
            total += g.raw_weight(subset[a], subset[b]);
        }
    }
    return total;
}

double clique_capacity(const Wcg& g, const UserSubset& subset)
{
    const int k = g.k_target();
    if (static_cast<int>(subset.size()) != k) {
        throw DomainError(fmt::format("clique capacity expects {} users, got {}", k, subset.size()));
    }
    if (k < 2) {
        throw DomainError("clique capacity needs k >= 2");
    }
    for (std::size_t a = 0; a < subset.size(); ++a) {
        for (std::size_t b = a + 1; b < subset.size(); ++b) {
            if (!g.has_edge(subset[a], subset[b])) {
                throw DomainError(fmt::format("subset {} is not a clique: edge ({}, {}) missing",
                                              format_subset(subset), subset[a], subset[b]));
            }
        }
    }
    return subset_weight(g, subset) / (k - 1);
}

void write_edge_list(std::ostream& out, const Wcg& g)
{
    fmt::print(out, "{} {} {:.17g}\n", g.num_nodes(), g.k_target(), g.beta_sparsify());
    for (const Edge& e : g.edges()) {
        fmt::print(out, "{} {} {:.17g} {:.17g}\n", e.i, e.j, g.raw_weight(e.i, e.j), g.norm_weight(e.i, e.j));
    }
}

} // namespace pairnet::wcg
