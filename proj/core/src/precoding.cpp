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

#include "pairnet/precoding.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace pairnet::precoding {

BeamformingMatrix zfbf_weights(const CMatrix& channel_rows, const UserSubset& subset)
{
    const Eigen::Index k = channel_rows.rows();
    const Eigen::Index m = channel_rows.cols();
    if (k == 0) {
        throw DomainError("zero-forcing needs at least one user");
    }
    if (k > m) {
        throw SingularityError(subset, fmt::format("cannot zero-force {} users with {} antennas {}",
                                                   k, m, format_subset(subset)));
    }

    Eigen::JacobiSVD<CMatrix> svd(channel_rows, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RVector& sigma = svd.singularValues();
    const double largest = sigma(0);
    const double smallest = sigma(sigma.size() - 1);
    if (!(largest > 0.0) || !(smallest > rank_tolerance * largest)) {
        throw SingularityError(subset, fmt::format("rank-deficient channel rows for users {} "
                                                   "(singular values {:.3e} / {:.3e})",
                                                   format_subset(subset), smallest, largest));
    }

    // pseudo-inverse of a full-row-rank matrix equals H^H (H H^H)^-1
    BeamformingMatrix out;
    out.subset = subset;
    out.weights = svd.matrixV() * sigma.cwiseInverse().cast<cd>().asDiagonal() * svd.matrixU().adjoint();
    return out;
}

RVector column_norms_squared(const CMatrix& weights)
{
    return weights.colwise().squaredNorm().transpose();
}

PowerAllocation equal_power(double budget, const RVector& norms_squared)
{
    if (!(budget >= 0.0)) {
        throw DomainError("power budget must be non-negative");
    }
    PowerAllocation out;
    out.budget = budget;
    const auto k = static_cast<double>(norms_squared.size());
    out.per_user = (budget / k) * norms_squared.cwiseInverse();
    return out;
}

PowerAllocation waterfill(double budget, const RVector& norms_squared)
{
    if (!(budget > 0.0)) {
        throw DomainError(fmt::format("water-filling budget must be positive, got {}", budget));
    }
    const Eigen::Index k = norms_squared.size();
    if (k == 0 || !(norms_squared.minCoeff() > 0.0)) {
        throw DomainError("water-filling needs positive per-user costs");
    }

    // In consumed-power units user i receives max(0, level - a_i); the level
    // solves sum_i max(0, level - a_i) = budget.
    auto consumed = [&](double level) {
        return (level - norms_squared.array()).max(0.0).sum();
    };

    double lo = norms_squared.minCoeff();
    double hi = budget + lo;
    for (int iter = 0; iter < 200 && hi - lo > 1e-15 * hi; ++iter) {
        const double mid = 0.5 * (lo + hi);
        (consumed(mid) < budget ? lo : hi) = mid;
    }

    // the active set is now known; solve for the level in closed form
    double level = 0.5 * (lo + hi);
    for (int pass = 0; pass < 4; ++pass) {
        double active_sum = 0.0;
        int active = 0;
        for (Eigen::Index i = 0; i < k; ++i) {
            if (norms_squared(i) < level) {
                active_sum += norms_squared(i);
                ++active;
            }
        }
        if (active == 0) {
            break;
        }
        level = (budget + active_sum) / active;
    }

    PowerAllocation out;
    out.budget = budget;
    out.per_user.resize(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        out.per_user(i) = std::max(0.0, level / norms_squared(i) - 1.0);
    }
    return out;
}

double sum_rate(const CMatrix& channel_rows, const CMatrix& weights, const PowerAllocation& alloc)
{
    const Eigen::Index k = channel_rows.rows();
    if (weights.cols() != k || alloc.per_user.size() != k || weights.rows() != channel_rows.cols()) {
        throw DomainError("sum_rate dimension mismatch");
    }
    // gains(i, j) = |h_i w_j|^2
    const RMatrix gains = (channel_rows * weights).cwiseAbs2();
    double total = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
        double interference = 1.0;
        for (Eigen::Index j = 0; j < k; ++j) {
            if (j != i) {
                interference += alloc.per_user(j) * gains(i, j);
            }
        }
        total += std::log2(1.0 + alloc.per_user(i) * gains(i, i) / interference);
    }
    return total;
}

void check_subset(const channel::ChannelSet& channels, const UserSubset& subset)
{
    if (subset.empty()) {
        throw DomainError("user subset is empty");
    }
    UserSubset sorted = subset;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw DomainError("user subset " + format_subset(subset) + " has duplicates");
    }
    if (sorted.front() < 0 || sorted.back() >= channels.num_users()) {
        throw DomainError("user subset " + format_subset(subset) + " out of range");
    }
    if (static_cast<int>(subset.size()) > channels.num_antennas()) {
        throw DomainError(fmt::format("cannot schedule {} users on {} antennas",
                                      subset.size(), channels.num_antennas()));
    }
}

Capacity zfbf_capacity(const channel::ChannelSet& channels,
                       const UserSubset& subset,
                       PowerMode mode,
                       std::optional<double> budget)
{
    check_subset(channels, subset);
    const double power = budget.value_or(channels.total_power);
    const CMatrix rows = channels.rows(subset);

    BeamformingMatrix bf;
    try {
        bf = zfbf_weights(rows, subset);
    } catch (const SingularityError& e) {
        return Capacity{0.0, false, e.what()};
    }

    const RVector norms = column_norms_squared(bf.weights);
    const PowerAllocation alloc =
        mode == PowerMode::equal ? equal_power(power, norms) : waterfill(power, norms);

    return Capacity{sum_rate(rows, bf.weights, alloc), true, {}};
}

} // namespace pairnet::precoding
