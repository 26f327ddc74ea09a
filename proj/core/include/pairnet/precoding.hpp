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

#include <optional>

namespace pairnet::precoding {

/// Relative singular-value floor below which a group cannot be zero-forced.
inline constexpr double rank_tolerance = 1e-10;

/// Column i is w_i for user subset[i].
struct BeamformingMatrix {
    CMatrix weights;
    UserSubset subset;
};

/// Per-user linear powers P_i under a total budget P.
struct PowerAllocation {
    RVector per_user;
    double budget = 0.0;
};

enum class PowerMode {
    equal,     ///< |w_i|^2 P_i = P / k for every scheduled user
    waterfill, ///< maximize sum log2(1 + P_i) under sum |w_i|^2 P_i <= P
};

/// Zero-forcing precoder W = H^H (H H^H)^-1 for the k x M matrix of channel rows.
///
/// Throws SingularityError (carrying `subset`) when the smallest singular value
/// is below rank_tolerance times the largest, or when k > M.
BeamformingMatrix zfbf_weights(const CMatrix& channel_rows, const UserSubset& subset = {});

/// Water-filling over users whose unit of P_i costs norms_squared[i] of the budget.
PowerAllocation waterfill(double budget, const RVector& norms_squared);

/// Equal consumed power: P_i = budget / (k * norms_squared[i]).
PowerAllocation equal_power(double budget, const RVector& norms_squared);

/// Sum over users of log2(1 + SINR_i) with unit noise power.
double sum_rate(const CMatrix& channel_rows, const CMatrix& weights, const PowerAllocation& alloc);

/// Squared column norms |w_i|^2.
RVector column_norms_squared(const CMatrix& weights);

struct Capacity {
    double sum_rate = 0.0;
    /// False when the group could not be zero-forced; sum_rate is then 0.
    bool schedulable = true;
    std::string diagnostic;
};

/// ZFBF sum rate of `subset` with the channel set's power budget, or `budget` when given.
Capacity zfbf_capacity(const channel::ChannelSet& channels,
                       const UserSubset& subset,
                       PowerMode mode = PowerMode::equal,
                       std::optional<double> budget = std::nullopt);

/// Validates subset indices (distinct, in range, non-empty, at most M).
void check_subset(const channel::ChannelSet& channels, const UserSubset& subset);

} // namespace pairnet::precoding
