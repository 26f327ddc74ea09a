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

#include "pairnet/scenario.hpp"

#include <fmt/format.h>

#include <cmath>

namespace pairnet {

void Scenario::validate() const
{
    if (num_users < 2) {
        throw ConfigError("scenario.K", fmt::format("need at least 2 users, got {}", num_users));
    }
    if (group_size < 2 || group_size > num_users) {
        throw ConfigError("scenario.k", fmt::format("group size must lie in [2, K={}], got {}", num_users, group_size));
    }
    if (num_antennas < group_size) {
        throw ConfigError("scenario.M",
                          fmt::format("{} antennas cannot zero-force {} users", num_antennas, group_size));
    }
    if (!(cell_radius > 0.0) || !std::isfinite(cell_radius)) {
        throw ConfigError("scenario.cell_radius", "must be positive");
    }
    if (!(ring_radius > 0.0) || !std::isfinite(ring_radius)) {
        throw ConfigError("scenario.ring_radius", "must be positive");
    }
    if (ring_radius > 0.1 * cell_radius) {
        throw ConfigError("scenario.ring_radius", "must not exceed the closest user distance (0.1 x cell_radius)");
    }
    if (!(wavelength > 0.0) || !std::isfinite(wavelength)) {
        throw ConfigError("scenario.wavelength", "must be positive");
    }
    if (!std::isfinite(power_db)) {
        throw ConfigError("scenario.power_db", "must be finite");
    }
    if (!(beta_sparsify >= 0.0) || !std::isfinite(beta_sparsify)) {
        throw ConfigError("scenario.beta_sparsify", "must be non-negative");
    }
    if (network.quadrature_points < 2) {
        throw ConfigError("scenario.quadrature_points", "need at least 2 points");
    }
}

channel::ChannelSet draw_network(const Scenario& scenario, Rng& rng)
{
    return channel::generate_network(scenario.num_users,
                                     scenario.cell_radius,
                                     scenario.ring_radius,
                                     scenario.array(),
                                     scenario.total_power(),
                                     rng,
                                     scenario.network);
}

std::string to_string(Method method)
{
    switch (method) {
    case Method::kclique:
        return "kclique";
    case Method::kmeans:
        return "kmeans";
    case Method::sus:
        return "sus";
    case Method::exhaustive:
        return "exhaustive";
    }
    return "unknown";
}

Method parse_method(const std::string& name)
{
    for (Method m : {Method::kclique, Method::kmeans, Method::sus, Method::exhaustive}) {
        if (to_string(m) == name) {
            return m;
        }
    }
    throw DomainError(fmt::format("unknown method '{}' (expected kclique, kmeans, sus or exhaustive)", name));
}

} // namespace pairnet
