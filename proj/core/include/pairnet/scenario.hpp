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

#include <chrono>

namespace pairnet {

/// Cell layout and link budget shared by training, pairing and experiments.
struct Scenario {
    int num_users = 40;      // K
    int group_size = 4;      // k
    int num_antennas = 16;   // M
    double cell_radius = 100.0;
    double ring_radius = 10.0;
    double wavelength = 0.1;
    double power_db = 20.0;  // transmit power over unit noise
    double beta_sparsify = 1.0;
    channel::NetworkOptions network;

    double total_power() const { return db_to_linear(power_db); }
    channel::AntennaArray array() const { return channel::AntennaArray::ula(num_antennas, wavelength); }
    void validate() const;
};

channel::ChannelSet draw_network(const Scenario& scenario, Rng& rng);

enum class Method { kclique, kmeans, sus, exhaustive };

std::string to_string(Method method);
Method parse_method(const std::string& name);

/// Outcome of one scheduler run on one channel set.
struct PairingResult {
    UserSubset subset;
    double sum_rate = 0.0;
    Method method = Method::kclique;
    std::uint64_t flops = 0;
    double wall_time = 0.0;
    /// False when fewer than k users could be selected.
    bool complete = true;
    /// False when the chosen group could not be zero-forced.
    bool schedulable = true;
};

/// Wall-clock stopwatch in seconds.
class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

} // namespace pairnet
