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

#include "pairnet/flops.hpp"
#include "pairnet/gnn.hpp"
#include "pairnet/scenario.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

// Experiment harness behind `pairnet bench`.
//
// Configuration is flat INI-style text. Keys may be written as `section.key = value`
// or under a `[section]` header; lines starting with `#` or `;` are comments. Lists are comma
// separated. Recognized keys (defaults in parentheses):
//
//   scenario.K (40)  scenario.k (4)  scenario.M (16)  scenario.cell_radius (100)
//   scenario.ring_radius (10)  scenario.wavelength (0.1)  scenario.power_db (20)
//   scenario.beta_sparsify (1)  scenario.quadrature_points (256)
//   run.seed (1)  run.trials (100)  run.methods (kclique,kmeans,sus)
//   run.output_dir (out)  run.plots (true)
//   sweep.power_db (0,5,...,30)  sweep.K (10,20,...,100)
//   train.model (unset: train)  train.K (scenario.K; 10 for scaling)
//   train.k (scenario.k; 4 for scaling)  train.learning_rate (0.003)
//   train.epochs (200)  train.instances_per_epoch (16)  train.seed (1)
//   train.depth (8)  train.width (16)  train.restarts (4)
//   train.validation_instances (32)
//   baselines.kmeans_iterations (50)  baselines.sus_alpha (0.3)
//   runtime.repetitions (5)  runtime.warmup (1)  runtime.instances (10)
//   runtime.min_batch_seconds (0.0005)
namespace pairnet::bench {

struct ExperimentConfig {
    Scenario scenario;
    std::uint64_t seed = 1;
    int trials = 100;
    std::vector<Method> methods{Method::kclique, Method::kmeans, Method::sus};
    std::filesystem::path output_dir = "out";
    bool plots = true;

    std::vector<double> power_db_sweep{0, 5, 10, 15, 20, 25, 30};
    std::vector<int> users_sweep{10, 20, 30, 40, 50, 60, 70, 80, 90, 100};

    gnn::TrainConfig train;
    std::optional<std::filesystem::path> model_path;
    std::optional<int> train_users;
    std::optional<int> train_group;

    int kmeans_iterations = 50;
    double sus_alpha = 0.3;

    int runtime_repetitions = 5;
    int runtime_warmup = 1;
    int runtime_instances = 10;
    double min_batch_seconds = 5e-4;

    void validate() const;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Applies one `section.key` assignment; throws ConfigError naming the key.
void set_option(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// One CSV table with a fixed header.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void write(std::ostream& out) const;
    void save(const std::filesystem::path& path) const;
};

/// Shortest round-trip decimal form, so equal doubles print identically.
std::string format_number(double value);

struct Summary {
    double mean = 0.0;
    double stddev = 0.0;
    int count = 0;
};

/// Sample mean and (n - 1) standard deviation.
Summary summarize(const std::vector<double>& values);

/// Channel set for trial `trial` of an experiment seeded with `seed`. Users
/// draw from per-user sub-streams, so for a fixed (seed, trial) the drop with
/// K users is a prefix of the drop with K + 1 users.
channel::ChannelSet trial_network(const Scenario& scenario, std::uint64_t seed, int trial);

/// Runs one scheduler; `params` is required for kclique.
PairingResult run_method(Method method,
                         const channel::ChannelSet& channels,
                         const ExperimentConfig& cfg,
                         int k,
                         const gnn::GnnParams* params);

/// Loads train.model, or trains on the training scenario and saves
/// `model.pnnw` in the output directory.
gnn::GnnParams obtain_params(const ExperimentConfig& cfg, const Scenario& training);

struct ExperimentResult {
    Table table;
    /// Trials dropped because a scheduler raised.
    int skipped = 0;
    std::vector<std::filesystem::path> files;
};

ExperimentResult run_sumrate_vs_snr(const ExperimentConfig& cfg);
ExperimentResult run_sumrate_vs_K(const ExperimentConfig& cfg);
ExperimentResult run_flops(const ExperimentConfig& cfg);
ExperimentResult run_runtime(const ExperimentConfig& cfg);
ExperimentResult run_scaling(const ExperimentConfig& cfg);

/// Names accepted by run_experiment.
const std::vector<std::string>& experiment_names();
ExperimentResult run_experiment(const std::string& name, const ExperimentConfig& cfg);

struct TimingOptions {
    int repetitions = 5;
    int warmup = 1;
    double min_batch_seconds = 5e-4;
};

/// Median seconds per call over `repetitions` timed batches. Each batch
/// repeats `fn` enough times to last at least min_batch_seconds.
double median_runtime(const std::function<void()>& fn, const TimingOptions& options);

/// CPU label, core count, compiler and build profile as a flat JSON object.
std::string environment_fingerprint();

} // namespace pairnet::bench
