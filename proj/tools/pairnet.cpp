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

// pairnet: train, pair, bench and oracle subcommands.
//
// Exit codes: 0 success, 1 unexpected failure, 2 usage or domain error,
// 3 configuration error, 4 numerical failure, 5 I/O error.

#include "pairnet/baselines.hpp"
#include "pairnet/bench.hpp"
#include "pairnet/gnn.hpp"
#include "pairnet/wcg.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>

namespace {

using namespace pairnet;

struct CommonOptions {
    std::string config;
    std::vector<std::string> overrides;
    std::string output_dir;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonOptions& opts)
{
    cmd->add_option("-c,--config", opts.config, "configuration file (flat key = value)")->check(CLI::ExistingFile);
    cmd->add_option("-s,--set", opts.overrides, "override a key, e.g. --set scenario.K=20");
    cmd->add_option("-o,--output-dir", opts.output_dir, "directory for CSV, plots and models");
    cmd->add_option("--seed", opts.seed, "run seed");
}

bench::ExperimentConfig make_config(const CommonOptions& opts)
{
    bench::ExperimentConfig cfg = opts.config.empty() ? bench::ExperimentConfig{} : bench::load_config(opts.config);
    for (const auto& item : opts.overrides) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(item, "override must look like key=value");
        }
        bench::set_option(cfg, item.substr(0, eq), item.substr(eq + 1));
    }
    if (!opts.output_dir.empty()) {
        cfg.output_dir = opts.output_dir;
    }
    if (opts.seed) {
        cfg.seed = *opts.seed;
    }
    return cfg;
}

void print_result(const PairingResult& r)
{
    fmt::print("method: {}\n", to_string(r.method));
    fmt::print("subset: {}\n", format_subset(r.subset));
    fmt::print("sum_rate: {}\n", r.sum_rate);
    fmt::print("complete: {}\n", r.complete);
    fmt::print("schedulable: {}\n", r.schedulable);
    fmt::print("flops: {}\n", r.flops);
    fmt::print("wall_time: {:.6e}\n", r.wall_time);
}

int run_train(const CommonOptions& opts, const std::string& model_out)
{
    bench::ExperimentConfig cfg = make_config(opts);
    cfg.validate();
    Scenario training = cfg.scenario;
    training.num_users = cfg.train_users.value_or(training.num_users);
    training.group_size = cfg.train_group.value_or(training.group_size);
    training.validate();

    const gnn::TrainResult result =
        gnn::train(gnn::scenario_instances(training, cfg.train.seed, cfg.train.width), cfg.train);
    const std::filesystem::path out = model_out.empty() ? cfg.output_dir / "model.pnnw" : std::filesystem::path(model_out);
    if (out.has_parent_path()) {
        std::filesystem::create_directories(out.parent_path());
    }
    gnn::save_params(out, result.params);
    if (!result.loss_trace.empty()) {
        fmt::print("loss: {} -> {}\n", result.loss_trace.front(), result.loss_trace.back());
    }
    fmt::print("restart: {}\n", result.restart);
    fmt::print("model: {}\n", out.string());
    return 0;
}

struct PairOptions {
    std::optional<int> k;
    std::string method = "kclique";
    std::string model;
    std::string channels_in;
    std::string channels_out;
    std::string wcg_out;
};

int run_pair(const CommonOptions& opts, const PairOptions& po)
{
    bench::ExperimentConfig cfg = make_config(opts);
    if (po.k) {
        cfg.scenario.group_size = *po.k;
    }
    if (!po.model.empty()) {
        cfg.model_path = po.model;
    }
    cfg.validate();
    const Method method = parse_method(po.method);

    const channel::ChannelSet channels = po.channels_in.empty()
                                             ? bench::trial_network(cfg.scenario, cfg.seed, 0)
                                             : channel::load_channel_set(po.channels_in);
    if (!po.channels_out.empty()) {
        channel::save_channel_set(po.channels_out, channels);
    }
    const int k = cfg.scenario.group_size;
    if (!po.wcg_out.empty()) {
        std::ofstream out(po.wcg_out);
        if (!out) {
            throw IoError("cannot open " + po.wcg_out + " for writing");
        }
        wcg::write_edge_list(out, wcg::sparsify(wcg::build_wcg(channels, k, cfg.train.width), cfg.scenario.beta_sparsify));
    }

    std::optional<gnn::GnnParams> params;
    if (method == Method::kclique) {
        Scenario training = cfg.scenario;
        training.num_users = cfg.train_users.value_or(channels.num_users());
        training.group_size = cfg.train_group.value_or(k);
        params = bench::obtain_params(cfg, training);
    }
    print_result(bench::run_method(method, channels, cfg, k, params ? &*params : nullptr));
    return 0;
}

int run_bench(const CommonOptions& opts, const std::string& experiment)
{
    const bench::ExperimentConfig cfg = make_config(opts);
    const bench::ExperimentResult result = bench::run_experiment(experiment, cfg);
    for (const auto& f : result.files) {
        fmt::print("wrote {}\n", f.string());
    }
    if (result.skipped > 0) {
        fmt::print("skipped: {}\n", result.skipped);
    }
    return 0;
}

int run_oracle(const CommonOptions& opts, std::optional<int> users, std::optional<int> k)
{
    bench::ExperimentConfig cfg = make_config(opts);
    cfg.scenario.num_users = users.value_or(cfg.scenario.num_users);
    cfg.scenario.group_size = k.value_or(cfg.scenario.group_size);
    cfg.validate();
    const channel::ChannelSet channels = bench::trial_network(cfg.scenario, cfg.seed, 0);
    const PairingResult r = baselines::exhaustive_pair(channels, cfg.scenario.group_size);
    fmt::print("subset: {}\n", format_subset(r.subset));
    fmt::print("sum_rate: {}\n", r.sum_rate);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"MU-MIMO user pairing with graph neural networks"};
    app.require_subcommand(1);

    CommonOptions train_opts;
    std::string model_out;
    auto* train = app.add_subcommand("train", "train the pairing network and save a PNNW model");
    add_common(train, train_opts);
    train->add_option("-m,--model", model_out, "output model path (default <output-dir>/model.pnnw)");

    CommonOptions pair_opts;
    PairOptions po;
    auto* pair = app.add_subcommand("pair", "select k users on one channel drop");
    add_common(pair, pair_opts);
    pair->add_option("-k,--k", po.k, "users to schedule");
    pair->add_option("--method", po.method, "kclique, kmeans, sus or exhaustive")
        ->check(CLI::IsMember({"kclique", "kmeans", "sus", "exhaustive"}));
    pair->add_option("-m,--model", po.model, "PNNW model (trained on the fly when omitted)");
    pair->add_option("--channels", po.channels_in, "read the drop from a PNCH file")->check(CLI::ExistingFile);
    pair->add_option("--save-channels", po.channels_out, "write the drop to a PNCH file");
    pair->add_option("--dump-wcg", po.wcg_out, "write the sparsified graph as an edge list");

    CommonOptions bench_opts;
    std::string experiment;
    auto* bench_cmd = app.add_subcommand("bench", "run an experiment and write CSV and SVG output");
    add_common(bench_cmd, bench_opts);
    bench_cmd->add_option("experiment", experiment, "sumrate-snr, sumrate-k, flops, runtime or scaling")
        ->required()
        ->check(CLI::IsMember(bench::experiment_names()));

    CommonOptions oracle_opts;
    std::optional<int> oracle_users;
    std::optional<int> oracle_k;
    auto* oracle = app.add_subcommand("oracle", "exhaustive optimum for one seeded drop");
    add_common(oracle, oracle_opts);
    oracle->add_option("-K,--K", oracle_users, "users in the cell (default scenario.K)");
    oracle->add_option("-k,--k", oracle_k, "users to schedule (default scenario.k)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*train) {
            return run_train(train_opts, model_out);
        }
        if (*pair) {
            return run_pair(pair_opts, po);
        }
        if (*bench_cmd) {
            return run_bench(bench_opts, experiment);
        }
        if (*oracle) {
            return run_oracle(oracle_opts, oracle_users, oracle_k);
        }
    } catch (const Error& e) {
        fmt::print(stderr, "pairnet: error: {}\n", e.what());
        return static_cast<int>(e.category());
    } catch (const std::filesystem::filesystem_error& e) {
        fmt::print(stderr, "pairnet: error: {}\n", e.what());
        return static_cast<int>(ErrorCategory::io);
    } catch (const std::exception& e) {
        fmt::print(stderr, "pairnet: unexpected failure: {}\n", e.what());
        return 1;
    }
    return 1;
}
