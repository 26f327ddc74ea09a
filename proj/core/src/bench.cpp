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

#include "pairnet/bench.hpp"

#include "pairnet/baselines.hpp"
#include "pairnet/plot.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <thread>

#ifndef PAIRNET_BUILD_TYPE
#define PAIRNET_BUILD_TYPE "unknown"
#endif

namespace pairnet::bench {

namespace {

void ensure_dir(const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError(fmt::format("cannot create {}: {}", dir.string(), ec.message()));
    }
}

Scenario with_users(Scenario s, int users)
{
    s.num_users = users;
    return s;
}

Scenario training_scenario(const ExperimentConfig& cfg, int default_users, int default_group)
{
    Scenario s = cfg.scenario;
    s.num_users = cfg.train_users.value_or(default_users);
    s.group_size = cfg.train_group.value_or(default_group);
    s.validate();
    return s;
}

bool uses(const ExperimentConfig& cfg, Method m)
{
    return std::find(cfg.methods.begin(), cfg.methods.end(), m) != cfg.methods.end();
}

std::optional<gnn::GnnParams> params_if_needed(const ExperimentConfig& cfg, const Scenario& training)
{
    if (!uses(cfg, Method::kclique)) {
        return std::nullopt;
    }
    return obtain_params(cfg, training);
}

// Collects per-(point, method) samples, in trial order.
class Samples {
public:
    void add(double point, Method m, double value) { data_[{point, static_cast<int>(m)}].push_back(value); }
    const std::vector<double>& at(double point, Method m) { return data_[{point, static_cast<int>(m)}]; }

private:
    std::map<std::pair<double, int>, std::vector<double>> data_;
};

int run_trials(const ExperimentConfig& cfg,
               const std::vector<Method>& methods,
               const channel::ChannelSet& channels,
               int k,
               const gnn::GnnParams* params,
               double point,
               Samples& samples,
               const std::string& label)
{
    int skipped = 0;
    for (Method m : methods) {
        try {
            samples.add(point, m, run_method(m, channels, cfg, k, params).sum_rate);
        } catch (const Error& e) {
            fmt::print(stderr, "pairnet: {} {}: trial skipped: {}\n", label, to_string(m), e.what());
            ++skipped;
        }
    }
    return skipped;
}

void save_chart(const ExperimentConfig& cfg, ExperimentResult& result, const std::string& stem, plot::LineChart chart)
{
    if (!cfg.plots) {
        return;
    }
    const auto path = cfg.output_dir / (stem + ".svg");
    plot::save_svg(path, chart);
    result.files.push_back(path);
}

void save_table(const ExperimentConfig& cfg, ExperimentResult& result, const std::string& stem)
{
    const auto path = cfg.output_dir / (stem + ".csv");
    result.table.save(path);
    result.files.push_back(path);
}

std::string json_escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out.push_back('\\');
        }
        if (static_cast<unsigned char>(c) >= 0x20) {
            out.push_back(c);
        }
    }
    return out;
}

} // namespace

void Table::write(std::ostream& out) const
{
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            out << (i ? "," : "") << cells[i];
        }
        out << '\n';
    };
    line(header);
    for (const auto& row : rows) {
        line(row);
    }
}

void Table::save(const std::filesystem::path& path) const
{
    if (path.has_parent_path()) {
        ensure_dir(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    write(out);
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

std::string format_number(double value)
{
    return fmt::format("{}", value);
}

Summary summarize(const std::vector<double>& values)
{
    Summary s;
    s.count = static_cast<int>(values.size());
    if (values.empty()) {
        s.mean = std::numeric_limits<double>::quiet_NaN();
        s.stddev = std::numeric_limits<double>::quiet_NaN();
        return s;
    }
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    s.mean = sum / s.count;
    if (s.count > 1) {
        double sq = 0.0;
        for (double v : values) {
            sq += (v - s.mean) * (v - s.mean);
        }
        s.stddev = std::sqrt(sq / (s.count - 1));
    }
    return s;
}

channel::ChannelSet trial_network(const Scenario& scenario, std::uint64_t seed, int trial)
{
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(trial)));
    return draw_network(scenario, rng);
}

PairingResult run_method(Method method,
                         const channel::ChannelSet& channels,
                         const ExperimentConfig& cfg,
                         int k,
                         const gnn::GnnParams* params)
{
    switch (method) {
    case Method::kclique:
        if (params == nullptr) {
            throw DomainError("kclique needs model parameters");
        }
        return gnn::pair_users(channels, k, cfg.scenario.beta_sparsify, *params);
    case Method::kmeans:
        return baselines::kmeans_pair(channels, k, cfg.kmeans_iterations, cfg.seed);
    case Method::sus:
        return baselines::sus_pair(channels, k, cfg.sus_alpha);
    case Method::exhaustive:
        return baselines::exhaustive_pair(channels, k);
    }
    throw DomainError("unknown method");
}

gnn::GnnParams obtain_params(const ExperimentConfig& cfg, const Scenario& training)
{
    if (cfg.model_path) {
        return gnn::load_params(*cfg.model_path, cfg.train.depth, cfg.train.width);
    }
    fmt::print(stderr, "pairnet: training on K={} k={} for {} epochs\n", training.num_users, training.group_size,
               cfg.train.epochs);
    const gnn::TrainResult trained =
        gnn::train(gnn::scenario_instances(training, cfg.train.seed, cfg.train.width), cfg.train);
    ensure_dir(cfg.output_dir);
    gnn::save_params(cfg.output_dir / "model.pnnw", trained.params);

    Table loss{{"epoch", "loss"}, {}};
    for (std::size_t e = 0; e < trained.loss_trace.size(); ++e) {
        loss.rows.push_back({std::to_string(e), format_number(trained.loss_trace[e])});
    }
    loss.save(cfg.output_dir / "train_loss.csv");
    return trained.params;
}

ExperimentResult run_sumrate_vs_snr(const ExperimentConfig& cfg)
{
    cfg.validate();
    const Scenario& s = cfg.scenario;
    const auto params = params_if_needed(cfg, training_scenario(cfg, s.num_users, s.group_size));

    ExperimentResult result;
    Samples samples;
    for (int t = 0; t < cfg.trials; ++t) {
        // one drop per trial, rescaled to every power level
        const channel::ChannelSet base = trial_network(s, cfg.seed, t);
        for (double db : cfg.power_db_sweep) {
            const channel::ChannelSet channels = base.with_power(db_to_linear(db));
            result.skipped += run_trials(cfg, cfg.methods, channels, s.group_size, params ? &*params : nullptr, db,
                                         samples, fmt::format("snr {} dB trial {}", db, t));
        }
    }

    result.table.header = {"snr_db", "method", "mean", "std"};
    plot::LineChart chart{"Sum rate vs SNR", "SNR (dB)", "sum rate (bps/Hz)", {}, false};
    for (Method m : cfg.methods) {
        plot::Series series{to_string(m), {}};
        for (double db : cfg.power_db_sweep) {
            const Summary sm = summarize(samples.at(db, m));
            result.table.rows.push_back({format_number(db), to_string(m), format_number(sm.mean), format_number(sm.stddev)});
            series.points.emplace_back(db, sm.mean);
        }
        chart.series.push_back(std::move(series));
    }
    save_table(cfg, result, "sumrate_snr");
    save_chart(cfg, result, "sumrate_snr", std::move(chart));
    return result;
}

ExperimentResult run_sumrate_vs_K(const ExperimentConfig& cfg)
{
    cfg.validate();
    const Scenario& s = cfg.scenario;
    const auto params = params_if_needed(cfg, training_scenario(cfg, s.num_users, s.group_size));

    ExperimentResult result;
    Samples samples;
    for (int users : cfg.users_sweep) {
        const Scenario point = with_users(s, users);
        point.validate();
        const std::uint64_t seed = cfg.seed;
        for (int t = 0; t < cfg.trials; ++t) {
            const channel::ChannelSet channels = trial_network(point, seed, t);
            result.skipped += run_trials(cfg, cfg.methods, channels, s.group_size, params ? &*params : nullptr, users,
                                         samples, fmt::format("K={} trial {}", users, t));
        }
    }

    result.table.header = {"K", "method", "mean", "std"};
    plot::LineChart chart{"Sum rate vs K", "K", "sum rate (bps/Hz)", {}, false};
    for (Method m : cfg.methods) {
        plot::Series series{to_string(m), {}};
        for (int users : cfg.users_sweep) {
            const Summary sm = summarize(samples.at(users, m));
            result.table.rows.push_back(
                {std::to_string(users), to_string(m), format_number(sm.mean), format_number(sm.stddev)});
            series.points.emplace_back(users, sm.mean);
        }
        chart.series.push_back(std::move(series));
    }
    save_table(cfg, result, "sumrate_k");
    save_chart(cfg, result, "sumrate_k", std::move(chart));
    return result;
}

ExperimentResult run_flops(const ExperimentConfig& cfg)
{
    cfg.validate();
    ExperimentResult result;
    result.table.header = {"K", "method", "phase", "flops"};
    plot::LineChart chart{"FLOPs vs K", "K", "FLOPs", {}, true};
    for (Method m : cfg.methods) {
        plot::Series series{to_string(m), {}};
        for (int users : cfg.users_sweep) {
            flops::FlopsScenario fs = flops::from_scenario(with_users(cfg.scenario, users));
            fs.gnn_depth = cfg.train.depth;
            fs.gnn_width = cfg.train.width;
            const flops::FlopsLedger ledger = flops::count_flops(m, fs);
            for (const auto& [phase, count] : ledger.phases) {
                result.table.rows.push_back({std::to_string(users), to_string(m), phase, std::to_string(count)});
            }
            result.table.rows.push_back({std::to_string(users), to_string(m), "total", std::to_string(ledger.total())});
            series.points.emplace_back(users, static_cast<double>(ledger.total()));
        }
        chart.series.push_back(std::move(series));
    }
    save_table(cfg, result, "flops");
    save_chart(cfg, result, "flops", std::move(chart));
    return result;
}

double median_runtime(const std::function<void()>& fn, const TimingOptions& options)
{
    if (options.repetitions < 1 || options.warmup < 0 || !(options.min_batch_seconds > 0.0)) {
        throw DomainError("invalid timing options");
    }
    for (int i = 0; i < options.warmup; ++i) {
        fn();
    }
    // grow the batch until one batch is well above the timer resolution
    long batch = 1;
    while (true) {
        const Stopwatch clock;
        for (long i = 0; i < batch; ++i) {
            fn();
        }
        if (clock.seconds() >= options.min_batch_seconds || batch >= (1L << 30)) {
            break;
        }
        batch *= 2;
    }
    std::vector<double> samples;
    for (int r = 0; r < options.repetitions; ++r) {
        const Stopwatch clock;
        for (long i = 0; i < batch; ++i) {
            fn();
        }
        samples.push_back(clock.seconds() / static_cast<double>(batch));
    }
    std::sort(samples.begin(), samples.end());
    const std::size_t n = samples.size();
    return n % 2 ? samples[n / 2] : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
}

std::string environment_fingerprint()
{
    std::string cpu = "unknown";
    std::ifstream info("/proc/cpuinfo");
    for (std::string line; std::getline(info, line);) {
        if (line.rfind("model name", 0) == 0) {
            const auto colon = line.find(':');
            if (colon != std::string::npos) {
                cpu = line.substr(line.find_first_not_of(" \t", colon + 1));
            }
            break;
        }
    }
#ifdef NDEBUG
    const bool assertions = false;
#else
    const bool assertions = true;
#endif
    return fmt::format("{{\n  \"cpu\": \"{}\",\n  \"hardware_threads\": {},\n  \"compiler\": \"{}\",\n"
                       "  \"build_type\": \"{}\",\n  \"assertions\": {},\n  \"timing\": \"sequential\"\n}}\n",
                       json_escape(cpu), std::thread::hardware_concurrency(), json_escape(__VERSION__),
                       json_escape(PAIRNET_BUILD_TYPE), assertions ? "true" : "false");
}

ExperimentResult run_runtime(const ExperimentConfig& cfg)
{
    cfg.validate();
    const Scenario& s = cfg.scenario;
    const auto params = params_if_needed(cfg, training_scenario(cfg, s.num_users, s.group_size));
    const TimingOptions timing{cfg.runtime_repetitions, cfg.runtime_warmup, cfg.min_batch_seconds};

    ExperimentResult result;
    result.table.header = {"K", "method", "median_wall_time"};
    std::map<int, std::vector<std::pair<int, double>>> curves;
    for (int users : cfg.users_sweep) {
        const Scenario point = with_users(s, users);
        point.validate();
        const std::uint64_t seed = cfg.seed;
        std::vector<channel::ChannelSet> instances;
        for (int t = 0; t < cfg.runtime_instances; ++t) {
            instances.push_back(trial_network(point, seed, t));
        }
        for (Method m : cfg.methods) {
            if (m == Method::exhaustive && binomial(users, s.group_size) > baselines::exhaustive_limit) {
                fmt::print(stderr, "pairnet: runtime K={}: exhaustive search skipped (too many subsets)\n", users);
                ++result.skipped;
                continue;
            }
            std::size_t next = 0;
            double sink = 0.0;
            const double median = median_runtime(
                [&] {
                    sink += run_method(m, instances[next], cfg, s.group_size, params ? &*params : nullptr).sum_rate;
                    next = (next + 1) % instances.size();
                },
                timing);
            result.table.rows.push_back({std::to_string(users), to_string(m), fmt::format("{:.6e}", median)});
            curves[static_cast<int>(m)].emplace_back(users, median);
        }
    }
    save_table(cfg, result, "runtime");

    const auto sidecar = cfg.output_dir / "runtime_env.json";
    std::ofstream env(sidecar);
    env << environment_fingerprint();
    if (!env) {
        throw IoError("failed writing " + sidecar.string());
    }
    result.files.push_back(sidecar);

    plot::LineChart chart{"Runtime vs K", "K", "median wall time (s)", {}, true};
    for (Method m : cfg.methods) {
        plot::Series series{to_string(m), {}};
        for (const auto& [users, t] : curves[static_cast<int>(m)]) {
            series.points.emplace_back(users, t);
        }
        chart.series.push_back(std::move(series));
    }
    save_chart(cfg, result, "runtime", std::move(chart));
    return result;
}

ExperimentResult run_scaling(const ExperimentConfig& cfg)
{
    cfg.validate();
    const Scenario training = training_scenario(cfg, 10, 4);
    const gnn::GnnParams params = obtain_params(cfg, training);

    ExperimentResult result;
    Samples samples;
    for (int users : cfg.users_sweep) {
        Scenario point = with_users(cfg.scenario, users);
        point.group_size = training.group_size;
        point.validate();
        const std::uint64_t seed = cfg.seed;
        for (int t = 0; t < cfg.trials; ++t) {
            const channel::ChannelSet channels = trial_network(point, seed, t);
            result.skipped += run_trials(cfg, {Method::kclique}, channels, point.group_size, &params, users, samples,
                                         fmt::format("K={} trial {}", users, t));
        }
    }

    result.table.header = {"K_eval", "mean_sum_rate"};
    plot::LineChart chart{fmt::format("Scaling (trained at K={})", training.num_users), "K", "sum rate (bps/Hz)", {},
                          false};
    plot::Series series{"kclique", {}};
    for (int users : cfg.users_sweep) {
        const Summary sm = summarize(samples.at(users, Method::kclique));
        result.table.rows.push_back({std::to_string(users), format_number(sm.mean)});
        series.points.emplace_back(users, sm.mean);
    }
    chart.series.push_back(std::move(series));
    save_table(cfg, result, "scaling");
    save_chart(cfg, result, "scaling", std::move(chart));
    return result;
}

const std::vector<std::string>& experiment_names()
{
    static const std::vector<std::string> names{"sumrate-snr", "sumrate-k", "flops", "runtime", "scaling"};
    return names;
}

ExperimentResult run_experiment(const std::string& name, const ExperimentConfig& cfg)
{
    if (name == "sumrate-snr") {
        return run_sumrate_vs_snr(cfg);
    }
    if (name == "sumrate-k") {
        return run_sumrate_vs_K(cfg);
    }
    if (name == "flops") {
        return run_flops(cfg);
    }
    if (name == "runtime") {
        return run_runtime(cfg);
    }
    if (name == "scaling") {
        return run_scaling(cfg);
    }
    throw DomainError(fmt::format("unknown experiment '{}' (expected sumrate-snr, sumrate-k, flops, runtime or scaling)",
                                  name));
}

} // namespace pairnet::bench
