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

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>

namespace pairnet::bench {

namespace {

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_scalar(const std::string& key, const std::string& raw)
{
    const std::string text = trim(raw);
    T value{};
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc() || ptr != end) {
        throw ConfigError(key, fmt::format("cannot parse '{}' as {}", text,
                                           std::is_integral_v<T> ? "an integer" : "a number"));
    }
    return value;
}

bool parse_bool(const std::string& key, const std::string& raw)
{
    const std::string text = trim(raw);
    if (text == "true" || text == "1" || text == "yes" || text == "on") {
        return true;
    }
    if (text == "false" || text == "0" || text == "no" || text == "off") {
        return false;
    }
    throw ConfigError(key, fmt::format("expected true or false, got '{}'", text));
}

std::vector<std::string> split_list(const std::string& raw)
{
    std::vector<std::string> items;
    std::string current;
    for (char c : raw) {
        if (c == ',') {
            items.push_back(trim(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    items.push_back(trim(current));
    return items;
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& raw)
{
    std::vector<T> out;
    for (const auto& item : split_list(raw)) {
        out.push_back(parse_scalar<T>(key, item));
    }
    return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string& key, const std::string& value)>;

template <typename T, typename F>
Setter scalar(F assign)
{
    return [assign](ExperimentConfig& cfg, const std::string& key, const std::string& value) {
        assign(cfg, parse_scalar<T>(key, value));
    };
}

const std::map<std::string, Setter>& setters()
{
    static const std::map<std::string, Setter> table = {
        {"scenario.K", scalar<int>([](auto& c, int v) { c.scenario.num_users = v; })},
        {"scenario.k", scalar<int>([](auto& c, int v) { c.scenario.group_size = v; })},
        {"scenario.M", scalar<int>([](auto& c, int v) { c.scenario.num_antennas = v; })},
        {"scenario.cell_radius", scalar<double>([](auto& c, double v) { c.scenario.cell_radius = v; })},
        {"scenario.ring_radius", scalar<double>([](auto& c, double v) { c.scenario.ring_radius = v; })},
        {"scenario.wavelength", scalar<double>([](auto& c, double v) { c.scenario.wavelength = v; })},
        {"scenario.power_db", scalar<double>([](auto& c, double v) { c.scenario.power_db = v; })},
        {"scenario.beta_sparsify", scalar<double>([](auto& c, double v) { c.scenario.beta_sparsify = v; })},
        {"scenario.quadrature_points",
         scalar<int>([](auto& c, int v) { c.scenario.network.quadrature_points = v; })},
        {"run.seed", scalar<std::uint64_t>([](auto& c, std::uint64_t v) { c.seed = v; })},
        {"run.trials", scalar<int>([](auto& c, int v) { c.trials = v; })},
        {"run.methods",
         [](ExperimentConfig& c, const std::string& key, const std::string& value) {
             c.methods.clear();
             for (const auto& name : split_list(value)) {
                 try {
                     c.methods.push_back(parse_method(name));
                 } catch (const DomainError& e) {
                     throw ConfigError(key, e.what());
                 }
             }
         }},
        {"run.output_dir",
         [](ExperimentConfig& c, const std::string&, const std::string& value) { c.output_dir = trim(value); }},
        {"run.plots",
         [](ExperimentConfig& c, const std::string& key, const std::string& value) {
             c.plots = parse_bool(key, value);
         }},
        {"sweep.power_db",
         [](ExperimentConfig& c, const std::string& key, const std::string& value) {
             c.power_db_sweep = parse_list<double>(key, value);
         }},
        {"sweep.K",
         [](ExperimentConfig& c, const std::string& key, const std::string& value) {
             c.users_sweep = parse_list<int>(key, value);
         }},
        {"train.model",
         [](ExperimentConfig& c, const std::string&, const std::string& value) {
             const std::string path = trim(value);
             if (path.empty()) {
                 c.model_path.reset();
             } else {
                 c.model_path = path;
             }
         }},
        {"train.K", scalar<int>([](auto& c, int v) { c.train_users = v; })},
        {"train.k", scalar<int>([](auto& c, int v) { c.train_group = v; })},
        {"train.learning_rate", scalar<double>([](auto& c, double v) { c.train.learning_rate = v; })},
        {"train.epochs", scalar<int>([](auto& c, int v) { c.train.epochs = v; })},
        {"train.instances_per_epoch", scalar<int>([](auto& c, int v) { c.train.instances_per_epoch = v; })},
        {"train.seed", scalar<std::uint64_t>([](auto& c, std::uint64_t v) { c.train.seed = v; })},
        {"train.depth", scalar<int>([](auto& c, int v) { c.train.depth = v; })},
        {"train.width", scalar<int>([](auto& c, int v) { c.train.width = v; })},
        {"train.restarts", scalar<int>([](auto& c, int v) { c.train.restarts = v; })},
        {"train.validation_instances", scalar<int>([](auto& c, int v) { c.train.validation_instances = v; })},
        {"baselines.kmeans_iterations", scalar<int>([](auto& c, int v) { c.kmeans_iterations = v; })},
        {"baselines.sus_alpha", scalar<double>([](auto& c, double v) { c.sus_alpha = v; })},
        {"runtime.repetitions", scalar<int>([](auto& c, int v) { c.runtime_repetitions = v; })},
        {"runtime.warmup", scalar<int>([](auto& c, int v) { c.runtime_warmup = v; })},
        {"runtime.instances", scalar<int>([](auto& c, int v) { c.runtime_instances = v; })},
        {"runtime.min_batch_seconds", scalar<double>([](auto& c, double v) { c.min_batch_seconds = v; })},
    };
    return table;
}

void require(bool ok, const char* key, const std::string& what)
{
    if (!ok) {
        throw ConfigError(key, what);
    }
}

} // namespace

void set_option(ExperimentConfig& cfg, const std::string& key, const std::string& value)
{
    const auto it = setters().find(key);
    if (it == setters().end()) {
        throw ConfigError(key, "unknown configuration key");
    }
    it->second(cfg, key, value);
}

void ExperimentConfig::validate() const
{
    scenario.validate();
    require(trials >= 1, "run.trials", "must be >= 1");
    require(!methods.empty(), "run.methods", "must name at least one method");
    require(!output_dir.empty(), "run.output_dir", "must not be empty");
    require(!power_db_sweep.empty(), "sweep.power_db", "must not be empty");
    require(std::is_sorted(power_db_sweep.begin(), power_db_sweep.end()), "sweep.power_db", "must be sorted");
    require(!users_sweep.empty(), "sweep.K", "must not be empty");
    require(std::is_sorted(users_sweep.begin(), users_sweep.end()), "sweep.K", "must be sorted");
    require(users_sweep.front() >= 2, "sweep.K", "every K must be >= 2");
    require(train.learning_rate >= 0.0, "train.learning_rate", "must be non-negative");
    require(train.epochs >= 0, "train.epochs", "must be >= 0");
    require(train.instances_per_epoch >= 1, "train.instances_per_epoch", "must be >= 1");
    require(train.depth >= 0, "train.depth", "must be >= 0");
    require(train.width >= 1, "train.width", "must be >= 1");
    require(train.restarts >= 1, "train.restarts", "must be >= 1");
    require(train.validation_instances >= 1, "train.validation_instances", "must be >= 1");
    require(!train_users || *train_users >= 2, "train.K", "must be >= 2");
    require(!train_group || *train_group >= 2, "train.k", "must be >= 2");
    require(kmeans_iterations >= 1, "baselines.kmeans_iterations", "must be >= 1");
    require(sus_alpha > 0.0 && sus_alpha < 1.0, "baselines.sus_alpha", "must lie in (0, 1)");
    require(runtime_repetitions >= 5, "runtime.repetitions", "must be >= 5");
    require(runtime_warmup >= 1, "runtime.warmup", "must be >= 1");
    require(runtime_instances >= 1, "runtime.instances", "must be >= 1");
    require(min_batch_seconds > 0.0, "runtime.min_batch_seconds", "must be positive");
}

ExperimentConfig parse_config(std::istream& in)
{
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(fmt::format("line {}", e.line()), e.message());
    }
    ExperimentConfig cfg;
    for (const auto& [name, node] : tree) {
        if (node.empty()) {
            // an empty [section] parses like a key with no value
            if (name.find('.') != std::string::npos || !node.data().empty()) {
                set_option(cfg, name, node.data());
            }
            continue;
        }
        for (const auto& [key, leaf] : node) {
            set_option(cfg, name + "." + key, leaf.data());
        }
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open configuration " + path.string());
    }
    return parse_config(in);
}

} // namespace pairnet::bench
