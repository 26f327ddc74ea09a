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

#include "pairnet/gnn.hpp"

#include <fmt/format.h>

#include <cmath>

namespace pairnet::gnn {

namespace {

void check_config(const TrainConfig& config)
{
    if (!(config.learning_rate >= 0.0) || !std::isfinite(config.learning_rate)) {
        throw DomainError("learning rate must be finite and non-negative");
    }
    if (config.epochs < 0 || config.instances_per_epoch < 1) {
        throw DomainError("epochs must be >= 0 and instances_per_epoch >= 1");
    }
    if (config.depth < 0 || config.width < 1) {
        throw DomainError("invalid network shape");
    }
    if (config.restarts < 1 || config.validation_instances < 1) {
        throw DomainError("restarts and validation_instances must be >= 1");
    }
}

double held_out_loss(const InstanceSource& instances, const TrainConfig& config, const GnnParams& params)
{
    double total = 0.0;
    for (int n = 0; n < config.validation_instances; ++n) {
        const wcg::Wcg g = instances(config.epochs, n);
        const LossCoefficients c = config.coefficients.value_or(LossCoefficients::for_graph(g.num_nodes()));
        total += erdos_loss(forward(g, params), g, c);
    }
    return total / config.validation_instances;
}

} // namespace

TrainResult train(const InstanceSource& instances, const TrainConfig& config)
{
    check_config(config);
    if (!instances) {
        throw DomainError("training needs an instance source");
    }
    if (config.restarts == 1) {
        Rng rng(derive_seed(config.seed, 0));
        return train(instances, config, GnnParams::random(config.depth, config.width, rng));
    }

    TrainResult best;
    std::vector<double> scores;
    for (int r = 0; r < config.restarts; ++r) {
        Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(r)));
        TrainResult candidate = train(instances, config, GnnParams::random(config.depth, config.width, rng));
        const double score = held_out_loss(instances, config, candidate.params);
        scores.push_back(score);
        if (r == 0 || score < scores[static_cast<std::size_t>(best.restart)]) {
            best = std::move(candidate);
            best.restart = r;
        }
    }
    best.validation_loss = std::move(scores);
    return best;
}

TrainResult train(const InstanceSource& instances, const TrainConfig& config, GnnParams initial)
{
    check_config(config);
    if (!instances) {
        throw DomainError("training needs an instance source");
    }

    TrainResult result;
    result.params = std::move(initial);
    RVector theta = result.params.flatten();
    RVector first_moment = RVector::Zero(theta.size());
    RVector second_moment = RVector::Zero(theta.size());
    long step = 0;

    result.loss_trace.reserve(static_cast<std::size_t>(config.epochs));
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        double epoch_loss = 0.0;
        for (int n = 0; n < config.instances_per_epoch; ++n) {
            const wcg::Wcg g = instances(epoch, n);
            const LossCoefficients c = config.coefficients.value_or(LossCoefficients::for_graph(g.num_nodes()));

            result.params.assign(theta);
            LossGradient lg;
            try {
                lg = loss_gradient(g, result.params, c);
            } catch (const NumericalError& e) {
                throw DivergenceError(epoch, fmt::format("training diverged at epoch {}: {}", epoch, e.what()));
            }
            if (!std::isfinite(lg.loss)) {
                throw DivergenceError(epoch, fmt::format("non-finite loss at epoch {}", epoch));
            }
            epoch_loss += lg.loss;

            if (config.learning_rate == 0.0) {
                continue;
            }
            ++step;
            const RVector grad = lg.gradient.flatten();
            first_moment = config.adam_beta1 * first_moment + (1.0 - config.adam_beta1) * grad;
            second_moment = config.adam_beta2 * second_moment
                          + (1.0 - config.adam_beta2) * grad.cwiseAbs2();
            const double correction1 = 1.0 - std::pow(config.adam_beta1, static_cast<double>(step));
            const double correction2 = 1.0 - std::pow(config.adam_beta2, static_cast<double>(step));
            theta.array() -= config.learning_rate * (first_moment.array() / correction1)
                           / ((second_moment.array() / correction2).sqrt() + config.adam_epsilon);
        }
        result.loss_trace.push_back(epoch_loss / config.instances_per_epoch);
        if (!theta.allFinite()) {
            throw DivergenceError(epoch, fmt::format("non-finite parameters after epoch {}", epoch));
        }
    }
    result.params.assign(theta);
    return result;
}

InstanceSource scenario_instances(const Scenario& scenario, std::uint64_t seed, int feature_dim)
{
    scenario.validate();
    return [scenario, seed, feature_dim](int epoch, int index) {
        const std::uint64_t stream = (static_cast<std::uint64_t>(epoch) << 32) | static_cast<std::uint32_t>(index);
        Rng rng(derive_seed(seed, stream));
        const channel::ChannelSet channels = draw_network(scenario, rng);
        return wcg::sparsify(wcg::build_wcg(channels, scenario.group_size, feature_dim), scenario.beta_sparsify);
    };
}

} // namespace pairnet::gnn
