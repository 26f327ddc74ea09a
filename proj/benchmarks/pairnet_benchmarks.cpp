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

// Microbenchmarks for the hot paths. Run with --benchmark_filter=<regex>.

#include "pairnet/baselines.hpp"
#include "pairnet/gnn.hpp"
#include "pairnet/wcg.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace pairnet;

channel::ChannelSet drop(int users, int group = 4)
{
    Scenario s;
    s.num_users = users;
    s.group_size = group;
    Rng rng(17);
    return draw_network(s, rng);
}

void BM_CorrelationMatrix(benchmark::State& state)
{
    const auto geom = channel::UserGeometry::make(50.0, 0.7, 10.0);
    const auto array = channel::AntennaArray::ula(static_cast<int>(state.range(0)), 0.1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(channel::correlation_matrix(geom, array));
    }
}
BENCHMARK(BM_CorrelationMatrix)->Arg(8)->Arg(16)->Arg(32);

void BM_ZfbfCapacity(benchmark::State& state)
{
    const auto channels = drop(40);
    const int k = static_cast<int>(state.range(0));
    UserSubset subset(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        subset[static_cast<std::size_t>(i)] = 3 * i;
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(precoding::zfbf_capacity(channels, subset));
    }
}
BENCHMARK(BM_ZfbfCapacity)->Arg(2)->Arg(4)->Arg(8);

void BM_BuildWcg(benchmark::State& state)
{
    const auto channels = drop(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(wcg::build_wcg(channels, 4));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BuildWcg)->RangeMultiplier(2)->Range(10, 160)->Complexity(benchmark::oNSquared);

void BM_Forward(benchmark::State& state)
{
    const int users = static_cast<int>(state.range(0));
    const auto g = wcg::sparsify(wcg::build_wcg(drop(users), 4), 1.0);
    Rng rng(3);
    const auto params = gnn::GnnParams::random(gnn::default_depth, wcg::default_feature_dim, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(gnn::forward(g, params));
    }
}
BENCHMARK(BM_Forward)->Arg(10)->Arg(40)->Arg(160);

void BM_LossGradient(benchmark::State& state)
{
    const auto g = wcg::sparsify(wcg::build_wcg(drop(40), 4), 1.0);
    Rng rng(3);
    const auto params = gnn::GnnParams::random(gnn::default_depth, wcg::default_feature_dim, rng);
    const auto c = gnn::LossCoefficients::for_graph(40);
    for (auto _ : state) {
        benchmark::DoNotOptimize(gnn::loss_gradient(g, params, c));
    }
}
BENCHMARK(BM_LossGradient);

void BM_PairKclique(benchmark::State& state)
{
    const auto channels = drop(static_cast<int>(state.range(0)));
    Rng rng(3);
    const auto params = gnn::GnnParams::random(gnn::default_depth, wcg::default_feature_dim, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(gnn::pair_users(channels, 4, 1.0, params));
    }
}
BENCHMARK(BM_PairKclique)->Arg(20)->Arg(40)->Arg(80);

void BM_PairKmeans(benchmark::State& state)
{
    const auto channels = drop(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(baselines::kmeans_pair(channels, 4));
    }
}
BENCHMARK(BM_PairKmeans)->Arg(20)->Arg(40)->Arg(80);

void BM_PairSus(benchmark::State& state)
{
    const auto channels = drop(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(baselines::sus_pair(channels, 4));
    }
}
BENCHMARK(BM_PairSus)->Arg(20)->Arg(40)->Arg(80);

void BM_PairExhaustive(benchmark::State& state)
{
    const auto channels = drop(static_cast<int>(state.range(0)), 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(baselines::exhaustive_pair(channels, 3));
    }
}
BENCHMARK(BM_PairExhaustive)->Arg(10)->Arg(20);

} // namespace

BENCHMARK_MAIN();
