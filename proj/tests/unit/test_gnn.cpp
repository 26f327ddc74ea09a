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
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace pairnet::gnn {
namespace {

// Path 0 - 1 - 2 with raw weights 2 and 1, so normalized 1 and 0.5.
wcg::Wcg path_graph(int feature_dim = 1)
{
    RMatrix raw = RMatrix::Zero(3, 3);
    raw(0, 1) = raw(1, 0) = 2.0;
    raw(1, 2) = raw(2, 1) = 1.0;
    return wcg::Wcg::from_raw_weights(raw, 2, feature_dim).with_edges({{0, 1}, {1, 2}});
}

FcbParams scalar_block(double eps, double w1, double b1, double w2, double b2)
{
    FcbParams block;
    block.eps = eps;
    block.first = Affine{RMatrix::Constant(1, 1, w1), RVector::Constant(1, b1)};
    block.second = Affine{RMatrix::Constant(1, 1, w2), RVector::Constant(1, b2)};
    return block;
}

wcg::Wcg random_graph(int users, std::uint64_t seed, int k = 3, double beta = 1.0, int width = 8)
{
    Scenario s;
    s.num_users = users;
    s.group_size = k;
    Rng rng(seed);
    return wcg::sparsify(wcg::build_wcg(draw_network(s, rng), k, width), beta);
}

GnnParams random_params(int depth, int width, std::uint64_t seed)
{
    Rng rng(seed);
    return GnnParams::random(depth, width, rng);
}

TEST(Fcb, PathGraphByHand)
{
    const wcg::Wcg g = path_graph();
    const RMatrix h = (RMatrix(3, 1) << 1.0, 2.0, 3.0).finished();

    const RMatrix out = fcb_forward(g, h, scalar_block(0.5, 2.0, -1.0, 3.0, 0.5));
    EXPECT_NEAR(out(0, 0), 4.5, 1e-12);
    EXPECT_NEAR(out(1, 0), 8.5, 1e-12);
    EXPECT_NEAR(out(2, 0), 8.5, 1e-12);

    // node 0 sits on the negative side of the rectifier
    const RMatrix neg = fcb_forward(g, h, scalar_block(0.5, 2.0, -3.0, 3.0, 0.5));
    EXPECT_NEAR(neg(0, 0), 0.48, 1e-12);
    EXPECT_NEAR(neg(1, 0), 2.5, 1e-12);
    EXPECT_NEAR(neg(2, 0), 2.5, 1e-12);
}

TEST(Fcb, IsolatedNodeSeesOnlyItself)
{
    const wcg::Wcg g = path_graph().with_edges({{0, 1}});
    const RMatrix h = (RMatrix(3, 1) << 1.0, 2.0, 3.0).finished();
    const RMatrix out = fcb_forward(g, h, scalar_block(0.0, 1.0, 0.0, 1.0, 0.0));
    EXPECT_NEAR(out(2, 0), 3.0 / 3.0, 1e-12);
}

TEST(Fcb, IdenticalNeighbourhoodsGiveIdenticalRows)
{
    RMatrix raw = RMatrix::Constant(4, 4, 1.0) - RMatrix::Identity(4, 4);
    const wcg::Wcg g = wcg::Wcg::from_raw_weights(raw, 2, 6);
    const GnnParams params = random_params(1, 6, 3);
    const RMatrix out = fcb_forward(g, g.node_features(), params.blocks[0]);
    for (int v = 1; v < 4; ++v) {
        EXPECT_LE((out.row(v) - out.row(0)).cwiseAbs().maxCoeff(), 1e-14);
    }
}

TEST(Fcb, OutputDependsOnlyOnClosedNeighbourhood)
{
    const wcg::Wcg g = random_graph(9, 4, 3, 1.0, 5);
    const GnnParams params = random_params(1, 5, 8);
    Rng rng(2);
    std::normal_distribution<double> n(0.0, 1.0);
    RMatrix h = RMatrix::NullaryExpr(9, 5, [&]() { return n(rng); });
    const RMatrix base = fcb_forward(g, h, params.blocks[0]);
    for (int v = 0; v < 9; ++v) {
        for (int u = 0; u < 9; ++u) {
            if (u == v || g.has_edge(u, v)) {
                continue;
            }
            RMatrix changed = h;
            changed.row(u).array() += 5.0;
            EXPECT_EQ(fcb_forward(g, changed, params.blocks[0]).row(v), base.row(v));
        }
    }
}

TEST(Fcb, RejectsShapeMismatch)
{
    const FcbParams block = scalar_block(0.0, 1.0, 0.0, 1.0, 0.0);
    EXPECT_THROW(fcb_forward(RMatrix::Zero(2, 2), RMatrix::Zero(3, 1), block), DomainError);
    EXPECT_THROW(fcb_forward(RMatrix::Zero(3, 3), RMatrix::Zero(3, 2), block), DomainError);
}

TEST(Forward, ProbabilitiesSpanUnitInterval)
{
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const wcg::Wcg g = random_graph(12, seed);
        const NodeProbabilities p = forward(g, random_params(3, 8, seed + 100));
        EXPECT_EQ(p.p.size(), 12);
        EXPECT_GE(p.p.minCoeff(), 0.0);
        EXPECT_LE(p.p.maxCoeff(), 1.0);
        EXPECT_EQ(p.p.minCoeff(), 0.0);
        EXPECT_EQ(p.p.maxCoeff(), 1.0);
    }
}

TEST(Forward, ConstantScoresGiveOneHalf)
{
    const wcg::Wcg single = wcg::Wcg::from_raw_weights(RMatrix::Zero(1, 1), 1, 4);
    EXPECT_EQ(forward(single, random_params(2, 4, 1)).p, RVector::Constant(1, 0.5));

    RMatrix raw = RMatrix::Constant(5, 5, 3.0) - 3.0 * RMatrix::Identity(5, 5);
    const wcg::Wcg uniform = wcg::Wcg::from_raw_weights(raw, 3, 4);
    EXPECT_EQ(forward(uniform, random_params(2, 4, 2)).p, RVector::Constant(5, 0.5));
}

TEST(Forward, EquivariantUnderRelabelling)
{
    const wcg::Wcg g = random_graph(11, 6);
    const GnnParams params = random_params(4, 8, 9);
    const std::vector<int> perm{5, 2, 9, 0, 10, 7, 1, 3, 8, 4, 6};
    const RVector p = forward(g, params).p;
    const RVector q = forward(g.permuted(perm), params).p;
    for (int a = 0; a < 11; ++a) {
        EXPECT_NEAR(q(a), p(perm[static_cast<std::size_t>(a)]), 1e-12);
    }
}

TEST(Forward, GoldenSmallCell)
{
    std::ifstream in(std::string(PAIRNET_TEST_DATA) + "/gnn_k10_probabilities.txt");
    ASSERT_TRUE(in);
    std::string key;
    int edges = 0;
    RVector expected(10);
    in >> key >> edges >> key;
    for (int i = 0; i < 10; ++i) {
        in >> expected(i);
    }
    ASSERT_TRUE(in);

    Scenario s;
    s.num_users = 10;
    s.group_size = 3;
    Rng rng(10);
    const wcg::Wcg g = wcg::sparsify(wcg::build_wcg(draw_network(s, rng), 3, 16), 1.0);
    EXPECT_EQ(g.num_edges(), edges);
    const RVector p = forward(g, random_params(8, 16, 7)).p;
    for (int i = 0; i < 10; ++i) {
        EXPECT_NEAR(p(i), expected(i), 1e-9) << "node " << i;
    }
}

TEST(Forward, RejectsWidthMismatch)
{
    const wcg::Wcg g = random_graph(6, 1, 3, 1.0, 8);
    EXPECT_THROW(forward(g, random_params(2, 4, 1)), DomainError);
}

TEST(ErdosLoss, SmallExamples)
{
    const wcg::Wcg g = path_graph();
    const LossCoefficients c = LossCoefficients::for_graph(3);
    EXPECT_EQ(c.gamma, 3.0);
    EXPECT_EQ(c.beta_loss, 3.0);

    // nothing selected: only gamma remains
    EXPECT_DOUBLE_EQ(erdos_loss({RVector::Zero(3)}, g, c), 3.0);
    // the edge {0, 1} with weight 1: 3 - 4 * 1 + 3 * 1
    EXPECT_DOUBLE_EQ(erdos_loss({(RVector(3) << 1.0, 1.0, 0.0).finished()}, g, c), 2.0);
    // all three: 3 - 4 * 1.5 + 3 * 3
    EXPECT_DOUBLE_EQ(erdos_loss({RVector::Ones(3)}, g, c), 6.0);
    EXPECT_THROW(erdos_loss({RVector::Ones(2)}, g, c), DomainError);
}

double reference_loss(const RVector& p, const wcg::Wcg& g, const LossCoefficients& c)
{
    double loss = c.gamma;
    for (int i = 0; i < p.size(); ++i) {
        for (int j = i + 1; j < p.size(); ++j) {
            const double w = g.has_edge(i, j) ? g.norm_weight(i, j) : 0.0;
            loss += (c.beta_loss - (c.beta_loss + 1.0) * w) * p(i) * p(j);
        }
    }
    return loss;
}

TEST(ErdosLoss, MatchesPairwiseSum)
{
    Rng rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        const wcg::Wcg g = random_graph(10, seed);
        RVector p(10);
        for (int i = 0; i < 10; ++i) {
            p(i) = u(rng);
        }
        const LossCoefficients c{2.5, 7.0};
        EXPECT_NEAR(erdos_loss({p}, g, c), reference_loss(p, g, c), 1e-12);
    }
}

TEST(LossGradient, MatchesCentralDifferences)
{
    const wcg::Wcg g = random_graph(8, 21, 3, 1.0, 4);
    const GnnParams params = random_params(2, 4, 33);
    const LossCoefficients c = LossCoefficients::for_graph(8);
    const LossGradient lg = loss_gradient(g, params, c);
    EXPECT_NEAR(lg.loss, erdos_loss(forward(g, params), g, c), 1e-12);

    const RVector theta = params.flatten();
    const RVector analytic = lg.gradient.flatten();
    RVector numeric(theta.size());
    GnnParams probe = params;
    const double h = 1e-6;
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        RVector t = theta;
        t(i) += h;
        probe.assign(t);
        const double up = erdos_loss(forward(g, probe), g, c);
        t(i) -= 2 * h;
        probe.assign(t);
        const double down = erdos_loss(forward(g, probe), g, c);
        numeric(i) = (up - down) / (2 * h);
    }
    EXPECT_LE((numeric - analytic).norm(), 1e-5 * std::max(1.0, analytic.norm()));
}

TEST(LossGradient, GammaShiftsLossOnly)
{
    const wcg::Wcg g = random_graph(9, 2);
    const GnnParams params = random_params(2, 8, 4);
    const LossGradient a = loss_gradient(g, params, {0.0, 36.0});
    const LossGradient b = loss_gradient(g, params, {100.0, 36.0});
    EXPECT_NEAR(b.loss - a.loss, 100.0, 1e-9);
    EXPECT_EQ(a.gradient.flatten(), b.gradient.flatten());
}

TEST(LossGradient, ConstantScoresHaveZeroGradient)
{
    RMatrix raw = RMatrix::Constant(4, 4, 1.0) - RMatrix::Identity(4, 4);
    const wcg::Wcg g = wcg::Wcg::from_raw_weights(raw, 2, 4);
    const LossGradient lg = loss_gradient(g, random_params(1, 4, 5), LossCoefficients::for_graph(4));
    EXPECT_EQ(lg.gradient.flatten().cwiseAbs().maxCoeff(), 0.0);
}

TEST(LossGradient, IsolatedNodeIsPushedDown)
{
    // an isolated node only adds the beta * p_i * sum p_j penalty
    const wcg::Wcg g = random_graph(8, 3).with_edges({{0, 1}, {1, 2}, {0, 2}});
    const LossCoefficients c = LossCoefficients::for_graph(8);
    RVector p = RVector::Constant(8, 0.5);
    const double base = erdos_loss({p}, g, c);
    p(6) = 0.0;
    EXPECT_LT(erdos_loss({p}, g, c), base);
}

InstanceSource fixed_instances(int users, std::uint64_t seed, int width)
{
    Scenario s;
    s.num_users = users;
    s.group_size = 4;
    return scenario_instances(s, seed, width);
}

TEST(Train, ZeroLearningRateKeepsParameters)
{
    TrainConfig cfg;
    cfg.learning_rate = 0.0;
    cfg.epochs = 3;
    cfg.instances_per_epoch = 2;
    cfg.depth = 2;
    cfg.width = 4;
    const GnnParams initial = random_params(2, 4, 6);
    const TrainResult r = train(fixed_instances(8, 1, 4), cfg, initial);
    EXPECT_EQ(r.params.flatten(), initial.flatten());
    EXPECT_EQ(r.loss_trace.size(), 3U);
}

TEST(Train, DeterministicForSeed)
{
    TrainConfig cfg;
    cfg.epochs = 4;
    cfg.instances_per_epoch = 3;
    cfg.depth = 2;
    cfg.width = 4;
    cfg.restarts = 2;
    cfg.validation_instances = 3;
    const TrainResult a = train(fixed_instances(8, 2, 4), cfg);
    const TrainResult b = train(fixed_instances(8, 2, 4), cfg);
    EXPECT_EQ(a.params.flatten(), b.params.flatten());
    EXPECT_EQ(a.loss_trace, b.loss_trace);
    EXPECT_EQ(a.restart, b.restart);
    ASSERT_EQ(a.validation_loss.size(), 2U);
    EXPECT_EQ(a.validation_loss[static_cast<std::size_t>(a.restart)],
              *std::min_element(a.validation_loss.begin(), a.validation_loss.end()));

    cfg.seed = 99;
    EXPECT_NE(train(fixed_instances(8, 2, 4), cfg).params.flatten(), a.params.flatten());
}

TEST(Train, LossFallsOnDenseCells)
{
    TrainConfig cfg;
    cfg.epochs = 60;
    cfg.instances_per_epoch = 8;
    cfg.restarts = 1;
    const TrainResult r = train(fixed_instances(40, 3, cfg.width), cfg);
    ASSERT_EQ(r.loss_trace.size(), 60U);
    auto window = [&](std::size_t from) {
        return std::accumulate(r.loss_trace.begin() + static_cast<long>(from),
                               r.loss_trace.begin() + static_cast<long>(from + 10), 0.0) / 10.0;
    };
    const double first = window(0);
    const double last = window(50);
    EXPECT_LE(last, 0.8 * first) << "first " << first << " last " << last;
    EXPECT_TRUE(r.params.all_finite());
}

TEST(Train, NonFiniteParametersRaiseDivergence)
{
    TrainConfig cfg;
    cfg.epochs = 2;
    cfg.instances_per_epoch = 1;
    cfg.depth = 1;
    cfg.width = 4;
    GnnParams bad = random_params(1, 4, 1);
    bad.blocks[0].eps = std::numeric_limits<double>::quiet_NaN();
    try {
        train(fixed_instances(6, 1, 4), cfg, bad);
        FAIL() << "expected DivergenceError";
    } catch (const DivergenceError& e) {
        EXPECT_EQ(e.epoch(), 0);
    }
}

TEST(Train, RejectsBadConfiguration)
{
    TrainConfig cfg;
    cfg.learning_rate = -1.0;
    EXPECT_THROW(train(fixed_instances(6, 1, 16), cfg), DomainError);
    cfg = {};
    cfg.restarts = 0;
    EXPECT_THROW(train(fixed_instances(6, 1, 16), cfg), DomainError);
    cfg = {};
    EXPECT_THROW(train(InstanceSource{}, cfg), DomainError);
}

wcg::Wcg five_node_graph()
{
    RMatrix raw = RMatrix::Constant(5, 5, 1.0) - RMatrix::Identity(5, 5);
    return wcg::Wcg::from_raw_weights(raw, 3, 2).with_edges({{0, 1}, {0, 2}, {1, 2}, {0, 3}, {3, 4}, {1, 4}});
}

TEST(Decode, GreedyByDescendingProbability)
{
    const wcg::Wcg g = five_node_graph();
    const NodeProbabilities p{(RVector(5) << 0.9, 0.8, 0.7, 0.6, 0.5).finished()};
    EXPECT_EQ(decode_max_clique(p, g), (UserSubset{0, 1, 2}));
    const DecodeResult two = decode_k_clique(p, g, 2);
    EXPECT_EQ(two.nodes, (UserSubset{0, 1}));
    EXPECT_TRUE(two.complete);

    const DecodeResult four = decode_k_clique(p, g, 4);
    EXPECT_EQ(four.nodes, (UserSubset{0, 1, 2}));
    EXPECT_FALSE(four.complete);

    // ties go to the lower index
    const NodeProbabilities flat{RVector::Constant(5, 0.5)};
    EXPECT_EQ(decode_max_clique(flat, g), (UserSubset{0, 1, 2}));
    const NodeProbabilities late{(RVector(5) << 0.1, 0.2, 0.3, 0.9, 0.9).finished()};
    EXPECT_EQ(decode_max_clique(late, g), (UserSubset{3, 4}));

    EXPECT_THROW(decode_k_clique(p, g, 0), DomainError);
    EXPECT_THROW(decode_max_clique({RVector::Ones(4)}, g), DomainError);
}

TEST(Decode, ProducesMaximalCliquesLikeAReferenceGreedy)
{
    Rng rng(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const wcg::Wcg g = random_graph(10, seed, 3, 1.05);
        RVector p(10);
        for (int i = 0; i < 10; ++i) {
            p(i) = std::round(4.0 * u(rng)) / 4.0;
        }
        const UserSubset got = decode_max_clique({p}, g);

        std::vector<int> order(10);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) { return p(a) > p(b) || (p(a) == p(b) && a < b); });
        UserSubset expected;
        for (int v : order) {
            bool ok = true;
            for (int w : expected) {
                ok = ok && g.has_edge(v, w);
            }
            if (ok) {
                expected.push_back(v);
            }
        }
        EXPECT_EQ(got, expected);
        for (int v = 0; v < 10; ++v) {
            if (std::find(got.begin(), got.end(), v) != got.end()) {
                continue;
            }
            EXPECT_FALSE(std::all_of(got.begin(), got.end(), [&](int w) { return g.has_edge(v, w); }))
                << "clique can still grow by " << v;
        }
    }
}

TEST(PairUsers, AllUsersWhenGroupIsTheCell)
{
    const channel::ChannelSet set = testing::scenario_channels(4, 5);
    const PairingResult r = pair_users(set, 4, 0.0, random_params(2, 16, 1));
    UserSubset sorted = r.subset;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(sorted, (UserSubset{0, 1, 2, 3}));
    EXPECT_TRUE(r.complete);
    EXPECT_EQ(r.method, Method::kclique);
    EXPECT_NEAR(r.sum_rate, precoding::zfbf_capacity(set, r.subset).sum_rate, 1e-12);
}

TEST(PairUsers, PairsFromSmallCell)
{
    const channel::ChannelSet set = testing::scenario_channels(6, 8);
    const PairingResult r = pair_users(set, 2, 1.0, random_params(3, 16, 2));
    ASSERT_EQ(r.subset.size(), 2U);
    EXPECT_NE(r.subset[0], r.subset[1]);
    EXPECT_TRUE(r.complete);
    EXPECT_NEAR(r.sum_rate, precoding::zfbf_capacity(set, r.subset).sum_rate, 1e-12);
    EXPECT_GT(r.flops, 0U);
    EXPECT_GE(r.wall_time, 0.0);
}

TEST(Params, CountAndFlatLayout)
{
    const GnnParams p = random_params(3, 5, 1);
    EXPECT_EQ(p.parameter_count(), 3U * (1 + 2 * (25 + 5)) + (25 + 5) + (5 + 1));
    const RVector flat = p.flatten();
    EXPECT_EQ(flat(0), p.blocks[0].eps);
    EXPECT_EQ(flat(1), p.blocks[0].first.weight(0, 0));
    EXPECT_EQ(flat(2), p.blocks[0].first.weight(0, 1));
    EXPECT_EQ(flat(flat.size() - 1), p.head_out.bias(0));
    GnnParams q = GnnParams::zeros(3, 5);
    q.assign(flat);
    EXPECT_EQ(q.flatten(), flat);
    EXPECT_THROW(q.assign(RVector::Zero(3)), DomainError);
    EXPECT_THROW(GnnParams::zeros(1, 0), DomainError);
    const double bound = 1.0 / std::sqrt(5.0);
    EXPECT_LT(flat.cwiseAbs().maxCoeff(), bound);
}

TEST(ModelIo, RoundTripIsExact)
{
    const GnnParams p = random_params(8, 16, 4);
    std::stringstream buf;
    write_params(buf, p);
    EXPECT_EQ(buf.str().size(), 4U + 1U + 8U + 8U * p.parameter_count());
    EXPECT_EQ(buf.str().substr(0, 4), "PNNW");
    const GnnParams back = read_params(buf);
    EXPECT_EQ(back.depth(), 8);
    EXPECT_EQ(back.width(), 16);
    EXPECT_EQ(back.flatten(), p.flatten());

    testing::TempDir dir("pnnw");
    save_params(dir / "m.pnnw", p);
    EXPECT_EQ(load_params(dir / "m.pnnw", 8, 16).flatten(), p.flatten());
    EXPECT_THROW(load_params(dir / "m.pnnw", 4), IoError);
    EXPECT_THROW(load_params(dir / "m.pnnw", std::nullopt, 8), IoError);
    EXPECT_THROW(load_params(dir / "missing.pnnw"), IoError);
}

TEST(ModelIo, RejectsCorruptFiles)
{
    std::stringstream buf;
    write_params(buf, random_params(1, 2, 1));
    const std::string bytes = buf.str();

    std::stringstream magic("PNCH" + bytes.substr(4));
    EXPECT_THROW(read_params(magic), IoError);
    std::string version = bytes;
    version[4] = 2;
    std::stringstream v(version);
    EXPECT_THROW(read_params(v), IoError);
    std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
    EXPECT_THROW(read_params(truncated), IoError);
    std::stringstream trailing(bytes + "x");
    EXPECT_THROW(read_params(trailing), IoError);
}

} // namespace
} // namespace pairnet::gnn
