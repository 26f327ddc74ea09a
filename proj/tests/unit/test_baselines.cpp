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

#include "pairnet/baselines.hpp"
#include "pairnet/flops.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

namespace pairnet::baselines {
namespace {

using testing::channels_from_columns;
using testing::random_complex;

channel::EigenBasis basis_of(const CMatrix& columns)
{
    const Eigen::HouseholderQR<CMatrix> qr(columns);
    channel::EigenBasis b;
    b.vectors = CMatrix(qr.householderQ()).leftCols(columns.cols());
    b.values = RVector::Ones(columns.cols());
    return b;
}

channel::ChannelSet clustered_users(const std::vector<double>& azimuths, std::uint64_t seed)
{
    const channel::AntennaArray array = channel::AntennaArray::ula(16);
    Rng rng(seed);
    channel::ChannelSet set;
    set.total_power = 100.0;
    set.realizations.resize(16, static_cast<Eigen::Index>(azimuths.size()));
    for (std::size_t v = 0; v < azimuths.size(); ++v) {
        channel::UserChannel user;
        user.geometry = channel::UserGeometry::make(60.0, azimuths[v], 6.0);
        user.correlation = channel::correlation_matrix(user.geometry, array);
        user.basis = channel::kl_decompose(user.correlation);
        set.realizations.col(static_cast<Eigen::Index>(v)) = channel::sample_channel(user.basis, rng);
        set.users.push_back(user);
    }
    return set;
}

TEST(Chordal, Examples)
{
    const CMatrix e = CMatrix::Identity(4, 4);
    EXPECT_NEAR(chordal_distance(basis_of(e.col(0)), basis_of(e.col(0))), 0.0, 1e-12);
    EXPECT_NEAR(chordal_distance(basis_of(e.col(0)), basis_of(e.col(1))), 2.0, 1e-12);
    EXPECT_NEAR(chordal_distance(basis_of(e.leftCols(2)), basis_of(e.col(1))), 1.0, 1e-12);
    EXPECT_NEAR(chordal_distance(basis_of(e.leftCols(2)), basis_of(e.rightCols(2))), 4.0, 1e-12);
    EXPECT_THROW(chordal_distance(basis_of(e.col(0)), basis_of(CMatrix::Identity(3, 1))), DomainError);
}

TEST(Chordal, MatchesProjectorDifference)
{
    Rng rng(1);
    for (int trial = 0; trial < 30; ++trial) {
        const auto a = basis_of(random_complex(6, 1 + trial % 3, rng));
        const auto b = basis_of(random_complex(6, 1 + trial % 4, rng));
        const CMatrix pa = a.vectors * a.vectors.adjoint();
        const CMatrix pb = b.vectors * b.vectors.adjoint();
        const double d = chordal_distance(a, b);
        EXPECT_NEAR(d, (pa - pb).squaredNorm(), 1e-10);
        EXPECT_NEAR(d, chordal_distance(b, a), 1e-12);
        EXPECT_GE(d, 0.0);
    }
}

TEST(Chordal, RootSatisfiesTriangleInequality)
{
    Rng rng(2);
    for (int trial = 0; trial < 200; ++trial) {
        const auto a = basis_of(random_complex(4, 1 + trial % 2, rng));
        const auto b = basis_of(random_complex(4, 1 + (trial / 2) % 2, rng));
        const auto c = basis_of(random_complex(4, 1, rng));
        const double ab = std::sqrt(chordal_distance(a, b));
        const double bc = std::sqrt(chordal_distance(b, c));
        const double ac = std::sqrt(chordal_distance(a, c));
        EXPECT_LE(ac, ab + bc + 1e-12);
    }
}

TEST(Kmeans, WholeCellWhenGroupIsTheCell)
{
    const channel::ChannelSet set = testing::scenario_channels(5, 3);
    const KmeansOutcome out = kmeans_cluster(set, 5);
    UserSubset sorted = out.result.subset;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_EQ(sorted, (UserSubset{0, 1, 2, 3, 4}));
    EXPECT_TRUE(out.result.complete);
}

TEST(Kmeans, SeparatesAngularGroups)
{
    const channel::ChannelSet set = clustered_users({0.40, 0.42, 0.44, 0.41, 2.30, 2.32, 2.28, 2.31}, 4);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const KmeansOutcome out = kmeans_cluster(set, 2, default_kmeans_iterations, seed);
        const int first = out.assignment[0];
        for (int v = 0; v < 4; ++v) {
            EXPECT_EQ(out.assignment[static_cast<std::size_t>(v)], first);
            EXPECT_NE(out.assignment[static_cast<std::size_t>(v + 4)], first);
        }
        ASSERT_EQ(out.result.subset.size(), 2U);
        EXPECT_NE(out.result.subset[0] < 4, out.result.subset[1] < 4);
    }
}

TEST(Kmeans, AssignmentsFollowNearestMedoid)
{
    const channel::ChannelSet set = testing::scenario_channels(24, 9);
    const KmeansOutcome out = kmeans_cluster(set, 4);
    std::vector<channel::EigenBasis> bases;
    for (const auto& u : set.users) {
        bases.push_back(channel::kl_decompose(u.correlation));
    }
    ASSERT_EQ(out.result.subset.size(), 4U);
    EXPECT_EQ(std::set<int>(out.result.subset.begin(), out.result.subset.end()).size(), 4U);
    for (int v = 0; v < 24; ++v) {
        const int own = out.result.subset[static_cast<std::size_t>(out.assignment[static_cast<std::size_t>(v)])];
        const double d_own = chordal_distance(bases[static_cast<std::size_t>(v)], bases[static_cast<std::size_t>(own)]);
        for (int m : out.result.subset) {
            EXPECT_LE(d_own, chordal_distance(bases[static_cast<std::size_t>(v)], bases[static_cast<std::size_t>(m)]) + 1e-12);
        }
    }
    EXPECT_GE(out.iterations, 1);
    EXPECT_LE(out.iterations, default_kmeans_iterations);
    EXPECT_NEAR(out.result.sum_rate, precoding::zfbf_capacity(set, out.result.subset).sum_rate, 1e-12);
    EXPECT_GT(out.result.flops, 24U * flops::eigendecomposition_flops(16));
}

TEST(Kmeans, DeterministicForSeed)
{
    const channel::ChannelSet set = testing::scenario_channels(30, 2);
    const KmeansOutcome a = kmeans_cluster(set, 4, 50, 7);
    const KmeansOutcome b = kmeans_cluster(set, 4, 50, 7);
    EXPECT_EQ(a.result.subset, b.result.subset);
    EXPECT_EQ(a.assignment, b.assignment);
    EXPECT_EQ(a.result.flops, b.result.flops);
}

TEST(Kmeans, DuplicateUsersStillGiveDistinctMedoids)
{
    const channel::ChannelSet set = clustered_users(std::vector<double>(6, 1.0), 5);
    const KmeansOutcome out = kmeans_cluster(set, 3);
    ASSERT_EQ(out.result.subset.size(), 3U);
    EXPECT_EQ(std::set<int>(out.result.subset.begin(), out.result.subset.end()).size(), 3U);
    EXPECT_TRUE(out.result.complete);
}

TEST(Kmeans, RejectsBadArguments)
{
    const channel::ChannelSet set = testing::scenario_channels(4, 1);
    EXPECT_THROW(kmeans_pair(set, 0), DomainError);
    EXPECT_THROW(kmeans_pair(set, 5), DomainError);
    EXPECT_THROW(kmeans_pair(set, 2, 0), DomainError);
}

TEST(Sus, PicksStrongestThenOrthogonalResidual)
{
    CMatrix h = CMatrix::Zero(3, 4);
    h.col(0) << 2.0, 0.0, 0.0;
    h.col(1) << 0.5, 1.5, 0.0;  // too aligned with user 0
    h.col(2) << 0.3, 1.05, 0.0; // stronger than user 3 but weaker once projected
    h.col(3) << 0.0, 0.0, 1.07;
    const channel::ChannelSet set = channels_from_columns(h, 10.0);
    const PairingResult r = sus_pair(set, 3);
    EXPECT_EQ(r.subset, (UserSubset{0, 3, 2}));
    EXPECT_TRUE(r.complete);
    EXPECT_EQ(r.method, Method::sus);
    EXPECT_NEAR(r.sum_rate, precoding::zfbf_capacity(set, r.subset).sum_rate, 1e-12);
}

TEST(Sus, IncompleteWhenCandidatesRunOut)
{
    CMatrix h(2, 3);
    h.col(0) << 3.0, 0.0;
    h.col(1) << 0.0, 2.0;
    h.col(2) << 1.0, 1.0;
    const channel::ChannelSet set = channels_from_columns(h, 10.0);
    const PairingResult r = sus_pair(set, 3);
    EXPECT_EQ(r.subset, (UserSubset{0, 1}));
    EXPECT_FALSE(r.complete);
    // a looser alpha keeps user 2 eligible, but its residual vanishes after user 1
    EXPECT_EQ(sus_pair(set, 3, 0.8).subset, (UserSubset{0, 1}));
}

TEST(Sus, RejectsBadArguments)
{
    const channel::ChannelSet set = testing::scenario_channels(4, 1);
    EXPECT_THROW(sus_pair(set, 2, 0.0), DomainError);
    EXPECT_THROW(sus_pair(set, 2, 1.0), DomainError);
    EXPECT_THROW(sus_pair(set, 5), DomainError);
}

TEST(Sus, GoldenDenseCell)
{
    Scenario s;
    Rng rng(2024);
    const channel::ChannelSet set = draw_network(s, rng);
    const PairingResult r = sus_pair(set, 4);
    EXPECT_EQ(r.subset, (UserSubset{24, 25, 13, 32}));
    EXPECT_NEAR(r.sum_rate, 37.202612101926, 1e-8);
    EXPECT_GT(r.flops, 0U);
}

TEST(Exhaustive, DominatesEveryOtherScheduler)
{
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const channel::ChannelSet set = testing::scenario_channels(10, seed);
        const PairingResult best = exhaustive_pair(set, 3);
        EXPECT_EQ(best.subset.size(), 3U);
        EXPECT_TRUE(std::is_sorted(best.subset.begin(), best.subset.end()));
        EXPECT_GE(best.sum_rate, sus_pair(set, 3).sum_rate - 1e-9);
        EXPECT_GE(best.sum_rate, kmeans_pair(set, 3).sum_rate - 1e-9);
        Rng rng(seed);
        for (int r = 0; r < 30; ++r) {
            std::vector<int> all(10);
            std::iota(all.begin(), all.end(), 0);
            std::shuffle(all.begin(), all.end(), rng);
            all.resize(3);
            EXPECT_GE(best.sum_rate, precoding::zfbf_capacity(set, all).sum_rate - 1e-9);
        }
        EXPECT_EQ(best.flops, 120U * flops::zero_forcing_flops(3, 16));
    }
}

TEST(Exhaustive, RefusesHugeSearchSpaces)
{
    const channel::ChannelSet set = testing::scenario_channels(40, 1);
    try {
        exhaustive_pair(set, 6);
        FAIL() << "expected DomainError";
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("C(40, 6) = 3838380"), std::string::npos) << e.what();
    }
    EXPECT_THROW(exhaustive_pair(set, 0), DomainError);
}

TEST(Exhaustive, TiesKeepTheFirstSubset)
{
    const channel::ChannelSet set = channels_from_columns(CMatrix::Identity(5, 5), 4.0);
    EXPECT_EQ(exhaustive_pair(set, 2).subset, (UserSubset{0, 1}));
    EXPECT_EQ(exhaustive_pair(set, 3, precoding::PowerMode::waterfill).subset, (UserSubset{0, 1, 2}));
}

} // namespace
} // namespace pairnet::baselines
