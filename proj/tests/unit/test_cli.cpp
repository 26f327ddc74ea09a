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
#include "pairnet/bench.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sys/wait.h>

namespace pairnet {
namespace {

struct CliRun {
    int status = -1;
    std::string output;
};

CliRun pairnet_cli(const std::string& args)
{
    const std::string command = std::string(PAIRNET_CLI) + " " + args + " 2>&1";
    CliRun run;
    FILE* pipe = ::popen(command.c_str(), "r");
    if (pipe == nullptr) {
        return run;
    }
    char buf[4096];
    while (std::fgets(buf, sizeof buf, pipe) != nullptr) {
        run.output += buf;
    }
    const int raw = ::pclose(pipe);
    run.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return run;
}

const char* tiny_training = " --set train.epochs=2 --set train.instances_per_epoch=2 --set train.depth=2"
                            " --set train.width=4 --set train.restarts=1 --set train.validation_instances=2";

TEST(Cli, OraclePrintsExhaustiveOptimum)
{
    const CliRun run = pairnet_cli("oracle --K 10 --k 3 --seed 7");
    ASSERT_EQ(run.status, 0) << run.output;

    Scenario s;
    s.num_users = 10;
    s.group_size = 3;
    const PairingResult best = baselines::exhaustive_pair(bench::trial_network(s, 7, 0), 3);
    EXPECT_EQ(run.output, "subset: " + format_subset(best.subset) + "\nsum_rate: "
                              + bench::format_number(best.sum_rate) + "\n");
}

TEST(Cli, PairPrintsSubsetAndRate)
{
    testing::TempDir dir("cli_pair");
    const CliRun run = pairnet_cli("pair --method sus -k 3 --set scenario.K=12 --seed 4 --save-channels "
                                + (dir / "drop.pnch").string());
    ASSERT_EQ(run.status, 0) << run.output;
    EXPECT_NE(run.output.find("method: sus"), std::string::npos) << run.output;
    EXPECT_NE(run.output.find("subset: {"), std::string::npos);
    EXPECT_NE(run.output.find("sum_rate: "), std::string::npos);

    const CliRun replay = pairnet_cli("pair --method sus -k 3 --channels " + (dir / "drop.pnch").string());
    ASSERT_EQ(replay.status, 0) << replay.output;
    auto subset_line = [](const std::string& out) {
        const auto at = out.find("subset: ");
        return out.substr(at, out.find('\n', at) - at);
    };
    EXPECT_EQ(subset_line(replay.output), subset_line(run.output));
}

TEST(Cli, TrainThenPairWithModel)
{
    testing::TempDir dir("cli_train");
    const std::string model = (dir / "m.pnnw").string();
    const CliRun train = pairnet_cli("train --set scenario.K=8 -o " + dir.path().string() + " -m " + model + tiny_training);
    ASSERT_EQ(train.status, 0) << train.output;
    ASSERT_TRUE(std::filesystem::exists(model));

    const CliRun pair = pairnet_cli("pair --set scenario.K=8 --set train.depth=2 --set train.width=4 -k 2 -m " + model
                                 + " --dump-wcg " + (dir / "g.txt").string());
    ASSERT_EQ(pair.status, 0) << pair.output;
    EXPECT_NE(pair.output.find("method: kclique"), std::string::npos) << pair.output;
    EXPECT_EQ(testing::read_file(dir / "g.txt").substr(0, 6), "8 2 1\n");
}

TEST(Cli, BenchWritesCsvWithFixedHeader)
{
    testing::TempDir dir("cli_bench");
    const CliRun run = pairnet_cli("bench sumrate-snr -o " + dir.path().string()
                                + " --set scenario.K=6 --set scenario.k=2 --set run.trials=1"
                                  " --set run.methods=sus,kmeans --set sweep.power_db=0,10");
    ASSERT_EQ(run.status, 0) << run.output;
    EXPECT_NE(run.output.find("wrote "), std::string::npos);
    const std::string csv = testing::read_file(dir / "sumrate_snr.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "snr_db,method,mean,std");
    EXPECT_TRUE(std::filesystem::exists(dir / "sumrate_snr.svg"));
}

TEST(Cli, ConfigFileIsRead)
{
    testing::TempDir dir("cli_cfg");
    {
        std::ofstream cfg(dir / "run.cfg");
        cfg << "[scenario]\nK = 9\nk = 3\n[run]\nseed = 7\n";
    }
    const CliRun run = pairnet_cli("oracle -c " + (dir / "run.cfg").string());
    ASSERT_EQ(run.status, 0) << run.output;
    Scenario s;
    s.num_users = 9;
    s.group_size = 3;
    const PairingResult best = baselines::exhaustive_pair(bench::trial_network(s, 7, 0), 3);
    EXPECT_NE(run.output.find("subset: " + format_subset(best.subset) + "\n"), std::string::npos) << run.output;
}

TEST(Cli, BadConfigExitsWithFieldPath)
{
    const CliRun run = pairnet_cli("oracle --set scenario.K=1");
    EXPECT_EQ(run.status, 3);
    EXPECT_NE(run.output.find("scenario.K"), std::string::npos) << run.output;

    const CliRun unknown = pairnet_cli("pair --set scenario.nope=2");
    EXPECT_EQ(unknown.status, 3);
    EXPECT_NE(unknown.output.find("scenario.nope"), std::string::npos) << unknown.output;
}

TEST(Cli, UsageErrors)
{
    EXPECT_EQ(pairnet_cli("").status, 2);
    EXPECT_EQ(pairnet_cli("pair --frobnicate").status, 2);
    EXPECT_EQ(pairnet_cli("bench fig5").status, 2);
    EXPECT_EQ(pairnet_cli("pair --channels /nonexistent.pnch").status, 2);
}

} // namespace
} // namespace pairnet
