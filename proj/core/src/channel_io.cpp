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

#include "binary_io.hpp"
#include "pairnet/channel.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>

namespace pairnet::channel {

namespace {

constexpr std::string_view channel_magic = "PNCH";
constexpr std::uint8_t channel_version = 1;

void write_matrix(std::ostream& out, const CMatrix& m)
{
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            detail::write_complex64(out, m(r, c));
        }
    }
}

CMatrix read_matrix(std::istream& in, Eigen::Index rows, Eigen::Index cols, std::string_view what)
{
    CMatrix m(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c) {
        for (Eigen::Index r = 0; r < rows; ++r) {
            m(r, c) = detail::read_complex64(in, what);
        }
    }
    return m;
}

} // namespace

void write_channel_set(std::ostream& out, const ChannelSet& channels)
{
    const auto num_users = static_cast<std::uint32_t>(channels.num_users());
    const auto num_antennas = static_cast<std::uint32_t>(channels.num_antennas());
    if (channels.users.size() != num_users) {
        throw DomainError("channel set has inconsistent user count");
    }

    detail::write_magic(out, channel_magic, channel_version);
    detail::write_le(out, num_users);
    detail::write_le(out, num_antennas);
    detail::write_le(out, channels.total_power);
    detail::write_le(out, channels.noise_power);

    for (const auto& u : channels.users) detail::write_le(out, u.geometry.radial_distance);
    for (const auto& u : channels.users) detail::write_le(out, u.geometry.azimuth);
    for (const auto& u : channels.users) detail::write_le(out, u.geometry.scatter_radius);
    for (const auto& u : channels.users) detail::write_le(out, u.geometry.angular_spread);

    write_matrix(out, channels.realizations);
    for (const auto& u : channels.users) {
        write_matrix(out, u.correlation.entries);
    }
    for (const auto& u : channels.users) {
        detail::write_le(out, static_cast<std::uint32_t>(u.basis.rank()));
        for (int r = 0; r < u.basis.rank(); ++r) {
            detail::write_le(out, u.basis.values(r));
        }
        write_matrix(out, u.basis.vectors);
    }
    if (!out) {
        throw IoError("failed writing channel set");
    }
}

ChannelSet read_channel_set(std::istream& in)
{
    const std::uint8_t version = detail::read_magic(in, channel_magic);
    if (version != channel_version) {
        throw IoError(fmt::format("unsupported channel file version {}", version));
    }
    const auto num_users = detail::read_le<std::uint32_t>(in, "user count");
    const auto num_antennas = detail::read_le<std::uint32_t>(in, "antenna count");
    if (num_users == 0 || num_antennas == 0 || num_users > (1u << 20) || num_antennas > (1u << 16)) {
        throw IoError(fmt::format("implausible channel dimensions K={} M={}", num_users, num_antennas));
    }

    ChannelSet out;
    out.total_power = detail::read_le<double>(in, "total power");
    out.noise_power = detail::read_le<double>(in, "noise power");
    out.users.resize(num_users);

    for (auto& u : out.users) u.geometry.radial_distance = detail::read_le<double>(in, "radial distance");
    for (auto& u : out.users) u.geometry.azimuth = detail::read_le<double>(in, "azimuth");
    for (auto& u : out.users) u.geometry.scatter_radius = detail::read_le<double>(in, "scatter radius");
    for (auto& u : out.users) u.geometry.angular_spread = detail::read_le<double>(in, "angular spread");

    const auto m = static_cast<Eigen::Index>(num_antennas);
    out.realizations = read_matrix(in, m, static_cast<Eigen::Index>(num_users), "realizations");
    for (auto& u : out.users) {
        u.correlation.entries = read_matrix(in, m, m, "correlation matrix");
    }
    for (auto& u : out.users) {
        const auto rank = detail::read_le<std::uint32_t>(in, "rank");
        if (rank == 0 || rank > num_antennas) {
            throw IoError(fmt::format("invalid eigenbasis rank {}", rank));
        }
        u.basis.values.resize(rank);
        for (std::uint32_t r = 0; r < rank; ++r) {
            u.basis.values(r) = detail::read_le<double>(in, "eigenvalue");
        }
        u.basis.vectors = read_matrix(in, m, static_cast<Eigen::Index>(rank), "eigenvectors");
    }
    return out;
}

void save_channel_set(const std::filesystem::path& path, const ChannelSet& channels)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    write_channel_set(out, channels);
}

ChannelSet load_channel_set(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return read_channel_set(in);
}

} // namespace pairnet::channel
