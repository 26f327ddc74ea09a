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
#include "pairnet/gnn.hpp"

#include <fmt/format.h>

#include <fstream>

namespace pairnet::gnn {

namespace {
constexpr std::string_view model_magic = "PNNW";
constexpr std::uint8_t model_version = 1;
} // namespace

void write_params(std::ostream& out, const GnnParams& params)
{
    detail::write_magic(out, model_magic, model_version);
    detail::write_le(out, static_cast<std::uint32_t>(params.depth()));
    detail::write_le(out, static_cast<std::uint32_t>(params.width()));
    const RVector flat = params.flatten();
    for (Eigen::Index i = 0; i < flat.size(); ++i) {
        detail::write_le(out, flat(i));
    }
    if (!out) {
        throw IoError("failed writing model parameters");
    }
}

GnnParams read_params(std::istream& in)
{
    const std::uint8_t version = detail::read_magic(in, model_magic);
    if (version != model_version) {
        throw IoError(fmt::format("unsupported model file version {}", version));
    }
    const auto depth = detail::read_le<std::uint32_t>(in, "depth");
    const auto width = detail::read_le<std::uint32_t>(in, "width");
    if (depth > 1024 || width == 0 || width > 4096) {
        throw IoError(fmt::format("implausible model shape depth={} width={}", depth, width));
    }
    GnnParams params = GnnParams::zeros(static_cast<int>(depth), static_cast<int>(width));
    RVector flat(static_cast<Eigen::Index>(params.parameter_count()));
    for (Eigen::Index i = 0; i < flat.size(); ++i) {
        flat(i) = detail::read_le<double>(in, "parameters");
    }
    if (in.peek() != std::char_traits<char>::eof()) {
        throw IoError("trailing bytes after model parameters");
    }
    params.assign(flat);
    return params;
}

void save_params(const std::filesystem::path& path, const GnnParams& params)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    write_params(out, params);
}

GnnParams load_params(const std::filesystem::path& path,
                      std::optional<int> expected_depth,
                      std::optional<int> expected_width)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    GnnParams params = read_params(in);
    if (expected_depth && params.depth() != *expected_depth) {
        throw IoError(fmt::format("{}: model has {} blocks, configuration expects {}",
                                  path.string(), params.depth(), *expected_depth));
    }
    if (expected_width && params.width() != *expected_width) {
        throw IoError(fmt::format("{}: model width {} does not match configured width {}",
                                  path.string(), params.width(), *expected_width));
    }
    return params;
}

} // namespace pairnet::gnn
