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

#pragma once

// Little-endian scalar packing shared by the replay and model file formats.

#include "pairnet/common.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <istream>
#include <ostream>
#include <string_view>

namespace pairnet::detail {

template <typename T>
void write_le(std::ostream& out, T value)
{
    static_assert(std::is_trivially_copyable_v<T>);
    std::array<char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        std::reverse(bytes.begin(), bytes.end());
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

template <typename T>
T read_le(std::istream& in, std::string_view what)
{
    std::array<char, sizeof(T)> bytes;
    if (!in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()))) {
        throw IoError("truncated file while reading " + std::string(what));
    }
    if constexpr (std::endian::native == std::endian::big) {
        std::reverse(bytes.begin(), bytes.end());
    }
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
}

inline void write_magic(std::ostream& out, std::string_view magic, std::uint8_t version)
{
    out.write(magic.data(), static_cast<std::streamsize>(magic.size()));
    write_le<std::uint8_t>(out, version);
}

inline std::uint8_t read_magic(std::istream& in, std::string_view magic)
{
    std::string got(magic.size(), '\0');
    if (!in.read(got.data(), static_cast<std::streamsize>(got.size())) || got != magic) {
        throw IoError("bad magic bytes, expected \"" + std::string(magic) + "\"");
    }
    return read_le<std::uint8_t>(in, "version byte");
}

inline void write_complex64(std::ostream& out, const cd& value)
{
    write_le<float>(out, static_cast<float>(value.real()));
    write_le<float>(out, static_cast<float>(value.imag()));
}

inline cd read_complex64(std::istream& in, std::string_view what)
{
    const float re = read_le<float>(in, what);
    const float im = read_le<float>(in, what);
    return {re, im};
}

} // namespace pairnet::detail
