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

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace pairnet {

using cd = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Seeded random stream used everywhere randomness is consumed.
using Rng = std::mt19937_64;

/// Indices of users (columns of the channel matrix) forming a candidate group.
using UserSubset = std::vector<int>;

/// Deterministic sub-stream seed derived from a master seed (splitmix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream)
{
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Failure categories; the CLI maps them onto exit codes.
enum class ErrorCategory {
    domain = 2,
    config = 3,
    numerical = 4,
    io = 5,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

/// Argument outside an operation's documented domain.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(ErrorCategory::domain, what) {}
};

/// Eigensolver failure, non-finite values and similar.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(ErrorCategory::numerical, what) {}
};

/// A user group whose channel matrix cannot be zero-forced.
class SingularityError : public NumericalError {
public:
    SingularityError(UserSubset subset, const std::string& what)
        : NumericalError(what), subset_(std::move(subset)) {}

    const UserSubset& subset() const noexcept { return subset_; }

private:
    UserSubset subset_;
};

/// Training produced a non-finite loss.
class DivergenceError : public NumericalError {
public:
    DivergenceError(int epoch, const std::string& what) : NumericalError(what), epoch_(epoch) {}

    int epoch() const noexcept { return epoch_; }

private:
    int epoch_;
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorCategory::io, what) {}
};

/// Bad configuration value; `field` is the dotted key path.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& what)
        : Error(ErrorCategory::config, field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

std::string format_subset(const UserSubset& subset);

double binomial(int n, int k);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

} // namespace pairnet
