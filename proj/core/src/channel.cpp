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

#include "pairnet/channel.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pairnet {

std::string format_subset(const UserSubset& subset)
{
    std::string out = "{";
    for (std::size_t i = 0; i < subset.size(); ++i) {
        if (i != 0) {
            out += ",";
        }
        out += std::to_string(subset[i]);
    }
    return out + "}";
}

double binomial(int n, int k)
{
    if (k < 0 || k > n) {
        return 0.0;
    }
    k = std::min(k, n - k);
    double result = 1.0;
    for (int i = 1; i <= k; ++i) {
        result = result * (n - k + i) / i;
    }
    return std::round(result);
}

} // namespace pairnet

namespace pairnet::channel {

namespace {

constexpr double pi = std::numbers::pi;

// Legendre polynomial P_n(x) and its derivative.
std::pair<double, double> legendre(int n, double x)
{
    double p0 = 1.0;
    double p1 = x;
    for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
    }
    return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1], n >= 2.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights)
{
    nodes.assign(static_cast<std::size_t>(n), 0.0);
    weights.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            const auto [value, slope] = legendre(n, x);
            const double dx = value / slope;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        const double slope = legendre(n, x).second;
        const double w = 2.0 / ((1.0 - x * x) * slope * slope);
        nodes[static_cast<std::size_t>(i)] = -x;
        nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        weights[static_cast<std::size_t>(i)] = w;
        weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
}

// Composite rule on [-half_width, half_width] normalized so weights sum to one.
struct AngularRule {
    std::vector<double> offsets;
    std::vector<double> weights;
};

AngularRule angular_rule(double half_width, int total_points)
{
    constexpr int max_order = 16;
    const int panels = (total_points + max_order - 1) / max_order;
    const int order = total_points / panels;

    std::vector<double> x;
    std::vector<double> w;
    gauss_legendre(order, x, w);

    AngularRule rule;
    rule.offsets.reserve(static_cast<std::size_t>(panels * order));
    rule.weights.reserve(static_cast<std::size_t>(panels * order));
    const double panel_width = 2.0 * half_width / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = -half_width + (p + 0.5) * panel_width;
        for (int i = 0; i < order; ++i) {
            rule.offsets.push_back(mid + 0.5 * panel_width * x[i]);
            // panel weight / (2 * half_width)
            rule.weights.push_back(0.5 * w[i] / panels);
        }
    }
    return rule;
}

} // namespace

AntennaArray AntennaArray::ula(int num_antennas, double wavelength)
{
    if (num_antennas < 1) {
        throw DomainError("antenna array needs at least one element");
    }
    AntennaArray array;
    array.wavelength = wavelength;
    array.positions.reserve(static_cast<std::size_t>(num_antennas));
    for (int m = 0; m < num_antennas; ++m) {
        array.positions.emplace_back(0.5 * wavelength * m, 0.0);
    }
    array.validate();
    return array;
}

void AntennaArray::validate() const
{
    if (positions.empty()) {
        throw DomainError("antenna array needs at least one element");
    }
    if (!(wavelength > 0.0) || !std::isfinite(wavelength)) {
        throw DomainError(fmt::format("wavelength must be positive, got {}", wavelength));
    }
    for (std::size_t m = 0; m < positions.size(); ++m) {
        if (!positions[m].allFinite()) {
            throw DomainError(fmt::format("antenna {} has a non-finite position", m));
        }
        for (std::size_t p = m + 1; p < positions.size(); ++p) {
            if (positions[m] == positions[p]) {
                throw DomainError(fmt::format("antennas {} and {} coincide", m, p));
            }
        }
    }
}

UserGeometry UserGeometry::make(double radial_distance, double azimuth, double scatter_radius)
{
    UserGeometry geom;
    geom.radial_distance = radial_distance;
    geom.azimuth = azimuth;
    geom.scatter_radius = scatter_radius;
    geom.angular_spread = std::atan(scatter_radius / radial_distance);
    geom.validate();
    return geom;
}

void UserGeometry::validate() const
{
    if (!(radial_distance > 0.0) || !std::isfinite(radial_distance)) {
        throw DomainError(fmt::format("radial distance must be positive, got {}", radial_distance));
    }
    if (!(scatter_radius > 0.0) || !std::isfinite(scatter_radius)) {
        throw DomainError(fmt::format("scatter radius must be positive, got {}", scatter_radius));
    }
    if (!std::isfinite(azimuth)) {
        throw DomainError("azimuth must be finite");
    }
    if (!(angular_spread > 0.0 && angular_spread < pi / 2)) {
        throw DomainError(fmt::format("angular spread {} outside (0, pi/2)", angular_spread));
    }
    if (std::abs(angular_spread - std::atan(scatter_radius / radial_distance)) > 1e-12) {
        throw DomainError("angular spread inconsistent with atan(scatter_radius / radial_distance)");
    }
}

CMatrix ChannelSet::rows(const UserSubset& subset) const
{
    CMatrix out(static_cast<Eigen::Index>(subset.size()), realizations.rows());
    for (std::size_t i = 0; i < subset.size(); ++i) {
        out.row(static_cast<Eigen::Index>(i)) = realizations.col(subset[i]).transpose();
    }
    return out;
}

ChannelSet ChannelSet::with_power(double power) const
{
    ChannelSet copy = *this;
    copy.total_power = power;
    return copy;
}

CorrelationMatrix correlation_matrix(const UserGeometry& geom,
                                     const AntennaArray& array,
                                     int quadrature_points)
{
    if (quadrature_points < 2) {
        throw DomainError(fmt::format("quadrature needs at least 2 points, got {}", quadrature_points));
    }
    geom.validate();
    array.validate();

    const int num_antennas = array.size();
    const AngularRule rule = angular_rule(geom.angular_spread, quadrature_points);
    const double wavenumber = 2.0 * pi / array.wavelength;

    // cos/sin of the arrival angles do not depend on the antenna pair
    std::vector<double> cos_arrival(rule.offsets.size());
    std::vector<double> sin_arrival(rule.offsets.size());
    for (std::size_t q = 0; q < rule.offsets.size(); ++q) {
        cos_arrival[q] = std::cos(rule.offsets[q] + geom.azimuth);
        sin_arrival[q] = std::sin(rule.offsets[q] + geom.azimuth);
    }

    // regular arrays repeat displacement vectors; integrate each one once
    std::vector<std::pair<Eigen::Vector2d, cd>> cache;
    const double match_tol = 1e-12 * array.wavelength;

    auto integrate = [&](const Eigen::Vector2d& d) {
        for (const auto& [key, value] : cache) {
            if ((key - d).cwiseAbs().maxCoeff() <= match_tol) {
                return value;
            }
        }
        double re = 0.0;
        double im = 0.0;
        for (std::size_t q = 0; q < rule.offsets.size(); ++q) {
            const double phase = -wavenumber * (cos_arrival[q] * d.x() + sin_arrival[q] * d.y());
            re += rule.weights[q] * std::cos(phase);
            im += rule.weights[q] * std::sin(phase);
        }
        const cd value(re, im);
        cache.emplace_back(d, value);
        return value;
    };

    CorrelationMatrix out;
    out.entries = CMatrix::Identity(num_antennas, num_antennas);
    for (int m = 0; m < num_antennas; ++m) {
        for (int p = m + 1; p < num_antennas; ++p) {
            const cd value = integrate(array.positions[m] - array.positions[p]);
            if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
                throw DomainError("correlation integral produced a non-finite value");
            }
            out.entries(m, p) = value;
            out.entries(p, m) = std::conj(value);
        }
    }
    return out;
}

EigenBasis kl_decompose(const CorrelationMatrix& correlation, double rank_threshold)
{
    if (!(rank_threshold > 0.0 && rank_threshold < 1.0)) {
        throw DomainError(fmt::format("rank threshold must lie in (0, 1), got {}", rank_threshold));
    }
    if (!correlation.entries.allFinite()) {
        throw NumericalError("correlation matrix contains non-finite entries");
    }

    Eigen::SelfAdjointEigenSolver<CMatrix> solver(correlation.entries);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("eigensolver failed on an ill-conditioned correlation matrix");
    }

    const RVector& ascending = solver.eigenvalues();
    const Eigen::Index n = ascending.size();
    const double largest = ascending(n - 1);
    if (!(largest > 0.0)) {
        throw NumericalError("correlation matrix has no positive eigenvalue");
    }

    int rank = 0;
    for (Eigen::Index i = n - 1; i >= 0 && ascending(i) > rank_threshold * largest; --i) {
        ++rank;
    }

    EigenBasis basis;
    basis.values.resize(rank);
    basis.vectors.resize(correlation.entries.rows(), rank);
    for (int r = 0; r < rank; ++r) {
        basis.values(r) = ascending(n - 1 - r);
        basis.vectors.col(r) = solver.eigenvectors().col(n - 1 - r);
    }
    return basis;
}

CVector shape_channel(const EigenBasis& basis, const CVector& innovation)
{
    return basis.vectors * (basis.values.cwiseSqrt().cast<cd>().asDiagonal() * innovation);
}

CVector sample_channel(const EigenBasis& basis, Rng& rng)
{
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    CVector z(basis.rank());
    for (int r = 0; r < basis.rank(); ++r) {
        const double re = normal(rng);
        const double im = normal(rng);
        z(r) = cd(re, im);
    }
    return shape_channel(basis, z);
}

ChannelSet generate_network(int num_users,
                            double cell_radius,
                            double ring_radius,
                            const AntennaArray& array,
                            double total_power,
                            Rng& rng,
                            const NetworkOptions& options)
{
    if (num_users < 2) {
        throw DomainError(fmt::format("network needs at least 2 users, got {}", num_users));
    }
    if (!(cell_radius > 0.0) || !(ring_radius > 0.0)) {
        throw DomainError("cell and ring radii must be positive");
    }
    if (!(total_power > 0.0)) {
        throw DomainError(fmt::format("total power must be positive, got {}", total_power));
    }
    array.validate();

    const std::uint64_t base_seed = rng();

    ChannelSet out;
    out.total_power = total_power;
    out.noise_power = 1.0;
    out.users.resize(static_cast<std::size_t>(num_users));
    out.realizations.resize(array.size(), num_users);

    for (int k = 0; k < num_users; ++k) {
        Rng user_rng(derive_seed(base_seed, static_cast<std::uint64_t>(k)));
        std::uniform_real_distribution<double> azimuth_dist(0.0, 2.0 * pi);
        std::uniform_real_distribution<double> radius_dist(0.1 * cell_radius, cell_radius);
        const double azimuth = azimuth_dist(user_rng);
        const double radius = radius_dist(user_rng);

        UserChannel& user = out.users[static_cast<std::size_t>(k)];
        user.geometry = UserGeometry::make(radius, azimuth, ring_radius);
        user.correlation = correlation_matrix(user.geometry, array, options.quadrature_points);
        user.basis = kl_decompose(user.correlation, options.rank_threshold);
        out.realizations.col(k) = sample_channel(user.basis, user_rng);
    }
    return out;
}

} // namespace pairnet::channel
