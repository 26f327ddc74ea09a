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

#include "pairnet/common.hpp"

#include <filesystem>
#include <iosfwd>

// One-ring spatial correlation model for a single-cell MU-MIMO downlink with an
// M-antenna base station and single-antenna users.
namespace pairnet::channel {

/// Base-station antenna positions in the horizontal plane (meters).
struct AntennaArray {
    std::vector<Eigen::Vector2d> positions;
    double wavelength = 0.1;

    int size() const { return static_cast<int>(positions.size()); }

    /// Uniform linear array along the x axis with half-wavelength spacing.
    static AntennaArray ula(int num_antennas, double wavelength = 0.1);

    /// Throws DomainError when empty, non-positive wavelength or coincident elements.
    void validate() const;
};

/// User position relative to the base station and the radius of its scattering ring.
struct UserGeometry {
    double radial_distance = 0.0;
    double azimuth = 0.0;
    double scatter_radius = 0.0;
    double angular_spread = 0.0;

    /// angular_spread = atan(scatter_radius / radial_distance).
    static UserGeometry make(double radial_distance, double azimuth, double scatter_radius);

    void validate() const;
};

/// Hermitian, PSD, unit-diagonal M x M spatial correlation matrix.
struct CorrelationMatrix {
    CMatrix entries;
};

/// Dominant eigenspace of a correlation matrix, eigenvalues in descending order.
struct EigenBasis {
    CMatrix vectors;
    RVector values;

    int rank() const { return static_cast<int>(values.size()); }
};

struct UserChannel {
    UserGeometry geometry;
    CorrelationMatrix correlation;
    EigenBasis basis;
};

/// A drawn network: per-user statistics plus one realization per user.
///
/// Column k of `realizations` is h_k. Row-vector products h_i w_j in the
/// precoding code use the plain transpose of that column.
struct ChannelSet {
    std::vector<UserChannel> users;
    CMatrix realizations;
    double total_power = 1.0;
    double noise_power = 1.0;

    int num_users() const { return static_cast<int>(realizations.cols()); }
    int num_antennas() const { return static_cast<int>(realizations.rows()); }

    /// Rows h_i^T for the given users, i.e. the k x M matrix H(subset).
    CMatrix rows(const UserSubset& subset) const;

    /// Copy with a different transmit power budget; channels are unchanged.
    ChannelSet with_power(double total_power) const;
};

inline constexpr int default_quadrature_points = 256;
inline constexpr double default_rank_threshold = 1e-6;

/// Correlation integral over the scattering ring evaluated with composite
/// Gauss-Legendre quadrature using `quadrature_points` nodes in total.
CorrelationMatrix correlation_matrix(const UserGeometry& geom,
                                     const AntennaArray& array,
                                     int quadrature_points = default_quadrature_points);

/// Hermitian eigendecomposition keeping eigenvalues above rank_threshold * max.
EigenBasis kl_decompose(const CorrelationMatrix& correlation,
                        double rank_threshold = default_rank_threshold);

/// h = U diag(sqrt(values)) z with z ~ CN(0, I_r).
CVector sample_channel(const EigenBasis& basis, Rng& rng);

/// Same map with an explicit innovation vector z.
CVector shape_channel(const EigenBasis& basis, const CVector& innovation);

struct NetworkOptions {
    int quadrature_points = default_quadrature_points;
    double rank_threshold = default_rank_threshold;
};

/// Drops K users uniformly in azimuth and in radius on [0.1 R, R], each
/// surrounded by a scattering ring of radius `ring_radius`. Each user draws
/// from its own sub-stream of a seed taken from `rng`.
ChannelSet generate_network(int num_users,
                            double cell_radius,
                            double ring_radius,
                            const AntennaArray& array,
                            double total_power,
                            Rng& rng,
                            const NetworkOptions& options = {});

// Binary replay format (all little endian):
//   "PNCH" u8 version=1 u32 K u32 M f64 total_power f64 noise_power
//   f64[K] radial_distance, f64[K] azimuth, f64[K] scatter_radius, f64[K] angular_spread
//   complex64[M*K] realizations, column major
//   K times: complex64[M*M] correlation, column major
//   K times: u32 rank, f64[rank] eigenvalues, complex64[M*rank] eigenvectors, column major
void write_channel_set(std::ostream& out, const ChannelSet& channels);
ChannelSet read_channel_set(std::istream& in);
void save_channel_set(const std::filesystem::path& path, const ChannelSet& channels);
ChannelSet load_channel_set(const std::filesystem::path& path);

} // namespace pairnet::channel
