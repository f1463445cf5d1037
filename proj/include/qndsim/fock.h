// Copyright 2026 The qndsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QNDSIM_FOCK_H
#define QNDSIM_FOCK_H

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace qnd {

using cplx = std::complex<double>;

/// Amplitude vector over the photon-number basis |0>..|dim-1>.
///
/// `leakage` is the probability mass that the construction could not place
/// inside the truncated basis. States are never renormalized to hide it, so
/// `norm_squared() + leakage == 1` for states built from closed-form amplitudes.
struct FockVector {
    Eigen::VectorXcd amps;
    double leakage = 0.0;

    FockVector() = default;
    explicit FockVector(Eigen::VectorXcd amplitudes, double declared_leakage = 0.0);

    static FockVector basis(std::size_t n, std::size_t dim);
    static FockVector vacuum(std::size_t dim) {
        return basis(0, dim);
    }

    std::size_t dim() const {
        return static_cast<std::size_t>(amps.size());
    }
    double norm_squared() const {
        return amps.squaredNorm();
    }
    /// Probability held by the top `levels` basis states.
    double edge_mass(std::size_t levels) const;
};

/// Dense operator in the truncated basis. When `hermitian` is set the
/// constructor checks the conjugate-transpose residual against 1e-12.
struct OperatorMatrix {
    Eigen::MatrixXcd entries;
    bool hermitian = false;

    OperatorMatrix() = default;
    OperatorMatrix(Eigen::MatrixXcd m, bool is_hermitian);

    std::size_t dim() const {
        return static_cast<std::size_t>(entries.rows());
    }
};

struct QuadratureOperators {
    OperatorMatrix x;
    OperatorMatrix y;
    OperatorMatrix n;
    OperatorMatrix a;
};

/// Quadrature operators with x = (a + a^dag)/2 and y = (a - a^dag)/(2i), so the
/// vacuum has <x^2> = <y^2> = 1/4.
QuadratureOperators build_operators(std::size_t dim);

/// Max |(M)_{ij}| over i, j < dim - exclude.
double interior_max_abs(const Eigen::MatrixXcd &m, std::size_t exclude);

/// Points and trapezoid weights for position-space integrals.
struct QuadratureGrid {
    std::vector<double> points;
    std::vector<double> weights;

    /// Uniform grid on [-half_span, half_span] with spacing at most `max_step`.
    static QuadratureGrid uniform(double half_span, double max_step);
    /// Reference grid for `dim` levels: L = sqrt(dim) + 4, spacing 0.02.
    static QuadratureGrid for_dimension(std::size_t dim);

    std::size_t size() const {
        return points.size();
    }
    double integrate(const Eigen::VectorXd &values) const;
};

/// Half-width the position grid must reach to resolve level dim-1.
double required_grid_half_span(std::size_t dim);

/// Row n holds psi_n(x) = 2^{1/4} phi_n(sqrt(2) x) at each grid point, where
/// psi_0(x) = (2/pi)^{1/4} exp(-x^2).
Eigen::MatrixXd hermite_wavefunctions(const QuadratureGrid &grid, std::size_t dim);

/// psi_0..psi_{dim-1} at a single point; no range precondition.
Eigen::VectorXd hermite_wavefunctions_at(double x, std::size_t dim);

/// Position-space wavefunction of `state` on the grid.
Eigen::VectorXcd to_position(const FockVector &state, const QuadratureGrid &grid);
/// Projection of a gridded wavefunction onto the first `dim` levels.
FockVector from_position(const Eigen::VectorXcd &wave, const QuadratureGrid &grid, std::size_t dim);

cplx expectation(const FockVector &state, const OperatorMatrix &op);

inline constexpr double kDefaultMaxLeakage = 1e-8;

FockVector coherent_state(cplx alpha, std::size_t dim, double max_leakage = kDefaultMaxLeakage);
/// S(r)|0> with S(r) = exp(r (a^2 - a^dag^2)/2); r > 0 squeezes x to
/// <x^2> = exp(-2r)/4.
FockVector squeezed_vacuum(double r, std::size_t dim, double max_leakage = kDefaultMaxLeakage);

}  // namespace qnd

#endif
