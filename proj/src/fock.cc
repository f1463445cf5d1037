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

#include "qndsim/fock.h"

#include <cmath>
#include <numbers>
#include <sstream>

#include "qndsim/error.h"

namespace qnd {

namespace {

constexpr double kHermitianTolerance = 1e-12;

void require_dim(std::size_t dim, std::size_t minimum = 2) {
    if (dim < minimum) {
        std::ostringstream os;
        os << "truncation dimension " << dim << " is below the minimum " << minimum;
        throw Error(ErrorKind::InvalidDimension, os.str());
    }
}

}  // namespace

FockVector::FockVector(Eigen::VectorXcd amplitudes, double declared_leakage)
    : amps(std::move(amplitudes)), leakage(declared_leakage) {
    require_dim(dim());
}

FockVector FockVector::basis(std::size_t n, std::size_t dim) {
    require_dim(dim);
    if (n >= dim) {
        std::ostringstream os;
        os << "basis state |" << n << "> does not fit in dimension " << dim;
        throw Error(ErrorKind::InvalidDimension, os.str());
    }
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
    v[static_cast<Eigen::Index>(n)] = 1.0;
    return FockVector(std::move(v));
}

double FockVector::edge_mass(std::size_t levels) const {
    levels = std::min(levels, dim());
    return amps.tail(static_cast<Eigen::Index>(levels)).squaredNorm();
}

OperatorMatrix::OperatorMatrix(Eigen::MatrixXcd m, bool is_hermitian) : entries(std::move(m)), hermitian(is_hermitian) {
    if (entries.rows() != entries.cols()) {
        throw Error(ErrorKind::DimensionMismatch, "operator matrix must be square");
    }
    if (hermitian) {
        double residual = (entries - entries.adjoint()).cwiseAbs().maxCoeff();
        if (residual > kHermitianTolerance) {
            std::ostringstream os;
            os << "matrix flagged hermitian has residual " << residual;
            throw Error(ErrorKind::InvalidArgument, os.str());
        }
    }
}

QuadratureOperators build_operators(std::size_t dim) {
    require_dim(dim);
    const auto d = static_cast<Eigen::Index>(dim);
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(d, d);
    for (Eigen::Index k = 1; k < d; ++k) {
        a(k - 1, k) = std::sqrt(static_cast<double>(k));
    }
    Eigen::MatrixXcd ad = a.adjoint();
    Eigen::MatrixXcd x = 0.5 * (a + ad);
    Eigen::MatrixXcd y = (a - ad) / cplx(0.0, 2.0);
    Eigen::MatrixXcd n = Eigen::MatrixXcd::Zero(d, d);
    for (Eigen::Index k = 0; k < d; ++k) {
        n(k, k) = static_cast<double>(k);
    }
    return QuadratureOperators{
        OperatorMatrix(std::move(x), true),
        OperatorMatrix(std::move(y), true),
        OperatorMatrix(std::move(n), true),
        OperatorMatrix(std::move(a), false),
    };
}

double interior_max_abs(const Eigen::MatrixXcd &m, std::size_t exclude) {
    const auto keep = m.rows() - static_cast<Eigen::Index>(exclude);
    if (keep <= 0) {
        return 0.0;
    }
    return m.topLeftCorner(keep, keep).cwiseAbs().maxCoeff();
}

QuadratureGrid QuadratureGrid::uniform(double half_span, double max_step) {
    if (!(half_span > 0.0) || !(max_step > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "grid half-span and step must be positive");
    }
    const auto intervals = static_cast<std::size_t>(std::ceil(2.0 * half_span / max_step));
    const double h = 2.0 * half_span / static_cast<double>(intervals);
    QuadratureGrid grid;
    grid.points.resize(intervals + 1);
    grid.weights.assign(intervals + 1, h);
    for (std::size_t i = 0; i <= intervals; ++i) {
        grid.points[i] = -half_span + h * static_cast<double>(i);
    }
    grid.points.back() = half_span;
    grid.weights.front() = 0.5 * h;
    grid.weights.back() = 0.5 * h;
    return grid;
}

QuadratureGrid QuadratureGrid::for_dimension(std::size_t dim) {
    return uniform(required_grid_half_span(dim), 0.02);
}

double QuadratureGrid::integrate(const Eigen::VectorXd &values) const {
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        total += weights[i] * values[static_cast<Eigen::Index>(i)];
    }
    return total;
}

double required_grid_half_span(std::size_t dim) {
    return std::sqrt(static_cast<double>(dim)) + 4.0;
}

Eigen::VectorXd hermite_wavefunctions_at(double x, std::size_t dim) {
    Eigen::VectorXd psi(static_cast<Eigen::Index>(dim));
    // Normalized three-term recurrence for the unit oscillator, then rescaled.
    const double q = std::numbers::sqrt2 * x;
    const double scale = std::pow(2.0, 0.25);
    double prev = 0.0;
    double cur = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * q * q);
    psi[0] = scale * cur;
    for (std::size_t n = 1; n < dim; ++n) {
        const double nd = static_cast<double>(n);
        const double next = std::sqrt(2.0 / nd) * q * cur - std::sqrt((nd - 1.0) / nd) * prev;
        prev = cur;
        cur = next;
        psi[static_cast<Eigen::Index>(n)] = scale * cur;
    }
    return psi;
}

Eigen::MatrixXd hermite_wavefunctions(const QuadratureGrid &grid, std::size_t dim) {
    require_dim(dim, 1);
    const double need = required_grid_half_span(dim);
    if (grid.points.empty() || grid.points.front() > -need + 1e-9 * need || grid.points.back() < need - 1e-9 * need) {
        std::ostringstream os;
        os << "grid must span at least [-" << need << ", " << need << "] to resolve " << dim << " levels";
        throw Error(ErrorKind::Range, os.str());
    }
    Eigen::MatrixXd out(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out.col(static_cast<Eigen::Index>(i)) = hermite_wavefunctions_at(grid.points[i], dim);
    }
    return out;
}

Eigen::VectorXcd to_position(const FockVector &state, const QuadratureGrid &grid) {
    const Eigen::MatrixXd psi = hermite_wavefunctions(grid, state.dim());
    return psi.transpose().cast<cplx>() * state.amps;
}

FockVector from_position(const Eigen::VectorXcd &wave, const QuadratureGrid &grid, std::size_t dim) {
    if (static_cast<std::size_t>(wave.size()) != grid.size()) {
        throw Error(ErrorKind::DimensionMismatch, "wavefunction length differs from grid size");
    }
    const Eigen::MatrixXd psi = hermite_wavefunctions(grid, dim);
    const Eigen::Map<const Eigen::VectorXd> w(grid.weights.data(), static_cast<Eigen::Index>(grid.size()));
    Eigen::VectorXcd weighted = wave.cwiseProduct(w.cast<cplx>());
    return FockVector(psi.cast<cplx>() * weighted);
}

cplx expectation(const FockVector &state, const OperatorMatrix &op) {
    if (state.dim() != op.dim()) {
        std::ostringstream os;
        os << "state dimension " << state.dim() << " differs from operator dimension " << op.dim();
        throw Error(ErrorKind::DimensionMismatch, os.str());
    }
    cplx value = state.amps.dot(op.entries * state.amps);
    if (op.hermitian) {
        value.imag(0.0);
    }
    return value;
}

namespace {

[[noreturn]] void throw_leakage(const char *what, double leakage, double max_leakage, std::size_t dim,
                                std::size_t suggested) {
    std::ostringstream os;
    os << what << " leaks " << leakage << " (> " << max_leakage << ") past dimension " << dim
       << "; use dim >= " << suggested;
    throw Error(ErrorKind::Truncation, os.str());
}

}  // namespace

FockVector coherent_state(cplx alpha, std::size_t dim, double max_leakage) {
    require_dim(dim);
    const auto d = static_cast<Eigen::Index>(dim);
    Eigen::VectorXcd amps(d);
    amps[0] = std::exp(-0.5 * std::norm(alpha));
    for (Eigen::Index n = 1; n < d; ++n) {
        amps[n] = amps[n - 1] * alpha / std::sqrt(static_cast<double>(n));
    }
    const double leakage = std::max(0.0, 1.0 - amps.squaredNorm());
    if (leakage > max_leakage) {
        // Walk the Poisson tail until the remaining mass fits the budget.
        const double mean = std::norm(alpha);
        double log_p = -mean + static_cast<double>(dim) * std::log(mean) - std::lgamma(static_cast<double>(dim) + 1.0);
        double tail = leakage;
        std::size_t n = dim;
        while (tail > max_leakage && n < 100000) {
            tail -= std::exp(log_p);
            ++n;
            log_p += std::log(mean) - std::log(static_cast<double>(n));
        }
        throw_leakage("coherent state", leakage, max_leakage, dim, n);
    }
    return FockVector(std::move(amps), leakage);
}

FockVector squeezed_vacuum(double r, std::size_t dim, double max_leakage) {
    require_dim(dim);
    const auto d = static_cast<Eigen::Index>(dim);
    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(d);
    const double t = std::tanh(r);
    double c = 1.0 / std::sqrt(std::cosh(r));
    amps[0] = c;
    for (Eigen::Index k = 2; k < d; k += 2) {
        const double m = static_cast<double>(k / 2);
        c *= -t * std::sqrt((2.0 * m - 1.0) / (2.0 * m));
        amps[k] = c;
    }
    const double leakage = std::max(0.0, 1.0 - amps.squaredNorm());
    if (leakage > max_leakage) {
        double tail = leakage;
        double cc = c;
        std::size_t k = (dim - 1) - ((dim - 1) % 2);
        while (tail > max_leakage && k < 100000) {
            k += 2;
            const double m = static_cast<double>(k / 2);
            cc *= -t * std::sqrt((2.0 * m - 1.0) / (2.0 * m));
            tail -= cc * cc;
        }
        throw_leakage("squeezed vacuum", leakage, max_leakage, dim, k + 1);
    }
    return FockVector(std::move(amps), leakage);
}

}  // namespace qnd
