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

#include "qndsim/measurement.h"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include "qndsim/error.h"
#include "qndsim/quadrature.h"

namespace qnd {

namespace {

constexpr double kEdgeAmplitudeThreshold = 1e-6;
constexpr double kCorrelationRelTol = 1e-8;
constexpr double kCorrelationAgreement = 1e-7;
constexpr double kCorrelationEdgeLeakage = 1e-8;
constexpr double kOutcomeSigmas = 8.0;

// Integration window for the outcome density of `state`: mean +- 8 sigma where
// sigma^2 = Var(x) + dx^2.
std::pair<double, double> outcome_window(const FockVector &state, const Resolution &res) {
    const auto ops = build_operators(state.dim());
    const double norm = state.norm_squared();
    const double mean = expectation(state, ops.x).real() / norm;
    const double second = expectation(state, OperatorMatrix(ops.x.entries * ops.x.entries, true)).real() / norm;
    const double sigma = std::sqrt(std::max(second - mean * mean, 0.0) + res.dx() * res.dx());
    return {mean - kOutcomeSigmas * sigma, mean + kOutcomeSigmas * sigma};
}

}  // namespace

QuadratureEigensystem::QuadratureEigensystem(std::size_t dim) {
    if (dim < 2) {
        throw Error(ErrorKind::InvalidDimension, "eigensystem needs dim >= 2");
    }
    const auto d = static_cast<Eigen::Index>(dim);
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index k = 1; k < d; ++k) {
        x(k - 1, k) = x(k, k - 1) = 0.5 * std::sqrt(static_cast<double>(k));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(x);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorKind::Eigendecomposition, "truncated x matrix did not diagonalize");
    }
    values_ = solver.eigenvalues();
    vectors_ = solver.eigenvectors();
}

std::shared_ptr<const QuadratureEigensystem> QuadratureEigensystem::cached(std::size_t dim) {
    static std::mutex mutex;
    static std::map<std::size_t, std::shared_ptr<const QuadratureEigensystem>> cache;
    std::lock_guard lock(mutex);
    auto &slot = cache[dim];
    if (!slot) {
        slot = std::make_shared<const QuadratureEigensystem>(dim);
    }
    return slot;
}

Eigen::VectorXd measurement_kernel(const Resolution &res, double x_m, const Eigen::VectorXd &eigenvalues) {
    const double d2 = res.dx() * res.dx();
    const double prefactor = std::pow(2.0 * std::numbers::pi * d2, -0.25);
    return eigenvalues.unaryExpr([&](double lambda) {
        const double u = x_m - lambda;
        return prefactor * std::exp(-u * u / (4.0 * d2));
    });
}

MeasurementOperator build_measurement_operator(const Resolution &res, double x_m, std::size_t dim) {
    if (dim < kMinMeasurementDim) {
        std::ostringstream os;
        os << "measurement operator needs dim >= " << kMinMeasurementDim << ", got " << dim;
        throw Error(ErrorKind::InvalidDimension, os.str());
    }
    const auto eig = QuadratureEigensystem::cached(dim);
    const Eigen::VectorXd g = measurement_kernel(res, x_m, eig->values());
    const Eigen::MatrixXd &v = eig->vectors();
    Eigen::MatrixXd p = v * g.asDiagonal() * v.transpose();
    // Symmetrize away rounding so the hermitian check is about the math.
    p = 0.5 * (p + p.transpose()).eval();
    return MeasurementOperator{
        res,
        x_m,
        OperatorMatrix(p.cast<cplx>(), true),
        std::abs(x_m) > eig->max_abs_value(),
    };
}

MeasurementOutcome apply_measurement(const FockVector &state, const MeasurementOperator &mop) {
    if (state.dim() != mop.matrix.dim()) {
        throw Error(ErrorKind::DimensionMismatch, "state and measurement operator dimensions differ");
    }
    Eigen::VectorXcd w = mop.matrix.entries * state.amps;
    const double density = w.squaredNorm();
    if (!(density > 1e-300)) {
        std::ostringstream os;
        os << "outcome x_m = " << mop.x_m << " has vanishing density " << density;
        throw Error(ErrorKind::UnnormalizableOutcome, os.str());
    }
    w /= std::sqrt(density);
    return MeasurementOutcome{FockVector(std::move(w)), density};
}

FockMeter::FockMeter(const FockVector &state) : eig_(QuadratureEigensystem::cached(state.dim())) {
    if (state.dim() < kMinMeasurementDim) {
        std::ostringstream os;
        os << "measurement needs dim >= " << kMinMeasurementDim << ", got " << state.dim();
        throw Error(ErrorKind::InvalidDimension, os.str());
    }
    rotated_ = eig_->vectors().transpose().cast<cplx>() * state.amps;
}

Eigen::VectorXcd FockMeter::unnormalized(const Resolution &res, double x_m) const {
    const Eigen::VectorXd g = measurement_kernel(res, x_m, eig_->values());
    return eig_->vectors().cast<cplx>() * g.cast<cplx>().cwiseProduct(rotated_);
}

double FockMeter::density(const Resolution &res, double x_m) const {
    // V is orthogonal, so the norm can be taken in the eigenbasis.
    const Eigen::VectorXd g = measurement_kernel(res, x_m, eig_->values());
    return (g.cast<cplx>().cwiseProduct(rotated_)).squaredNorm();
}

double FockMeter::zero_photon_density(const Resolution &res, double x_m) const {
    const Eigen::VectorXd g = measurement_kernel(res, x_m, eig_->values());
    const cplx amp = eig_->vectors().row(0).cast<cplx>().dot(g.cast<cplx>().cwiseProduct(rotated_));
    return std::norm(amp);
}

MeasurementOutcome FockMeter::measure(const Resolution &res, double x_m) const {
    Eigen::VectorXcd w = unnormalized(res, x_m);
    const double density = w.squaredNorm();
    if (!(density > 1e-300)) {
        std::ostringstream os;
        os << "outcome x_m = " << x_m << " has vanishing density " << density;
        throw Error(ErrorKind::UnnormalizableOutcome, os.str());
    }
    w /= std::sqrt(density);
    return MeasurementOutcome{FockVector(std::move(w)), density};
}

std::vector<double> photon_distribution(const FockVector &state) {
    std::vector<double> p(state.dim());
    for (std::size_t n = 0; n < p.size(); ++n) {
        p[n] = std::norm(state.amps[static_cast<Eigen::Index>(n)]);
    }
    return p;
}

double fock_jump_probability(const FockVector &state, const Resolution &res) {
    const FockMeter meter(state);
    const auto [lo, hi] = outcome_window(state, res);
    return integrate([&](double x) { return meter.density(res, x) - meter.zero_photon_density(res, x); }, lo, hi,
                     1e-10, 1e-14)
        .value;
}

double povm_completeness_residual(const Resolution &res, std::size_t dim, double step) {
    const auto eig = QuadratureEigensystem::cached(dim);
    const double half_span = eig->max_abs_value() + kOutcomeSigmas * res.dx();
    const QuadratureGrid grid = QuadratureGrid::uniform(half_span, step);
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const MeasurementOperator mop = build_measurement_operator(res, grid.points[i], dim);
        sum += grid.weights[i] * (mop.matrix.entries * mop.matrix.entries);
    }
    sum -= Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    return interior_max_abs(sum, kEdgeExclusion);
}

OrderingExpectations ordering_expectations(const FockVector &state) {
    const std::size_t dim = state.dim();
    if (dim <= kEdgeExclusion + 1) {
        throw Error(ErrorKind::InvalidDimension, "ordering identities need dim > 3");
    }
    const auto top = state.amps.tail(static_cast<Eigen::Index>(kEdgeExclusion)).cwiseAbs().maxCoeff();
    if (top >= kEdgeAmplitudeThreshold) {
        std::ostringstream os;
        os << "state has amplitude " << top << " in the top " << kEdgeExclusion << " levels of dim " << dim;
        throw Error(ErrorKind::EdgeContamination, os.str());
    }
    const auto ops = build_operators(dim);
    const Eigen::MatrixXcd &x = ops.x.entries;
    const Eigen::MatrixXcd &n = ops.n.entries;
    const Eigen::VectorXcd &phi = state.amps;
    const Eigen::VectorXcd x_phi = x * phi;
    const Eigen::VectorXcd xx_phi = x * x_phi;
    const Eigen::VectorXcd n_phi = n * phi;

    OrderingExpectations out;
    out.norm = phi.squaredNorm();
    out.xnx = x_phi.dot(n * x_phi).real();
    // <phi| x^2 n |phi> = <x^2 phi | n phi>; the n x^2 term is its conjugate.
    out.sym = xx_phi.dot(n_phi).real();
    out.nxx_xxn_half = out.xnx - out.sym;
    return out;
}

CorrelationForms correlation_forms(const FockVector &state, const Resolution &res) {
    const FockMeter meter(state);
    const auto ops = build_operators(state.dim());
    const Eigen::MatrixXcd &x = ops.x.entries;
    const Eigen::VectorXd levels = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(state.dim()), 0.0,
                                                              static_cast<double>(state.dim() - 1));
    const auto edge = static_cast<Eigen::Index>(kEdgeExclusion);

    auto moments = [&](double x_m) {
        const Eigen::VectorXcd w = meter.unnormalized(res, x_m);
        const Eigen::VectorXcd xw = x * w;
        const Eigen::VectorXcd xxw = x * xw;
        const Eigen::VectorXcd nw = levels.cast<cplx>().cwiseProduct(w);
        const double mass = w.squaredNorm();
        const double n_mean = w.dot(nw).real();
        const double xnx = (xw.cwiseAbs2().cwiseProduct(levels)).sum();
        const double x2n_sym = xxw.dot(nw).real();
        Eigen::VectorXd out(7);
        out << mass, x_m * x_m * mass, n_mean, x_m * x_m * n_mean, xw.squaredNorm(), 0.5 * (x2n_sym + xnx),
            w.tail(edge).squaredNorm();
        return out;
    };
    const auto [lo, hi] = outcome_window(state, res);
    const Eigen::VectorXd m = integrate_vector(moments, lo, hi, kCorrelationRelTol, 1e-14);

    CorrelationForms out;
    out.total_probability = m[0];
    const double inv = 1.0 / m[0];
    out.outcome_average = m[3] * inv - (m[1] * inv) * (m[2] * inv);
    out.operator_expression = m[5] * inv - (m[2] * inv) * (m[4] * inv);
    out.edge_leakage = m[6] * inv;
    if (out.edge_leakage > kCorrelationEdgeLeakage) {
        std::ostringstream os;
        os << "post-measurement states carry " << out.edge_leakage << " probability in the top " << kEdgeExclusion
           << " levels of dim " << state.dim();
        throw Error(ErrorKind::Truncation, os.str());
    }
    const double scale = std::max(1.0, std::abs(out.outcome_average));
    if (std::abs(out.outcome_average - out.operator_expression) > kCorrelationAgreement * scale) {
        std::ostringstream os;
        os << "outcome-averaged correlation " << out.outcome_average << " and operator form "
           << out.operator_expression << " disagree";
        throw Error(ErrorKind::Nonconvergence, os.str());
    }
    return out;
}

double correlation_operator_form(const FockVector &state, const Resolution &res) {
    return correlation_forms(state, res).operator_expression;
}

}  // namespace qnd
