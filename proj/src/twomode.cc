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

#include "qndsim/twomode.h"

#include <cmath>
#include <sstream>

#include "qndsim/error.h"
#include "qndsim/measurement.h"

namespace qnd {

namespace {

constexpr double kUnitarityTolerance = 1e-8;
constexpr double kMeterLeakageTolerance = 1e-8;

[[noreturn]] void throw_undersized(double f, std::size_t dim_s, std::size_t dim_m, const std::string &detail) {
    std::ostringstream os;
    os << detail << "; coupling f = " << f << " with signal dim " << dim_s << " needs meter dim >= "
       << required_meter_dim(dim_s, f) << " (got " << dim_m << ")";
    throw Error(ErrorKind::Truncation, os.str());
}

}  // namespace

std::size_t required_meter_dim(std::size_t dim_s, double f) {
    return dim_s + static_cast<std::size_t>(std::ceil(8.0 * f * f));
}

double coupling_from_amplification(double a) {
    if (!(a >= 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "amplification factor must be >= 1");
    }
    return (a * a - 1.0) / a;
}

CouplingUnitary::CouplingUnitary(double f, std::size_t dim_s, std::size_t dim_m) : f_(f) {
    if (!(f >= 0.0) || !std::isfinite(f)) {
        throw Error(ErrorKind::InvalidArgument, "coupling f must be finite and non-negative");
    }
    if (dim_s < kMinTwoModeDim || dim_m < kMinTwoModeDim) {
        std::ostringstream os;
        os << "two-mode dims must be >= " << kMinTwoModeDim << ", got " << dim_s << " x " << dim_m;
        throw Error(ErrorKind::InvalidDimension, os.str());
    }
    const auto signal = QuadratureEigensystem::cached(dim_s);
    signal_values_ = signal->values();
    signal_vectors_ = signal->vectors();

    const auto ops = build_operators(dim_m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(ops.y.entries);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorKind::Eigendecomposition, "meter y matrix did not diagonalize");
    }
    meter_values_ = solver.eigenvalues();
    meter_vectors_ = solver.eigenvectors();
}

Eigen::MatrixXcd CouplingUnitary::meter_block(Eigen::Index k) const {
    const double lambda = signal_values_[k];
    const Eigen::VectorXcd phases =
        meter_values_.unaryExpr([&](double mu) { return std::polar(1.0, -2.0 * f_ * lambda * mu); });
    return meter_vectors_ * phases.asDiagonal() * meter_vectors_.adjoint();
}

Eigen::MatrixXcd CouplingUnitary::dense() const {
    const auto ds = static_cast<Eigen::Index>(dim_s());
    const auto dm = static_cast<Eigen::Index>(dim_m());
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(ds * dm, ds * dm);
    for (Eigen::Index k = 0; k < ds; ++k) {
        const Eigen::MatrixXcd block = meter_block(k);
        for (Eigen::Index s = 0; s < ds; ++s) {
            for (Eigen::Index t = 0; t < ds; ++t) {
                const double weight = signal_vectors_(s, k) * signal_vectors_(t, k);
                u.block(s * dm, t * dm, dm, dm) += weight * block;
            }
        }
    }
    return u;
}

double CouplingUnitary::unitarity_residual() const {
    // U^dag U = sum_k Pi_k (x) B_k^dag B_k with orthogonal projectors Pi_k.
    const auto dm = static_cast<Eigen::Index>(dim_m());
    double worst = 0.0;
    for (Eigen::Index k = 0; k < signal_values_.size(); ++k) {
        const Eigen::MatrixXcd b = meter_block(k);
        const Eigen::MatrixXcd r = b.adjoint() * b - Eigen::MatrixXcd::Identity(dm, dm);
        worst = std::max(worst, r.cwiseAbs().maxCoeff());
    }
    return worst;
}

double CouplingUnitary::meter_shift_residual(std::size_t signal_block, std::size_t meter_block_size) const {
    const auto ds = static_cast<Eigen::Index>(dim_s());
    const auto dm = static_cast<Eigen::Index>(dim_m());
    const auto bs = std::min<Eigen::Index>(static_cast<Eigen::Index>(signal_block), ds);
    const auto bm = std::min<Eigen::Index>(static_cast<Eigen::Index>(meter_block_size), dm);
    const Eigen::MatrixXcd x_m = build_operators(dim_m()).x.entries;

    // Collect sum_k V(s,k) V(t,k) (B_k^dag x_M B_k - x_M - f lambda_k) on the block.
    std::vector<Eigen::MatrixXcd> acc(static_cast<std::size_t>(bs * bs), Eigen::MatrixXcd::Zero(bm, bm));
    for (Eigen::Index k = 0; k < ds; ++k) {
        const Eigen::MatrixXcd b = meter_block(k);
        Eigen::MatrixXcd d = b.adjoint() * x_m * b - x_m;
        d.diagonal().array() -= f_ * signal_values_[k];
        const Eigen::MatrixXcd top = d.topLeftCorner(bm, bm);
        for (Eigen::Index s = 0; s < bs; ++s) {
            for (Eigen::Index t = 0; t < bs; ++t) {
                acc[static_cast<std::size_t>(s * bs + t)] += signal_vectors_(s, k) * signal_vectors_(t, k) * top;
            }
        }
    }
    double worst = 0.0;
    for (const auto &m : acc) {
        worst = std::max(worst, m.cwiseAbs().maxCoeff());
    }
    return worst;
}

TwoModeState CouplingUnitary::apply_to_vacuum_meter(const FockVector &signal) const {
    if (signal.dim() != dim_s()) {
        throw Error(ErrorKind::DimensionMismatch, "signal dimension differs from the coupling unitary");
    }
    const auto ds = static_cast<Eigen::Index>(dim_s());
    const auto dm = static_cast<Eigen::Index>(dim_m());
    const Eigen::VectorXcd rotated = signal_vectors_.transpose().cast<cplx>() * signal.amps;
    // Row k: B_k |0>, scaled by the x_S-eigenbasis amplitude of the signal.
    Eigen::MatrixXcd shifted(ds, dm);
    for (Eigen::Index k = 0; k < ds; ++k) {
        shifted.row(k) = rotated[k] * meter_block(k).col(0).transpose();
    }
    TwoModeState out;
    out.amps = signal_vectors_.cast<cplx>() * shifted;
    out.leakage = signal.leakage + out.amps.rightCols(static_cast<Eigen::Index>(kEdgeExclusion)).squaredNorm();
    return out;
}

CouplingUnitary build_coupling_unitary(double f, std::size_t dim_s, std::size_t dim_m) {
    if (dim_m < required_meter_dim(dim_s, f)) {
        throw_undersized(f, dim_s, dim_m, "meter truncation too small for the coupling shift");
    }
    CouplingUnitary u(f, dim_s, dim_m);
    const double residual = u.unitarity_residual();
    if (residual > kUnitarityTolerance) {
        std::ostringstream os;
        os << "unitarity residual " << residual << " exceeds " << kUnitarityTolerance;
        throw_undersized(f, dim_s, dim_m, os.str());
    }
    return u;
}

TwoModeState entangle(const FockVector &signal, double f, std::size_t dim_m) {
    const CouplingUnitary u = build_coupling_unitary(f, signal.dim(), dim_m);
    TwoModeState joint = u.apply_to_vacuum_meter(signal);
    const double meter_edge = joint.leakage - signal.leakage;
    if (meter_edge > kMeterLeakageTolerance) {
        std::ostringstream os;
        os << "joint state places " << meter_edge << " probability in the top meter levels";
        throw_undersized(f, signal.dim(), dim_m, os.str());
    }
    return joint;
}

MeterProjection meter_projection(const TwoModeState &joint, double x_M) {
    const auto meter = QuadratureEigensystem::cached(joint.dim_m());
    if (std::abs(x_M) > meter->max_abs_value()) {
        std::ostringstream os;
        os << "meter readout x_M = " << x_M << " lies outside the resolvable range +-" << meter->max_abs_value();
        throw Error(ErrorKind::Range, os.str());
    }
    const Eigen::VectorXd h = hermite_wavefunctions_at(x_M, joint.dim_m());
    Eigen::VectorXcd c = joint.amps * h.cast<cplx>();
    const double density = c.squaredNorm();
    if (!(density > 1e-300)) {
        std::ostringstream os;
        os << "meter readout x_M = " << x_M << " has vanishing density";
        throw Error(ErrorKind::UnnormalizableOutcome, os.str());
    }
    c /= std::sqrt(density);
    return MeterProjection{FockVector(std::move(c)), density};
}

double reduced_signal_expectation(const TwoModeState &joint, const OperatorMatrix &op) {
    if (op.dim() != joint.dim_s()) {
        throw Error(ErrorKind::DimensionMismatch, "operator dimension differs from the signal mode");
    }
    return (joint.amps.adjoint() * op.entries * joint.amps).trace().real();
}

double fidelity(const FockVector &a, const FockVector &b) {
    if (a.dim() != b.dim()) {
        throw Error(ErrorKind::DimensionMismatch, "fidelity between states of different dimension");
    }
    return std::norm(a.amps.dot(b.amps)) / (a.norm_squared() * b.norm_squared());
}

}  // namespace qnd
