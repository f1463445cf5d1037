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

#ifndef QNDSIM_TWOMODE_H
#define QNDSIM_TWOMODE_H

#include <cstddef>
#include <memory>

#include <Eigen/Dense>

#include "qndsim/fock.h"

namespace qnd {

/// Smallest meter truncation that leaves room for the shift f * x_S:
/// dim_s + ceil(8 f^2).
std::size_t required_meter_dim(std::size_t dim_s, double f);

/// f = (a^2 - 1)/a for a parametric amplification factor a >= 1.
double coupling_from_amplification(double a);

inline constexpr std::size_t kMinTwoModeDim = 16;

/// Joint amplitudes; amps(n_s, n_m) multiplies |n_s> (x) |n_m>.
struct TwoModeState {
    Eigen::MatrixXcd amps;
    /// Probability in the top meter levels plus the signal's own leakage.
    double leakage = 0.0;

    std::size_t dim_s() const {
        return static_cast<std::size_t>(amps.rows());
    }
    std::size_t dim_m() const {
        return static_cast<std::size_t>(amps.cols());
    }
};

/// exp(-i 2 f x_S y_M) held in factored form: x_S and y_M are diagonalized
/// separately, and for each eigenvalue lambda_k of x_S the meter block is
/// B_k = exp(-i 2 f lambda_k y_M).
class CouplingUnitary {
   public:
    CouplingUnitary(double f, std::size_t dim_s, std::size_t dim_m);

    double f() const {
        return f_;
    }
    std::size_t dim_s() const {
        return static_cast<std::size_t>(signal_values_.size());
    }
    std::size_t dim_m() const {
        return static_cast<std::size_t>(meter_values_.size());
    }

    /// Full (dim_s * dim_m)^2 matrix; row index is n_s * dim_m + n_m.
    Eigen::MatrixXcd dense() const;
    /// max |U^dag U - I|.
    double unitarity_residual() const;
    /// max |U^dag (1 (x) x_M) U - (1 (x) x_M + f x_S (x) 1)| with signal
    /// levels < signal_block and meter levels < meter_block.
    double meter_shift_residual(std::size_t signal_block, std::size_t meter_block) const;
    /// U |signal> (x) |vac>.
    TwoModeState apply_to_vacuum_meter(const FockVector &signal) const;

   private:
    Eigen::MatrixXcd meter_block(Eigen::Index k) const;

    double f_;
    Eigen::VectorXd signal_values_;
    Eigen::MatrixXd signal_vectors_;
    Eigen::VectorXd meter_values_;
    Eigen::MatrixXcd meter_vectors_;
};

/// Throws Truncation, naming the required meter dimension, when dim_m is
/// below required_meter_dim or the factored unitary loses unitarity.
CouplingUnitary build_coupling_unitary(double f, std::size_t dim_s, std::size_t dim_m);

/// Entangles `signal` with a vacuum meter. Throws Truncation when more than
/// 1e-8 of the joint probability reaches the top meter levels.
TwoModeState entangle(const FockVector &signal, double f, std::size_t dim_m);

struct MeterProjection {
    FockVector conditional_signal;
    /// Density of the meter readout x_M.
    double joint_density = 0.0;
};

/// Projects the meter onto the quadrature eigenstate |x_M>.
MeterProjection meter_projection(const TwoModeState &joint, double x_M);

/// Tr(rho_S op) of the reduced signal state.
double reduced_signal_expectation(const TwoModeState &joint, const OperatorMatrix &op);

/// |<a|b>|^2 / (|a|^2 |b|^2).
double fidelity(const FockVector &a, const FockVector &b);

}  // namespace qnd

#endif
