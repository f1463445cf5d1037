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

#ifndef QNDSIM_MEASUREMENT_H
#define QNDSIM_MEASUREMENT_H

#include <cstddef>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "qndsim/fock.h"
#include "qndsim/gaussian.h"

namespace qnd {

/// Eigensystem of the truncated x matrix. Functions of x are evaluated as
/// V diag(g(lambda)) V^T rather than by series expansion.
class QuadratureEigensystem {
   public:
    explicit QuadratureEigensystem(std::size_t dim);

    /// Shared read-only instance per dimension.
    static std::shared_ptr<const QuadratureEigensystem> cached(std::size_t dim);

    std::size_t dim() const {
        return static_cast<std::size_t>(values_.size());
    }
    const Eigen::VectorXd &values() const {
        return values_;
    }
    const Eigen::MatrixXd &vectors() const {
        return vectors_;
    }
    double max_abs_value() const {
        return values_.cwiseAbs().maxCoeff();
    }

   private:
    Eigen::VectorXd values_;
    Eigen::MatrixXd vectors_;
};

inline constexpr std::size_t kMinMeasurementDim = 16;

/// Rows/columns excluded from operator-product identities at the truncation edge.
inline constexpr std::size_t kEdgeExclusion = 2;

/// Gaussian Kraus operator (2 pi dx^2)^{-1/4} exp(-(x_m - x)^2 / (4 dx^2)).
struct MeasurementOperator {
    Resolution res;
    double x_m;
    OperatorMatrix matrix;
    /// Set when |x_m| exceeds the largest eigenvalue of the truncated x.
    bool range_warning = false;
};

/// Kernel g(lambda_k) on the eigenvalues of the truncated x.
Eigen::VectorXd measurement_kernel(const Resolution &res, double x_m, const Eigen::VectorXd &eigenvalues);

MeasurementOperator build_measurement_operator(const Resolution &res, double x_m, std::size_t dim);

struct MeasurementOutcome {
    FockVector post;
    /// Outcome density <Phi| P^2 |Phi> at x_m.
    double density = 0.0;
};

MeasurementOutcome apply_measurement(const FockVector &state, const MeasurementOperator &mop);

/// Repeated measurements of one fixed input state. The state is rotated into
/// the x eigenbasis once so each outcome costs a single matrix-vector product.
class FockMeter {
   public:
    explicit FockMeter(const FockVector &state);

    std::size_t dim() const {
        return eig_->dim();
    }
    /// P(x_m)|Phi>, not normalized.
    Eigen::VectorXcd unnormalized(const Resolution &res, double x_m) const;
    double density(const Resolution &res, double x_m) const;
    /// |<0| P(x_m) |Phi>|^2, the density of outcomes that leave no photons.
    double zero_photon_density(const Resolution &res, double x_m) const;
    MeasurementOutcome measure(const Resolution &res, double x_m) const;

    const QuadratureEigensystem &eigensystem() const {
        return *eig_;
    }
    /// V^T |Phi>, the input in the x eigenbasis.
    const Eigen::VectorXcd &rotated() const {
        return rotated_;
    }

   private:
    std::shared_ptr<const QuadratureEigensystem> eig_;
    Eigen::VectorXcd rotated_;
};

std::vector<double> photon_distribution(const FockVector &state);

/// Integral over x_m of the probability that the post-measurement state holds
/// one or more photons.
double fock_jump_probability(const FockVector &state, const Resolution &res);

/// max |sum_grid P^2(x_m) w - I| on the interior block for a trapezoid grid
/// wide enough to cover every eigenvalue of x plus eight resolutions.
double povm_completeness_residual(const Resolution &res, std::size_t dim, double step);

struct OrderingExpectations {
    double xnx = 0.0;
    /// <(x^2 n + n x^2)/2>
    double sym = 0.0;
    double nxx_xxn_half = 0.0;
    double norm = 0.0;
};

/// Throws EdgeContamination if any amplitude in the top kEdgeExclusion
/// levels reaches 1e-6; below that the products are exact in the basis.
OrderingExpectations ordering_expectations(const FockVector &state);

struct CorrelationForms {
    /// mean(x_m^2 <n>_{x_m}) - mean(x_m^2) mean(<n>_{x_m}) over outcomes.
    double outcome_average = 0.0;
    /// (1/4)<x^2 n + 2 x n x + n x^2>_av - <n>_av <x^2>_av.
    double operator_expression = 0.0;
    /// Integrated outcome density; 1 up to truncation.
    double total_probability = 0.0;
    /// Outcome-averaged mass in the top kEdgeExclusion levels.
    double edge_leakage = 0.0;
};

/// Both evaluations of the readout/photon-number correlation. Throws
/// Nonconvergence if they disagree beyond the integration tolerance and
/// Truncation if the post-measurement states reach the basis edge.
CorrelationForms correlation_forms(const FockVector &state, const Resolution &res);
double correlation_operator_form(const FockVector &state, const Resolution &res);

}  // namespace qnd

#endif
