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

#ifndef QNDSIM_QUADRATURE_H
#define QNDSIM_QUADRATURE_H

#include <functional>

#include <Eigen/Dense>

namespace qnd {

struct IntegrationResult {
    double value = 0.0;
    double error_estimate = 0.0;
};

/// Adaptive Gauss-Kronrod on [lo, hi]. Throws Nonconvergence when the error
/// estimate exceeds max(rel_tol * |value|, abs_tol).
IntegrationResult integrate(const std::function<double(double)> &f, double lo, double hi, double rel_tol,
                            double abs_tol = 1e-15);

/// Vector-valued integral by composite 20-point Gauss-Legendre with panel
/// doubling, so every component shares one set of (possibly expensive)
/// integrand evaluations. Converged when each component changes by less than
/// rel_tol * |I_i| + abs_tol between successive refinements.
Eigen::VectorXd integrate_vector(const std::function<Eigen::VectorXd(double)> &f, double lo, double hi,
                                 double rel_tol, double abs_tol = 1e-14);

}  // namespace qnd

#endif
