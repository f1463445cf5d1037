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

#include "qndsim/quadrature.h"

#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qndsim/error.h"

namespace qnd {

namespace {

constexpr unsigned kMaxKronrodDepth = 20;
constexpr int kInitialPanels = 4;
constexpr int kMaxPanels = 1 << 14;

Eigen::VectorXd composite_legendre(const std::function<Eigen::VectorXd(double)> &f, double lo, double hi,
                                   int panels) {
    using rule = boost::math::quadrature::gauss<double, 20>;
    const auto &abscissa = rule::abscissa();
    const auto &weights = rule::weights();
    const double h = (hi - lo) / panels;
    Eigen::VectorXd total;
    for (int p = 0; p < panels; ++p) {
        const double mid = lo + (p + 0.5) * h;
        const double half = 0.5 * h;
        for (std::size_t i = 0; i < abscissa.size(); ++i) {
            Eigen::VectorXd term = f(mid + half * abscissa[i]) + f(mid - half * abscissa[i]);
            term *= weights[i] * half;
            if (total.size() == 0) {
                total = std::move(term);
            } else {
                total += term;
            }
        }
    }
    return total;
}

}  // namespace

IntegrationResult integrate(const std::function<double(double)> &f, double lo, double hi, double rel_tol,
                            double abs_tol) {
    IntegrationResult result;
    result.value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        f, lo, hi, kMaxKronrodDepth, rel_tol, &result.error_estimate);
    const double allowed = std::max(rel_tol * std::abs(result.value), abs_tol);
    if (!std::isfinite(result.value) || result.error_estimate > allowed) {
        std::ostringstream os;
        os << "adaptive quadrature on [" << lo << ", " << hi << "] reached error " << result.error_estimate
           << " against tolerance " << allowed;
        throw Error(ErrorKind::Nonconvergence, os.str());
    }
    return result;
}

Eigen::VectorXd integrate_vector(const std::function<Eigen::VectorXd(double)> &f, double lo, double hi,
                                 double rel_tol, double abs_tol) {
    int panels = kInitialPanels;
    Eigen::VectorXd previous = composite_legendre(f, lo, hi, panels);
    while (panels < kMaxPanels) {
        panels *= 2;
        Eigen::VectorXd current = composite_legendre(f, lo, hi, panels);
        const Eigen::ArrayXd allowed = rel_tol * current.array().abs() + abs_tol;
        if (((current - previous).array().abs() <= allowed).all()) {
            return current;
        }
        previous = std::move(current);
    }
    std::ostringstream os;
    os << "panel refinement on [" << lo << ", " << hi << "] did not converge within " << kMaxPanels << " panels";
    throw Error(ErrorKind::Nonconvergence, os.str());
}

}  // namespace qnd
