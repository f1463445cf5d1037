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

#ifndef QNDSIM_GAUSSIAN_H
#define QNDSIM_GAUSSIAN_H

#include <span>
#include <vector>

namespace qnd {

/// Measurement resolution dx and the matching coupling f = 1/(2 dx).
class Resolution {
   public:
    static constexpr double kMinDx = 1e-6;

    static Resolution from_dx(double dx);
    static Resolution from_coupling(double f);

    double dx() const {
        return dx_;
    }
    double f() const {
        return 0.5 / dx_;
    }
    /// Variance dx^2 + 1/4 of the vacuum readout distribution.
    double outcome_variance() const {
        return dx_ * dx_ + 0.25;
    }

   private:
    explicit Resolution(double dx) : dx_(dx) {
    }
    double dx_;
};

/// Means and variances of an axis-aligned Gaussian state.
struct GaussianXYState {
    double mean_x = 0.0;
    double mean_y = 0.0;
    double var_x = 0.25;
    double var_y = 0.25;

    /// Throws if var_x * var_y < 1/16 - 1e-12 or a variance is not positive.
    void validate() const;
};

double outcome_pdf(const Resolution &res, double x_m);
GaussianXYState post_state(const Resolution &res, double x_m);
double post_photon_expectation(const Resolution &res, double x_m);

/// Correlation between x_m^2 and the conditional photon number, integrated
/// numerically from outcome_pdf and post_photon_expectation. Vacuum input.
double analytic_correlation(const Resolution &res);

/// Outcome density restricted to trials that leave the signal in vacuum.
double zero_photon_pdf(const Resolution &res, double x_m);
/// Outcome density of trials with one or more photons after the measurement.
double jump_pdf(const Resolution &res, double x_m);

/// 1 - sqrt(8 dx^2 / (1 + 8 dx^2)).
double jump_probability(const Resolution &res);
/// Direct adaptive integral of jump_pdf, the independent check on the closed form.
double jump_probability_numeric(const Resolution &res);
/// E[x_m^2 | jump] = 1/4 + dx^2 (2 + sqrt(1 + 1/(8 dx^2))).
double conditional_second_moment(const Resolution &res);
double conditional_second_moment_numeric(const Resolution &res);
/// conditional_second_moment / (1/4 + dx^2).
double conditional_fluctuation_ratio(const Resolution &res);

struct JumpDecomposition {
    std::vector<double> grid;
    std::vector<double> p_total;
    std::vector<double> p_zero;
    std::vector<double> p_jump;
    double jump_probability = 0.0;
    double conditional_second_moment = 0.0;
    /// Trapezoid integral of p_total over the grid.
    double grid_mass = 0.0;
};

/// Tabulates P, P0 and PQJ on an ascending grid covering at least six
/// standard deviations of P on both sides.
JumpDecomposition jump_decomposition(const Resolution &res, std::span<const double> grid);

/// Argmax of jump_pdf on x_m >= 0.
double jump_peak_location(const Resolution &res);

}  // namespace qnd

#endif
