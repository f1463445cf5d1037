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

#include "qndsim/gaussian.h"

#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/tools/minima.hpp>

#include "qndsim/error.h"
#include "qndsim/quadrature.h"

namespace qnd {

namespace {

constexpr double kIntegrationRelTol = 1e-10;
constexpr double kIntegrationSigmas = 8.0;
constexpr double kRequiredGridSigmas = 6.0;
constexpr double kGridMassTolerance = 1e-8;

double gaussian_density(double x, double variance) {
    return std::exp(-0.5 * x * x / variance) / std::sqrt(2.0 * std::numbers::pi * variance);
}

// P0 is a Gaussian of variance (1 + 8 dx^2)/8 carrying total weight
// sqrt(8 dx^2 / (1 + 8 dx^2)).
double zero_photon_variance(const Resolution &res) {
    return 0.125 + res.dx() * res.dx();
}

double no_jump_probability(const Resolution &res) {
    const double d2 = res.dx() * res.dx();
    return std::sqrt(8.0 * d2 / (1.0 + 8.0 * d2));
}

}  // namespace

Resolution Resolution::from_dx(double dx) {
    if (!(dx >= kMinDx) || !std::isfinite(dx)) {
        std::ostringstream os;
        os << "resolution dx = " << dx << " must be finite and >= " << kMinDx;
        throw Error(ErrorKind::InvalidArgument, os.str());
    }
    return Resolution(dx);
}

Resolution Resolution::from_coupling(double f) {
    if (!(f > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "coupling f must be positive");
    }
    return from_dx(0.5 / f);
}

void GaussianXYState::validate() const {
    if (!(var_x > 0.0) || !(var_y > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "quadrature variances must be positive");
    }
    if (var_x * var_y < 1.0 / 16.0 - 1e-12) {
        std::ostringstream os;
        os << "variance product " << var_x * var_y << " violates the uncertainty bound 1/16";
        throw Error(ErrorKind::InvalidArgument, os.str());
    }
}

double outcome_pdf(const Resolution &res, double x_m) {
    return gaussian_density(x_m, res.outcome_variance());
}

GaussianXYState post_state(const Resolution &res, double x_m) {
    const double d2 = res.dx() * res.dx();
    const double g = 1.0 + 4.0 * d2;
    GaussianXYState s;
    s.mean_x = x_m / g;
    s.mean_y = 0.0;
    s.var_x = d2 / g;
    s.var_y = g / (16.0 * d2);
    return s;
}

double post_photon_expectation(const Resolution &res, double x_m) {
    const double d2 = res.dx() * res.dx();
    const double g = 1.0 + 4.0 * d2;
    return 1.0 / (16.0 * d2 * g) + x_m * x_m / (g * g);
}

double analytic_correlation(const Resolution &res) {
    const double span = kIntegrationSigmas * std::sqrt(res.outcome_variance());
    auto moment = [&](auto &&weight) {
        return integrate([&](double x) { return weight(x) * outcome_pdf(res, x); }, -span, span, kIntegrationRelTol)
            .value;
    };
    const double x2n = moment([&](double x) { return x * x * post_photon_expectation(res, x); });
    const double x2 = moment([](double x) { return x * x; });
    const double n = moment([&](double x) { return post_photon_expectation(res, x); });
    return x2n - x2 * n;
}

double zero_photon_pdf(const Resolution &res, double x_m) {
    return no_jump_probability(res) * gaussian_density(x_m, zero_photon_variance(res));
}

double jump_pdf(const Resolution &res, double x_m) {
    return outcome_pdf(res, x_m) - zero_photon_pdf(res, x_m);
}

double jump_probability(const Resolution &res) {
    return 1.0 - no_jump_probability(res);
}

double jump_probability_numeric(const Resolution &res) {
    const double span = kIntegrationSigmas * std::sqrt(res.outcome_variance());
    return integrate([&](double x) { return jump_pdf(res, x); }, -span, span, kIntegrationRelTol, 1e-14).value;
}

double conditional_second_moment(const Resolution &res) {
    const double d2 = res.dx() * res.dx();
    return 0.25 + d2 * (2.0 + std::sqrt(1.0 + 1.0 / (8.0 * d2)));
}

double conditional_second_moment_numeric(const Resolution &res) {
    const double span = kIntegrationSigmas * std::sqrt(res.outcome_variance());
    const double weighted =
        integrate([&](double x) { return x * x * jump_pdf(res, x); }, -span, span, kIntegrationRelTol, 1e-14).value;
    return weighted / jump_probability_numeric(res);
}

double conditional_fluctuation_ratio(const Resolution &res) {
    return conditional_second_moment(res) / res.outcome_variance();
}

JumpDecomposition jump_decomposition(const Resolution &res, std::span<const double> grid) {
    if (grid.size() < 2) {
        throw Error(ErrorKind::GridCoverage, "decomposition grid needs at least two points");
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
            throw Error(ErrorKind::GridCoverage, "decomposition grid must be strictly increasing");
        }
    }
    const double need = kRequiredGridSigmas * std::sqrt(res.outcome_variance());
    if (grid.front() > -need || grid.back() < need) {
        std::ostringstream os;
        os << "grid [" << grid.front() << ", " << grid.back() << "] must cover [-" << need << ", " << need
           << "] (six standard deviations of P)";
        throw Error(ErrorKind::GridCoverage, os.str());
    }
    JumpDecomposition out;
    out.grid.assign(grid.begin(), grid.end());
    out.p_total.reserve(grid.size());
    out.p_zero.reserve(grid.size());
    out.p_jump.reserve(grid.size());
    for (double x : grid) {
        const double p = outcome_pdf(res, x);
        const double p0 = zero_photon_pdf(res, x);
        out.p_total.push_back(p);
        out.p_zero.push_back(p0);
        out.p_jump.push_back(p - p0);
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
        out.grid_mass += 0.5 * (grid[i] - grid[i - 1]) * (out.p_total[i] + out.p_total[i - 1]);
    }
    if (std::abs(out.grid_mass - 1.0) > kGridMassTolerance) {
        std::ostringstream os;
        os << "outcome density integrates to " << out.grid_mass << " on the grid; refine or widen it";
        throw Error(ErrorKind::GridCoverage, os.str());
    }
    out.jump_probability = jump_probability(res);
    out.conditional_second_moment = conditional_second_moment(res);
    return out;
}

double jump_peak_location(const Resolution &res) {
    // Stationary points of N1 e^{-x^2/2s2} - N2 e^{-x^2/2t2} away from zero solve
    // (N1/s2) e^{-x^2/2s2} = (N2/t2) e^{-x^2/2t2}; t2 < s2 always.
    const double s2 = res.outcome_variance();
    const double t2 = zero_photon_variance(res);
    const double n1 = 1.0 / std::sqrt(2.0 * std::numbers::pi * s2);
    const double n2 = no_jump_probability(res) / std::sqrt(2.0 * std::numbers::pi * t2);
    const double log_ratio = std::log((n2 * s2) / (n1 * t2));
    const double curvature = 0.5 / t2 - 0.5 / s2;
    if (std::isfinite(log_ratio) && std::isfinite(curvature) && curvature > 0.0) {
        return log_ratio > 0.0 ? std::sqrt(log_ratio / curvature) : 0.0;
    }
    const double hi = 10.0 * std::sqrt(s2);
    auto [x, value] = boost::math::tools::brent_find_minima([&](double v) { return -jump_pdf(res, v); }, 0.0, hi, 52);
    (void)value;
    return x;
}

}  // namespace qnd
