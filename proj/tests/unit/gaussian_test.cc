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

#include <algorithm>
#include <cmath>
#include <vector>

#include "support.h"

using namespace qnd;

namespace {

// Brute-force pieces built from the outcome and zero-photon densities only.
double oracle_p0(double dx, double x) {
    const double d2 = dx * dx;
    return std::sqrt(8 * d2 / (1 + 8 * d2)) * test::normal_pdf(x, 0.0, 0.125 + d2);
}

double oracle_p(double dx, double x) {
    return test::normal_pdf(x, 0.0, dx * dx + 0.25);
}

double oracle_jump(double dx) {
    const double s = std::sqrt(dx * dx + 0.25);
    return test::simpson([&](double x) { return oracle_p(dx, x) - oracle_p0(dx, x); }, -12 * s, 12 * s, 20000);
}

double oracle_ratio(double dx) {
    const double s = std::sqrt(dx * dx + 0.25);
    auto pj = [&](double x) { return oracle_p(dx, x) - oracle_p0(dx, x); };
    const double mass = test::simpson(pj, -12 * s, 12 * s, 20000);
    const double second = test::simpson([&](double x) { return x * x * pj(x); }, -12 * s, 12 * s, 20000);
    return second / mass / (dx * dx + 0.25);
}

}  // namespace

TEST_CASE("resolution and coupling are reciprocal") {
    const auto r = Resolution::from_dx(0.5);
    CHECK(r.f() == doctest::Approx(1.0));
    CHECK(Resolution::from_coupling(2.0).dx() == doctest::Approx(0.25));
    CHECK(r.outcome_variance() == doctest::Approx(0.5));
    CHECK_THROWS_KIND(Resolution::from_dx(0.0), ErrorKind::InvalidArgument);
    CHECK_THROWS_KIND(Resolution::from_dx(-1.0), ErrorKind::InvalidArgument);
    CHECK_THROWS_KIND(Resolution::from_dx(std::nan("")), ErrorKind::InvalidArgument);
    CHECK_THROWS_KIND(Resolution::from_coupling(0.0), ErrorKind::InvalidArgument);
}

TEST_CASE("outcome density is a normalized Gaussian of variance dx^2 + 1/4") {
    const auto r = Resolution::from_dx(0.5);
    for (double x : {-2.0, -0.5, 0.0, 0.3, 1.7}) {
        CHECK(outcome_pdf(r, x) == doctest::Approx(test::normal_pdf(x, 0.0, 0.5)).epsilon(1e-12));
    }
    test::Draw draw(5);
    for (int i = 0; i < 10; ++i) {
        const auto res = Resolution::from_dx(draw.log_uniform(0.05, 20));
        const double s = std::sqrt(res.outcome_variance());
        CHECK(test::simpson([&](double x) { return outcome_pdf(res, x); }, -12 * s, 12 * s, 4000) ==
              doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("post-measurement state geometry") {
    const GaussianXYState s = post_state(Resolution::from_dx(0.5), -0.5);
    CHECK(s.mean_x == -0.25);
    CHECK(s.mean_y == 0.0);
    CHECK(std::sqrt(s.var_x) / 0.5 == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(std::sqrt(s.var_y) / 0.5 == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

    const GaussianXYState weak = post_state(Resolution::from_dx(1e6), 0.3);
    CHECK(std::abs(weak.var_x - 0.25) < 1e-9);
    CHECK(std::abs(weak.var_y - 0.25) < 1e-9);
    CHECK(std::abs(weak.mean_x) < 1e-9);
}

TEST_CASE("post states stay minimum uncertainty for random resolutions") {
    test::Draw draw(7);
    for (int i = 0; i < 50; ++i) {
        const auto res = Resolution::from_dx(draw.log_uniform(0.01, 100));
        const double xm = draw.uniform(-5, 5);
        const GaussianXYState s = post_state(res, xm);
        s.validate();
        CHECK(s.var_x * s.var_y == doctest::Approx(1.0 / 16.0).epsilon(1e-10));
        CHECK(s.var_x < 0.25);
        CHECK(s.var_y > 0.25);
        // Post photon number from the Gaussian moments: (<x^2> + <y^2>) - 1/2 with the mean included.
        const double n = s.var_x + s.mean_x * s.mean_x + s.var_y - 0.5;
        CHECK(post_photon_expectation(res, xm) == doctest::Approx(n).epsilon(1e-10));
    }
}

TEST_CASE("analytic correlation equals 1/8 at every resolution") {
    for (double dx : {0.1, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0}) {
        CHECK(std::abs(analytic_correlation(Resolution::from_dx(dx)) - 0.125) < 1e-9);
    }
}

TEST_CASE("correlation is resolution independent on random draws") {
    test::Draw draw(3);
    for (int i = 0; i < 40; ++i) {
        const double dx = draw.log_uniform(0.05, 50);
        CAPTURE(dx);
        CHECK(std::abs(analytic_correlation(Resolution::from_dx(dx)) - 0.125) < 1e-9);
    }
}

TEST_CASE("outcome moments") {
    for (double dx : {0.1, 0.5, 1.0, 3.0}) {
        const auto r = Resolution::from_dx(dx);
        const double s = std::sqrt(r.outcome_variance());
        const double mean = test::simpson([&](double x) { return x * outcome_pdf(r, x); }, -14 * s, 14 * s, 8000);
        const double second =
            test::simpson([&](double x) { return x * x * outcome_pdf(r, x); }, -14 * s, 14 * s, 8000);
        CHECK(std::abs(mean) < 1e-9);
        CHECK(std::abs(second - (dx * dx + 0.25)) < 1e-9);
    }
}

TEST_CASE("zero-photon mass and jump probability sum to one") {
    for (double dx : {0.05, 0.3, 1.0, 4.0, 20.0}) {
        const auto r = Resolution::from_dx(dx);
        const double s = std::sqrt(r.outcome_variance());
        const double p0 = test::simpson([&](double x) { return zero_photon_pdf(r, x); }, -14 * s, 14 * s, 8000);
        CAPTURE(dx);
        CHECK(std::abs(p0 + jump_probability(r) - 1.0) < 1e-8);
    }
}

TEST_CASE("jump probability at unit resolution") {
    const auto r = Resolution::from_dx(1.0);
    CHECK(jump_probability(r) == doctest::Approx(0.0572).epsilon(1e-4 / 0.0572));
    CHECK(jump_probability(r) == doctest::Approx(oracle_jump(1.0)).epsilon(1e-9));
    CHECK(jump_probability_numeric(r) == doctest::Approx(jump_probability(r)).epsilon(1e-8));
}

TEST_CASE("jump probability decreases with resolution and matches the brute-force integral") {
    double prev = 1.0;
    for (double dx : {0.05, 0.2, 0.5, 1.0, 3.0, 10.0}) {
        const auto r = Resolution::from_dx(dx);
        const double p = jump_probability(r);
        CAPTURE(dx);
        CHECK(p < prev);
        CHECK(p > 0.0);
        CHECK(p == doctest::Approx(oracle_jump(dx)).epsilon(1e-7));
        prev = p;
    }
}

TEST_CASE("jump component is nonnegative") {
    test::Draw draw(13);
    for (int i = 0; i < 200; ++i) {
        const auto r = Resolution::from_dx(draw.log_uniform(0.01, 50));
        CHECK(jump_pdf(r, draw.uniform(-20, 20)) >= 0.0);
        CHECK(zero_photon_pdf(r, draw.uniform(-20, 20)) >= 0.0);
    }
}

TEST_CASE("conditional fluctuation ratio") {
    const auto one = Resolution::from_dx(1.0);
    CHECK(conditional_fluctuation_ratio(one) == doctest::Approx(2.6485).epsilon(1e-3 / 2.6485));
    CHECK(conditional_fluctuation_ratio(one) == doctest::Approx(oracle_ratio(1.0)).epsilon(1e-8));
    CHECK(conditional_second_moment(one) == doctest::Approx(3.31066).epsilon(1e-5));
    CHECK(conditional_second_moment_numeric(one) == doctest::Approx(conditional_second_moment(one)).epsilon(1e-7));
    const double five = conditional_fluctuation_ratio(Resolution::from_dx(5.0));
    CHECK(five >= 2.85);
    CHECK(five <= 3.0);
    CHECK(five == doctest::Approx(oracle_ratio(5.0)).epsilon(1e-7));
}

TEST_CASE("jump peak location") {
    const auto r = Resolution::from_dx(1.0);
    const double peak = jump_peak_location(r);
    // Dense scan of the positive half-line as an independent check.
    double best_x = 0.0;
    double best = -1.0;
    for (int i = 0; i <= 400000; ++i) {
        const double x = 1e-5 * i;
        const double v = oracle_p(1.0, x) - oracle_p0(1.0, x);
        if (v > best) {
            best = v;
            best_x = x;
        }
    }
    CHECK(peak == doctest::Approx(best_x).epsilon(1e-4));
    CHECK(peak == doctest::Approx(1.49).epsilon(0.01));
}

TEST_CASE("jump decomposition on a grid") {
    const auto r = Resolution::from_dx(1.0);
    std::vector<double> grid;
    for (int i = -1000; i <= 1000; ++i) {
        grid.push_back(0.01 * i);
    }
    const JumpDecomposition d = jump_decomposition(r, grid);
    REQUIRE(d.p_total.size() == grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(d.p_total[i] == doctest::Approx(d.p_zero[i] + d.p_jump[i]).epsilon(1e-14));
    }
    CHECK(d.jump_probability == doctest::Approx(0.0571909584).epsilon(1e-8));
    CHECK(d.grid_mass == doctest::Approx(1.0).epsilon(1e-8));
    const auto peak = std::max_element(d.p_jump.begin() + 1000, d.p_jump.end()) - d.p_jump.begin();
    CHECK(grid[static_cast<std::size_t>(peak)] == doctest::Approx(1.49).epsilon(0.01));

    const std::vector<double> short_grid{-1.0, 0.0, 1.0};
    CHECK_THROWS_KIND(jump_decomposition(r, short_grid), ErrorKind::GridCoverage);
    const std::vector<double> unordered{-10.0, 1.0, 0.0, 10.0};
    CHECK_THROWS_KIND(jump_decomposition(r, unordered), ErrorKind::GridCoverage);
}
