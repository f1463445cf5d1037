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

#include "qndsim/wigner.h"

#include <cmath>
#include <numbers>
#include <sstream>

#include "qndsim/error.h"

namespace qnd {

namespace {

double binomial(int n, int k) {
    double c = 1.0;
    for (int i = 1; i <= k; ++i) {
        c = c * (n - k + i) / i;
    }
    return c;
}

double double_factorial_odd(int m) {
    // (m-1)!! for even m, the central moment ratio E[z^m] for unit normals.
    double r = 1.0;
    for (int k = m - 1; k > 1; k -= 2) {
        r *= k;
    }
    return r;
}

// E[(mu + sigma z)^k] = sum_l C(k, 2l) mu^{k-2l} var^l (2l-1)!!.
double gaussian_raw_moment(double mean, double var, int k) {
    double total = 0.0;
    for (int l = 0; 2 * l <= k; ++l) {
        total += binomial(k, 2 * l) * std::pow(mean, k - 2 * l) * std::pow(var, l) * double_factorial_odd(2 * l);
    }
    return total;
}

}  // namespace

double GaussianWigner::density(double x, double y) const {
    const double dx = x - mean_x;
    const double dy = y - mean_y;
    return std::exp(-0.5 * (dx * dx / var_x + dy * dy / var_y)) / (2.0 * std::numbers::pi * std::sqrt(var_x * var_y));
}

double moments(const GaussianWigner &w, int i, int j) {
    if (i < 0 || j < 0 || i + j > kMaxMomentOrder) {
        std::ostringstream os;
        os << "moment order (" << i << ", " << j << ") outside 0 <= i + j <= " << kMaxMomentOrder;
        throw Error(ErrorKind::InvalidArgument, os.str());
    }
    // Axis-aligned: x and y are independent under W.
    return gaussian_raw_moment(w.mean_x, w.var_x, i) * gaussian_raw_moment(w.mean_y, w.var_y, j);
}

double quadrature_fourth_moment_excess(const GaussianWigner &w) {
    const double x2 = moments(w, 2, 0);
    return moments(w, 4, 0) - x2 * x2;
}

double intensity_correlation(const GaussianWigner &w) {
    const double x2i = moments(w, 4, 0) + moments(w, 2, 2);
    const double x2 = moments(w, 2, 0);
    const double intensity = x2 + moments(w, 0, 2);
    return x2i - x2 * intensity;
}

GaussianWigner post_interaction_wigner(const GaussianWigner &input, const Resolution &res) {
    GaussianWigner out = input;
    out.var_y += 0.25 * res.f() * res.f();
    return out;
}

}  // namespace qnd
