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

#ifndef QNDSIM_WIGNER_H
#define QNDSIM_WIGNER_H

#include "qndsim/gaussian.h"

namespace qnd {

/// Axis-aligned Gaussian Wigner function; the vacuum has var_x = var_y = 1/4.
struct GaussianWigner {
    double mean_x = 0.0;
    double mean_y = 0.0;
    double var_x = 0.25;
    double var_y = 0.25;

    static GaussianWigner vacuum() {
        return {};
    }
    static GaussianWigner from_state(const GaussianXYState &s) {
        return {s.mean_x, s.mean_y, s.var_x, s.var_y};
    }
    double density(double x, double y) const;
};

inline constexpr int kMaxMomentOrder = 8;

/// <x^i y^j> under W from the Gaussian (Isserlis) moment rules.
double moments(const GaussianWigner &w, int i, int j);

/// <x^4> - <x^2>^2.
double quadrature_fourth_moment_excess(const GaussianWigner &w);

/// <x^2 I> - <x^2><I> with I = x^2 + y^2.
double intensity_correlation(const GaussianWigner &w);

/// Signal Wigner function after the coupling with a vacuum meter, averaged
/// over meter readouts: y picks up f^2/4 of meter noise, x is untouched.
GaussianWigner post_interaction_wigner(const GaussianWigner &input, const Resolution &res);

}  // namespace qnd

#endif
