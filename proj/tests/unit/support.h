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

#ifndef QNDSIM_TESTS_SUPPORT_H
#define QNDSIM_TESTS_SUPPORT_H

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>

#include "doctest.h"
#include "qndsim/error.h"

namespace qnd::test {

// Seeded draws for the property suites. Each test owns its generator so the
// cases stay reproducible in isolation.
class Draw {
   public:
    explicit Draw(std::uint64_t seed) : gen_(seed) {
    }
    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(gen_);
    }
    double log_uniform(double lo, double hi) {
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }
    std::size_t index(std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(gen_);
    }

   private:
    std::mt19937_64 gen_;
};

// Composite Simpson rule on [lo, hi] with an even number of panels.
inline double simpson(const std::function<double(double)> &f, double lo, double hi, int panels) {
    if (panels % 2 != 0) {
        ++panels;
    }
    const double h = (hi - lo) / panels;
    double total = f(lo) + f(hi);
    for (int i = 1; i < panels; ++i) {
        total += (i % 2 ? 4.0 : 2.0) * f(lo + h * i);
    }
    return total * h / 3.0;
}

inline double normal_pdf(double x, double mean, double var) {
    return std::exp(-0.5 * (x - mean) * (x - mean) / var) / std::sqrt(2.0 * 3.14159265358979323846 * var);
}

}  // namespace qnd::test

#define CHECK_THROWS_KIND(expr, expected_kind)                     \
    do {                                                           \
        bool matched_kind_ = false;                                \
        try {                                                      \
            (void)(expr);                                          \
        } catch (const ::qnd::Error &e_) {                         \
            matched_kind_ = e_.kind() == (expected_kind);          \
            if (!matched_kind_) {                                  \
                MESSAGE("unexpected error kind: " << e_.what());   \
            }                                                      \
        }                                                          \
        CHECK_MESSAGE(matched_kind_, "expected " #expected_kind);  \
    } while (false)

#endif
