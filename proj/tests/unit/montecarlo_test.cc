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

#include "qndsim/montecarlo.h"

#include <cmath>

#include "qndsim/measurement.h"
#include "support.h"

using namespace qnd;

namespace {

SamplerConfig vacuum_config(std::size_t trials, std::uint64_t seed, double dx = 1.0) {
    SamplerConfig cfg;
    cfg.res = Resolution::from_dx(dx);
    cfg.n_trials = trials;
    cfg.seed = seed;
    return cfg;
}

double z_score(const EstimatorReport &r, double truth) {
    return (r.estimate - truth) / r.std_error;
}

}  // namespace

TEST_CASE("sampling is deterministic and independent of thread count") {
    SamplerConfig cfg = vacuum_config(5000, 77);
    cfg.threads = 1;
    const TrialSet a = sample_trials(cfg);
    cfg.threads = 3;
    const TrialSet b = sample_trials(cfg);
    CHECK(a.trials == b.trials);
    cfg.seed = 78;
    CHECK_FALSE(sample_trials(cfg).trials == a.trials);
    CHECK(a.readout_method == "box-muller");
    CHECK(a.max_edge_mass < kMaxTrialEdgeMass);
}

TEST_CASE("non-vacuum inputs use the inverse-CDF readout") {
    SamplerConfig cfg = vacuum_config(2000, 3);
    cfg.input = InputState::coherent(0.7);
    const TrialSet set = sample_trials(cfg);
    CHECK(set.readout_method != "box-muller");
    double mean = 0.0;
    for (const auto &t : set.trials) {
        mean += t.x_m;
    }
    mean /= static_cast<double>(set.trials.size());
    // Outcome variance dx^2 + 1/4 = 1.25.
    CHECK(std::abs(mean - 0.7) < 4 * std::sqrt(1.25 / 2000));
}

TEST_CASE("readout, jump fraction and correlation are unbiased") {
    const TrialSet set = sample_trials(vacuum_config(200000, 5));
    const auto res = Resolution::from_dx(1.0);
    const EstimatorReport c = estimate_correlation(set);
    const JumpStatistics js = jump_statistics(set, DetectorModel{});
    CHECK(std::abs(z_score(c, 0.125)) < 4);
    CHECK(std::abs(z_score(js.jump_fraction, jump_probability(res))) < 4);
    CHECK(std::abs(z_score(js.conditional_ratio, conditional_fluctuation_ratio(res))) < 4);
    CHECK(c.method == "batch-jackknife-32");
    CHECK(js.jump_fraction.method == "batch-means-32");
    CHECK(c.n_trials == 200000);
    CHECK(c.seed == 5);
}

TEST_CASE("reported standard errors are calibrated over repetitions") {
    const auto res = Resolution::from_dx(1.0);
    const double p = jump_probability(res);
    int within = 0;
    double sum_z = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const TrialSet set = sample_trials(vacuum_config(20000, seed));
        const double z = z_score(jump_statistics(set, DetectorModel{}).jump_fraction, p);
        within += std::abs(z) < 3 ? 1 : 0;
        sum_z += z;
    }
    CHECK(within >= 18);
    // Mean of 20 unit-variance z-scores has standard deviation 1/sqrt(20).
    CHECK(std::abs(sum_z / 20.0) < 3.0 / std::sqrt(20.0));
}

TEST_CASE("sub-stream partitioning is statistically indistinguishable from one stream") {
    const DetectorModel det;
    for (std::uint64_t seed = 100; seed < 120; ++seed) {
        const SamplerConfig cfg = vacuum_config(16000, seed);
        const JumpStatistics single = jump_statistics(sample_trials(cfg), det);
        const JumpStatistics split = jump_statistics(sample_partitioned(cfg, 4), det);
        const EstimatorReport c1 = estimate_correlation(sample_trials(cfg));
        const EstimatorReport c2 = estimate_correlation(sample_partitioned(cfg, 4));
        CAPTURE(seed);
        CHECK(std::abs(single.jump_fraction.estimate - split.jump_fraction.estimate) <=
              3 * (single.jump_fraction.std_error + split.jump_fraction.std_error));
        CHECK(std::abs(c1.estimate - c2.estimate) <= 3 * (c1.std_error + c2.std_error));
    }
}

TEST_CASE("partitioned sampling concatenates sub-streams") {
    SamplerConfig cfg = vacuum_config(3000, 9);
    const TrialSet joined = sample_partitioned(cfg, 3);
    REQUIRE(joined.trials.size() == 3000);
    cfg.n_trials = 1000;
    cfg.stream = 1;
    const TrialSet first = sample_trials(cfg);
    CHECK(std::equal(first.trials.begin(), first.trials.end(), joined.trials.begin()));
    CHECK_THROWS_KIND(sample_partitioned(cfg, 0), ErrorKind::InvalidArgument);
}

TEST_CASE("conditional ratio is invariant under photon detection efficiency") {
    const auto res = Resolution::from_dx(1.0);
    const double ratio = conditional_fluctuation_ratio(res);
    for (double eta : {0.1, 0.5, 1.0}) {
        SamplerConfig cfg = vacuum_config(300000, 21);
        cfg.detector.eta = eta;
        const TrialSet set = sample_trials(cfg);
        const JumpStatistics js = jump_statistics(set, cfg.detector);
        CAPTURE(eta);
        CHECK(std::abs(z_score(js.conditional_ratio, ratio)) < 4);
        CHECK(std::abs(z_score(js.jump_fraction, jump_probability(res))) < 4);
    }
}

TEST_CASE("jump-flag sampling keeps jump statistics but not photon numbers") {
    SamplerConfig cfg = vacuum_config(20000, 4);
    cfg.photons = PhotonSampling::JumpFlag;
    const TrialSet set = sample_trials(cfg);
    for (const auto &t : set.trials) {
        REQUIRE(t.n <= 1);
    }
    CHECK_THROWS_KIND(estimate_correlation(set), ErrorKind::InvalidArgument);
    CHECK(jump_statistics(set, DetectorModel{}).detected_events > 0);
}

TEST_CASE("readout efficiency scales the measured correlation") {
    EstimatorReport c{0.125, 0.001, 1000, 1, "batch-jackknife-32"};
    const EstimatorReport m = measured_correlation(c, DetectorModel{1.0, 0.4});
    CHECK(m.estimate == doctest::Approx(0.05));
    CHECK(m.std_error == doctest::Approx(0.0004));
}

TEST_CASE("sampler and estimator preconditions") {
    CHECK_THROWS_KIND(sample_trials(vacuum_config(0, 1)), ErrorKind::InvalidArgument);
    SamplerConfig bad = vacuum_config(10, 1);
    bad.detector.eta = 0.0;
    CHECK_THROWS_KIND(sample_trials(bad), ErrorKind::InvalidArgument);
    bad.detector = DetectorModel{1.0, 1.5};
    CHECK_THROWS_KIND(sample_trials(bad), ErrorKind::InvalidArgument);
    CHECK_THROWS_KIND(estimate_correlation(sample_trials(vacuum_config(500, 1))), ErrorKind::TooFewTrials);
    // Weak measurement: almost no jumps among a few trials.
    CHECK_THROWS_KIND(jump_statistics(sample_trials(vacuum_config(100, 1, 20.0)), DetectorModel{}),
                      ErrorKind::InsufficientEvents);
    SamplerConfig tight = vacuum_config(100, 1);
    tight.input = InputState::coherent(3.0);
    tight.dim = 16;
    CHECK_THROWS_KIND(sample_trials(tight), ErrorKind::Truncation);
}
