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

#ifndef QNDSIM_MONTECARLO_H
#define QNDSIM_MONTECARLO_H

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qndsim/gaussian.h"
#include "qndsim/input_state.h"

namespace qnd {

/// Photon counter efficiency eta and readout/mode-overlap efficiency xi.
struct DetectorModel {
    double eta = 1.0;
    double xi = 1.0;

    void validate() const;
};

/// One shot: scaled readout, post-measurement photon number, counter click.
struct TrialRecord {
    double x_m = 0.0;
    std::uint32_t n = 0;
    bool detected = false;

    bool operator==(const TrialRecord &) const = default;
};

enum class PhotonSampling {
    /// n drawn from the full conditional photon distribution.
    FullFock,
    /// Only the jump flag is drawn, from P0(x_m)/P(x_m); n is 0 or 1.
    JumpFlag,
};

/// Batches used for every standard error.
inline constexpr std::size_t kBatchCount = 32;
inline constexpr std::size_t kMinCorrelationTrials = 1000;
inline constexpr std::size_t kMinDetectedEvents = 30;
/// Largest post-measurement probability tolerated in the top two Fock levels.
inline constexpr double kMaxTrialEdgeMass = 1e-8;
inline constexpr std::size_t kDefaultTrialDim = 48;

struct SamplerConfig {
    InputState input;
    Resolution res = Resolution::from_dx(1.0);
    std::size_t n_trials = 0;
    std::uint64_t seed = 0;
    /// Sub-stream index; forms the second Philox key word.
    std::uint64_t stream = 0;
    DetectorModel detector;
    std::size_t dim = kDefaultTrialDim;
    PhotonSampling photons = PhotonSampling::FullFock;
    /// 0 picks std::thread::hardware_concurrency(). Output does not depend on it.
    unsigned threads = 0;
};

struct TrialSet {
    std::vector<TrialRecord> trials;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::size_t dim = 0;
    PhotonSampling photons = PhotonSampling::FullFock;
    /// "box-muller" for vacuum input, "inverse-cdf" otherwise.
    std::string readout_method;
    double max_edge_mass = 0.0;
};

/// Trial i of stream s uses Philox block (i, 0, 0, 0) under key (seed, s).
TrialSet sample_trials(const SamplerConfig &config);

/// Runs `substreams` independent streams (stream indices 1..k) of about
/// n_trials/k each and concatenates them.
TrialSet sample_partitioned(const SamplerConfig &config, std::size_t substreams);

struct EstimatorReport {
    double estimate = 0.0;
    double std_error = 0.0;
    std::size_t n_trials = 0;
    std::uint64_t seed = 0;
    std::string method;
};

/// mean(x_m^2 n) - mean(x_m^2) mean(n) with a batch-jackknife error.
EstimatorReport estimate_correlation(const TrialSet &set);
/// Scales a correlation estimate by the readout efficiency xi.
EstimatorReport measured_correlation(const EstimatorReport &correlation, const DetectorModel &detector);

struct JumpStatistics {
    /// Detected fraction divided by eta.
    EstimatorReport jump_fraction;
    /// mean(x_m^2 | detected) / mean(x_m^2).
    EstimatorReport conditional_ratio;
    std::size_t detected_events = 0;
};

JumpStatistics jump_statistics(const TrialSet &set, const DetectorModel &detector);

}  // namespace qnd

#endif
