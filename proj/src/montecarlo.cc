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

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <numbers>
#include <sstream>
#include <thread>

#include "qndsim/error.h"
#include "qndsim/measurement.h"
#include "qndsim/rng.h"

namespace qnd {

namespace {

constexpr double kInverseCdfSigmas = 10.0;
constexpr std::size_t kInverseCdfPoints = 8001;

// Tabulated Fock-path outcome density for non-vacuum inputs.
class OutcomeTable {
   public:
    OutcomeTable(const FockMeter &meter, const FockVector &state, const Resolution &res) {
        const auto ops = build_operators(state.dim());
        const double norm = state.norm_squared();
        const double mean = expectation(state, ops.x).real() / norm;
        const double second = state.amps.dot(ops.x.entries * (ops.x.entries * state.amps)).real() / norm;
        const double sigma = std::sqrt(std::max(second - mean * mean, 0.0) + res.dx() * res.dx());
        lo_ = mean - kInverseCdfSigmas * sigma;
        step_ = 2.0 * kInverseCdfSigmas * sigma / static_cast<double>(kInverseCdfPoints - 1);
        cdf_.resize(kInverseCdfPoints);
        double previous = meter.density(res, lo_);
        cdf_[0] = 0.0;
        for (std::size_t i = 1; i < kInverseCdfPoints; ++i) {
            const double current = meter.density(res, lo_ + step_ * static_cast<double>(i));
            cdf_[i] = cdf_[i - 1] + 0.5 * step_ * (previous + current);
            previous = current;
        }
    }

    double sample(double u) const {
        const double target = u * cdf_.back();
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), target);
        const auto hi = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - cdf_.begin(), 1,
                                                                             static_cast<std::ptrdiff_t>(cdf_.size() - 1)));
        const double width = cdf_[hi] - cdf_[hi - 1];
        const double frac = width > 0.0 ? (target - cdf_[hi - 1]) / width : 0.5;
        return lo_ + step_ * (static_cast<double>(hi - 1) + frac);
    }

   private:
    double lo_ = 0.0;
    double step_ = 0.0;
    std::vector<double> cdf_;
};

// Per-trial Fock path. Amplitudes of the conditional state are produced one
// row of V at a time, so a trial that ends in |0> costs O(dim) instead of
// O(dim^2).
class TrialKernel {
   public:
    TrialKernel(const FockMeter &meter, const Resolution &res)
        : values_(meter.eigensystem().values()),
          rows_(meter.eigensystem().vectors()),
          rotated_(meter.rotated()),
          inv_four_d2_(0.25 / (res.dx() * res.dx())) {
    }

    std::size_t dim() const {
        return static_cast<std::size_t>(values_.size());
    }

    // weighted = g(lambda) * rotated up to a constant; returns its squared norm.
    double weigh(double x_m, Eigen::VectorXcd &weighted) const {
        double total = 0.0;
        for (Eigen::Index k = 0; k < values_.size(); ++k) {
            const double u = x_m - values_[k];
            weighted[k] = std::exp(-u * u * inv_four_d2_) * rotated_[k];
            total += std::norm(weighted[k]);
        }
        return total;
    }

    cplx amplitude(std::size_t level, const Eigen::VectorXcd &weighted) const {
        return rows_.row(static_cast<Eigen::Index>(level)).cast<cplx>().dot(weighted);
    }

   private:
    Eigen::VectorXd values_;
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows_;
    Eigen::VectorXcd rotated_;
    double inv_four_d2_;
};

struct TrialContext {
    const SamplerConfig &config;
    const TrialKernel &kernel;
    const OutcomeTable *table;
    double readout_sigma;
};

TrialRecord run_trial(const TrialContext &ctx, std::uint64_t index, Eigen::VectorXcd &weighted, double &edge_mass) {
    const auto &cfg = ctx.config;
    const auto bits = Philox4x64::block({index, 0, 0, 0}, {cfg.seed, cfg.stream});
    const double u0 = to_open_unit(bits[0]);
    const double u1 = to_open_unit(bits[1]);
    const double u_photon = to_open_unit(bits[2]);
    const double u_click = to_open_unit(bits[3]);

    TrialRecord rec;
    if (ctx.table == nullptr) {
        rec.x_m = ctx.readout_sigma * std::sqrt(-2.0 * std::log(u0)) * std::cos(2.0 * std::numbers::pi * u1);
    } else {
        rec.x_m = ctx.table->sample(u0);
    }

    const double density = ctx.kernel.weigh(rec.x_m, weighted);
    if (!(density > 1e-300)) {
        std::ostringstream os;
        os << "sampled outcome x_m = " << rec.x_m << " has vanishing Fock-path density";
        throw Error(ErrorKind::UnnormalizableOutcome, os.str());
    }
    const double p0 = std::norm(ctx.kernel.amplitude(0, weighted)) / density;
    if (cfg.photons == PhotonSampling::JumpFlag) {
        rec.n = u_photon < 1.0 - p0 ? 1 : 0;
    } else {
        const std::size_t dim = ctx.kernel.dim();
        double edge = 0.0;
        for (std::size_t level = dim - kEdgeExclusion; level < dim; ++level) {
            edge += std::norm(ctx.kernel.amplitude(level, weighted)) / density;
        }
        edge_mass = std::max(edge_mass, edge);
        double remaining = u_photon - p0;
        std::size_t n = 0;
        while (remaining >= 0.0 && n + 1 < dim) {
            ++n;
            remaining -= std::norm(ctx.kernel.amplitude(n, weighted)) / density;
        }
        rec.n = static_cast<std::uint32_t>(n);
    }
    rec.detected = rec.n >= 1 && u_click < cfg.detector.eta;
    return rec;
}

template <typename Stat, typename Estimator>
std::pair<double, double> batch_jackknife(const std::vector<Stat> &batches, Estimator &&estimator) {
    Stat total{};
    for (const auto &b : batches) {
        total += b;
    }
    const double full = estimator(total);
    const auto count = static_cast<double>(batches.size());
    if (batches.size() < 2) {
        return {full, 0.0};
    }
    std::vector<double> leave_out;
    leave_out.reserve(batches.size());
    for (const auto &b : batches) {
        Stat rest = total;
        rest -= b;
        leave_out.push_back(estimator(rest));
    }
    double mean = 0.0;
    for (double v : leave_out) {
        mean += v;
    }
    mean /= count;
    double ss = 0.0;
    for (double v : leave_out) {
        ss += (v - mean) * (v - mean);
    }
    return {full, std::sqrt((count - 1.0) / count * ss)};
}

template <std::size_t N>
struct Sums {
    std::array<double, N> v{};
    Sums &operator+=(const Sums &o) {
        for (std::size_t i = 0; i < N; ++i) {
            v[i] += o.v[i];
        }
        return *this;
    }
    Sums &operator-=(const Sums &o) {
        for (std::size_t i = 0; i < N; ++i) {
            v[i] -= o.v[i];
        }
        return *this;
    }
};

std::size_t batch_count(std::size_t n) {
    return std::min(kBatchCount, n);
}

std::size_t batch_of(std::size_t i, std::size_t n, std::size_t batches) {
    return i * batches / n;
}

}  // namespace

void DetectorModel::validate() const {
    if (!(eta > 0.0 && eta <= 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "detector efficiency eta must lie in (0, 1]");
    }
    if (!(xi > 0.0 && xi <= 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "readout efficiency xi must lie in (0, 1]");
    }
}

TrialSet sample_trials(const SamplerConfig &config) {
    if (config.n_trials < 1) {
        throw Error(ErrorKind::InvalidArgument, "n_trials must be at least 1");
    }
    config.detector.validate();
    const FockVector state = config.input.fock(config.dim);
    const FockMeter meter(state);
    const bool vacuum = config.input.kind == InputState::Kind::Vacuum;
    std::unique_ptr<OutcomeTable> table;
    if (!vacuum) {
        table = std::make_unique<OutcomeTable>(meter, state, config.res);
    }
    const TrialKernel kernel(meter, config.res);
    const TrialContext ctx{config, kernel, table.get(), std::sqrt(config.res.outcome_variance())};

    TrialSet out;
    out.seed = config.seed;
    out.stream = config.stream;
    out.dim = config.dim;
    out.photons = config.photons;
    out.readout_method = vacuum ? "box-muller" : "inverse-cdf";
    out.trials.resize(config.n_trials);

    unsigned threads = config.threads != 0 ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, config.n_trials));
    std::vector<double> edge(threads, 0.0);
    std::vector<std::exception_ptr> failures(threads);
    auto work = [&](unsigned t) {
        const std::size_t begin = config.n_trials * t / threads;
        const std::size_t end = config.n_trials * (t + 1) / threads;
        Eigen::VectorXcd weighted(static_cast<Eigen::Index>(kernel.dim()));
        try {
            for (std::size_t i = begin; i < end; ++i) {
                out.trials[i] = run_trial(ctx, i, weighted, edge[t]);
            }
        } catch (...) {
            failures[t] = std::current_exception();
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back(work, t);
        }
    }
    for (const auto &f : failures) {
        if (f) {
            std::rethrow_exception(f);
        }
    }
    out.max_edge_mass = *std::max_element(edge.begin(), edge.end());
    if (out.max_edge_mass > kMaxTrialEdgeMass) {
        std::ostringstream os;
        os << "post-measurement states reach " << out.max_edge_mass << " probability in the top "
           << kEdgeExclusion << " levels of dim " << config.dim << "; increase the Fock dimension";
        throw Error(ErrorKind::Truncation, os.str());
    }
    return out;
}

TrialSet sample_partitioned(const SamplerConfig &config, std::size_t substreams) {
    if (substreams < 1) {
        throw Error(ErrorKind::InvalidArgument, "need at least one sub-stream");
    }
    TrialSet merged;
    for (std::size_t j = 0; j < substreams; ++j) {
        SamplerConfig part = config;
        part.stream = j + 1;
        part.n_trials = config.n_trials * (j + 1) / substreams - config.n_trials * j / substreams;
        TrialSet piece = sample_trials(part);
        if (j == 0) {
            merged = std::move(piece);
            merged.stream = 0;
            continue;
        }
        merged.trials.insert(merged.trials.end(), piece.trials.begin(), piece.trials.end());
        merged.max_edge_mass = std::max(merged.max_edge_mass, piece.max_edge_mass);
    }
    return merged;
}

EstimatorReport estimate_correlation(const TrialSet &set) {
    const std::size_t n = set.trials.size();
    if (n < kMinCorrelationTrials) {
        std::ostringstream os;
        os << "correlation estimate needs >= " << kMinCorrelationTrials << " trials, got " << n;
        throw Error(ErrorKind::TooFewTrials, os.str());
    }
    if (set.photons != PhotonSampling::FullFock) {
        throw Error(ErrorKind::InvalidArgument, "correlation estimate needs full photon-number sampling");
    }
    using S = Sums<4>;  // count, x^2, n, x^2 n
    std::vector<S> batches(batch_count(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto &t = set.trials[i];
        const double x2 = t.x_m * t.x_m;
        auto &b = batches[batch_of(i, n, batches.size())];
        b.v[0] += 1.0;
        b.v[1] += x2;
        b.v[2] += t.n;
        b.v[3] += x2 * t.n;
    }
    auto [estimate, se] = batch_jackknife(batches, [](const S &s) {
        const double c = s.v[0];
        return s.v[3] / c - (s.v[1] / c) * (s.v[2] / c);
    });
    return EstimatorReport{estimate, se, n, set.seed, "batch-jackknife-32"};
}

EstimatorReport measured_correlation(const EstimatorReport &correlation, const DetectorModel &detector) {
    EstimatorReport out = correlation;
    out.estimate *= detector.xi;
    out.std_error *= detector.xi;
    return out;
}

JumpStatistics jump_statistics(const TrialSet &set, const DetectorModel &detector) {
    detector.validate();
    const std::size_t n = set.trials.size();
    JumpStatistics out;
    for (const auto &t : set.trials) {
        out.detected_events += t.detected ? 1 : 0;
    }
    if (out.detected_events < kMinDetectedEvents) {
        std::ostringstream os;
        os << "jump statistics need >= " << kMinDetectedEvents << " detected events, got " << out.detected_events;
        throw Error(ErrorKind::InsufficientEvents, os.str());
    }
    using S = Sums<4>;  // count, x^2, detected, x^2 detected
    std::vector<S> batches(batch_count(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto &t = set.trials[i];
        const double x2 = t.x_m * t.x_m;
        auto &b = batches[batch_of(i, n, batches.size())];
        b.v[0] += 1.0;
        b.v[1] += x2;
        if (t.detected) {
            b.v[2] += 1.0;
            b.v[3] += x2;
        }
    }

    // Jump fraction: plain batch means.
    S total{};
    for (const auto &b : batches) {
        total += b;
    }
    const double fraction = total.v[2] / (detector.eta * total.v[0]);
    double ss = 0.0;
    for (const auto &b : batches) {
        const double fb = b.v[2] / (detector.eta * b.v[0]);
        ss += (fb - fraction) * (fb - fraction);
    }
    const auto nb = static_cast<double>(batches.size());
    const double fraction_se = nb > 1 ? std::sqrt(ss / (nb - 1.0) / nb) : 0.0;
    out.jump_fraction = EstimatorReport{fraction, fraction_se, n, set.seed, "batch-means-32"};

    auto [ratio, ratio_se] = batch_jackknife(batches, [](const S &s) {
        return (s.v[3] / s.v[2]) / (s.v[1] / s.v[0]);
    });
    out.conditional_ratio = EstimatorReport{ratio, ratio_se, n, set.seed, "batch-jackknife-32"};
    return out;
}

}  // namespace qnd
