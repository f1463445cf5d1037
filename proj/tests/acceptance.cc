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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "qndsim/error.h"
#include "qndsim/fock.h"
#include "qndsim/gaussian.h"
#include "qndsim/input_state.h"
#include "qndsim/measurement.h"
#include "qndsim/montecarlo.h"
#include "qndsim/twomode.h"
#include "qndsim/wigner.h"

using namespace qnd;

namespace {

class Criterion {
   public:
    explicit Criterion(std::string title) : title_(std::move(title)) {
    }

    void expect(bool ok, const std::string &what) {
        if (!ok) {
            failures_.push_back(what);
        }
    }

    void near(double value, double target, double tol, const std::string &what) {
        std::ostringstream os;
        os.precision(12);
        os << what << " = " << value << " (target " << target << " +- " << tol << ")";
        expect(std::abs(value - target) <= tol, os.str());
    }

    std::vector<std::string> &failures() {
        return failures_;
    }
    const std::string &title() const {
        return title_;
    }

   private:
    std::string title_;
    std::vector<std::string> failures_;
};

struct Entry {
    int id;
    std::string title;
    double budget_seconds;  // 0 = no runtime bound
    std::function<void(Criterion &)> body;
};

double z(const EstimatorReport &r, double truth) {
    return (r.estimate - truth) / r.std_error;
}

void correlation_constant(Criterion &c) {
    for (double dx : {0.1, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0}) {
        c.near(analytic_correlation(Resolution::from_dx(dx)), 0.125, 1e-9, "C(dx=" + std::to_string(dx) + ")");
    }
}

void jump_probability_criterion(Criterion &c) {
    const auto res = Resolution::from_dx(1.0);
    c.near(jump_probability(res), 0.0572, 1e-4, "closed-form jump probability");
    c.near(jump_probability_numeric(res), 0.0572, 1e-4, "integrated jump probability");
}

void ratio_criterion(Criterion &c) {
    c.near(conditional_fluctuation_ratio(Resolution::from_dx(1.0)), 2.6485, 1e-3, "ratio at dx=1");
    const double five = conditional_fluctuation_ratio(Resolution::from_dx(5.0));
    c.expect(five >= 2.85 && five <= 3.0, "ratio at dx=5 = " + std::to_string(five) + " outside [2.85, 3.0]");
}

void geometry_criterion(Criterion &c) {
    const GaussianXYState s = post_state(Resolution::from_dx(0.5), -0.5);
    c.expect(s.mean_x == -0.25, "mean_x = " + std::to_string(s.mean_x));
    c.near(std::sqrt(s.var_x) / 0.5, 1.0 / std::sqrt(2.0), 1e-12, "std_x / std_vac");
    c.near(std::sqrt(s.var_y) / 0.5, std::sqrt(2.0), 1e-12, "std_y / std_vac");
}

void ordering_criterion(Criterion &c) {
    for (std::size_t dim = 4; dim <= 64; ++dim) {
        c.near(ordering_expectations(FockVector::vacuum(dim)).xnx, 0.25, 1e-12, "vacuum xnx, dim " + std::to_string(dim));
    }
    for (std::size_t n = 0; n + 8 <= 32; ++n) {
        c.near(ordering_expectations(FockVector::basis(n, 32)).nxx_xxn_half, 0.25, 1e-10,
               "ordering identity, n = " + std::to_string(n));
    }
}

void oracle_criterion(Criterion &c) {
    const FockMeter meter(FockVector::vacuum(64));
    for (double dx : {0.25, 0.5, 0.75, 1.0, 1.5, 2.0}) {
        const auto res = Resolution::from_dx(dx);
        double worst = 0.0;
        for (int i = -400; i <= 400; ++i) {
            const double x = 0.01 * i;
            worst = std::max(worst, std::abs(meter.density(res, x) - outcome_pdf(res, x)));
        }
        c.expect(worst <= 1e-6, "density sup error " + std::to_string(worst) + " at dx " + std::to_string(dx));
    }
    for (double f : {0.5, 1.0}) {
        const auto res = Resolution::from_coupling(f);
        const CouplingUnitary u = build_coupling_unitary(f, 32, 48);
        for (const FockVector &signal : {FockVector::vacuum(32), coherent_state(cplx(0.5, 0.3), 32),
                                         squeezed_vacuum(0.5, 32), FockVector::basis(2, 32)}) {
            const TwoModeState joint = u.apply_to_vacuum_meter(signal);
            for (int i = -12; i <= 12; ++i) {
                const double xm = 0.25 * i;
                const double fid =
                    fidelity(meter_projection(joint, f * xm).conditional_signal,
                             apply_measurement(signal, build_measurement_operator(res, xm, 32)).post);
                c.expect(fid >= 1.0 - 1e-6, "fidelity " + std::to_string(fid) + " at f " + std::to_string(f));
            }
        }
    }
}

void montecarlo_criterion(Criterion &c) {
    const auto res = Resolution::from_dx(1.0);
    SamplerConfig cfg;
    cfg.res = res;
    cfg.n_trials = 1000000;
    cfg.seed = 20260101;
    const TrialSet set = sample_trials(cfg);
    const EstimatorReport corr = estimate_correlation(set);
    const JumpStatistics js = jump_statistics(set, cfg.detector);
    c.expect(std::abs(z(corr, analytic_correlation(res))) <= 3, "correlation z = " + std::to_string(z(corr, 0.125)));
    c.expect(std::abs(z(js.jump_fraction, jump_probability(res))) <= 3,
             "jump fraction z = " + std::to_string(z(js.jump_fraction, jump_probability(res))));
    const double ratio = conditional_fluctuation_ratio(res);
    c.expect(std::abs(z(js.conditional_ratio, ratio)) <= 3,
             "conditional ratio z = " + std::to_string(z(js.conditional_ratio, ratio)));

    for (double eta : {0.1, 1.0}) {
        SamplerConfig eta_cfg = cfg;
        eta_cfg.detector.eta = eta;
        eta_cfg.seed = cfg.seed + 1;
        const JumpStatistics e = jump_statistics(sample_trials(eta_cfg), eta_cfg.detector);
        c.expect(std::abs(z(e.conditional_ratio, ratio)) <= 3,
                 "ratio z at eta " + std::to_string(eta) + " = " + std::to_string(z(e.conditional_ratio, ratio)));
    }

    const TrialSet replay = sample_trials(cfg);
    bool identical = replay.trials.size() == set.trials.size();
    for (std::size_t i = 0; identical && i < set.trials.size(); ++i) {
        identical = std::memcmp(&replay.trials[i].x_m, &set.trials[i].x_m, sizeof(double)) == 0 &&
                    replay.trials[i].n == set.trials[i].n && replay.trials[i].detected == set.trials[i].detected;
    }
    c.expect(identical, "seeded replay differs");
}

void wigner_criterion(Criterion &c) {
    c.near(quadrature_fourth_moment_excess(GaussianWigner::vacuum()), 0.125, 1e-12, "vacuum fourth-moment relation");
    const auto res = Resolution::from_dx(1.0);
    c.near(intensity_correlation(GaussianWigner::vacuum()), analytic_correlation(res), 1e-9,
           "intensity correlation vs analytic");
    for (const char *desc : {"coherent:1", "squeezed:0.5"}) {
        const InputState in = InputState::parse(desc);
        for (double dx : {0.5, 1.0, 2.0}) {
            const auto r = Resolution::from_dx(dx);
            c.near(correlation_operator_form(in.fock(64), r), intensity_correlation(post_interaction_wigner(in.wigner(), r)),
                   1e-5, std::string(desc) + " Fock vs Wigner at dx " + std::to_string(dx));
        }
    }
}

void property_criterion(Criterion &c) {
    for (double dx : {0.25, 1.0, 4.0}) {
        const double povm = povm_completeness_residual(Resolution::from_dx(dx), 32, 0.01);
        c.expect(povm <= 1e-6, "POVM residual " + std::to_string(povm));
    }
    const FockVector in = coherent_state(cplx(0.4, 0.2), 48);
    const FockMeter meter(in);
    for (double dx : {0.3, 1.0, 3.0}) {
        const auto res = Resolution::from_dx(dx);
        for (int i = -30; i <= 30; ++i) {
            const double xm = 0.1 * i;
            const MeasurementOutcome out = meter.measure(res, xm);
            c.expect(std::abs(out.post.norm_squared() - 1.0) <= 1e-12, "post state normalization");
            c.expect(out.density >= 0.0 && meter.zero_photon_density(res, xm) <= out.density + 1e-15,
                     "density ordering P0 <= P");
            c.expect(jump_pdf(res, xm) >= 0.0, "jump density negative");
        }
        const double pj = fock_jump_probability(in, res);
        c.expect(pj > 0.0 && pj < 1.0, "jump probability outside (0, 1)");
        const CorrelationForms forms = correlation_forms(in, res);
        c.near(forms.total_probability, 1.0, 1e-8, "outcome density normalization");
    }
    const auto ops = build_operators(32);
    const OperatorMatrix x2(ops.x.entries * ops.x.entries, true);
    for (double f : {0.5, 1.0}) {
        const FockVector signal = coherent_state(cplx(0.7, -0.4), 32);
        const TwoModeState joint = entangle(signal, f, 48);
        c.near(reduced_signal_expectation(joint, ops.x), expectation(signal, ops.x).real(), 1e-10, "x_S preserved");
        c.near(reduced_signal_expectation(joint, x2), expectation(signal, x2).real(), 1e-10, "x_S^2 preserved");
        c.near(joint.amps.squaredNorm(), 1.0, 1e-12, "joint normalization");
    }
}

}  // namespace

int main() {
    const std::vector<Entry> entries{
        {1, "correlation constant 1/8 across resolutions", 1.0, correlation_constant},
        {2, "jump probability 0.0572 at dx=1", 1.0, jump_probability_criterion},
        {3, "conditional fluctuation ratio", 1.0, ratio_criterion},
        {4, "post-measurement ellipse geometry", 0.0, geometry_criterion},
        {5, "operator ordering identities", 0.0, ordering_criterion},
        {6, "cross-path oracle equivalence", 60.0, oracle_criterion},
        {7, "Monte Carlo statistical suite", 120.0, montecarlo_criterion},
        {8, "Wigner equivalence", 0.0, wigner_criterion},
        {9, "property suites", 0.0, property_criterion},
    };
    int failed = 0;
    for (const auto &entry : entries) {
        Criterion c(entry.title);
        const auto start = std::chrono::steady_clock::now();
        try {
            entry.body(c);
        } catch (const std::exception &e) {
            c.failures().push_back(std::string("exception: ") + e.what());
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (entry.budget_seconds > 0.0 && seconds > entry.budget_seconds) {
            c.failures().push_back("runtime " + std::to_string(seconds) + " s exceeds " +
                                   std::to_string(entry.budget_seconds) + " s");
        }
        const bool ok = c.failures().empty();
        failed += ok ? 0 : 1;
        std::printf("%s criterion %d: %s (%.3f s)\n", ok ? "PASS" : "FAIL", entry.id, entry.title.c_str(), seconds);
        for (const auto &f : c.failures()) {
            std::printf("    %s\n", f.c_str());
        }
    }
    return failed == 0 ? 0 : 1;
}
