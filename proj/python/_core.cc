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

#include <sstream>
#include <string>
#include <vector>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qndsim/cli.h"
#include "qndsim/error.h"
#include "qndsim/fock.h"
#include "qndsim/gaussian.h"
#include "qndsim/input_state.h"
#include "qndsim/measurement.h"
#include "qndsim/montecarlo.h"
#include "qndsim/rng.h"
#include "qndsim/twomode.h"
#include "qndsim/wigner.h"

namespace py = pybind11;
using namespace qnd;

namespace {

Resolution res_of(double dx) {
    return Resolution::from_dx(dx);
}

FockVector state_of(const Eigen::VectorXcd &amps) {
    return FockVector(amps);
}

py::dict gaussian_state_dict(const GaussianXYState &s) {
    py::dict d;
    d["mean_x"] = s.mean_x;
    d["mean_y"] = s.mean_y;
    d["var_x"] = s.var_x;
    d["var_y"] = s.var_y;
    return d;
}

py::dict report_dict(const EstimatorReport &r) {
    py::dict d;
    d["estimate"] = r.estimate;
    d["std_error"] = r.std_error;
    d["n_trials"] = r.n_trials;
    d["seed"] = r.seed;
    d["method"] = r.method;
    return d;
}

TrialSet sample(const std::string &input, double dx, std::size_t n_trials, std::uint64_t seed, std::uint64_t stream,
                double eta, double xi, std::size_t dim, unsigned threads) {
    SamplerConfig cfg;
    cfg.input = InputState::parse(input);
    cfg.res = Resolution::from_dx(dx);
    cfg.n_trials = n_trials;
    cfg.seed = seed;
    cfg.stream = stream;
    cfg.detector = DetectorModel{eta, xi};
    cfg.dim = dim;
    cfg.threads = threads;
    return sample_trials(cfg);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Finite-resolution QND quadrature measurement simulator";

    static py::exception<Error> error_type(m, "QndError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) {
                std::rethrow_exception(p);
            }
        } catch (const Error &e) {
            py::object exc = py::reinterpret_borrow<py::object>(error_type.ptr())(e.what());
            exc.attr("kind") = std::string(error_kind_name(e.kind()));
            PyErr_SetObject(error_type.ptr(), exc.ptr());
        } catch (const cli::ValidationError &e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        }
    });

    // Closed-form Gaussian results.
    m.def("outcome_pdf", [](double dx, double x_m) { return outcome_pdf(res_of(dx), x_m); }, py::arg("dx"),
          py::arg("x_m"));
    m.def("post_state", [](double dx, double x_m) { return gaussian_state_dict(post_state(res_of(dx), x_m)); },
          py::arg("dx"), py::arg("x_m"));
    m.def("post_photon_expectation", [](double dx, double x_m) { return post_photon_expectation(res_of(dx), x_m); },
          py::arg("dx"), py::arg("x_m"));
    m.def("analytic_correlation", [](double dx) { return analytic_correlation(res_of(dx)); }, py::arg("dx"));
    m.def("zero_photon_pdf", [](double dx, double x_m) { return zero_photon_pdf(res_of(dx), x_m); }, py::arg("dx"),
          py::arg("x_m"));
    m.def("jump_pdf", [](double dx, double x_m) { return jump_pdf(res_of(dx), x_m); }, py::arg("dx"), py::arg("x_m"));
    m.def("jump_probability", [](double dx) { return jump_probability(res_of(dx)); }, py::arg("dx"));
    m.def("jump_probability_numeric", [](double dx) { return jump_probability_numeric(res_of(dx)); }, py::arg("dx"));
    m.def("conditional_second_moment", [](double dx) { return conditional_second_moment(res_of(dx)); },
          py::arg("dx"));
    m.def("conditional_fluctuation_ratio", [](double dx) { return conditional_fluctuation_ratio(res_of(dx)); },
          py::arg("dx"));
    m.def("jump_peak_location", [](double dx) { return jump_peak_location(res_of(dx)); }, py::arg("dx"));

    // Fock-space path. States travel as complex numpy vectors.
    m.def("input_state", [](const std::string &desc, std::size_t dim) { return InputState::parse(desc).fock(dim).amps; },
          py::arg("descriptor"), py::arg("dim"), "Fock amplitudes for 'vacuum', 'coherent:RE[,IM]' or 'squeezed:R'.");
    m.def("measure",
          [](const Eigen::VectorXcd &amps, double dx, double x_m) {
              const MeasurementOutcome out = FockMeter(state_of(amps)).measure(res_of(dx), x_m);
              return py::make_tuple(out.post.amps, out.density);
          },
          py::arg("state"), py::arg("dx"), py::arg("x_m"), "Returns (normalized post state, outcome density).");
    m.def("outcome_density",
          [](const Eigen::VectorXcd &amps, double dx, const std::vector<double> &x_m) {
              const FockMeter meter(state_of(amps));
              std::vector<double> out;
              out.reserve(x_m.size());
              for (double x : x_m) {
                  out.push_back(meter.density(res_of(dx), x));
              }
              return out;
          },
          py::arg("state"), py::arg("dx"), py::arg("x_m"));
    m.def("fock_jump_probability",
          [](const Eigen::VectorXcd &amps, double dx) { return fock_jump_probability(state_of(amps), res_of(dx)); },
          py::arg("state"), py::arg("dx"));
    m.def("povm_completeness_residual",
          [](double dx, std::size_t dim, double step) { return povm_completeness_residual(res_of(dx), dim, step); },
          py::arg("dx"), py::arg("dim") = 32, py::arg("step") = 0.01);
    m.def("ordering_expectations",
          [](const Eigen::VectorXcd &amps) {
              const OrderingExpectations o = ordering_expectations(state_of(amps));
              py::dict d;
              d["xnx"] = o.xnx;
              d["sym"] = o.sym;
              d["nxx_xxn_half"] = o.nxx_xxn_half;
              return d;
          },
          py::arg("state"));
    m.def("correlation_operator_form",
          [](const Eigen::VectorXcd &amps, double dx) { return correlation_operator_form(state_of(amps), res_of(dx)); },
          py::arg("state"), py::arg("dx"));

    // Two-mode oracle.
    m.def("required_meter_dim", &required_meter_dim, py::arg("dim_s"), py::arg("f"));
    m.def("coupling_from_amplification", &coupling_from_amplification, py::arg("a"));
    m.def("conditional_signal",
          [](const Eigen::VectorXcd &signal, double f, std::size_t dim_m, double x_M) {
              const MeterProjection p = meter_projection(entangle(state_of(signal), f, dim_m), x_M);
              return py::make_tuple(p.conditional_signal.amps, p.joint_density);
          },
          py::arg("signal"), py::arg("f"), py::arg("dim_m"), py::arg("x_M"),
          "Entangle with a vacuum meter, project the meter on x_M; returns (state, density in x_M).");
    m.def("fidelity", [](const Eigen::VectorXcd &a, const Eigen::VectorXcd &b) { return fidelity(state_of(a), state_of(b)); },
          py::arg("a"), py::arg("b"));

    // Wigner moments.
    m.def("intensity_correlation",
          [](double mean_x, double mean_y, double var_x, double var_y) {
              return intensity_correlation(GaussianWigner{mean_x, mean_y, var_x, var_y});
          },
          py::arg("mean_x") = 0.0, py::arg("mean_y") = 0.0, py::arg("var_x") = 0.25, py::arg("var_y") = 0.25);
    m.def("post_interaction_correlation",
          [](const std::string &desc, double dx) {
              return intensity_correlation(post_interaction_wigner(InputState::parse(desc).wigner(), res_of(dx)));
          },
          py::arg("descriptor"), py::arg("dx"));

    // Monte Carlo.
    m.def("sample_trials",
          [](const std::string &input, double dx, std::size_t n_trials, std::uint64_t seed, std::uint64_t stream,
             double eta, double xi, std::size_t dim, unsigned threads) {
              const TrialSet set = sample(input, dx, n_trials, seed, stream, eta, xi, dim, threads);
              std::vector<double> x(set.trials.size());
              std::vector<std::uint32_t> n(set.trials.size());
              std::vector<bool> detected(set.trials.size());
              for (std::size_t i = 0; i < set.trials.size(); ++i) {
                  x[i] = set.trials[i].x_m;
                  n[i] = set.trials[i].n;
                  detected[i] = set.trials[i].detected;
              }
              py::dict d;
              d["x_m"] = x;
              d["n"] = n;
              d["detected"] = detected;
              d["readout_method"] = set.readout_method;
              return d;
          },
          py::arg("input") = "vacuum", py::arg("dx") = 1.0, py::arg("n_trials") = 10000, py::arg("seed") = 1,
          py::arg("stream") = 0, py::arg("eta") = 1.0, py::arg("xi") = 1.0, py::arg("dim") = kDefaultTrialDim,
          py::arg("threads") = 0);
    m.def("estimate",
          [](const std::string &input, double dx, std::size_t n_trials, std::uint64_t seed, double eta, double xi,
             std::size_t dim) {
              const TrialSet set = sample(input, dx, n_trials, seed, 0, eta, xi, dim, 0);
              const DetectorModel det{eta, xi};
              const JumpStatistics js = jump_statistics(set, det);
              py::dict d;
              d["correlation"] = report_dict(estimate_correlation(set));
              d["jump_fraction"] = report_dict(js.jump_fraction);
              d["conditional_ratio"] = report_dict(js.conditional_ratio);
              d["detected_events"] = js.detected_events;
              return d;
          },
          py::arg("input") = "vacuum", py::arg("dx") = 1.0, py::arg("n_trials") = 100000, py::arg("seed") = 1,
          py::arg("eta") = 1.0, py::arg("xi") = 1.0, py::arg("dim") = kDefaultTrialDim,
          "Sample trials and return correlation, jump-fraction and conditional-ratio estimators.");
    m.def("philox_block",
          [](const std::array<std::uint64_t, 4> &counter, const std::array<std::uint64_t, 2> &key) {
              return Philox4x64::block(counter, key);
          },
          py::arg("counter"), py::arg("key"));

    m.def("run_cli",
          [](const std::vector<std::string> &args) {
              std::vector<std::string> full{"qndsim"};
              full.insert(full.end(), args.begin(), args.end());
              std::vector<const char *> argv;
              for (const auto &a : full) {
                  argv.push_back(a.c_str());
              }
              std::ostringstream out;
              std::ostringstream err;
              int code = 0;
              {
                  py::gil_scoped_release release;
                  code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
              }
              return py::make_tuple(code, out.str(), err.str());
          },
          py::arg("args"), "Run a CLI command in-process; returns (exit_code, stdout, stderr).");

    m.attr("__version__") = QNDSIM_VERSION;
}
