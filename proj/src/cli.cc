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

#include "qndsim/cli.h"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"
#include "qndsim/error.h"
#include "qndsim/fock.h"
#include "qndsim/gaussian.h"
#include "qndsim/input_state.h"
#include "qndsim/measurement.h"
#include "qndsim/montecarlo.h"
#include "qndsim/rng.h"
#include "qndsim/twomode.h"
#include "qndsim/wigner.h"

#ifndef QNDSIM_VERSION
#define QNDSIM_VERSION "0.0.0"
#endif

namespace qnd::cli {

using nlohmann::json;

namespace {

constexpr std::size_t kDefaultSweepTrials = 1000000;
constexpr std::size_t kDefaultMcTrials = 100000;
constexpr double kDefaultGridSigmas = 8.0;
constexpr double kMinGridSigmas = 6.0;

struct NamedCommand {
    Command command;
    const char *name;
};

constexpr NamedCommand kCommands[] = {
    {Command::Distributions, "distributions"}, {Command::Poststate, "poststate"},
    {Command::Correlation, "correlation"},     {Command::JumpStats, "jump-stats"},
    {Command::OracleCheck, "oracle-check"},    {Command::Ordering, "ordering"},
    {Command::Mc, "mc"},
};

json provenance(const RunConfig &cfg) {
    json meta;
    meta["command"] = command_name(cfg.command);
    meta["parameters"] = config_to_json(cfg);
    meta["seed"] = cfg.seed;
    meta["library_version"] = QNDSIM_VERSION;
    meta["rng"] = std::string(Philox4x64::kName);
    return meta;
}

json estimator_json(const EstimatorReport &r) {
    return json{{"estimate", r.estimate},
                {"std_error", r.std_error},
                {"n_trials", r.n_trials},
                {"seed", r.seed},
                {"method", r.method}};
}

std::vector<double> uniform_points(double half, double step) {
    const auto intervals = static_cast<std::size_t>(std::ceil(2.0 * half / step - 1e-9));
    std::vector<double> pts(intervals + 1);
    for (std::size_t i = 0; i <= intervals; ++i) {
        pts[i] = -half + 2.0 * half * static_cast<double>(i) / static_cast<double>(intervals);
    }
    return pts;
}

std::size_t positive_size(const json &v, const std::string &key) {
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ValidationError(key, "must be a non-negative integer");
    }
    return v.get<std::size_t>();
}

double number(const json &v, const std::string &key) {
    if (!v.is_number()) {
        throw ValidationError(key, "must be a number");
    }
    return v.get<double>();
}

void require(bool ok, const std::string &field, const std::string &message) {
    if (!ok) {
        throw ValidationError(field, message);
    }
}

SamplerConfig sampler_for(const RunConfig &cfg, const Resolution &res, std::uint64_t stream) {
    SamplerConfig s;
    s.input = InputState::parse(cfg.input);
    s.res = res;
    s.n_trials = cfg.trials;
    s.seed = cfg.seed;
    s.stream = stream;
    s.detector = DetectorModel{cfg.eta, cfg.xi};
    s.dim = cfg.dim;
    s.threads = cfg.threads;
    return s;
}

json null_if_nan(double v) {
    return std::isfinite(v) ? json(v) : json(nullptr);
}

void add_check(Dataset &d, const std::string &name, double value, double threshold, bool passed,
               const std::string &detail = "") {
    d.rows.push_back({name, null_if_nan(value), threshold, passed, detail});
    if (!passed) {
        d.verification_failed = true;
    }
}

std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

std::string csv_cell(const json &cell) {
    if (cell.is_null()) {
        return "";
    }
    if (cell.is_boolean()) {
        return cell.get<bool>() ? "true" : "false";
    }
    if (cell.is_number_integer()) {
        return cell.dump();
    }
    if (cell.is_number()) {
        return format_number(cell.get<double>());
    }
    std::string s = cell.get<std::string>();
    if (s.find_first_of(",\"\n") != std::string::npos) {
        std::string quoted = "\"";
        for (char c : s) {
            quoted += c;
            if (c == '"') {
                quoted += '"';
            }
        }
        return quoted + "\"";
    }
    return s;
}

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Nonconvergence:
        case ErrorKind::Eigendecomposition:
        case ErrorKind::UnnormalizableOutcome:
        case ErrorKind::EdgeContamination:
            return kExitVerification;
        default:
            return kExitValidation;
    }
}

}  // namespace

std::string command_name(Command c) {
    for (const auto &entry : kCommands) {
        if (entry.command == c) {
            return entry.name;
        }
    }
    return "unknown";
}

std::optional<Command> parse_command(const std::string &name) {
    for (const auto &entry : kCommands) {
        if (name == entry.name) {
            return entry.command;
        }
    }
    return std::nullopt;
}

ValidationError::ValidationError(std::string field, const std::string &message)
    : std::runtime_error("invalid --" + field + ": " + message), field_(std::move(field)) {
}

RunConfig resolve(RunConfig cfg) {
    if (cfg.trials == 0) {
        switch (cfg.command) {
            case Command::Correlation:
            case Command::JumpStats:
                cfg.trials = kDefaultSweepTrials;
                break;
            case Command::Mc:
                cfg.trials = kDefaultMcTrials;
                break;
            default:
                break;
        }
    }
    require(std::isfinite(cfg.dx) && cfg.dx >= Resolution::kMinDx, "dx", "must be finite and >= 1e-06");
    require(std::isfinite(cfg.x_m), "x-m", "must be finite");
    require(cfg.dim >= 2, "dim", "must be >= 2");
    const bool fock_command = cfg.command == Command::Correlation || cfg.command == Command::JumpStats ||
                              cfg.command == Command::Mc || cfg.command == Command::OracleCheck;
    if (fock_command) {
        require(cfg.dim >= kMinMeasurementDim, "dim",
                "measurement paths need dim >= " + std::to_string(kMinMeasurementDim));
    }
    if (cfg.command == Command::Ordering) {
        require(cfg.dim >= 8, "dim", "ordering table needs dim >= 8");
    }
    require(cfg.dim_signal >= kMinTwoModeDim, "dim-signal", "must be >= " + std::to_string(kMinTwoModeDim));
    require(cfg.dim_meter >= kMinTwoModeDim, "dim-meter", "must be >= " + std::to_string(kMinTwoModeDim));
    if (cfg.command == Command::Correlation || cfg.command == Command::JumpStats) {
        require(cfg.trials >= kMinCorrelationTrials, "trials",
                "must be >= " + std::to_string(kMinCorrelationTrials) + " for estimators");
    }
    if (cfg.command == Command::Mc) {
        require(cfg.trials >= 1, "trials", "must be >= 1");
    }
    require(cfg.eta > 0.0 && cfg.eta <= 1.0, "eta", "must lie in (0, 1]");
    require(cfg.xi > 0.0 && cfg.xi <= 1.0, "xi", "must lie in (0, 1]");
    require(std::isfinite(cfg.grid_span) && cfg.grid_span >= 0.0, "grid-span", "must be >= 0 (0 = automatic)");
    require(std::isfinite(cfg.grid_step) && cfg.grid_step > 0.0, "grid-step", "must be > 0");
    require(cfg.contour_points >= 4, "contour-points", "must be >= 4");
    try {
        InputState::parse(cfg.input);
    } catch (const Error &e) {
        throw ValidationError("input", "expected vacuum, coherent:RE[,IM] or squeezed:R");
    }
    for (double v : cfg.sweep) {
        require(std::isfinite(v) && v >= Resolution::kMinDx, "sweep", "every resolution must be >= 1e-06");
    }
    if (cfg.command == Command::Correlation && cfg.sweep.empty()) {
        cfg.sweep = {0.25, 0.5, 1.0, 2.0, 5.0};
    }
    if (cfg.command == Command::Distributions && cfg.grid_span > 0.0) {
        const double need = kMinGridSigmas * std::sqrt(cfg.dx * cfg.dx + 0.25);
        require(cfg.grid_span >= need, "grid-span",
                "must cover six standard deviations of P (>= " + format_number(need) + ")");
    }
    return cfg;
}

json config_to_json(const RunConfig &cfg) {
    return json{
        {"command", command_name(cfg.command)},
        {"dx", cfg.dx},
        {"x-m", cfg.x_m},
        {"dim", cfg.dim},
        {"dim-signal", cfg.dim_signal},
        {"dim-meter", cfg.dim_meter},
        {"trials", cfg.trials},
        {"seed", cfg.seed},
        {"eta", cfg.eta},
        {"xi", cfg.xi},
        {"grid-span", cfg.grid_span},
        {"grid-step", cfg.grid_step},
        {"input", cfg.input},
        {"sweep", cfg.sweep},
        {"contour-points", cfg.contour_points},
        {"threads", cfg.threads},
        {"out", cfg.output_path},
        {"format", cfg.format == Format::Csv ? "csv" : "json"},
    };
}

void apply_config_json(RunConfig &cfg, const json &doc, const std::vector<std::string> &locked) {
    if (!doc.is_object()) {
        throw ValidationError("config", "config file must hold a flat JSON object");
    }
    for (const auto &[raw_key, value] : doc.items()) {
        std::string key = raw_key;
        std::replace(key.begin(), key.end(), '_', '-');
        if (std::find(locked.begin(), locked.end(), key) != locked.end()) {
            continue;
        }
        if (key == "dx") {
            cfg.dx = number(value, key);
        } else if (key == "x-m") {
            cfg.x_m = number(value, key);
        } else if (key == "dim") {
            cfg.dim = positive_size(value, key);
        } else if (key == "dim-signal") {
            cfg.dim_signal = positive_size(value, key);
        } else if (key == "dim-meter") {
            cfg.dim_meter = positive_size(value, key);
        } else if (key == "trials") {
            cfg.trials = positive_size(value, key);
        } else if (key == "seed") {
            cfg.seed = positive_size(value, key);
        } else if (key == "eta") {
            cfg.eta = number(value, key);
        } else if (key == "xi") {
            cfg.xi = number(value, key);
        } else if (key == "grid-span") {
            cfg.grid_span = number(value, key);
        } else if (key == "grid-step") {
            cfg.grid_step = number(value, key);
        } else if (key == "input") {
            require(value.is_string(), key, "must be a string");
            cfg.input = value.get<std::string>();
        } else if (key == "sweep") {
            require(value.is_array(), key, "must be an array of numbers");
            cfg.sweep.clear();
            for (const auto &v : value) {
                cfg.sweep.push_back(number(v, key));
            }
        } else if (key == "contour-points") {
            cfg.contour_points = positive_size(value, key);
        } else if (key == "threads") {
            cfg.threads = static_cast<unsigned>(positive_size(value, key));
        } else if (key == "out") {
            require(value.is_string(), key, "must be a string");
            cfg.output_path = value.get<std::string>();
        } else if (key == "format") {
            require(value.is_string() && (value == "csv" || value == "json"), key, "must be csv or json");
            cfg.format = value == "csv" ? Format::Csv : Format::Json;
        } else {
            throw ValidationError(key, "unknown config key");
        }
    }
}

Dataset cmd_distributions(const RunConfig &cfg) {
    const auto res = Resolution::from_dx(cfg.dx);
    const double sigma = std::sqrt(res.outcome_variance());
    const double half = cfg.grid_span > 0.0 ? cfg.grid_span : kDefaultGridSigmas * sigma;
    const std::vector<double> grid = uniform_points(half, cfg.grid_step);
    const JumpDecomposition jd = jump_decomposition(res, grid);

    Dataset d;
    d.metadata = provenance(cfg);
    d.metadata["summary"] = json{
        {"dx", res.dx()},
        {"jump_probability", jd.jump_probability},
        {"jump_probability_numeric", jump_probability_numeric(res)},
        {"jump_peak_location", jump_peak_location(res)},
        {"conditional_second_moment", jd.conditional_second_moment},
        {"conditional_ratio", conditional_fluctuation_ratio(res)},
        {"grid_mass", jd.grid_mass},
    };
    d.columns = {"x_m", "P", "P0", "PQJ"};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        d.rows.push_back({jd.grid[i], jd.p_total[i], jd.p_zero[i], jd.p_jump[i]});
    }
    return d;
}

Dataset cmd_poststate(const RunConfig &cfg) {
    const auto res = Resolution::from_dx(cfg.dx);
    const GaussianXYState post = post_state(res, cfg.x_m);
    const double vac_std = 0.5;
    const double std_x = std::sqrt(post.var_x);
    const double std_y = std::sqrt(post.var_y);

    Dataset d;
    d.metadata = provenance(cfg);
    d.metadata["summary"] = json{
        {"pre", {{"center", {0.0, 0.0}}, {"std_x", vac_std}, {"std_y", vac_std}}},
        {"post", {{"center", {post.mean_x, post.mean_y}}, {"std_x", std_x}, {"std_y", std_y}}},
        {"std_x_ratio", std_x / vac_std},
        {"std_y_ratio", std_y / vac_std},
    };
    d.columns = {"curve", "angle", "x", "y"};
    const auto k = static_cast<double>(cfg.contour_points);
    for (std::size_t i = 0; i < cfg.contour_points; ++i) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(i) / k;
        d.rows.push_back({"pre", theta, vac_std * std::cos(theta), vac_std * std::sin(theta)});
    }
    for (std::size_t i = 0; i < cfg.contour_points; ++i) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(i) / k;
        d.rows.push_back(
            {"post", theta, post.mean_x + std_x * std::cos(theta), post.mean_y + std_y * std::sin(theta)});
    }
    return d;
}

Dataset cmd_correlation(const RunConfig &cfg) {
    const InputState input = InputState::parse(cfg.input);
    const bool vacuum = input.kind == InputState::Kind::Vacuum;
    const FockVector state = input.fock(cfg.dim);
    const DetectorModel detector{cfg.eta, cfg.xi};

    Dataset d;
    d.metadata = provenance(cfg);
    d.metadata["summary"] = json{{"analytic_source", vacuum ? "closed-form" : "wigner"}};
    d.columns = {"dx",
                 "analytic_C",
                 "fock_C",
                 "mc_C",
                 "mc_C_se",
                 "measured_C",
                 "jump_probability",
                 "mc_jump_fraction",
                 "mc_jump_fraction_se",
                 "conditional_ratio",
                 "mc_conditional_ratio",
                 "mc_conditional_ratio_se"};
    for (std::size_t row = 0; row < cfg.sweep.size(); ++row) {
        const auto res = Resolution::from_dx(cfg.sweep[row]);
        const double analytic = vacuum ? analytic_correlation(res)
                                       : intensity_correlation(post_interaction_wigner(input.wigner(), res));
        const double fock = correlation_operator_form(state, res);
        const TrialSet trials = sample_trials(sampler_for(cfg, res, row));
        const EstimatorReport mc = estimate_correlation(trials);
        const EstimatorReport measured = measured_correlation(mc, detector);
        const JumpStatistics js = jump_statistics(trials, detector);
        const double jump = vacuum ? jump_probability(res) : fock_jump_probability(state, res);
        const double ratio = vacuum ? conditional_fluctuation_ratio(res) : std::nan("");
        d.rows.push_back({res.dx(), analytic, fock, mc.estimate, mc.std_error, measured.estimate, jump,
                          js.jump_fraction.estimate, js.jump_fraction.std_error, null_if_nan(ratio),
                          js.conditional_ratio.estimate, js.conditional_ratio.std_error});
    }
    return d;
}

Dataset cmd_jump_stats(const RunConfig &cfg) {
    const auto res = Resolution::from_dx(cfg.dx);
    const InputState input = InputState::parse(cfg.input);
    const bool vacuum = input.kind == InputState::Kind::Vacuum;
    const DetectorModel detector{cfg.eta, cfg.xi};
    const TrialSet trials = sample_trials(sampler_for(cfg, res, 0));
    const JumpStatistics js = jump_statistics(trials, detector);
    const EstimatorReport corr = estimate_correlation(trials);

    const FockVector state = input.fock(cfg.dim);
    const double jump = vacuum ? jump_probability(res) : fock_jump_probability(state, res);
    const double ratio = vacuum ? conditional_fluctuation_ratio(res) : std::nan("");
    const double corr_ref = vacuum ? analytic_correlation(res) : correlation_operator_form(state, res);

    Dataset d;
    d.metadata = provenance(cfg);
    d.metadata["summary"] = json{
        {"detected_events", js.detected_events},
        {"readout_method", trials.readout_method},
        {"max_edge_mass", trials.max_edge_mass},
        {"jump_fraction", estimator_json(js.jump_fraction)},
        {"conditional_ratio", estimator_json(js.conditional_ratio)},
        {"correlation", estimator_json(corr)},
    };
    d.columns = {"quantity", "estimate", "std_error", "reference", "z_score", "method"};
    auto row = [&](const std::string &name, const EstimatorReport &r, double reference) {
        const double z = (std::isfinite(reference) && r.std_error > 0.0) ? (r.estimate - reference) / r.std_error
                                                                          : std::nan("");
        d.rows.push_back({name, r.estimate, r.std_error, null_if_nan(reference), null_if_nan(z), r.method});
    };
    row("jump_fraction", js.jump_fraction, jump);
    row("conditional_ratio", js.conditional_ratio, ratio);
    row("correlation", corr, corr_ref);
    row("measured_correlation", measured_correlation(corr, detector), cfg.xi * corr_ref);
    return d;
}

Dataset cmd_oracle_check(const RunConfig &cfg) {
    const auto res = Resolution::from_dx(cfg.dx);
    Dataset d;
    d.metadata = provenance(cfg);
    d.columns = {"check", "value", "threshold", "passed", "detail"};

    {
        const FockMeter meter(FockVector::vacuum(cfg.dim));
        double density_err = 0.0;
        double zero_err = 0.0;
        for (int i = -400; i <= 400; ++i) {
            const double x = 0.01 * i;
            density_err = std::max(density_err, std::abs(meter.density(res, x) - outcome_pdf(res, x)));
            zero_err = std::max(zero_err, std::abs(meter.zero_photon_density(res, x) - zero_photon_pdf(res, x)));
        }
        add_check(d, "outcome_density_sup_error", density_err, 1e-6, density_err <= 1e-6, "|x_m| <= 4");
        add_check(d, "zero_photon_density_sup_error", zero_err, 1e-6, zero_err <= 1e-6, "|x_m| <= 4");
        const double jp = std::abs(fock_jump_probability(FockVector::vacuum(cfg.dim), res) - jump_probability(res));
        add_check(d, "jump_probability_error", jp, 1e-6, jp <= 1e-6, "fock path vs closed form");
    }
    {
        const double povm = povm_completeness_residual(res, 32, 0.01);
        add_check(d, "povm_completeness_residual", povm, 1e-6, povm <= 1e-6, "dim 32 interior block");
    }
    {
        const double f = res.f();
        try {
            const CouplingUnitary u = build_coupling_unitary(f, cfg.dim_signal, cfg.dim_meter);
            add_check(d, "twomode_meter_sizing", static_cast<double>(cfg.dim_meter),
                      static_cast<double>(required_meter_dim(cfg.dim_signal, f)), true, "meter dim is sufficient");
            const double unit = u.unitarity_residual();
            add_check(d, "twomode_unitarity_residual", unit, 1e-8, unit <= 1e-8);
            const auto ops = build_operators(cfg.dim_signal);
            const OperatorMatrix x2(ops.x.entries * ops.x.entries, true);
            for (const auto &[label, signal] :
                 {std::pair{std::string("vacuum"), FockVector::vacuum(cfg.dim_signal)},
                  std::pair{std::string("coherent:0.5"), coherent_state(0.5, cfg.dim_signal)}}) {
                const TwoModeState joint = u.apply_to_vacuum_meter(signal);
                double worst = 1.0;
                for (int i = -12; i <= 12; ++i) {
                    const double x_m = 0.25 * i;
                    const MeterProjection proj = meter_projection(joint, f * x_m);
                    const MeasurementOutcome ref =
                        apply_measurement(signal, build_measurement_operator(res, x_m, cfg.dim_signal));
                    worst = std::min(worst, fidelity(proj.conditional_signal, ref.post));
                }
                add_check(d, "twomode_min_fidelity_" + label, worst, 1.0 - 1e-6, worst >= 1.0 - 1e-6, "|x_m| <= 3");
                const double backaction = std::abs(reduced_signal_expectation(joint, x2) - expectation(signal, x2).real());
                add_check(d, "backaction_x2_shift_" + label, backaction, 1e-8, backaction <= 1e-8);
            }
            const TwoModeState vac = u.apply_to_vacuum_meter(FockVector::vacuum(cfg.dim_signal));
            const double injected = std::abs(reduced_signal_expectation(vac, ops.n) - 0.25 * f * f);
            add_check(d, "photon_injection_error", injected, 1e-6, injected <= 1e-6, "vacuum <n> vs f^2/4");
        } catch (const Error &e) {
            if (e.kind() != ErrorKind::Truncation) {
                throw;
            }
            add_check(d, "twomode_meter_sizing", static_cast<double>(cfg.dim_meter),
                      static_cast<double>(required_meter_dim(cfg.dim_signal, f)), false,
                      std::string("truncation advisory: ") + e.what());
        }
    }
    {
        const OrderingExpectations vac = ordering_expectations(FockVector::vacuum(cfg.dim_signal));
        const double err = std::abs(vac.xnx - 0.25);
        add_check(d, "ordering_vacuum_xnx", vac.xnx, 1e-12, err <= 1e-12, "expected 0.25");
        double worst = 0.0;
        for (std::size_t n = 0; n + 8 <= 32; ++n) {
            const OrderingExpectations o = ordering_expectations(FockVector::basis(n, 32));
            worst = std::max(worst, std::abs(o.nxx_xxn_half - 0.25));
        }
        add_check(d, "ordering_identity_error", worst, 1e-10, worst <= 1e-10, "n <= dim - 8, dim 32");
    }
    {
        const double c = std::abs(analytic_correlation(res) - 0.125);
        add_check(d, "analytic_correlation_error", c, 1e-9, c <= 1e-9, "expected 1/8");
        const double fock = std::abs(correlation_operator_form(FockVector::vacuum(cfg.dim), res) - 0.125);
        add_check(d, "fock_correlation_error", fock, 1e-6, fock <= 1e-6, "expected 1/8");
        const double w = std::abs(intensity_correlation(GaussianWigner::vacuum()) - 0.125);
        add_check(d, "wigner_intensity_correlation_error", w, 1e-9, w <= 1e-9, "expected 1/8");
    }
    std::size_t failed = 0;
    for (const auto &r : d.rows) {
        failed += r[3].get<bool>() ? 0 : 1;
    }
    d.metadata["summary"] = json{{"checks", d.rows.size()}, {"failed", failed}};
    return d;
}

Dataset cmd_ordering(const RunConfig &cfg) {
    Dataset d;
    d.metadata = provenance(cfg);
    d.columns = {"n", "xnx", "sym", "difference"};
    double worst = 0.0;
    for (std::size_t n = 0; n + 8 <= cfg.dim; ++n) {
        const OrderingExpectations o = ordering_expectations(FockVector::basis(n, cfg.dim));
        worst = std::max(worst, std::abs(o.nxx_xxn_half - 0.25));
        d.rows.push_back({n, o.xnx, o.sym, o.nxx_xxn_half});
    }
    const OrderingExpectations vac = ordering_expectations(FockVector::vacuum(cfg.dim));
    d.metadata["summary"] = json{{"vacuum_xnx", vac.xnx}, {"max_identity_error", worst}};
    return d;
}

Dataset cmd_mc(const RunConfig &cfg) {
    const auto res = Resolution::from_dx(cfg.dx);
    const DetectorModel detector{cfg.eta, cfg.xi};
    const TrialSet trials = sample_trials(sampler_for(cfg, res, 0));

    Dataset d;
    d.metadata = provenance(cfg);
    json summary{{"readout_method", trials.readout_method}, {"max_edge_mass", trials.max_edge_mass}};
    if (trials.trials.size() >= kMinCorrelationTrials) {
        summary["correlation"] = estimator_json(estimate_correlation(trials));
    }
    try {
        const JumpStatistics js = jump_statistics(trials, detector);
        summary["jump_fraction"] = estimator_json(js.jump_fraction);
        summary["conditional_ratio"] = estimator_json(js.conditional_ratio);
        summary["detected_events"] = js.detected_events;
    } catch (const Error &e) {
        if (e.kind() != ErrorKind::InsufficientEvents) {
            throw;
        }
        summary["jump_statistics"] = e.what();
    }
    d.metadata["summary"] = summary;
    d.columns = {"trial", "x_m", "n", "detected"};
    for (std::size_t i = 0; i < trials.trials.size(); ++i) {
        const auto &t = trials.trials[i];
        d.rows.push_back({i, t.x_m, t.n, t.detected});
    }
    return d;
}

Dataset run_command(const RunConfig &cfg) {
    switch (cfg.command) {
        case Command::Distributions:
            return cmd_distributions(cfg);
        case Command::Poststate:
            return cmd_poststate(cfg);
        case Command::Correlation:
            return cmd_correlation(cfg);
        case Command::JumpStats:
            return cmd_jump_stats(cfg);
        case Command::OracleCheck:
            return cmd_oracle_check(cfg);
        case Command::Ordering:
            return cmd_ordering(cfg);
        case Command::Mc:
            return cmd_mc(cfg);
    }
    throw ValidationError("command", "unknown command");
}

std::string render(const Dataset &data, Format format) {
    std::ostringstream os;
    if (format == Format::Csv) {
        os << "# " << data.metadata.dump() << '\n';
        for (std::size_t i = 0; i < data.columns.size(); ++i) {
            os << (i ? "," : "") << data.columns[i];
        }
        os << '\n';
        for (const auto &row : data.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                os << (i ? "," : "") << csv_cell(row[i]);
            }
            os << '\n';
        }
        return os.str();
    }
    json doc;
    doc["metadata"] = data.metadata;
    doc["rows"] = json::array();
    for (const auto &row : data.rows) {
        json obj = json::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
            obj[data.columns[i]] = row[i];
        }
        doc["rows"].push_back(std::move(obj));
    }
    os << doc.dump(2) << '\n';
    return os.str();
}

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Finite-resolution QND quadrature measurement simulator"};
    RunConfig cfg;
    std::string command;
    std::string format = "csv";
    std::string config_path;
    app.add_option("command", command, "distributions | poststate | correlation | jump-stats | oracle-check | "
                                       "ordering | mc")
        ->required();
    app.add_option("--dx", cfg.dx, "Measurement resolution");
    app.add_option("--x-m", cfg.x_m, "Scaled readout x_m");
    app.add_option("--dim", cfg.dim, "Fock truncation for single-mode paths");
    app.add_option("--dim-signal", cfg.dim_signal, "Two-mode oracle signal truncation");
    app.add_option("--dim-meter", cfg.dim_meter, "Two-mode oracle meter truncation");
    app.add_option("--trials", cfg.trials, "Monte Carlo trials (0 = command default)");
    app.add_option("--seed", cfg.seed, "Philox key seed");
    app.add_option("--eta", cfg.eta, "Photon counting efficiency in (0, 1]");
    app.add_option("--xi", cfg.xi, "Readout efficiency in (0, 1]");
    app.add_option("--grid-span", cfg.grid_span, "Half-width of the x_m grid (0 = 8 sigma)");
    app.add_option("--grid-step", cfg.grid_step, "x_m grid spacing");
    app.add_option("--input", cfg.input, "vacuum | coherent:RE[,IM] | squeezed:R");
    app.add_option("--sweep", cfg.sweep, "Resolutions for the correlation table")->delimiter(',');
    app.add_option("--contour-points", cfg.contour_points, "Points per poststate contour");
    app.add_option("--threads", cfg.threads, "Sampling threads (0 = hardware)");
    app.add_option("--out", cfg.output_path, "Output file ('-' = stdout)");
    app.add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--config", config_path, "Flat JSON file of defaults; flags take precedence");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    }

    try {
        const auto parsed = parse_command(command);
        if (!parsed) {
            throw ValidationError("command", "unknown command '" + command + "'");
        }
        cfg.command = *parsed;
        cfg.format = format == "json" ? Format::Json : Format::Csv;
        std::vector<std::string> locked;
        for (const auto *opt : app.get_options()) {
            if (opt->count() > 0 && !opt->get_lnames().empty()) {
                locked.push_back(opt->get_lnames().front());
            }
        }
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) {
                err << "error: cannot read config file " << config_path << '\n';
                return kExitIo;
            }
            json doc;
            try {
                doc = json::parse(in);
            } catch (const json::exception &e) {
                throw ValidationError("config", std::string("malformed JSON: ") + e.what());
            }
            apply_config_json(cfg, doc, locked);
        }
        if (cfg.command == Command::Correlation && cfg.sweep.empty() &&
            std::find(locked.begin(), locked.end(), "dx") != locked.end()) {
            cfg.sweep = {cfg.dx};
        }
        if (cfg.output_path.empty()) {
            if (const char *dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir != '\0') {
                cfg.output_path = (std::filesystem::path(dir) /
                                   (command_name(cfg.command) + (cfg.format == Format::Csv ? ".csv" : ".json")))
                                      .string();
            }
        }
        cfg = resolve(cfg);
    } catch (const ValidationError &e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    }

    Dataset data;
    try {
        data = run_command(cfg);
    } catch (const ValidationError &e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const Error &e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    }

    const std::string text = render(data, cfg.format);
    if (cfg.output_path.empty() || cfg.output_path == "-") {
        out << text;
    } else {
        std::ofstream file(cfg.output_path, std::ios::binary | std::ios::trunc);
        if (!file || !(file << text) || !file.flush()) {
            err << "error: cannot write output file " << cfg.output_path << '\n';
            return kExitIo;
        }
    }
    if (data.verification_failed) {
        for (const auto &row : data.rows) {
            if (!row[3].get<bool>()) {
                err << "verification failed: " << row[0].get<std::string>() << " " << row[4].get<std::string>()
                    << '\n';
            }
        }
        return kExitVerification;
    }
    return kExitOk;
}

}  // namespace qnd::cli
