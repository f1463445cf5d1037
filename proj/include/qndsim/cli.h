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

#ifndef QNDSIM_CLI_H
#define QNDSIM_CLI_H

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace qnd::cli {

enum class Command { Distributions, Poststate, Correlation, JumpStats, OracleCheck, Ordering, Mc };
enum class Format { Csv, Json };

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitVerification = 2;
inline constexpr int kExitIo = 3;

/// Environment variable naming the directory used when --out is absent.
inline constexpr const char *kOutputDirEnv = "QNDSIM_OUTPUT_DIR";

struct RunConfig {
    Command command = Command::Distributions;
    double dx = 1.0;
    double x_m = 0.0;
    /// Fock dimension for the single-mode paths.
    std::size_t dim = 64;
    /// Two-mode oracle truncations.
    std::size_t dim_signal = 32;
    std::size_t dim_meter = 48;
    /// 0 selects the command default (1e6 for correlation/jump-stats, 1e5 for mc).
    std::size_t trials = 0;
    std::uint64_t seed = 1;
    double eta = 1.0;
    double xi = 1.0;
    /// 0 selects eight standard deviations of the outcome distribution.
    double grid_span = 0.0;
    double grid_step = 0.02;
    std::string input = "vacuum";
    /// Resolutions for `correlation`; empty selects {0.25, 0.5, 1, 2, 5}.
    std::vector<double> sweep;
    std::size_t contour_points = 64;
    unsigned threads = 0;
    std::string output_path;
    Format format = Format::Csv;
};

std::string command_name(Command c);
std::optional<Command> parse_command(const std::string &name);

/// Failed parameter check; `field` is the kebab-case flag name.
class ValidationError : public std::runtime_error {
   public:
    ValidationError(std::string field, const std::string &message);
    const std::string &field() const {
        return field_;
    }

   private:
    std::string field_;
};

/// Fills command-dependent defaults and checks every parameter.
RunConfig resolve(RunConfig cfg);

nlohmann::json config_to_json(const RunConfig &cfg);
/// Applies a flat key/value JSON object; keys already in `locked` are skipped.
void apply_config_json(RunConfig &cfg, const nlohmann::json &doc, const std::vector<std::string> &locked);

/// Tabular result plus metadata. Cells are numbers, strings or booleans.
struct Dataset {
    nlohmann::json metadata;
    std::vector<std::string> columns;
    std::vector<std::vector<nlohmann::json>> rows;
    bool verification_failed = false;
};

Dataset cmd_distributions(const RunConfig &cfg);
Dataset cmd_poststate(const RunConfig &cfg);
Dataset cmd_correlation(const RunConfig &cfg);
Dataset cmd_jump_stats(const RunConfig &cfg);
Dataset cmd_oracle_check(const RunConfig &cfg);
Dataset cmd_ordering(const RunConfig &cfg);
Dataset cmd_mc(const RunConfig &cfg);

Dataset run_command(const RunConfig &cfg);

/// CSV: one '#'-prefixed JSON metadata line, a header row, data rows.
/// JSON: {"metadata": {...}, "rows": [{column: value, ...}, ...]}.
std::string render(const Dataset &data, Format format);

/// Full command-line entry point; returns the process exit code.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace qnd::cli

#endif
