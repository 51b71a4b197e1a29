// Copyright 2026 The ltqkd Authors
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

#ifndef LTQKD_CLI_HPP
#define LTQKD_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ltqkd/channel.hpp"
#include "ltqkd/error.hpp"
#include "ltqkd/estimator.hpp"
#include "ltqkd/keyrate.hpp"
#include "ltqkd/montecarlo.hpp"

namespace ltqkd::cli {

enum class Protocol { ThreeState, FourState, Mdi };

std::string_view protocol_name(Protocol p);
Protocol parse_protocol(std::string_view name);

/// Exit codes of the command-line tool.
enum ExitCode : int { kOk = 0, kValidation = 1, kIllPosed = 2, kUndefinedRate = 3 };

class IoError : public Error {
   public:
    using Error::Error;
};

struct RunConfig {
    Protocol protocol = Protocol::ThreeState;
    channel::ChannelParams channel;
    std::vector<double> deltas = {0.0, 0.063, 0.126};
    /// Set when deltas came from the user; estimate then models the sources
    /// as modulated signals instead of ideal basis states.
    bool deltas_explicit = false;
    double distance_start = 0.0;
    double distance_stop = 150.0;
    double distance_step = 5.0;
    double f_ec = keyrate::kDefaultErrorCorrectionEfficiency;
    keyrate::AlphaSearch search;
    std::optional<double> fixed_alpha;
    std::uint64_t seed = 42;
    std::uint64_t pulses = 1000000;
    double gamma = 0.5;
    unsigned threads = 1;
    std::string out;

    /// Throws ValidationError naming the offending field.
    void validate() const;
};

/// Applies one `key = value` setting; unknown keys are validation errors.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

/// Flat `key = value` text with `#` comments.
void apply_config_text(RunConfig& config, std::string_view text);
void apply_config_file(RunConfig& config, const std::string& path);

/// "START:STOP:STEP" or a single distance.
void parse_distance_range(RunConfig& config, std::string_view range);

/// start, start + step, ... up to stop inclusive.
std::vector<double> distance_grid(const RunConfig& config);

/// 17 significant digits, scientific notation.
std::string format_double(double v);

std::string read_file(const std::string& path);
/// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::string& path, const std::string& content);

/// Yield file: columns label, basis, outcome, probability, prior.
std::map<Basis, YieldTable> parse_yield_csv(std::string_view text);
std::string yield_csv(const std::map<Basis, YieldTable>& tables);

/// Trial file: columns label, basis, outcome, count, prior, basis_prob.
mc::TrialRecord parse_trial_csv(std::string_view text);
std::string trial_csv(const mc::TrialRecord& trial);

/// True when the text has the trial-count header.
bool is_trial_csv(std::string_view text);

/// mdi yield file: label "A/B", basis "bell", outcome "phi+", probability, prior.
/// An empty prior selects the default pair weight for test fraction gamma.
MdiYieldTable parse_mdi_csv(std::string_view text, double gamma);

inline constexpr std::string_view kSweepHeader = "delta,distance_km,alpha_opt,Q_z,e_z,Q_z1,e_x1,R";

std::string sweep_csv(const RunConfig& config);

int cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_estimate(const std::string& yield_path, const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_mdi_estimate(const std::string& yield_path, const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to a command.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ltqkd::cli

#endif
