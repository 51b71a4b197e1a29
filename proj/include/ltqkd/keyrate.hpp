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

#ifndef LTQKD_KEYRATE_HPP
#define LTQKD_KEYRATE_HPP

#include <optional>
#include <span>
#include <vector>

#include "ltqkd/channel.hpp"

namespace ltqkd::keyrate {

inline constexpr double kDefaultErrorCorrectionEfficiency = 1.22;

/// h(x) in bits, with h(0) = h(1) = 0.
double binary_entropy(double x);

/// 1/2 {Q_z1 [1 - h(e_x1)] - f_ec Q_z h(e_z)}, not clamped.
double raw_key_rate(const channel::ZStats& z, double f_ec = kDefaultErrorCorrectionEfficiency);

/// max(0, raw_key_rate).
double secret_key_rate(const channel::ZStats& z, double f_ec = kDefaultErrorCorrectionEfficiency);

struct AlphaSearch {
    double lower = 1e-4;
    double upper = 1.0;
    double rel_tol = 1e-4;
    int grid_points = 64;

    void validate() const;
};

struct AlphaOptimum {
    double alpha = 0.0;
    double rate = 0.0;
    bool zero_rate = false;
    channel::ZStats stats;
};

/// Maximises the key rate over the mean photon number: log-spaced coarse
/// scan, then golden-section refinement on the bracket around the best grid
/// point. p.alpha is ignored.
AlphaOptimum optimize_alpha(const channel::ChannelParams& p, double f_ec = kDefaultErrorCorrectionEfficiency,
                            const AlphaSearch& search = {});

struct RatePoint {
    double distance_km = 0.0;
    double alpha_opt = 0.0;
    double q_z = 0.0;
    double e_z = 0.0;
    double q_z1 = 0.0;
    double e_x1 = 0.0;
    double rate = 0.0;
};

struct SweepOptions {
    double f_ec = kDefaultErrorCorrectionEfficiency;
    AlphaSearch search;
    /// Evaluate at this alpha instead of optimising.
    std::optional<double> fixed_alpha;
    /// 0 picks hardware concurrency. Results do not depend on it.
    unsigned threads = 1;
};

/// One point per distance, each evaluated independently with base's other
/// parameters.
std::vector<RatePoint> sweep(std::span<const double> distances, const channel::ChannelParams& base,
                             const SweepOptions& options = {});

}  // namespace ltqkd::keyrate

#endif
