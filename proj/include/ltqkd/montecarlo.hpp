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

#ifndef LTQKD_MONTECARLO_HPP
#define LTQKD_MONTECARLO_HPP

#include <array>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "ltqkd/channel.hpp"
#include "ltqkd/estimator.hpp"
#include "ltqkd/qstate.hpp"

namespace ltqkd::mc {

/// Eve's operation as Kraus operators; the completeness deficit
/// I - sum A^dag A is the probability of the pulse being lost.
struct KrausChannel {
    std::vector<Mat2> operators;

    Mat2 deficit() const;
    Mat2 apply(const Mat2& rho) const;
    /// Uniform extra loss: every operator scaled by sqrt(1 - loss).
    KrausChannel with_loss(double loss) const;
    void validate() const;

    static KrausChannel identity();
};

/// Bob's measurement: per basis, outcome elements M_0 and M_1 sharing one
/// inconclusive element M_f.
struct BobPovm {
    Mat2 inconclusive = Mat2::Zero();
    std::map<Basis, std::array<Mat2, 2>> elements;

    const std::array<Mat2, 2>& basis(Basis b) const;
    void validate() const;
};

/// D_s = sum_k A_k^dag M_s A_k.
Mat2 detection_operator(const KrausChannel& ch, const BobPovm& povm, Basis b, int s);

/// 1-4 Gaussian Kraus operators rescaled to a random total loss in [0, 0.9].
KrausChannel random_channel(std::uint64_t seed);

/// M_f is drawn first, then I - M_f is split per basis by a random unitary
/// conjugation of a random diagonal split.
BobPovm random_povm(std::uint64_t seed, bool with_y_basis = false);

/// Random qubit state; pure states are Haar-like, mixed ones shrink the
/// Bloch vector.
QubitState random_state(std::uint64_t seed, bool pure = true);

using BasisProbabilities = std::map<Basis, double>;

/// Y_{s_b, label} = P(label) P(b) Tr(A rho A^dag M_{s_b}), one table per basis.
std::map<Basis, YieldTable> exact_yields(const SourceSet& sources, const KrausChannel& ch, const BobPovm& povm,
                                         const BasisProbabilities& basis_probs);

/// Outcome index: 0, 1, or 2 for the inconclusive event f.
inline constexpr int kInconclusive = 2;

struct TrialRecord {
    std::map<std::tuple<std::string, Basis, int>, std::uint64_t> counts;
    std::uint64_t n_pulses = 0;
    std::uint64_t seed = 0;
    std::map<std::string, double> priors;
    BasisProbabilities basis_probs;

    std::uint64_t count(const std::string& label, Basis b, int outcome) const;
};

/// Seedable 64-bit stream; substreams are derived deterministically from
/// (seed, stream index).
class Rng {
   public:
    Rng(std::uint64_t seed, std::uint64_t stream = 0);
    std::uint64_t next();
    /// Uniform in [0, 1) with 53 random bits.
    double uniform();
    double normal();

   private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> gauss_;
};

struct RunOptions {
    std::uint64_t block_size = 1u << 16;
    unsigned threads = 1;
};

/// Samples label, basis and outcome per pulse. Pulses are split into blocks,
/// each drawn from substream (seed, block index), so the record does not
/// depend on the thread count.
TrialRecord run_protocol(std::uint64_t n_pulses, const SourceSet& sources, const KrausChannel& ch,
                         const BobPovm& povm, const BasisProbabilities& basis_probs, std::uint64_t seed,
                         const RunOptions& options = {});

/// Empirical joint yields count / n for one basis.
YieldTable empirical_yields(const TrialRecord& t, Basis b);

struct TrialEstimate {
    double e_x = 0.0;
    double std_error = 0.0;
    std::array<std::array<double, 2>, 2> virtual_yields{};
};

/// Phase error estimate from the X-basis counts of a trial, with a
/// first-order (delta method) multinomial standard error. Virtual states come
/// from the purification of the sources labelled 0z and 1z.
TrialEstimate estimate_from_trial(const TrialRecord& t, const SourceSet& sources);

/// Sources, channel and POVM reproducing the single-photon detection model:
/// signals at phases 0, pi, pi/2 (labels 0z, 1z, 1x), an identity channel and
/// effective detection operators carrying loss, dark counts and double clicks.
struct ModelSetup {
    SourceSet sources;
    KrausChannel channel;
    BobPovm povm;
    BasisProbabilities basis_probs;
};

/// Sources 0z, 1z, 1x with modulation error p.delta, equal priors and equal
/// basis choice; loss, dark counts and double clicks are folded into Bob's
/// POVM so the channel is the identity.
ModelSetup modulated_link_setup(const channel::ChannelParams& p);

}  // namespace ltqkd::mc

#endif
