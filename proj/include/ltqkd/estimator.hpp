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

#ifndef LTQKD_ESTIMATOR_HPP
#define LTQKD_ESTIMATOR_HPP

#include <array>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ltqkd/qstate.hpp"

namespace ltqkd {

/// Detection statistics of one Bob basis. Entries are stored as joint
/// probabilities Y_{s, label}; prior(label) is the probability that Alice
/// sends that label and Bob measures in this basis (1/6 in the uniform
/// three-state protocol), so conditional = joint / prior.
class YieldTable {
   public:
    explicit YieldTable(Basis bob_basis = Basis::X) : basis_(bob_basis) {}

    Basis basis() const { return basis_; }

    void set_prior(const std::string& label, double prior);
    void set_joint(const std::string& label, int outcome, double value);
    /// Requires the prior to be set first.
    void set_conditional(const std::string& label, int outcome, double value);

    bool has(const std::string& label, int outcome) const;
    bool has_prior(const std::string& label) const { return priors_.count(label) != 0; }
    double prior(const std::string& label) const;
    double joint(const std::string& label, int outcome) const;
    double conditional(const std::string& label, int outcome) const;

    std::vector<std::string> labels() const;
    YieldTable scaled(double factor) const;

    /// Checks probabilities lie in [0, 1] and that both outcomes of a label
    /// never exceed its prior (the remainder is the inconclusive event).
    void validate() const;

   private:
    Basis basis_;
    std::map<std::string, double> priors_;
    std::map<std::pair<std::string, int>, double> joint_;
};

/// q_{s|t} = Tr(D_s sigma_t) / 2 for t in {Id, x, y, z}. Planar functionals
/// have no y component.
struct TransmissionFunctional {
    int outcome = 0;
    bool planar = true;
    double id = 0.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    /// Max relative residual of the linear system the functional was solved from.
    double residual = 0.0;

    /// q_Id + p . q, the conditional yield of a state with Bloch vector p.
    double evaluate(const BlochVector& v) const;
    /// Smallest conditional yield over all qubit states in the functional's domain.
    double min_yield() const;
};

enum class WellPosedness { Ok, WrongCount, Duplicate, OffPlane, Degenerate };

struct ConditioningReport {
    double condition_number = 0.0;
    bool well_posed = false;
    WellPosedness code = WellPosedness::Degenerate;
};

std::string_view describe(WellPosedness code);

/// Three states use the planar rows (1, px, pz); four use (1, px, py, pz).
ConditioningReport check_well_posed(std::span<const BlochVector> states);

struct SolveOptions {
    /// Reject solutions predicting a negative yield for some state.
    bool check_physical = true;
};

/// Solves Y_{s, j} = prior_j (q_Id + p_j . q) over the source states. Three
/// sources give the planar functional, four the full one.
TransmissionFunctional solve_functional(const YieldTable& yields, const SourceSet& sources, int outcome,
                                        SolveOptions options = {});

/// prior * (q_Id + p . q).
double predict_yield(const TransmissionFunctional& f, const QubitState& state, double prior);

/// Closed-form phase error rate of the ideal three-state protocol from the
/// observed X-basis yields of 0z, 1z and 0x.
double phase_error_three_state(const YieldTable& x_yields);

/// Predicted joint yields Y[s][j] = P(j) * Tr(D_s sigma_j) of the virtual states.
std::array<std::array<double, 2>, 2> predict_virtual_yields(const TransmissionFunctional& f0,
                                                            const TransmissionFunctional& f1,
                                                            const VirtualEnsemble& ensemble);

/// (Y_{0,1} + Y_{1,0}) / sum over the virtual yields.
double phase_error_from_yields(const std::array<std::array<double, 2>, 2>& y);

double phase_error_virtual(const TransmissionFunctional& f0, const TransmissionFunctional& f1,
                           const VirtualEnsemble& ensemble);

/// q_{phi+|s,t} = Tr(D (sigma_s x sigma_t)) / 4 for s, t in {Id, x, z}.
struct TwoQubitFunctional {
    std::array<std::array<double, 3>, 3> q{};
    double residual = 0.0;

    /// Tr(D rho_a x rho_b) for planar Bloch vectors a and b.
    double evaluate(const BlochVector& a, const BlochVector& b) const;
};

/// Bell-outcome statistics for pairs (Alice label, Bob label).
class MdiYieldTable {
   public:
    void set(const std::string& alice, const std::string& bob, double joint, double weight);
    bool has(const std::string& alice, const std::string& bob) const;
    double joint(const std::string& alice, const std::string& bob) const;
    double weight(const std::string& alice, const std::string& bob) const;
    const std::map<std::pair<std::string, std::string>, std::pair<double, double>>& entries() const {
        return entries_;
    }

   private:
    std::map<std::pair<std::string, std::string>, std::pair<double, double>> entries_;
};

/// gamma/9 for key-basis (Z, Z) pairs, 1/9 otherwise.
double mdi_pair_weight(const std::string& alice, const std::string& bob, double gamma);

/// The nine pairs used by the estimator, built from each party's three labels
/// (0z, 1z and the test label).
std::vector<std::pair<std::string, std::string>> mdi_required_pairs(const SourceSet& alice, const SourceSet& bob);

TwoQubitFunctional mdi_solve(const MdiYieldTable& yields, const SourceSet& alice, const SourceSet& bob);

/// Predicted Y_{phi+, j k} = P_A(j) P_B(k) Tr(D sigma_j x sigma_k).
std::array<std::array<double, 2>, 2> mdi_virtual_yields(const TwoQubitFunctional& f, const VirtualEnsemble& alice,
                                                        const VirtualEnsemble& bob);

double mdi_phase_error(const TwoQubitFunctional& f, const VirtualEnsemble& alice, const VirtualEnsemble& bob);

}  // namespace ltqkd

#endif
