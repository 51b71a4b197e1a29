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

#include "ltqkd/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ltqkd/error.hpp"

namespace ltqkd {

namespace {

constexpr double kPhysicalTol = 1e-9;
constexpr double kSingularRatio = 1e-9;

std::string cell_name(const std::string& label, int outcome) {
    return "(" + label + ", " + std::to_string(outcome) + ")";
}

void check_outcome(int outcome) {
    if (outcome != 0 && outcome != 1) throw ValidationError("outcome must be 0 or 1");
}

void check_probability(double p, const std::string& what) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError(what + " must be a probability in [0, 1]");
}

double condition_number(const Eigen::MatrixXd& m, double* smallest_ratio) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    const double hi = sv(0);
    const double lo = sv(sv.size() - 1);
    *smallest_ratio = hi > 0.0 ? lo / hi : 0.0;
    return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

double clamp_rate(double e) {
    if (e < -kPhysicalTol) throw InconsistentDataError("negative error rate from unphysical yields");
    return std::clamp(e, 0.0, 1.0);
}

std::array<double, 3> planar_row(const BlochVector& v) { return {v.v0, v.x, v.z}; }

}  // namespace

void YieldTable::set_prior(const std::string& label, double prior) {
    if (!(prior > 0.0 && prior <= 1.0)) throw ValidationError("prior for '" + label + "' must be in (0, 1]");
    priors_[label] = prior;
}

void YieldTable::set_joint(const std::string& label, int outcome, double value) {
    check_outcome(outcome);
    check_probability(value, "yield " + cell_name(label, outcome));
    joint_[{label, outcome}] = value;
}

void YieldTable::set_conditional(const std::string& label, int outcome, double value) {
    check_probability(value, "conditional yield " + cell_name(label, outcome));
    set_joint(label, outcome, value * prior(label));
}

bool YieldTable::has(const std::string& label, int outcome) const { return joint_.count({label, outcome}) != 0; }

double YieldTable::prior(const std::string& label) const {
    auto it = priors_.find(label);
    if (it == priors_.end()) throw ValidationError("no prior for label '" + label + "'");
    return it->second;
}

double YieldTable::joint(const std::string& label, int outcome) const {
    auto it = joint_.find({label, outcome});
    if (it == joint_.end()) throw ValidationError("missing yield " + cell_name(label, outcome));
    return it->second;
}

double YieldTable::conditional(const std::string& label, int outcome) const {
    return joint(label, outcome) / prior(label);
}

std::vector<std::string> YieldTable::labels() const {
    std::vector<std::string> out;
    for (const auto& [label, p] : priors_) out.push_back(label);
    return out;
}

YieldTable YieldTable::scaled(double factor) const {
    if (!(factor > 0.0 && factor <= 1.0)) throw ValidationError("scale factor must be in (0, 1]");
    YieldTable out = *this;
    for (auto& [key, y] : out.joint_) y *= factor;
    return out;
}

void YieldTable::validate() const {
    std::map<std::string, double> sums;
    for (const auto& [key, y] : joint_) {
        check_probability(y, "yield " + cell_name(key.first, key.second));
        sums[key.first] += y;
    }
    for (const auto& [label, total] : sums) {
        if (total > prior(label) * (1.0 + 1e-12) + 1e-15) {
            throw ValidationError("yields for '" + label + "' exceed its prior");
        }
    }
}

double TransmissionFunctional::evaluate(const BlochVector& v) const {
    if (planar && !v.planar()) throw DimensionError("planar functional applied to a state off the X-Z plane");
    return id * v.v0 + x * v.x + (planar ? 0.0 : y * v.y) + z * v.z;
}

double TransmissionFunctional::min_yield() const {
    const double yy = planar ? 0.0 : y;
    return id - std::sqrt(x * x + yy * yy + z * z);
}

std::string_view describe(WellPosedness code) {
    switch (code) {
        case WellPosedness::Ok:
            return "ok";
        case WellPosedness::WrongCount:
            return "expected 3 (planar) or 4 source states";
        case WellPosedness::Duplicate:
            return "duplicate source states";
        case WellPosedness::OffPlane:
            return "three-state mode needs states on the X-Z plane";
        case WellPosedness::Degenerate:
            return "Bloch vectors are linearly dependent";
    }
    return "?";
}

ConditioningReport check_well_posed(std::span<const BlochVector> states) {
    ConditioningReport report;
    const auto n = static_cast<Eigen::Index>(states.size());
    if (n != 3 && n != 4) {
        report.code = WellPosedness::WrongCount;
        report.condition_number = std::numeric_limits<double>::infinity();
        return report;
    }
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const BlochVector& v = states[static_cast<std::size_t>(r)];
        if (n == 3) {
            auto row = planar_row(v);
            m.row(r) << row[0], row[1], row[2];
        } else {
            m.row(r) << v.v0, v.x, v.y, v.z;
        }
    }
    double ratio = 0.0;
    report.condition_number = condition_number(m, &ratio);
    report.well_posed = ratio > kSingularRatio;
    report.code = report.well_posed ? WellPosedness::Ok : WellPosedness::Degenerate;

    for (std::size_t a = 0; a < states.size(); ++a) {
        for (std::size_t b = a + 1; b < states.size(); ++b) {
            const auto& u = states[a];
            const auto& w = states[b];
            const double d = std::abs(u.v0 - w.v0) + std::abs(u.x - w.x) + std::abs(u.y - w.y) + std::abs(u.z - w.z);
            if (d <= kSingularRatio) {
                report.well_posed = false;
                report.code = WellPosedness::Duplicate;
            }
        }
    }
    if (n == 3 && std::any_of(states.begin(), states.end(), [](const BlochVector& v) { return !v.planar(); })) {
        report.well_posed = false;
        report.code = WellPosedness::OffPlane;
    }
    return report;
}

TransmissionFunctional solve_functional(const YieldTable& yields, const SourceSet& sources, int outcome,
                                        SolveOptions options) {
    check_outcome(outcome);
    std::vector<BlochVector> vecs;
    for (const auto& s : sources.states()) vecs.push_back(pauli_decompose(s.state));
    const ConditioningReport report = check_well_posed(vecs);
    if (!report.well_posed) throw WellPosednessError(std::string(describe(report.code)));

    const bool planar = vecs.size() == 3;
    const auto n = static_cast<Eigen::Index>(vecs.size());
    Eigen::MatrixXd m(n, n);
    Eigen::VectorXd rhs(n);
    std::vector<std::string> missing;
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto& src = sources.states()[static_cast<std::size_t>(r)];
        const BlochVector& v = vecs[static_cast<std::size_t>(r)];
        if (planar) {
            m.row(r) << v.v0, v.x, v.z;
        } else {
            m.row(r) << v.v0, v.x, v.y, v.z;
        }
        if (!yields.has(src.label, outcome) || !yields.has_prior(src.label)) {
            missing.push_back(cell_name(src.label, outcome));
            continue;
        }
        rhs(r) = yields.conditional(src.label, outcome);
    }
    if (!missing.empty()) {
        std::string msg = "missing yields:";
        for (const auto& c : missing) msg += " " + c;
        throw ValidationError(msg);
    }

    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    const Eigen::VectorXd q = lu.solve(rhs);
    TransmissionFunctional f;
    f.outcome = outcome;
    f.planar = planar;
    f.id = q(0);
    f.x = q(1);
    if (planar) {
        f.z = q(2);
    } else {
        f.y = q(2);
        f.z = q(3);
    }
    const double scale = std::max(rhs.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    f.residual = (m * q - rhs).cwiseAbs().maxCoeff() / scale;

    if (options.check_physical && f.min_yield() < -kPhysicalTol) {
        throw InconsistentDataError("yields for outcome " + std::to_string(outcome) +
                                    " imply a negative detection probability for some state");
    }
    return f;
}

double predict_yield(const TransmissionFunctional& f, const QubitState& state, double prior) {
    check_probability(prior, "prior");
    return prior * f.evaluate(pauli_decompose(state));
}

double phase_error_three_state(const YieldTable& x_yields) {
    const std::array<std::string, 3> labels = {"0z", "1z", "0x"};
    std::vector<std::string> missing;
    for (const auto& l : labels) {
        for (int s = 0; s < 2; ++s) {
            if (!x_yields.has(l, s)) missing.push_back(cell_name(l, s));
        }
    }
    if (!missing.empty()) {
        std::string msg = "missing yields:";
        for (const auto& c : missing) msg += " " + c;
        throw ValidationError(msg);
    }
    for (const auto& l : labels) {
        if (x_yields.has_prior(l) && std::abs(x_yields.prior(l) - x_yields.prior("0z")) > 1e-12) {
            throw ValidationError("closed-form phase error needs equal priors for 0z, 1z and 0x");
        }
    }
    auto y = [&](int s, const char* l) { return x_yields.joint(l, s); };
    const double num = y(0, "0z") + y(0, "1z") + y(1, "0x") - y(0, "0x");
    const double den = y(0, "0z") + y(0, "1z") + y(1, "0z") + y(1, "1z");
    if (!(den > 0.0)) throw UndefinedRateError("no X-basis detections");
    return clamp_rate(num / den);
}

std::array<std::array<double, 2>, 2> predict_virtual_yields(const TransmissionFunctional& f0,
                                                            const TransmissionFunctional& f1,
                                                            const VirtualEnsemble& ensemble) {
    if (ensemble.entries.size() != 2) throw ValidationError("virtual ensemble must have two entries");
    const std::array<const TransmissionFunctional*, 2> fs = {&f0, &f1};
    std::array<std::array<double, 2>, 2> y{};
    for (int s = 0; s < 2; ++s) {
        for (int j = 0; j < 2; ++j) {
            const auto& e = ensemble.entries[static_cast<std::size_t>(j)];
            y[s][j] = predict_yield(*fs[s], e.state, e.weight);
        }
    }
    return y;
}

double phase_error_from_yields(const std::array<std::array<double, 2>, 2>& y) {
    for (const auto& row : y) {
        for (double v : row) {
            if (v < -kPhysicalTol) throw InconsistentDataError("negative predicted virtual yield");
        }
    }
    const double den = y[0][0] + y[0][1] + y[1][0] + y[1][1];
    if (!(den > 0.0)) throw UndefinedRateError("virtual states have no predicted detections");
    return clamp_rate((y[0][1] + y[1][0]) / den);
}

double phase_error_virtual(const TransmissionFunctional& f0, const TransmissionFunctional& f1,
                           const VirtualEnsemble& ensemble) {
    return phase_error_from_yields(predict_virtual_yields(f0, f1, ensemble));
}

double TwoQubitFunctional::evaluate(const BlochVector& a, const BlochVector& b) const {
    if (!a.planar() || !b.planar()) throw DimensionError("two-qubit functional is restricted to the X-Z plane");
    const auto ra = planar_row(a);
    const auto rb = planar_row(b);
    double sum = 0.0;
    for (int s = 0; s < 3; ++s) {
        for (int t = 0; t < 3; ++t) sum += q[s][t] * ra[s] * rb[t];
    }
    return sum;
}

void MdiYieldTable::set(const std::string& alice, const std::string& bob, double joint, double weight) {
    check_probability(joint, "yield (" + alice + ", " + bob + ")");
    if (!(weight > 0.0 && weight <= 1.0)) throw ValidationError("pair weight must be in (0, 1]");
    if (joint > weight * (1.0 + 1e-12)) throw ValidationError("yield (" + alice + ", " + bob + ") exceeds its weight");
    entries_[{alice, bob}] = {joint, weight};
}

bool MdiYieldTable::has(const std::string& alice, const std::string& bob) const {
    return entries_.count({alice, bob}) != 0;
}

double MdiYieldTable::joint(const std::string& alice, const std::string& bob) const {
    auto it = entries_.find({alice, bob});
    if (it == entries_.end()) throw ValidationError("missing yield (" + alice + ", " + bob + ")");
    return it->second.first;
}

double MdiYieldTable::weight(const std::string& alice, const std::string& bob) const {
    auto it = entries_.find({alice, bob});
    if (it == entries_.end()) throw ValidationError("missing yield (" + alice + ", " + bob + ")");
    return it->second.second;
}

double mdi_pair_weight(const std::string& alice, const std::string& bob, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw ValidationError("test fraction gamma must be in (0, 1)");
    const bool zz = (alice == "0z" || alice == "1z") && (bob == "0z" || bob == "1z");
    return zz ? gamma / 9.0 : 1.0 / 9.0;
}

namespace {

std::string test_label(const SourceSet& s) {
    if (s.size() != 3 || !s.find("0z") || !s.find("1z")) {
        throw ValidationError("mdi sources must be 0z, 1z and one test state");
    }
    for (const auto& st : s.states()) {
        if (st.label != "0z" && st.label != "1z") return st.label;
    }
    return {};
}

}  // namespace

std::vector<std::pair<std::string, std::string>> mdi_required_pairs(const SourceSet& alice, const SourceSet& bob) {
    const std::string ta = test_label(alice);
    const std::string tb = test_label(bob);
    return {{"0z", "0z"}, {"0z", "1z"}, {"1z", "0z"}, {"1z", "1z"}, {ta, "0z"},
            {ta, "1z"},   {"0z", tb},   {"1z", tb},   {ta, tb}};
}

TwoQubitFunctional mdi_solve(const MdiYieldTable& yields, const SourceSet& alice, const SourceSet& bob) {
    const auto pairs = mdi_required_pairs(alice, bob);
    std::vector<BlochVector> va, vb;
    for (const auto& s : alice.states()) va.push_back(pauli_decompose(s.state));
    for (const auto& s : bob.states()) vb.push_back(pauli_decompose(s.state));
    for (const auto* side : {&va, &vb}) {
        const ConditioningReport r = check_well_posed(*side);
        if (!r.well_posed) throw WellPosednessError(std::string(describe(r.code)));
    }

    std::vector<std::string> missing;
    for (const auto& [a, b] : pairs) {
        if (!yields.has(a, b)) missing.push_back("(" + a + ", " + b + ")");
    }
    if (!missing.empty()) {
        std::string msg = "missing yields:";
        for (const auto& c : missing) msg += " " + c;
        throw ValidationError(msg);
    }

    Eigen::Matrix<double, 9, 9> m;
    Eigen::Matrix<double, 9, 1> rhs;
    for (int r = 0; r < 9; ++r) {
        const auto& [a, b] = pairs[static_cast<std::size_t>(r)];
        const auto ra = planar_row(pauli_decompose(alice.at(a).state));
        const auto rb = planar_row(pauli_decompose(bob.at(b).state));
        for (int s = 0; s < 3; ++s) {
            for (int t = 0; t < 3; ++t) m(r, 3 * s + t) = ra[s] * rb[t];
        }
        rhs(r) = yields.joint(a, b) / yields.weight(a, b);
    }
    double ratio = 0.0;
    condition_number(m, &ratio);
    if (!(ratio > kSingularRatio)) throw WellPosednessError("mdi design matrix is singular");

    Eigen::FullPivLU<Eigen::Matrix<double, 9, 9>> lu(m);
    const Eigen::Matrix<double, 9, 1> q = lu.solve(rhs);
    TwoQubitFunctional f;
    for (int s = 0; s < 3; ++s) {
        for (int t = 0; t < 3; ++t) f.q[s][t] = q(3 * s + t);
    }
    const double scale = std::max(rhs.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    f.residual = (m * q - rhs).cwiseAbs().maxCoeff() / scale;
    return f;
}

std::array<std::array<double, 2>, 2> mdi_virtual_yields(const TwoQubitFunctional& f, const VirtualEnsemble& alice,
                                                        const VirtualEnsemble& bob) {
    if (alice.entries.size() != 2 || bob.entries.size() != 2) {
        throw ValidationError("virtual ensembles must have two entries");
    }
    std::array<std::array<double, 2>, 2> y{};
    for (int j = 0; j < 2; ++j) {
        for (int k = 0; k < 2; ++k) {
            const auto& ea = alice.entries[static_cast<std::size_t>(j)];
            const auto& eb = bob.entries[static_cast<std::size_t>(k)];
            y[j][k] = ea.weight * eb.weight * f.evaluate(pauli_decompose(ea.state), pauli_decompose(eb.state));
        }
    }
    return y;
}

double mdi_phase_error(const TwoQubitFunctional& f, const VirtualEnsemble& alice, const VirtualEnsemble& bob) {
    // Anti-correlated pairs are the errors; same indexing as the prepare&measure case.
    return phase_error_from_yields(mdi_virtual_yields(f, alice, bob));
}

}  // namespace ltqkd
