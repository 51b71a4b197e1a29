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

#include "ltqkd/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "ltqkd/error.hpp"

namespace ltqkd {

namespace {

constexpr double kAlgebraTol = 1e-12;

const Complex kI{0.0, 1.0};

Amp2 normalise_phase(Amp2 v) {
    for (int k = 0; k < 2; ++k) {
        double mag = std::abs(v(k));
        if (mag > kAlgebraTol) {
            v *= std::conj(v(k)) / mag;
            v(k) = Complex(std::abs(v(k)), 0.0);
            break;
        }
    }
    return v;
}

}  // namespace

std::string_view basis_name(Basis b) {
    switch (b) {
        case Basis::X:
            return "X";
        case Basis::Y:
            return "Y";
        case Basis::Z:
            return "Z";
    }
    return "?";
}

Basis parse_basis(std::string_view name) {
    if (name == "X" || name == "x") return Basis::X;
    if (name == "Y" || name == "y") return Basis::Y;
    if (name == "Z" || name == "z") return Basis::Z;
    throw ValidationError("unknown basis '" + std::string(name) + "'");
}

const Mat2& pauli_matrix(Pauli t) {
    static const std::array<Mat2, 4> mats = [] {
        std::array<Mat2, 4> m;
        m[0] << 1, 0, 0, 1;
        m[1] << 0, 1, 1, 0;
        m[2] << 0, -kI, kI, 0;
        m[3] << 1, 0, 0, -1;
        return m;
    }();
    return mats[static_cast<int>(t)];
}

double BlochVector::radius() const { return std::sqrt(x * x + y * y + z * z); }

void validate_density(const Mat2& rho) {
    if (!rho.allFinite()) throw ValidationError("density matrix has non-finite entries");
    if (std::abs(rho.trace() - Complex(1.0, 0.0)) > kAlgebraTol) {
        throw ValidationError("density matrix trace differs from 1");
    }
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > kAlgebraTol) {
        throw ValidationError("density matrix is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Mat2> es(rho);
    const auto& ev = es.eigenvalues();
    if (ev.minCoeff() < -kAlgebraTol || ev.maxCoeff() > 1.0 + kAlgebraTol) {
        throw ValidationError("density matrix eigenvalues outside [0, 1]");
    }
}

QubitState QubitState::pure(Complex a0, Complex a1) {
    Amp2 v(a0, a1);
    if (!v.allFinite()) throw ValidationError("amplitudes are not finite");
    double n = v.norm();
    if (n <= kAlgebraTol) throw ValidationError("amplitudes have zero norm");
    v = normalise_phase(v / n);
    Mat2 rho = v * v.adjoint();
    return QubitState(rho, v);
}

QubitState QubitState::from_density(const Mat2& rho) {
    validate_density(rho);
    Mat2 herm = 0.5 * (rho + rho.adjoint());
    return QubitState(herm, std::nullopt);
}

QubitState QubitState::from_bloch(const BlochVector& v) { return from_density(bloch_to_density(v)); }

double QubitState::purity() const { return (rho_ * rho_).trace().real(); }

Amp2 basis_vector(Basis b, int j) {
    if (j != 0 && j != 1) throw ValidationError("bit value must be 0 or 1");
    const double r = 1.0 / std::numbers::sqrt2;
    const double sign = j == 0 ? 1.0 : -1.0;
    switch (b) {
        case Basis::Z:
            return j == 0 ? Amp2(1.0, 0.0) : Amp2(0.0, 1.0);
        case Basis::X:
            return Amp2(r, sign * r);
        case Basis::Y:
            return Amp2(Complex(r, 0.0), sign * r * kI);
    }
    return Amp2::Zero();
}

QubitState basis_state(Basis b, int j) { return QubitState::pure(basis_vector(b, j)); }

std::optional<QubitState> ideal_state(std::string_view label) {
    if (label.size() != 2 || (label[0] != '0' && label[0] != '1')) return std::nullopt;
    const int j = label[0] - '0';
    switch (label[1]) {
        case 'x':
            return basis_state(Basis::X, j);
        case 'y':
            return basis_state(Basis::Y, j);
        case 'z':
            return basis_state(Basis::Z, j);
        default:
            return std::nullopt;
    }
}

BlochVector pauli_decompose(const QubitState& state) {
    const Mat2& rho = state.density();
    BlochVector v;
    v.v0 = rho.trace().real();
    v.x = (rho * pauli_matrix(Pauli::X)).trace().real();
    v.y = (rho * pauli_matrix(Pauli::Y)).trace().real();
    v.z = (rho * pauli_matrix(Pauli::Z)).trace().real();
    return v;
}

BlochVector pauli_decompose(const Mat2& rho) { return pauli_decompose(QubitState::from_density(rho)); }

Mat2 bloch_to_density(const BlochVector& v) {
    return 0.5 * (v.v0 * pauli_matrix(Pauli::Id) + v.x * pauli_matrix(Pauli::X) + v.y * pauli_matrix(Pauli::Y) +
                  v.z * pauli_matrix(Pauli::Z));
}

QubitState encode_single_photon(double theta, double delta) {
    if (!std::isfinite(theta) || !std::isfinite(delta)) throw ValidationError("non-finite phase");
    if (delta < 0.0) throw ValidationError("modulation error delta must be >= 0");
    const double phase = theta * (1.0 + delta / std::numbers::pi);
    // The Bloch angle runs opposite to the optical phase in this Z basis.
    return QubitState::pure(std::cos(phase / 2.0), -std::sin(phase / 2.0));
}

bool same_state(const QubitState& a, const QubitState& b, double tol) {
    return (a.density() - b.density()).cwiseAbs().maxCoeff() <= tol;
}

SourceSet::SourceSet(std::vector<SourceState> states) : states_(std::move(states)) {
    std::set<std::string> seen;
    double total = 0.0;
    for (const auto& s : states_) {
        if (!seen.insert(s.label).second) throw ValidationError("duplicate source label '" + s.label + "'");
        if (!(s.prior > 0.0)) throw ValidationError("source prior for '" + s.label + "' must be > 0");
        total += s.prior;
    }
    if (!states_.empty() && std::abs(total - 1.0) > kAlgebraTol) {
        throw ValidationError("source priors must sum to 1");
    }
}

const SourceState* SourceSet::find(std::string_view label) const {
    auto it = std::find_if(states_.begin(), states_.end(), [&](const SourceState& s) { return s.label == label; });
    return it == states_.end() ? nullptr : &*it;
}

const SourceState& SourceSet::at(std::string_view label) const {
    const SourceState* s = find(label);
    if (s == nullptr) throw ValidationError("no source state labelled '" + std::string(label) + "'");
    return *s;
}

double virtual_coefficient(int i, int j, double delta) {
    const double s = std::sin(delta / 2.0);
    const double c = std::cos(delta / 2.0);
    if (j == 0) {
        const double d = 2.0 * std::sqrt(1.0 + s);
        return (i == 0 ? 1.0 + s + c : 1.0 + s - c) / d;
    }
    const double d = 2.0 * std::sqrt(1.0 - s);
    return (i == 0 ? 1.0 - s - c : 1.0 - s + c) / d;
}

VirtualEnsemble virtual_states_planar(double delta) {
    if (!(delta >= 0.0)) throw ValidationError("modulation error delta must be >= 0");
    VirtualEnsemble ens;
    ens.basis = Basis::X;
    const double s = std::sin(delta / 2.0);
    for (int j = 0; j < 2; ++j) {
        Amp2 v = virtual_coefficient(0, j, delta) * basis_vector(Basis::X, 0) +
                 virtual_coefficient(1, j, delta) * basis_vector(Basis::X, 1);
        const double w = 0.5 * (1.0 + (j == 0 ? s : -s));
        ens.entries.push_back({w, QubitState::pure(v)});
    }
    return ens;
}

namespace {

// Columns are sqrt(lambda_k) |e_k>; the purification is sum_k |k>_sh (x) column k.
Eigen::MatrixXcd purification(const QubitState& state) {
    if (state.amplitudes()) {
        Eigen::MatrixXcd phi(2, 1);
        phi.col(0) = *state.amplitudes();
        return phi;
    }
    Eigen::SelfAdjointEigenSolver<Mat2> es(state.density());
    std::vector<int> order;
    for (int k = 1; k >= 0; --k) {
        if (es.eigenvalues()(k) > kAlgebraTol) order.push_back(k);
    }
    Eigen::MatrixXcd phi(2, static_cast<Eigen::Index>(order.size()));
    for (std::size_t c = 0; c < order.size(); ++c) {
        const int k = order[c];
        Amp2 e = normalise_phase(es.eigenvectors().col(k));
        phi.col(static_cast<Eigen::Index>(c)) = std::sqrt(es.eigenvalues()(k)) * e;
    }
    return phi;
}

}  // namespace

VirtualEnsemble virtual_states_from_purification(const QubitState& rho_0z, const QubitState& rho_1z, bool flip,
                                                 Basis basis) {
    if (basis == Basis::Z) throw ValidationError("virtual states are defined for the X or Y basis");
    std::array<Eigen::MatrixXcd, 2> phi = {purification(rho_0z), purification(rho_1z)};
    const Eigen::Index shield = std::max(phi[0].cols(), phi[1].cols());
    for (auto& p : phi) {
        if (p.cols() < shield) {
            Eigen::MatrixXcd padded = Eigen::MatrixXcd::Zero(2, shield);
            padded.leftCols(p.cols()) = p;
            p = padded;
        }
    }

    VirtualEnsemble ens;
    ens.basis = basis;
    for (int m = 0; m < 2; ++m) {
        const Amp2 bm = basis_vector(basis, m);
        Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(2, shield);
        for (int j = 0; j < 2; ++j) {
            const int sent = flip ? 1 - j : j;
            k += std::conj(bm(j)) / std::numbers::sqrt2 * phi[sent];
        }
        Mat2 sigma = k * k.adjoint();
        const double w = sigma.trace().real();
        if (!(w > kAlgebraTol)) throw ValidationError("virtual state has zero weight");
        if (shield == 1) {
            ens.entries.push_back({w, QubitState::pure(Amp2(k.col(0) / std::sqrt(w)))});
        } else {
            ens.entries.push_back({w, QubitState::from_density(sigma / w)});
        }
    }
    return ens;
}

}  // namespace ltqkd
