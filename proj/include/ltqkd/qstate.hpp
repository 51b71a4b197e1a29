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

#ifndef LTQKD_QSTATE_HPP
#define LTQKD_QSTATE_HPP

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace ltqkd {

using Complex = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Amp2 = Eigen::Vector2cd;

enum class Basis { X, Y, Z };

std::string_view basis_name(Basis b);
Basis parse_basis(std::string_view name);

enum class Pauli { Id, X, Y, Z };

/// The 2x2 matrix of the identity or a Pauli operator.
const Mat2& pauli_matrix(Pauli t);

/// Coefficients (v0, px, py, pz) of rho = (v0 I + px X + py Y + pz Z) / 2.
struct BlochVector {
    double v0 = 1.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    std::array<double, 4> components() const { return {v0, x, y, z}; }
    double radius() const;
    bool planar(double tol = 1e-9) const { return std::abs(y) <= tol; }
};

/// A single-qubit state. Always carries its density matrix; pure states built
/// from amplitudes also keep the (phase-normalised) amplitude vector.
class QubitState {
   public:
    /// Normalises the amplitudes and fixes the global phase so that the first
    /// nonzero coefficient is real and positive.
    static QubitState pure(Complex a0, Complex a1);
    static QubitState pure(const Amp2& amplitudes) { return pure(amplitudes(0), amplitudes(1)); }

    /// Validates trace, hermiticity and spectrum to 1e-12.
    static QubitState from_density(const Mat2& rho);

    static QubitState from_bloch(const BlochVector& v);

    const Mat2& density() const { return rho_; }
    const std::optional<Amp2>& amplitudes() const { return amps_; }
    double purity() const;
    bool is_pure(double tol = 1e-9) const { return std::abs(purity() - 1.0) <= tol; }

   private:
    QubitState(Mat2 rho, std::optional<Amp2> amps) : rho_(std::move(rho)), amps_(std::move(amps)) {}

    Mat2 rho_;
    std::optional<Amp2> amps_;
};

/// |j_b>, the eigenstate of basis b with bit value j. |0x> = (|0z>+|1z>)/sqrt2,
/// |0y> = (|0z>+i|1z>)/sqrt2.
QubitState basis_state(Basis b, int j);
Amp2 basis_vector(Basis b, int j);

/// Resolves a label such as "0z" or "1x" to the ideal basis state.
std::optional<QubitState> ideal_state(std::string_view label);

void validate_density(const Mat2& rho);

BlochVector pauli_decompose(const QubitState& state);
/// Validating overload for raw matrices.
BlochVector pauli_decompose(const Mat2& rho);
Mat2 bloch_to_density(const BlochVector& v);

/// Single-photon qubit of a phase-encoded pulse with modulation error delta:
/// the encoded phase is theta * (1 + delta / pi). theta = 0 gives |0z>, and
/// theta = pi gives sin(delta/2)|0z> + cos(delta/2)|1z>.
QubitState encode_single_photon(double theta, double delta);

/// Fidelity-style check |<a|b>| == 1 for pure states, or equal density
/// matrices otherwise.
bool same_state(const QubitState& a, const QubitState& b, double tol = 1e-9);

struct SourceState {
    std::string label;
    QubitState state;
    double prior;
};

/// Alice's prepared states with their emission probabilities.
class SourceSet {
   public:
    SourceSet() = default;
    explicit SourceSet(std::vector<SourceState> states);

    const std::vector<SourceState>& states() const { return states_; }
    const SourceState& at(std::string_view label) const;
    const SourceState* find(std::string_view label) const;
    std::size_t size() const { return states_.size(); }

   private:
    std::vector<SourceState> states_;
};

struct VirtualEntry {
    double weight;
    QubitState state;
};

/// Normalised virtual states sent when Alice measures her ancilla in the
/// complementary basis, with their probabilities P(j_x) (or P(j_y)).
struct VirtualEnsemble {
    Basis basis = Basis::X;
    std::vector<VirtualEntry> entries;
};

/// C_{i,j}(delta): coefficient of |i_x> in the virtual state |phi'_{j_x}>.
double virtual_coefficient(int i, int j, double delta);

/// Closed-form virtual ensemble of the sources |0z> and
/// sin(delta/2)|0z> + cos(delta/2)|1z>.
VirtualEnsemble virtual_states_planar(double delta);

/// Virtual ensemble from purifications of the two key-basis states. Mixed
/// inputs are purified through their eigendecomposition (descending
/// eigenvalues, shield dimension = rank). flip selects the bit-flipped
/// pairing |j_z>_A |phi_{j+1}>.
VirtualEnsemble virtual_states_from_purification(const QubitState& rho_0z, const QubitState& rho_1z, bool flip,
                                                 Basis basis);

}  // namespace ltqkd

#endif
