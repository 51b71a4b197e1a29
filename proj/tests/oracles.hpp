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

// Brute-force reference computations for the tests. Everything here works
// directly on Kraus operators, POVM elements and explicit purifications, and
// uses nothing from the library beyond its matrix types.

#ifndef LTQKD_TESTS_ORACLES_HPP
#define LTQKD_TESTS_ORACLES_HPP

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace oracle {

using cd = std::complex<double>;
using M2 = Eigen::Matrix2cd;
using V2 = Eigen::Vector2cd;
using M4 = Eigen::Matrix4cd;

inline V2 ket(cd a, cd b) {
    V2 v;
    v << a, b;
    return v;
}

inline V2 zero_z() { return ket(1, 0); }
inline V2 one_z() { return ket(0, 1); }
inline V2 zero_x() { return ket(1, 1) / std::sqrt(2.0); }
inline V2 one_x() { return ket(1, -1) / std::sqrt(2.0); }
inline V2 zero_y() { return ket(1, cd(0, 1)) / std::sqrt(2.0); }
inline V2 one_y() { return ket(1, cd(0, -1)) / std::sqrt(2.0); }

inline M2 proj(const V2& v) { return v * v.adjoint(); }

inline std::array<M2, 4> paulis() {
    M2 i = M2::Identity(), x, y, z;
    x << 0, 1, 1, 0;
    y << 0, cd(0, -1), cd(0, 1), 0;
    z << 1, 0, 0, -1;
    return {i, x, y, z};
}

/// Sum_k K^dag M K.
inline M2 heisenberg(const std::vector<M2>& kraus, const M2& m) {
    M2 d = M2::Zero();
    for (const auto& k : kraus) d += k.adjoint() * m * k;
    return d;
}

/// Tr(M sum_k K rho K^dag).
inline double yield(const std::vector<M2>& kraus, const M2& m, const M2& rho) {
    M2 out = M2::Zero();
    for (const auto& k : kraus) out += k * rho * k.adjoint();
    return (m * out).trace().real();
}

/// Unnormalised virtual state for complementary outcome m of basis vectors
/// b0, b1 when the key states are the pure states phi0, phi1:
/// (<b_m|0z> phi0 + <b_m|1z> phi1) / sqrt 2.
inline V2 virtual_ket(const V2& bm, const V2& phi0, const V2& phi1) {
    return (std::conj(bm(0)) * phi0 + std::conj(bm(1)) * phi1) / std::sqrt(2.0);
}

/// y[s][j] = <psi_j| D_s |psi_j> for the unnormalised virtual kets.
inline std::array<std::array<double, 2>, 2> virtual_yields(const std::array<M2, 2>& d, const V2& b0, const V2& b1,
                                                           const V2& phi0, const V2& phi1) {
    const std::array<V2, 2> psi = {virtual_ket(b0, phi0, phi1), virtual_ket(b1, phi0, phi1)};
    std::array<std::array<double, 2>, 2> y{};
    for (int s = 0; s < 2; ++s) {
        for (int j = 0; j < 2; ++j) y[s][j] = (psi[j].adjoint() * d[s] * psi[j])(0, 0).real();
    }
    return y;
}

inline double error_ratio(const std::array<std::array<double, 2>, 2>& y) {
    return (y[0][1] + y[1][0]) / (y[0][0] + y[0][1] + y[1][0] + y[1][1]);
}

inline M4 kron(const M2& a, const M2& b) {
    M4 out;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    }
    return out;
}

/// The pure state the modulated source emits for Bloch polar angle theta:
/// the angle is over-rotated by the factor (1 + delta / pi). The global phase
/// makes the first nonzero amplitude positive, so theta = pi gives
/// sin(delta/2)|0z> + cos(delta/2)|1z>.
inline V2 modulated(double theta, double delta) {
    const double t = theta * (1.0 + delta / std::numbers::pi);
    double a = std::cos(t / 2);
    double b = -std::sin(t / 2);
    if (a < 0 || (a == 0 && b < 0)) {
        a = -a;
        b = -b;
    }
    return ket(a, b);
}

/// Binary entropy straight from the definition.
inline double h2(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return -x * std::log2(x) - (1 - x) * std::log2(1 - x);
}

}  // namespace oracle

#endif
