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

#ifndef LTQKD_CHANNEL_HPP
#define LTQKD_CHANNEL_HPP

#include <array>

#include "ltqkd/estimator.hpp"
#include "ltqkd/qstate.hpp"

namespace ltqkd::channel {

/// Defaults are typical telecom-fiber link values.
struct ChannelParams {
    double dark_count = 0.5e-7;     // e_d, per detector per gate
    double det_eff = 0.15;          // Bob's detection-apparatus transmittance
    double atten_db_per_km = 0.21;  // fiber loss coefficient
    double distance_km = 0.0;
    double delta = 0.0;  // phase modulation error
    double alpha = 0.5;  // mean photon number per mode

    void validate() const;
};

struct ZStats {
    double q_z = 0.0;   // overall gain
    double e_z = 0.0;   // bit error rate
    double q_z1 = 0.0;  // single-photon gain
    double e_x1 = 0.0;  // single-photon phase error rate
};

struct SinglePhotonStats {
    double q_z1 = 0.0;
    double e_x1 = 0.0;
};

struct ZBasisStats {
    double q_z = 0.0;
    double e_z = 0.0;
};

/// Y[s][j]: conditional probability of Bob's X outcome s for virtual state j.
using YieldMatrix = std::array<std::array<double, 2>, 2>;

/// 1 - det_eff * 10^(-atten * distance / 10).
double total_loss(const ChannelParams& p);

/// Conditional virtual yields with loss, dark counts and double clicks, using
/// the virtual coefficients at 3 delta / 2.
YieldMatrix conditional_virtual_yields(const ChannelParams& p);

SinglePhotonStats single_photon_stats(const ChannelParams& p);

/// Weak-coherent-pulse Z-basis gain and bit error rate.
ZBasisStats zbasis_stats(const ChannelParams& p);

ZStats evaluate(const ChannelParams& p);

/// Bob's single-photon detection operator for bit s in basis b:
/// D_s = (1-L)[(1 - e_d/2) B_s + e_d B_{s+1}] + e_d (1 - e_d/2) I,
/// where B_s projects on Bob's (modulated) measurement state. The X axis is
/// tilted so the virtual states see the coefficients at 3 delta / 2.
Mat2 detection_operator(const ChannelParams& p, Basis b, int s);

/// Bloch axis of Bob's outcome-0 projector in basis b.
BlochVector measurement_axis(const ChannelParams& p, Basis b);

/// Pauli coefficients of detection_operator for the X basis (planar).
TransmissionFunctional detection_functional(const ChannelParams& p, int s);

/// Tr(D_s rho): conditional yield of an arbitrary single-photon state.
double conditional_yield(const ChannelParams& p, const QubitState& state, Basis b, int s);

}  // namespace ltqkd::channel

#endif
