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

#include "ltqkd/channel.hpp"

#include <cmath>
#include <numbers>

#include "ltqkd/error.hpp"

namespace ltqkd::channel {

void ChannelParams::validate() const {
    if (!(dark_count >= 0.0 && dark_count < 1.0)) throw ValidationError("dark_count must be in [0, 1)");
    if (!(det_eff > 0.0 && det_eff <= 1.0)) throw ValidationError("det_eff must be in (0, 1]");
    if (!(atten_db_per_km >= 0.0) || !std::isfinite(atten_db_per_km)) {
        throw ValidationError("atten_db_per_km must be >= 0");
    }
    if (!(distance_km >= 0.0) || !std::isfinite(distance_km)) throw ValidationError("distance_km must be >= 0");
    if (!(delta >= 0.0) || !std::isfinite(delta)) throw ValidationError("delta must be >= 0");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ValidationError("alpha must be > 0");
}

double total_loss(const ChannelParams& p) {
    p.validate();
    return 1.0 - p.det_eff * std::pow(10.0, -p.atten_db_per_km * p.distance_km / 10.0);
}

YieldMatrix conditional_virtual_yields(const ChannelParams& p) {
    const double transmit = 1.0 - total_loss(p);
    const double ed = p.dark_count;
    const double d = 1.5 * p.delta;
    YieldMatrix y{};
    for (int s = 0; s < 2; ++s) {
        for (int j = 0; j < 2; ++j) {
            const double c_same = virtual_coefficient(s, j, d);
            const double c_flip = virtual_coefficient(1 - s, j, d);
            y[s][j] = transmit * c_same * c_same * (1.0 - ed / 2.0) + ed * (1.0 - ed / 2.0) +
                      transmit * c_flip * c_flip * ed;
        }
    }
    return y;
}

SinglePhotonStats single_photon_stats(const ChannelParams& p) {
    const YieldMatrix y = conditional_virtual_yields(p);
    const double den = y[1][0] + y[0][1] + y[1][1] + y[0][0];
    if (!(den > 0.0)) throw UndefinedRateError("no single-photon detections (total loss, no dark counts)");
    SinglePhotonStats out;
    out.e_x1 = (y[1][0] + y[0][1]) / den;
    const double sd = std::sin(p.delta / 2.0);
    const std::array<double, 2> prob = {0.5 * (1.0 + sd), 0.5 * (1.0 - sd)};
    double sum = 0.0;
    for (int j = 0; j < 2; ++j) {
        for (int s = 0; s < 2; ++s) sum += y[s][j] * prob[j];
    }
    out.q_z1 = 0.5 * std::exp(-2.0 * p.alpha) * p.alpha * sum;
    return out;
}

ZBasisStats zbasis_stats(const ChannelParams& p) {
    const double transmit = 1.0 - total_loss(p);
    const double ed = p.dark_count;
    const double mu = p.alpha * transmit;
    const double s2 = std::pow(std::sin(p.delta / 2.0), 2);
    const double c2 = std::pow(std::cos(p.delta / 2.0), 2);
    // P[s][j]: probability that detector s clicks when Alice sent bit j.
    const double p00 = ed + (1.0 - ed) * -std::expm1(-mu);
    const double p10 = ed;
    const double p01 = ed + (1.0 - ed) * -std::expm1(-mu * s2);
    const double p11 = ed + (1.0 - ed) * -std::expm1(-mu * c2);

    auto any_click = [](double right, double wrong) {
        return right * (1.0 - wrong) + (1.0 - right) * wrong + right * wrong;
    };
    // Wrong detector alone, plus half of the double clicks (random bit).
    auto error_click = [](double right, double wrong) { return (1.0 - right) * wrong + 0.5 * right * wrong; };

    ZBasisStats out;
    out.q_z = 0.5 * any_click(p00, p10) + 0.5 * any_click(p11, p01);
    const double w_z = 0.5 * error_click(p00, p10) + 0.5 * error_click(p11, p01);
    if (!(out.q_z > 0.0)) throw UndefinedRateError("zero Z-basis gain");
    out.e_z = w_z / out.q_z;
    return out;
}

ZStats evaluate(const ChannelParams& p) {
    const SinglePhotonStats sp = single_photon_stats(p);
    const ZBasisStats zb = zbasis_stats(p);
    return {zb.q_z, zb.e_z, sp.q_z1, sp.e_x1};
}

BlochVector measurement_axis(const ChannelParams& p, Basis b) {
    p.validate();
    switch (b) {
        case Basis::Z:
            return {1.0, 0.0, 0.0, 1.0};
        case Basis::X: {
            // Virtual X axis sits at pi/2 - delta/2 from +z; Bob's axis at
            // pi/2 + delta/4, a total tilt of 3 delta / 4.
            const double angle = 0.5 * std::numbers::pi + 0.25 * p.delta;
            return {1.0, std::sin(angle), 0.0, std::cos(angle)};
        }
        case Basis::Y:
            return {1.0, 0.0, 1.0, 0.0};
    }
    return {};
}

Mat2 detection_operator(const ChannelParams& p, Basis b, int s) {
    if (s != 0 && s != 1) throw ValidationError("outcome must be 0 or 1");
    const double transmit = 1.0 - total_loss(p);
    const double ed = p.dark_count;
    BlochVector axis = measurement_axis(p, b);
    BlochVector flipped{1.0, -axis.x, -axis.y, -axis.z};
    const Mat2 right = bloch_to_density(s == 0 ? axis : flipped);
    const Mat2 wrong = bloch_to_density(s == 0 ? flipped : axis);
    return transmit * ((1.0 - ed / 2.0) * right + ed * wrong) + ed * (1.0 - ed / 2.0) * Mat2::Identity();
}

TransmissionFunctional detection_functional(const ChannelParams& p, int s) {
    const Mat2 d = detection_operator(p, Basis::X, s);
    TransmissionFunctional f;
    f.outcome = s;
    f.planar = true;
    f.id = 0.5 * d.trace().real();
    f.x = 0.5 * (d * pauli_matrix(Pauli::X)).trace().real();
    f.z = 0.5 * (d * pauli_matrix(Pauli::Z)).trace().real();
    return f;
}

double conditional_yield(const ChannelParams& p, const QubitState& state, Basis b, int s) {
    return (detection_operator(p, b, s) * state.density()).trace().real();
}

}  // namespace ltqkd::channel
