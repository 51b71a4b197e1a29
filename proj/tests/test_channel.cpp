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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ltqkd/channel.hpp"
#include "ltqkd/error.hpp"

namespace ltqkd::channel {
namespace {

ChannelParams at(double distance, double delta, double alpha = 0.5) {
    ChannelParams p;
    p.distance_km = distance;
    p.delta = delta;
    p.alpha = alpha;
    return p;
}

TEST(Channel, TotalLoss) {
    EXPECT_NEAR(total_loss(at(0, 0)), 0.85, 1e-15);
    EXPECT_NEAR(total_loss(at(50, 0)), 1 - 0.15 * std::pow(10.0, -1.05), 1e-15);
}

TEST(Channel, Validation) {
    ChannelParams p;
    p.dark_count = -1e-9;
    EXPECT_THROW(p.validate(), ValidationError);
    p = ChannelParams{};
    p.det_eff = 0.0;
    EXPECT_THROW(p.validate(), ValidationError);
    p = ChannelParams{};
    p.alpha = 0.0;
    EXPECT_THROW(evaluate(p), ValidationError);
    p = ChannelParams{};
    p.distance_km = -1;
    EXPECT_THROW(evaluate(p), ValidationError);
}

// Values from an independent 40-digit evaluation of the model formulas.
TEST(Channel, RegressionAt50km) {
    const ZStats z = evaluate(at(50, 0.126, 0.5));
    EXPECT_NEAR(z.q_z, 0.0066621905825560557357, 1e-12 * z.q_z);
    EXPECT_NEAR(z.e_z, 0.0019893335773742325006, 1e-11 * z.e_z);
    EXPECT_NEAR(z.q_z1, 0.0012295325917145060315, 1e-12 * z.q_z1);
    EXPECT_NEAR(z.e_x1, 0.0022346746719816400093, 1e-12 * z.e_x1);
}

TEST(Channel, NoiselessLimits) {
    ChannelParams p = at(0, 0);
    p.dark_count = 0;
    p.det_eff = 1.0;
    const ZStats z = evaluate(p);
    EXPECT_EQ(z.e_z, 0.0);
    EXPECT_EQ(z.e_x1, 0.0);
    EXPECT_NEAR(z.q_z1, 0.25 * std::exp(-1.0), 1e-15);
    EXPECT_NEAR(z.q_z, 1 - std::exp(-0.5), 1e-15);
}

TEST(Channel, PhaseErrorIsLossIndependentWithoutDarkCounts) {
    for (double delta : {0.0, 0.063, 0.126}) {
        ChannelParams p = at(0, delta);
        p.dark_count = 0;
        const double e0 = single_photon_stats(p).e_x1;
        for (double d : {50.0, 100.0, 150.0}) {
            p.distance_km = d;
            EXPECT_NEAR(single_photon_stats(p).e_x1, e0, 1e-12);
        }
        const double s = std::sin(3 * delta / 8);
        EXPECT_NEAR(e0, s * s, 1e-15);
    }
}

TEST(Channel, DetectionOperatorReproducesVirtualYields) {
    for (double delta : {0.0, 0.063, 0.126, 0.3}) {
        const ChannelParams p = at(30, delta);
        const YieldMatrix y = conditional_virtual_yields(p);
        const VirtualEnsemble ens = virtual_states_planar(delta);
        for (int s = 0; s < 2; ++s) {
            for (int j = 0; j < 2; ++j) {
                EXPECT_NEAR(conditional_yield(p, ens.entries[j].state, Basis::X, s), y[s][j], 1e-15);
            }
            const TransmissionFunctional f = detection_functional(p, s);
            const Mat2 d = detection_operator(p, Basis::X, s);
            EXPECT_NEAR(f.id, d.trace().real() / 2, 1e-15);
        }
    }
}

TEST(Channel, KeyBasisDetectionMatchesClickModel) {
    // Single-photon Z-basis detections of |0z> reproduce 1 - L (no dark counts).
    ChannelParams p = at(20, 0.1);
    p.dark_count = 0;
    const double eta = 1 - total_loss(p);
    EXPECT_NEAR(conditional_yield(p, basis_state(Basis::Z, 0), Basis::Z, 0), eta, 1e-15);
    EXPECT_NEAR(conditional_yield(p, basis_state(Basis::Z, 0), Basis::Z, 1), 0.0, 1e-15);
    const BlochVector ax = measurement_axis(p, Basis::X);
    EXPECT_NEAR(ax.x, std::cos(p.delta / 4), 1e-15);
    EXPECT_NEAR(ax.z, -std::sin(p.delta / 4), 1e-15);
}

TEST(Channel, MonotoneGainInDistance) {
    double last = 1.0;
    for (double d = 0; d <= 200; d += 10) {
        const ZStats z = evaluate(at(d, 0.063));
        EXPECT_LT(z.q_z, last);
        EXPECT_GT(z.q_z1, 0.0);
        EXPECT_LE(z.q_z1, z.q_z);
        last = z.q_z;
    }
}

}  // namespace
}  // namespace ltqkd::channel
