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
#include <vector>

#include "ltqkd/error.hpp"
#include "ltqkd/keyrate.hpp"
#include "oracles.hpp"

namespace ltqkd::keyrate {
namespace {

TEST(Entropy, ExactPoints) {
    EXPECT_EQ(binary_entropy(0.0), 0.0);
    EXPECT_EQ(binary_entropy(1.0), 0.0);
    EXPECT_EQ(binary_entropy(0.5), 1.0);
    EXPECT_THROW(binary_entropy(-0.1), ValidationError);
    EXPECT_THROW(binary_entropy(1.1), ValidationError);
    for (double x = 0.01; x < 1.0; x += 0.01) EXPECT_NEAR(binary_entropy(x), oracle::h2(x), 1e-14);
    EXPECT_NEAR(binary_entropy(0.11), 0.499915958164528, 1e-14);
}

TEST(KeyRate, ZeroAtMaximalPhaseError) {
    channel::ZStats z{0.01, 0.0, 0.005, 0.5};
    EXPECT_EQ(secret_key_rate(z), 0.0);
    z.e_x1 = 0.0;
    EXPECT_DOUBLE_EQ(secret_key_rate(z, 1.22), 0.0025);
    z.e_z = 0.2;
    EXPECT_EQ(secret_key_rate(z), 0.0);
    EXPECT_LT(raw_key_rate(z), 0.0);
}

TEST(KeyRate, MonotoneInErrorCorrectionEfficiency) {
    const channel::ZStats z{0.02, 0.01, 0.008, 0.02};
    double last = secret_key_rate(z, 1.0);
    for (double f = 1.0; f <= 2.0; f += 0.05) {
        const double r = secret_key_rate(z, f);
        EXPECT_LE(r, last);
        last = r;
    }
}

TEST(Optimizer, MatchesDenseGrid) {
    channel::ChannelParams p;
    p.distance_km = 50;
    const AlphaOptimum opt = optimize_alpha(p);
    double best = 0.0;
    for (int i = 0; i <= 20000; ++i) {
        p.alpha = std::pow(10.0, -4.0 + 4.0 * i / 20000.0);
        best = std::max(best, secret_key_rate(channel::evaluate(p)));
    }
    EXPECT_GE(opt.rate, best * (1 - 1e-6));
    // Independent 40-digit optimum.
    EXPECT_NEAR(opt.rate, 0.0006141594789681027246, 1e-9 * opt.rate);
    EXPECT_NEAR(opt.alpha, 0.49996585068523937756, 1e-2);
    EXPECT_FALSE(opt.zero_rate);
}

TEST(Optimizer, ZeroRateFlag) {
    channel::ChannelParams p;
    p.distance_km = 400;
    const AlphaOptimum opt = optimize_alpha(p);
    EXPECT_TRUE(opt.zero_rate);
    EXPECT_EQ(opt.rate, 0.0);
}

TEST(Optimizer, SearchValidation) {
    AlphaSearch s;
    s.lower = 0.0;
    EXPECT_THROW(s.validate(), ValidationError);
    s = AlphaSearch{};
    s.upper = 1e-5;
    EXPECT_THROW(s.validate(), ValidationError);
    s = AlphaSearch{};
    s.grid_points = 1;
    EXPECT_THROW(s.validate(), ValidationError);
}

TEST(Sweep, DeterministicAcrossThreads) {
    std::vector<double> d;
    for (int i = 0; i <= 30; ++i) d.push_back(5.0 * i);
    channel::ChannelParams base;
    base.delta = 0.126;
    SweepOptions one;
    SweepOptions many;
    many.threads = 4;
    const auto a = sweep(d, base, one);
    const auto b = sweep(d, base, many);
    ASSERT_EQ(a.size(), d.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].distance_km, d[i]);
        EXPECT_EQ(a[i].rate, b[i].rate);
        EXPECT_EQ(a[i].alpha_opt, b[i].alpha_opt);
    }
}

TEST(Sweep, FixedAlpha) {
    const std::vector<double> d = {10.0};
    channel::ChannelParams base;
    SweepOptions o;
    o.fixed_alpha = 0.3;
    const auto r = sweep(d, base, o);
    base.alpha = 0.3;
    base.distance_km = 10.0;
    EXPECT_EQ(r[0].alpha_opt, 0.3);
    EXPECT_EQ(r[0].rate, secret_key_rate(channel::evaluate(base)));
}

}  // namespace
}  // namespace ltqkd::keyrate
