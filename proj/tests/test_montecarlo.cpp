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

#include "ltqkd/error.hpp"
#include "ltqkd/montecarlo.hpp"
#include "oracles.hpp"

namespace ltqkd::mc {
namespace {

constexpr double kPi = std::numbers::pi;

SourceSet three_state(double delta) {
    return SourceSet({{"0z", encode_single_photon(0, delta), 1.0 / 3},
                      {"1z", encode_single_photon(kPi, delta), 1.0 / 3},
                      {"1x", encode_single_photon(kPi / 2, delta), 1.0 / 3}});
}

const BasisProbabilities kBases = {{Basis::X, 0.5}, {Basis::Z, 0.5}};

TEST(Rng, ReproducibleAndSplittable) {
    Rng a(1, 0), b(1, 0), c(1, 1), d(2, 0);
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next();
        EXPECT_EQ(x, b.next());
        EXPECT_NE(x, c.next());
        EXPECT_NE(x, d.next());
    }
    Rng u(9);
    double sum = 0;
    for (int i = 0; i < 100000; ++i) {
        const double v = u.uniform();
        ASSERT_GE(v, 0.0);
        ASSERT_LT(v, 1.0);
        sum += v;
    }
    EXPECT_NEAR(sum / 100000, 0.5, 0.005);
}

TEST(RandomModels, AreValid) {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const KrausChannel ch = random_channel(seed);
        EXPECT_NO_THROW(ch.validate());
        const Mat2 def = ch.deficit();
        Eigen::SelfAdjointEigenSolver<Mat2> es(def);
        EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12);
        const BobPovm povm = random_povm(seed, seed % 2 == 1);
        EXPECT_NO_THROW(povm.validate());
        for (const auto& [b, m] : povm.elements) {
            EXPECT_LT((m[0] + m[1] + povm.inconclusive - Mat2::Identity()).cwiseAbs().maxCoeff(), 1e-12);
        }
    }
}

TEST(RandomModels, InvalidRejected) {
    KrausChannel ch;
    ch.operators = {Mat2::Identity() * 1.1};
    EXPECT_THROW(ch.validate(), ValidationError);
    BobPovm povm = random_povm(1);
    povm.inconclusive = Mat2::Identity();
    EXPECT_THROW(povm.validate(), ValidationError);
    EXPECT_THROW(random_povm(1).basis(Basis::Y), ValidationError);
}

TEST(ExactYields, MatchTraceOracle) {
    const SourceSet src = three_state(0.2);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const KrausChannel ch = random_channel(seed);
        const BobPovm povm = random_povm(seed);
        const auto tables = exact_yields(src, ch, povm, kBases);
        for (Basis b : {Basis::X, Basis::Z}) {
            for (const auto& s : src.states()) {
                for (int o = 0; o < 2; ++o) {
                    const double y = oracle::yield(ch.operators, povm.basis(b)[o], s.state.density());
                    EXPECT_NEAR(tables.at(b).joint(s.label, o), y / 6, 1e-15);
                }
            }
        }
        // Uniform loss scales every yield.
        const auto lossy = exact_yields(src, ch.with_loss(0.7), povm, kBases);
        EXPECT_NEAR(lossy.at(Basis::X).joint("1x", 1), 0.3 * tables.at(Basis::X).joint("1x", 1), 1e-15);
    }
}

TEST(Protocol, DeterministicAcrossThreads) {
    const SourceSet src = three_state(0.126);
    const KrausChannel ch = random_channel(3);
    const BobPovm povm = random_povm(3);
    RunOptions one, four;
    four.threads = 4;
    const TrialRecord a = run_protocol(300000, src, ch, povm, kBases, 17, one);
    const TrialRecord b = run_protocol(300000, src, ch, povm, kBases, 17, four);
    EXPECT_EQ(a.counts, b.counts);
    EXPECT_EQ(a.seed, 17u);
    std::uint64_t total = 0;
    for (const auto& [k, n] : a.counts) total += n;
    EXPECT_EQ(total, 300000u);
    const TrialRecord c = run_protocol(300000, src, ch, povm, kBases, 18, one);
    EXPECT_NE(a.counts, c.counts);
}

TEST(Protocol, FrequenciesConverge) {
    const SourceSet src = three_state(0.126);
    const KrausChannel ch = random_channel(4);
    const BobPovm povm = random_povm(4);
    const std::uint64_t n = 400000;
    const TrialRecord t = run_protocol(n, src, ch, povm, kBases, 5);
    const auto exact = exact_yields(src, ch, povm, kBases);
    for (Basis b : {Basis::X, Basis::Z}) {
        const YieldTable emp = empirical_yields(t, b);
        for (const auto& s : src.states()) {
            for (int o = 0; o < 2; ++o) {
                const double p = exact.at(b).joint(s.label, o);
                const double sd = std::sqrt(p * (1 - p) / static_cast<double>(n));
                EXPECT_NEAR(emp.joint(s.label, o), p, 5 * sd + 1e-12);
            }
        }
    }
}

TEST(Protocol, EstimateCoversTruth) {
    const SourceSet src = three_state(0.126);
    const KrausChannel ch = random_channel(6);
    const BobPovm povm = random_povm(6);
    const auto x = exact_yields(src, ch, povm, kBases).at(Basis::X);
    const auto ens = virtual_states_from_purification(src.at("0z").state, src.at("1z").state, false, Basis::X);
    const double truth = phase_error_virtual(solve_functional(x, src, 0), solve_functional(x, src, 1), ens);
    const TrialRecord t = run_protocol(1000000, src, ch, povm, kBases, 8);
    const TrialEstimate e = estimate_from_trial(t, src);
    EXPECT_GT(e.std_error, 0.0);
    EXPECT_LT(e.std_error, 0.05);
    EXPECT_LE(std::abs(e.e_x - truth), 4 * e.std_error);
}

TEST(Protocol, Validation) {
    const SourceSet src = three_state(0.0);
    EXPECT_THROW(run_protocol(0, src, KrausChannel::identity(), random_povm(1), kBases, 1), ValidationError);
    EXPECT_THROW(run_protocol(10, src, KrausChannel::identity(), random_povm(1), {{Basis::X, 0.4}}, 1),
                 ValidationError);
    TrialRecord empty;
    empty.n_pulses = 10;
    empty.priors = {{"0z", 1.0 / 3}, {"1z", 1.0 / 3}, {"1x", 1.0 / 3}};
    empty.basis_probs = kBases;
    EXPECT_THROW(estimate_from_trial(empty, src), UndefinedRateError);
}

TEST(ModelSetup, MatchesChannelModule) {
    channel::ChannelParams p;
    p.distance_km = 50;
    p.delta = 0.126;
    const ModelSetup m = modulated_link_setup(p);
    const auto x = exact_yields(m.sources, m.channel, m.povm, m.basis_probs).at(Basis::X);
    const auto ens = virtual_states_from_purification(m.sources.at("0z").state, m.sources.at("1z").state, false,
                                                      Basis::X);
    const double e = phase_error_virtual(solve_functional(x, m.sources, 0), solve_functional(x, m.sources, 1), ens);
    EXPECT_NEAR(e, channel::single_photon_stats(p).e_x1, 1e-12);
}

}  // namespace
}  // namespace ltqkd::mc
