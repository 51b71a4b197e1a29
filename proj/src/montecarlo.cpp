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

#include "ltqkd/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include "ltqkd/error.hpp"

namespace ltqkd::mc {

namespace {

constexpr double kCompletenessTol = 1e-10;

double max_eigenvalue(const Mat2& m) {
    Eigen::SelfAdjointEigenSolver<Mat2> es(0.5 * (m + m.adjoint()));
    return es.eigenvalues().maxCoeff();
}

double min_eigenvalue(const Mat2& m) {
    Eigen::SelfAdjointEigenSolver<Mat2> es(0.5 * (m + m.adjoint()));
    return es.eigenvalues().minCoeff();
}

Mat2 gaussian_matrix(Rng& rng) {
    Mat2 m;
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) m(r, c) = Complex(rng.normal(), rng.normal());
    }
    return m;
}

Mat2 random_unitary(Rng& rng) {
    Amp2 u(Complex(rng.normal(), rng.normal()), Complex(rng.normal(), rng.normal()));
    u.normalize();
    Mat2 m;
    m.col(0) = u;
    m.col(1) = Amp2(-std::conj(u(1)), std::conj(u(0)));
    return m;
}

double trace_product(const Mat2& a, const Mat2& b) { return (a * b).trace().real(); }

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
}

std::uint64_t Rng::next() { return engine_(); }

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() { return gauss_(engine_); }

Mat2 KrausChannel::deficit() const {
    Mat2 sum = Mat2::Zero();
    for (const auto& a : operators) sum += a.adjoint() * a;
    return Mat2::Identity() - sum;
}

Mat2 KrausChannel::apply(const Mat2& rho) const {
    Mat2 out = Mat2::Zero();
    for (const auto& a : operators) out += a * rho * a.adjoint();
    return out;
}

KrausChannel KrausChannel::with_loss(double loss) const {
    if (!(loss >= 0.0 && loss < 1.0)) throw ValidationError("loss must be in [0, 1)");
    KrausChannel out = *this;
    for (auto& a : out.operators) a *= std::sqrt(1.0 - loss);
    return out;
}

void KrausChannel::validate() const {
    if (operators.empty()) throw ValidationError("channel has no Kraus operators");
    for (const auto& a : operators) {
        if (!a.allFinite()) throw ValidationError("Kraus operator has non-finite entries");
    }
    if (min_eigenvalue(deficit()) < -kCompletenessTol) {
        throw ValidationError("Kraus operators exceed completeness (sum A^dag A > I)");
    }
}

KrausChannel KrausChannel::identity() { return KrausChannel{{Mat2::Identity()}}; }

const std::array<Mat2, 2>& BobPovm::basis(Basis b) const {
    auto it = elements.find(b);
    if (it == elements.end()) throw ValidationError("POVM has no " + std::string(basis_name(b)) + " basis");
    return it->second;
}

void BobPovm::validate() const {
    if (min_eigenvalue(inconclusive) < -kCompletenessTol) throw ValidationError("M_f is not positive semidefinite");
    for (const auto& [b, m] : elements) {
        for (const auto& e : m) {
            if (min_eigenvalue(e) < -kCompletenessTol) {
                throw ValidationError("POVM element in basis " + std::string(basis_name(b)) + " is not PSD");
            }
        }
        const Mat2 total = m[0] + m[1] + inconclusive;
        if ((total - Mat2::Identity()).cwiseAbs().maxCoeff() > kCompletenessTol) {
            throw ValidationError("POVM elements in basis " + std::string(basis_name(b)) + " do not sum to I");
        }
    }
}

Mat2 detection_operator(const KrausChannel& ch, const BobPovm& povm, Basis b, int s) {
    if (s != 0 && s != 1) throw ValidationError("outcome must be 0 or 1");
    const Mat2& m = povm.basis(b)[static_cast<std::size_t>(s)];
    Mat2 d = Mat2::Zero();
    for (const auto& a : ch.operators) d += a.adjoint() * m * a;
    return d;
}

KrausChannel random_channel(std::uint64_t seed) {
    Rng rng(seed, 0x6368616eULL);
    const int count = 1 + static_cast<int>(rng.next() % 4);
    KrausChannel ch;
    Mat2 sum = Mat2::Zero();
    for (int k = 0; k < count; ++k) {
        ch.operators.push_back(gaussian_matrix(rng));
        sum += ch.operators.back().adjoint() * ch.operators.back();
    }
    const double loss = 0.9 * rng.uniform();
    const double scale = std::sqrt((1.0 - loss) / max_eigenvalue(sum));
    for (auto& a : ch.operators) a *= scale;
    return ch;
}

BobPovm random_povm(std::uint64_t seed, bool with_y_basis) {
    Rng rng(seed, 0x706f766dULL);
    const Mat2 u = random_unitary(rng);
    const std::array<double, 2> fail = {0.6 * rng.uniform(), 0.6 * rng.uniform()};
    BobPovm povm;
    Mat2 root = Mat2::Zero();
    for (int k = 0; k < 2; ++k) {
        povm.inconclusive += fail[k] * u.col(k) * u.col(k).adjoint();
        root += std::sqrt(1.0 - fail[k]) * u.col(k) * u.col(k).adjoint();
    }
    const Mat2 conclusive = Mat2::Identity() - povm.inconclusive;
    std::vector<Basis> bases = {Basis::X, Basis::Z};
    if (with_y_basis) bases.push_back(Basis::Y);
    for (Basis b : bases) {
        const Mat2 v = random_unitary(rng);
        Mat2 split = Mat2::Zero();
        for (int k = 0; k < 2; ++k) split += rng.uniform() * v.col(k) * v.col(k).adjoint();
        Mat2 m0 = root * split * root;
        m0 = 0.5 * (m0 + m0.adjoint());
        povm.elements[b] = {m0, conclusive - m0};
    }
    return povm;
}

QubitState random_state(std::uint64_t seed, bool pure) {
    Rng rng(seed, 0x73746174ULL);
    Amp2 v(Complex(rng.normal(), rng.normal()), Complex(rng.normal(), rng.normal()));
    QubitState s = QubitState::pure(v);
    if (pure) return s;
    BlochVector b = pauli_decompose(s);
    const double r = rng.uniform();
    return QubitState::from_bloch({1.0, r * b.x, r * b.y, r * b.z});
}

std::map<Basis, YieldTable> exact_yields(const SourceSet& sources, const KrausChannel& ch, const BobPovm& povm,
                                         const BasisProbabilities& basis_probs) {
    ch.validate();
    povm.validate();
    std::map<Basis, YieldTable> out;
    for (const auto& [b, pb] : basis_probs) {
        if (!(pb > 0.0)) continue;
        YieldTable table(b);
        const auto& m = povm.basis(b);
        for (const auto& src : sources.states()) {
            const double prior = src.prior * pb;
            table.set_prior(src.label, prior);
            const Mat2 out_state = ch.apply(src.state.density());
            for (int s = 0; s < 2; ++s) {
                table.set_joint(src.label, s, std::clamp(prior * trace_product(out_state, m[s]), 0.0, prior));
            }
        }
        out.emplace(b, std::move(table));
    }
    return out;
}

std::uint64_t TrialRecord::count(const std::string& label, Basis b, int outcome) const {
    auto it = counts.find({label, b, outcome});
    return it == counts.end() ? 0 : it->second;
}

TrialRecord run_protocol(std::uint64_t n_pulses, const SourceSet& sources, const KrausChannel& ch,
                         const BobPovm& povm, const BasisProbabilities& basis_probs, std::uint64_t seed,
                         const RunOptions& options) {
    if (n_pulses < 1) throw ValidationError("n_pulses must be >= 1");
    if (sources.size() == 0) throw ValidationError("no source states");
    if (options.block_size < 1) throw ValidationError("block size must be >= 1");
    ch.validate();
    povm.validate();

    std::vector<Basis> bases;
    std::vector<double> basis_cdf;
    double acc = 0.0;
    for (const auto& [b, pb] : basis_probs) {
        if (!(pb >= 0.0)) throw ValidationError("basis probabilities must be >= 0");
        if (pb == 0.0) continue;
        povm.basis(b);
        bases.push_back(b);
        acc += pb;
        basis_cdf.push_back(acc);
    }
    if (bases.empty() || std::abs(acc - 1.0) > 1e-12) throw ValidationError("basis probabilities must sum to 1");
    basis_cdf.back() = 1.0;

    const std::size_t n_labels = sources.size();
    const std::size_t n_bases = bases.size();
    std::vector<double> label_cdf;
    acc = 0.0;
    for (const auto& s : sources.states()) label_cdf.push_back(acc += s.prior);
    label_cdf.back() = 1.0;

    // Cumulative outcome probabilities (p0, p0 + p1) per (label, basis).
    std::vector<std::array<double, 2>> outcome_cdf(n_labels * n_bases);
    for (std::size_t l = 0; l < n_labels; ++l) {
        const Mat2 rho = ch.apply(sources.states()[l].state.density());
        for (std::size_t b = 0; b < n_bases; ++b) {
            const auto& m = povm.basis(bases[b]);
            const double p0 = std::clamp(trace_product(rho, m[0]), 0.0, 1.0);
            const double p1 = std::clamp(trace_product(rho, m[1]), 0.0, 1.0 - p0);
            outcome_cdf[l * n_bases + b] = {p0, p0 + p1};
        }
    }

    const std::size_t cells = n_labels * n_bases * 3;
    const std::uint64_t n_blocks = (n_pulses + options.block_size - 1) / options.block_size;
    auto run_block = [&](std::uint64_t block, std::vector<std::uint64_t>& counts) {
        Rng rng(seed, block);
        const std::uint64_t begin = block * options.block_size;
        const std::uint64_t end = std::min(n_pulses, begin + options.block_size);
        for (std::uint64_t i = begin; i < end; ++i) {
            const double ul = rng.uniform();
            const double ub = rng.uniform();
            const double uo = rng.uniform();
            const auto l = static_cast<std::size_t>(std::upper_bound(label_cdf.begin(), label_cdf.end(), ul) -
                                                    label_cdf.begin());
            const auto b = static_cast<std::size_t>(std::upper_bound(basis_cdf.begin(), basis_cdf.end(), ub) -
                                                    basis_cdf.begin());
            const auto& cdf = outcome_cdf[l * n_bases + b];
            const int outcome = uo < cdf[0] ? 0 : (uo < cdf[1] ? 1 : kInconclusive);
            ++counts[(l * n_bases + b) * 3 + static_cast<std::size_t>(outcome)];
        }
    };

    const unsigned threads = std::max(1u, std::min<unsigned>(options.threads == 0
                                                                 ? std::thread::hardware_concurrency()
                                                                 : options.threads,
                                                             static_cast<unsigned>(std::min<std::uint64_t>(
                                                                 n_blocks, 1024))));
    std::vector<std::vector<std::uint64_t>> partial(threads, std::vector<std::uint64_t>(cells, 0));
    if (threads == 1) {
        for (std::uint64_t blk = 0; blk < n_blocks; ++blk) run_block(blk, partial[0]);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                for (std::uint64_t blk = t; blk < n_blocks; blk += threads) run_block(blk, partial[t]);
            });
        }
        for (auto& th : pool) th.join();
    }

    TrialRecord rec;
    rec.n_pulses = n_pulses;
    rec.seed = seed;
    for (const auto& s : sources.states()) rec.priors[s.label] = s.prior;
    for (const auto& [b, pb] : basis_probs) {
        if (pb > 0.0) rec.basis_probs[b] = pb;
    }
    for (std::size_t l = 0; l < n_labels; ++l) {
        for (std::size_t b = 0; b < n_bases; ++b) {
            for (int o = 0; o < 3; ++o) {
                std::uint64_t total = 0;
                for (const auto& part : partial) total += part[(l * n_bases + b) * 3 + static_cast<std::size_t>(o)];
                rec.counts[{sources.states()[l].label, bases[b], o}] = total;
            }
        }
    }
    return rec;
}

YieldTable empirical_yields(const TrialRecord& t, Basis b) {
    auto pb = t.basis_probs.find(b);
    if (pb == t.basis_probs.end()) throw ValidationError("trial has no " + std::string(basis_name(b)) + " basis");
    if (t.n_pulses == 0) throw ValidationError("trial has no pulses");
    YieldTable table(b);
    const double n = static_cast<double>(t.n_pulses);
    for (const auto& [label, prior] : t.priors) {
        table.set_prior(label, prior * pb->second);
        for (int s = 0; s < 2; ++s) table.set_joint(label, s, static_cast<double>(t.count(label, b, s)) / n);
    }
    return table;
}

namespace {

std::array<std::array<double, 2>, 2> virtual_yields_unchecked(const YieldTable& table, const SourceSet& sources,
                                                              const VirtualEnsemble& ens) {
    const SolveOptions loose{.check_physical = false};
    const TransmissionFunctional f0 = solve_functional(table, sources, 0, loose);
    const TransmissionFunctional f1 = solve_functional(table, sources, 1, loose);
    std::array<std::array<double, 2>, 2> y{};
    const std::array<const TransmissionFunctional*, 2> fs = {&f0, &f1};
    for (int s = 0; s < 2; ++s) {
        for (int j = 0; j < 2; ++j) {
            const auto& e = ens.entries[static_cast<std::size_t>(j)];
            y[s][j] = e.weight * fs[s]->evaluate(pauli_decompose(e.state));
        }
    }
    return y;
}

}  // namespace

TrialEstimate estimate_from_trial(const TrialRecord& t, const SourceSet& sources) {
    const YieldTable table = empirical_yields(t, Basis::X);
    const VirtualEnsemble ens =
        virtual_states_from_purification(sources.at("0z").state, sources.at("1z").state, false, Basis::X);

    const auto y = virtual_yields_unchecked(table, sources, ens);
    const double num = y[0][1] + y[1][0];
    const double den = y[0][0] + y[0][1] + y[1][0] + y[1][1];

    TrialEstimate est;
    for (int s = 0; s < 2; ++s) {
        for (int j = 0; j < 2; ++j) est.virtual_yields[s][j] = std::max(0.0, y[s][j]);
    }
    const auto& c = est.virtual_yields;
    const double den_clamped = c[0][0] + c[0][1] + c[1][0] + c[1][1];
    if (!(den > 0.0) || !(den_clamped > 0.0)) throw UndefinedRateError("no X-basis detections in trial");
    est.e_x = std::clamp((c[0][1] + c[1][0]) / den_clamped, 0.0, 1.0);

    // The virtual yields are linear in the observed cells; differentiate the
    // ratio through that map and propagate the multinomial covariance.
    std::vector<double> grad;
    std::vector<double> prob;
    for (const auto& src : sources.states()) {
        for (int s = 0; s < 2; ++s) {
            YieldTable unit(Basis::X);
            for (const auto& other : sources.states()) {
                unit.set_prior(other.label, table.prior(other.label));
                for (int r = 0; r < 2; ++r) unit.set_joint(other.label, r, 0.0);
            }
            unit.set_joint(src.label, s, 1.0);
            const auto dy = virtual_yields_unchecked(unit, sources, ens);
            const double dnum = dy[0][1] + dy[1][0];
            const double dden = dy[0][0] + dy[0][1] + dy[1][0] + dy[1][1];
            grad.push_back((dnum * den - dden * num) / (den * den));
            prob.push_back(table.joint(src.label, s));
        }
    }
    double mean = 0.0;
    double second = 0.0;
    for (std::size_t k = 0; k < grad.size(); ++k) {
        mean += grad[k] * prob[k];
        second += grad[k] * grad[k] * prob[k];
    }
    est.std_error = std::sqrt(std::max(0.0, second - mean * mean) / static_cast<double>(t.n_pulses));
    return est;
}

ModelSetup modulated_link_setup(const channel::ChannelParams& p) {
    p.validate();
    ModelSetup m;
    m.sources = SourceSet({{"0z", encode_single_photon(0.0, p.delta), 1.0 / 3.0},
                           {"1z", encode_single_photon(std::numbers::pi, p.delta), 1.0 / 3.0},
                           {"1x", encode_single_photon(0.5 * std::numbers::pi, p.delta), 1.0 / 3.0}});
    m.channel = KrausChannel::identity();
    for (Basis b : {Basis::X, Basis::Z}) {
        m.povm.elements[b] = {channel::detection_operator(p, b, 0), channel::detection_operator(p, b, 1)};
    }
    const auto& x = m.povm.elements[Basis::X];
    m.povm.inconclusive = Mat2::Identity() - x[0] - x[1];
    if (min_eigenvalue(m.povm.inconclusive) < -kCompletenessTol) {
        throw ValidationError("detection model exceeds unit probability (loss too small for the dark count rate)");
    }
    m.povm.validate();
    m.basis_probs = {{Basis::X, 0.5}, {Basis::Z, 0.5}};
    return m;
}

}  // namespace ltqkd::mc
