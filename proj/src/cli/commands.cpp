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

#include <CLI11.hpp>
#include <cmath>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include "ltqkd/cli.hpp"

namespace ltqkd::cli {

namespace {

// Bloch polar angle of the modulated signal for each key-basis and test label.
std::optional<double> encoding_angle(std::string_view label) {
    if (label == "0z") return 0.0;
    if (label == "1z") return std::numbers::pi;
    if (label == "1x") return 0.5 * std::numbers::pi;
    if (label == "0x") return 1.5 * std::numbers::pi;
    return std::nullopt;
}

QubitState source_state(const std::string& label, const RunConfig& config) {
    if (config.deltas_explicit) {
        if (auto theta = encoding_angle(label)) return encode_single_photon(*theta, config.deltas.front());
    }
    if (auto s = ideal_state(label)) return *s;
    throw ValidationError("unknown state label '" + label + "'");
}

SourceSet make_sources(const std::vector<std::string>& labels, const RunConfig& config) {
    std::vector<SourceState> states;
    for (const auto& l : labels) states.push_back({l, source_state(l, config), 1.0 / static_cast<double>(labels.size())});
    return SourceSet(std::move(states));
}

void require_single_delta(const RunConfig& config) {
    if (config.deltas_explicit && config.deltas.size() != 1) {
        throw ValidationError("delta: this command takes a single value");
    }
}

void require_key_states(const SourceSet& s) {
    if (!s.find("0z") || !s.find("1z")) throw ValidationError("sources must include 0z and 1z");
}

void emit(const RunConfig& config, const std::string& text, std::ostream& out) {
    if (config.out.empty()) {
        out << text;
    } else {
        write_file_atomic(config.out, text);
    }
}

template <typename F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const WellPosednessError& e) {
        err << "error: ill-posed: " << e.what() << '\n';
        return kIllPosed;
    } catch (const UndefinedRateError& e) {
        err << "error: undefined: " << e.what() << '\n';
        return kUndefinedRate;
    } catch (const InconsistentDataError& e) {
        err << "error: inconsistent data: " << e.what() << '\n';
        return kValidation;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const std::bad_alloc&) {
        throw;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    }
}

}  // namespace

std::string sweep_csv(const RunConfig& config) {
    config.validate();
    if (config.protocol == Protocol::Mdi) throw ValidationError("protocol: sweep models the prepare-and-measure link");
    const auto distances = distance_grid(config);
    if (distances.empty()) throw ValidationError("distance: empty range");

    keyrate::SweepOptions opts;
    opts.f_ec = config.f_ec;
    opts.search = config.search;
    opts.fixed_alpha = config.fixed_alpha;
    opts.threads = config.threads;

    std::ostringstream csv;
    csv << kSweepHeader << '\n';
    for (double delta : config.deltas) {
        channel::ChannelParams base = config.channel;
        base.delta = delta;
        for (const auto& r : keyrate::sweep(distances, base, opts)) {
            csv << format_double(delta) << ',' << format_double(r.distance_km) << ',' << format_double(r.alpha_opt)
                << ',' << format_double(r.q_z) << ',' << format_double(r.e_z) << ',' << format_double(r.q_z1) << ','
                << format_double(r.e_x1) << ',' << format_double(r.rate) << '\n';
        }
    }
    return csv.str();
}

int cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        emit(config, sweep_csv(config), out);
        return kOk;
    });
}

int cmd_estimate(const std::string& yield_path, const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        config.validate();
        require_single_delta(config);
        if (config.protocol == Protocol::Mdi) throw ValidationError("protocol: use mdi-estimate for mdi yields");
        const std::string text = read_file(yield_path);
        std::ostringstream rep;

        if (is_trial_csv(text)) {
            const mc::TrialRecord trial = parse_trial_csv(text);
            std::vector<std::string> labels;
            for (const auto& [l, p] : trial.priors) labels.push_back(l);
            const SourceSet sources = make_sources(labels, config);
            require_key_states(sources);
            const mc::TrialEstimate est = mc::estimate_from_trial(trial, sources);
            rep << "n_pulses = " << trial.n_pulses << '\n';
            rep << "e_x = " << format_double(est.e_x) << '\n';
            rep << "e_x_std_error = " << format_double(est.std_error) << '\n';
            emit(config, rep.str(), out);
            return kOk;
        }

        const auto tables = parse_yield_csv(text);
        const auto xt = tables.find(Basis::X);
        if (xt == tables.end()) throw ValidationError("no X-basis yields");
        const auto labels = xt->second.labels();
        const std::size_t want = config.protocol == Protocol::ThreeState ? 3 : 4;
        if (labels.size() != want) {
            throw WellPosednessError(std::string(protocol_name(config.protocol)) + " protocol needs " +
                                     std::to_string(want) + " states, got " + std::to_string(labels.size()));
        }
        const SourceSet sources = make_sources(labels, config);
        require_key_states(sources);

        std::vector<BlochVector> vecs;
        for (const auto& s : sources.states()) vecs.push_back(pauli_decompose(s.state));
        const ConditioningReport cond = check_well_posed(vecs);
        if (!cond.well_posed) throw WellPosednessError(std::string(describe(cond.code)));
        if (config.protocol == Protocol::ThreeState) {
            for (const auto& v : vecs) {
                if (!v.planar()) throw WellPosednessError("three-state protocol needs states in the x-z plane");
            }
        }

        const auto f0 = solve_functional(xt->second, sources, 0);
        const auto f1 = solve_functional(xt->second, sources, 1);
        const VirtualEnsemble ens = virtual_states_from_purification(sources.at("0z").state, sources.at("1z").state,
                                                                     false, Basis::X);
        const auto y = predict_virtual_yields(f0, f1, ens);

        rep << "protocol = " << protocol_name(config.protocol) << '\n';
        rep << "condition_number = " << format_double(cond.condition_number) << '\n';
        for (const auto* f : {&f0, &f1}) {
            const std::string s = std::to_string(f->outcome);
            rep << "q" << s << "_id = " << format_double(f->id) << '\n';
            rep << "q" << s << "_x = " << format_double(f->x) << '\n';
            if (!f->planar) rep << "q" << s << "_y = " << format_double(f->y) << '\n';
            rep << "q" << s << "_z = " << format_double(f->z) << '\n';
        }
        for (int s = 0; s < 2; ++s) {
            for (int j = 0; j < 2; ++j) rep << "Y" << s << "_v" << j << " = " << format_double(y[s][j]) << '\n';
        }
        rep << "e_x = " << format_double(phase_error_from_yields(y)) << '\n';

        const std::set<std::string> three{"0z", "1z", "0x"};
        if (!config.deltas_explicit && std::set<std::string>(labels.begin(), labels.end()) == three) {
            try {
                rep << "e_x_closed_form = " << format_double(phase_error_three_state(xt->second)) << '\n';
            } catch (const ValidationError&) {
                // Unequal priors: the closed form does not apply.
            }
        }

        const auto yt = tables.find(Basis::Y);
        if (config.protocol == Protocol::FourState && yt != tables.end()) {
            const auto g0 = solve_functional(yt->second, sources, 0);
            const auto g1 = solve_functional(yt->second, sources, 1);
            const VirtualEnsemble ens_y = virtual_states_from_purification(sources.at("0z").state,
                                                                           sources.at("1z").state, false, Basis::Y);
            rep << "e_y = " << format_double(phase_error_virtual(g0, g1, ens_y)) << '\n';
        }
        emit(config, rep.str(), out);
        return kOk;
    });
}

int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        config.validate();
        require_single_delta(config);
        if (config.protocol != Protocol::ThreeState) throw ValidationError("protocol: simulate runs the three-state protocol");
        if (config.pulses == 0) throw ValidationError("pulses: must be > 0");

        channel::ChannelParams p = config.channel;
        p.delta = config.deltas.front();
        p.distance_km = config.distance_start;
        const mc::ModelSetup setup = mc::modulated_link_setup(p);
        mc::RunOptions ro;
        ro.threads = config.threads;
        const mc::TrialRecord trial =
            mc::run_protocol(config.pulses, setup.sources, setup.channel, setup.povm, setup.basis_probs, config.seed, ro);

        const mc::TrialEstimate est = mc::estimate_from_trial(trial, setup.sources);
        const double analytic = channel::single_photon_stats(p).e_x1;
        std::ostringstream rep;
        rep << "seed = " << config.seed << '\n';
        rep << "n_pulses = " << trial.n_pulses << '\n';
        rep << "e_x = " << format_double(est.e_x) << '\n';
        rep << "e_x_std_error = " << format_double(est.std_error) << '\n';
        rep << "e_x_analytic = " << format_double(analytic) << '\n';
        if (est.std_error > 0.0) rep << "z_score = " << format_double((est.e_x - analytic) / est.std_error) << '\n';

        if (config.out.empty()) {
            out << trial_csv(trial);
            err << rep.str();
        } else {
            write_file_atomic(config.out, trial_csv(trial));
            out << rep.str();
        }
        return kOk;
    });
}

int cmd_mdi_estimate(const std::string& yield_path, const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        config.validate();
        require_single_delta(config);
        const MdiYieldTable table = parse_mdi_csv(read_file(yield_path), config.gamma);
        std::set<std::string> alice_labels, bob_labels;
        for (const auto& [key, v] : table.entries()) {
            alice_labels.insert(key.first);
            bob_labels.insert(key.second);
        }
        if (alice_labels.size() != 3 || bob_labels.size() != 3) {
            throw WellPosednessError("mdi needs exactly three states per side");
        }
        const SourceSet alice = make_sources({alice_labels.begin(), alice_labels.end()}, config);
        const SourceSet bob = make_sources({bob_labels.begin(), bob_labels.end()}, config);
        const TwoQubitFunctional f = mdi_solve(table, alice, bob);
        const VirtualEnsemble ea =
            virtual_states_from_purification(alice.at("0z").state, alice.at("1z").state, false, Basis::X);
        const VirtualEnsemble eb =
            virtual_states_from_purification(bob.at("0z").state, bob.at("1z").state, false, Basis::X);
        const auto y = mdi_virtual_yields(f, ea, eb);

        std::ostringstream rep;
        rep << "residual = " << format_double(f.residual) << '\n';
        for (int j = 0; j < 2; ++j) {
            for (int k = 0; k < 2; ++k) rep << "Y_v" << j << k << " = " << format_double(y[j][k]) << '\n';
        }
        rep << "e_x = " << format_double(phase_error_from_yields(y)) << '\n';
        emit(config, rep.str(), out);
        return kOk;
    });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Loss-tolerant phase-error estimation and key-rate tools"};
    app.require_subcommand(1);

    std::string config_path, out_path, distance, protocol;
    std::vector<std::string> deltas;
    std::optional<double> alpha, f_ec, gamma;
    std::optional<std::uint64_t> seed, pulses;
    std::optional<unsigned> threads;
    bool optimize = false;
    std::string yield_path;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "key = value configuration file");
        sub->add_option("--out", out_path, "output file (stdout when omitted)");
        sub->add_option("--delta", deltas, "phase modulation error; repeatable")->allow_extra_args(false);
        sub->add_option("--distance", distance, "START:STOP:STEP in km, or a single distance");
        auto* a = sub->add_option("--alpha", alpha, "fixed mean photon number");
        auto* o = sub->add_flag("--optimize", optimize, "optimise the mean photon number");
        a->excludes(o);
        sub->add_option("--seed", seed, "random seed");
        sub->add_option("--pulses", pulses, "number of simulated pulses");
        sub->add_option("--f-ec", f_ec, "error-correction efficiency");
        sub->add_option("--protocol", protocol, "three-state, four-state or mdi");
        sub->add_option("--gamma", gamma, "mdi test fraction");
        sub->add_option("--threads", threads, "worker threads (0 = all cores)");
    };
    auto* sweep = app.add_subcommand("sweep", "key rate against distance");
    auto* estimate = app.add_subcommand("estimate", "phase error from a yield or trial file");
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo run of the three-state protocol");
    auto* mdi = app.add_subcommand("mdi-estimate", "phase error from mdi yields");
    for (auto* sub : {sweep, estimate, simulate, mdi}) common(sub);
    estimate->add_option("yields", yield_path, "yield CSV")->required();
    mdi->add_option("yields", yield_path, "mdi yield CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    }

    RunConfig config;
    const int rc = guarded(err, [&] {
        if (!config_path.empty()) apply_config_file(config, config_path);
        if (!protocol.empty()) apply_setting(config, "protocol", protocol);
        if (!distance.empty()) parse_distance_range(config, distance);
        if (!deltas.empty()) {
            std::string joined;
            for (const auto& d : deltas) joined += (joined.empty() ? "" : ",") + d;
            apply_setting(config, "delta", joined);
        }
        if (alpha) {
            config.fixed_alpha = *alpha;
            config.channel.alpha = *alpha;
        }
        if (optimize) config.fixed_alpha.reset();
        if (seed) config.seed = *seed;
        if (pulses) config.pulses = *pulses;
        if (f_ec) config.f_ec = *f_ec;
        if (gamma) config.gamma = *gamma;
        if (threads) config.threads = *threads;
        if (!out_path.empty()) config.out = out_path;
        config.validate();
        return kOk;
    });
    if (rc != kOk) return rc;

    if (sweep->parsed()) return cmd_sweep(config, out, err);
    if (estimate->parsed()) return cmd_estimate(yield_path, config, out, err);
    if (simulate->parsed()) return cmd_simulate(config, out, err);
    return cmd_mdi_estimate(yield_path, config, out, err);
}

}  // namespace ltqkd::cli
