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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <tuple>

#include "ltqkd/channel.hpp"
#include "ltqkd/error.hpp"
#include "ltqkd/estimator.hpp"
#include "ltqkd/keyrate.hpp"
#include "ltqkd/montecarlo.hpp"

namespace py = pybind11;
using namespace ltqkd;

namespace {

// {(label, outcome): conditional probability} for Bob's X basis.
using CellMap = std::map<std::pair<std::string, int>, double>;

YieldTable table_from(const CellMap& cells) {
    YieldTable t(Basis::X);
    for (const auto& [key, v] : cells) t.set_prior(key.first, 1.0);
    for (const auto& [key, v] : cells) t.set_joint(key.first, key.second, v);
    return t;
}

SourceSet sources_from(const std::vector<std::string>& labels, double delta) {
    std::vector<SourceState> states;
    for (const auto& l : labels) {
        double theta = 0.0;
        if (l == "0z") {
            theta = 0.0;
        } else if (l == "1z") {
            theta = std::numbers::pi;
        } else if (l == "1x") {
            theta = 0.5 * std::numbers::pi;
        } else if (l == "0x") {
            theta = 1.5 * std::numbers::pi;
        } else if (auto s = ideal_state(l)) {
            states.push_back({l, *s, 1.0 / static_cast<double>(labels.size())});
            continue;
        } else {
            throw ValidationError("unknown state label '" + l + "'");
        }
        states.push_back({l, encode_single_photon(theta, delta), 1.0 / static_cast<double>(labels.size())});
    }
    return SourceSet(std::move(states));
}

double estimate_phase_error(const CellMap& cells, double delta) {
    const YieldTable t = table_from(cells);
    const SourceSet sources = sources_from(t.labels(), delta);
    const auto f0 = solve_functional(t, sources, 0);
    const auto f1 = solve_functional(t, sources, 1);
    const auto ens =
        virtual_states_from_purification(sources.at("0z").state, sources.at("1z").state, false, Basis::X);
    return phase_error_virtual(f0, f1, ens);
}

}  // namespace

PYBIND11_MODULE(_ltqkd, m) {
    m.doc() = "Loss-tolerant phase-error estimation and key-rate tools";
    m.attr("__version__") = "0.1.0";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<WellPosednessError>(m, "WellPosednessError", base.ptr());
    py::register_exception<InconsistentDataError>(m, "InconsistentDataError", base.ptr());
    py::register_exception<UndefinedRateError>(m, "UndefinedRateError", base.ptr());
    py::register_exception<DimensionError>(m, "DimensionError", base.ptr());

    py::class_<channel::ChannelParams>(m, "ChannelParams")
        .def(py::init<>())
        .def(py::init([](double dark_count, double det_eff, double atten, double distance, double delta, double alpha) {
                 channel::ChannelParams p;
                 p.dark_count = dark_count;
                 p.det_eff = det_eff;
                 p.atten_db_per_km = atten;
                 p.distance_km = distance;
                 p.delta = delta;
                 p.alpha = alpha;
                 return p;
             }),
             py::arg("dark_count") = 0.5e-7, py::arg("det_eff") = 0.15,
             py::arg("atten_db_per_km") = 0.21, py::arg("distance_km") = 0.0, py::arg("delta") = 0.0,
             py::arg("alpha") = 0.5)
        .def_readwrite("dark_count", &channel::ChannelParams::dark_count)
        .def_readwrite("det_eff", &channel::ChannelParams::det_eff)
        .def_readwrite("atten_db_per_km", &channel::ChannelParams::atten_db_per_km)
        .def_readwrite("distance_km", &channel::ChannelParams::distance_km)
        .def_readwrite("delta", &channel::ChannelParams::delta)
        .def_readwrite("alpha", &channel::ChannelParams::alpha);

    py::class_<channel::ZStats>(m, "ZStats")
        .def_readonly("q_z", &channel::ZStats::q_z)
        .def_readonly("e_z", &channel::ZStats::e_z)
        .def_readonly("q_z1", &channel::ZStats::q_z1)
        .def_readonly("e_x1", &channel::ZStats::e_x1);

    py::class_<keyrate::AlphaOptimum>(m, "AlphaOptimum")
        .def_readonly("alpha", &keyrate::AlphaOptimum::alpha)
        .def_readonly("rate", &keyrate::AlphaOptimum::rate)
        .def_readonly("zero_rate", &keyrate::AlphaOptimum::zero_rate)
        .def_readonly("stats", &keyrate::AlphaOptimum::stats);

    py::class_<keyrate::RatePoint>(m, "RatePoint")
        .def_readonly("distance_km", &keyrate::RatePoint::distance_km)
        .def_readonly("alpha_opt", &keyrate::RatePoint::alpha_opt)
        .def_readonly("q_z", &keyrate::RatePoint::q_z)
        .def_readonly("e_z", &keyrate::RatePoint::e_z)
        .def_readonly("q_z1", &keyrate::RatePoint::q_z1)
        .def_readonly("e_x1", &keyrate::RatePoint::e_x1)
        .def_readonly("rate", &keyrate::RatePoint::rate);

    m.def("evaluate", &channel::evaluate, py::arg("params"), "Gains and error rates of the channel model.");
    m.def("binary_entropy", &keyrate::binary_entropy, py::arg("x"));
    m.def("secret_key_rate", &keyrate::secret_key_rate, py::arg("stats"),
          py::arg("f_ec") = keyrate::kDefaultErrorCorrectionEfficiency);
    m.def(
        "optimize_alpha",
        [](const channel::ChannelParams& p, double f_ec) { return keyrate::optimize_alpha(p, f_ec); },
        py::arg("params"), py::arg("f_ec") = keyrate::kDefaultErrorCorrectionEfficiency);
    m.def(
        "sweep",
        [](const std::vector<double>& distances, const channel::ChannelParams& base, double f_ec,
           std::optional<double> alpha, unsigned threads) {
            keyrate::SweepOptions o;
            o.f_ec = f_ec;
            o.fixed_alpha = alpha;
            o.threads = threads;
            return keyrate::sweep(distances, base, o);
        },
        py::arg("distances"), py::arg("params"), py::arg("f_ec") = keyrate::kDefaultErrorCorrectionEfficiency,
        py::arg("alpha") = py::none(), py::arg("threads") = 1);
    m.def("virtual_coefficient", &virtual_coefficient, py::arg("i"), py::arg("j"), py::arg("delta"));
    m.def("phase_error_three_state", [](const CellMap& cells) { return phase_error_three_state(table_from(cells)); },
          py::arg("yields"), "Closed-form phase error from {(label, outcome): yield} for 0z, 1z, 0x.");
    m.def("estimate_phase_error", &estimate_phase_error, py::arg("yields"), py::arg("delta") = 0.0,
          "Phase error from conditional X-basis yields {(label, outcome): yield}.");
    m.def(
        "simulate",
        [](const channel::ChannelParams& p, std::uint64_t pulses, std::uint64_t seed, unsigned threads) {
            const auto setup = mc::modulated_link_setup(p);
            mc::RunOptions ro;
            ro.threads = threads;
            const auto trial =
                mc::run_protocol(pulses, setup.sources, setup.channel, setup.povm, setup.basis_probs, seed, ro);
            const auto est = mc::estimate_from_trial(trial, setup.sources);
            return std::make_tuple(est.e_x, est.std_error);
        },
        py::arg("params"), py::arg("pulses"), py::arg("seed") = 42, py::arg("threads") = 1,
        "Monte Carlo run of the three-state protocol; returns (e_x, std_error).");
}
