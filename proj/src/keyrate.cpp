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

#include "ltqkd/keyrate.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "ltqkd/error.hpp"

namespace ltqkd::keyrate {

using channel::ChannelParams;
using channel::ZStats;

double binary_entropy(double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw ValidationError("binary entropy argument must be in [0, 1]");
    if (x == 0.0 || x == 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double raw_key_rate(const ZStats& z, double f_ec) {
    if (!(f_ec >= 1.0) || !std::isfinite(f_ec)) throw ValidationError("f_ec must be >= 1");
    for (double v : {z.q_z, z.e_z, z.q_z1, z.e_x1}) {
        if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("Z statistics must be probabilities");
    }
    return 0.5 * (z.q_z1 * (1.0 - binary_entropy(z.e_x1)) - f_ec * z.q_z * binary_entropy(z.e_z));
}

double secret_key_rate(const ZStats& z, double f_ec) { return std::max(0.0, raw_key_rate(z, f_ec)); }

void AlphaSearch::validate() const {
    if (!(lower > 0.0 && upper > lower)) throw ValidationError("alpha bounds must satisfy 0 < lower < upper");
    if (!(rel_tol > 0.0)) throw ValidationError("alpha tolerance must be > 0");
    if (grid_points < 3) throw ValidationError("alpha grid needs at least 3 points");
}

namespace {

double rate_at(ChannelParams p, double alpha, double f_ec) {
    p.alpha = alpha;
    return raw_key_rate(channel::evaluate(p), f_ec);
}

}  // namespace

AlphaOptimum optimize_alpha(const ChannelParams& p, double f_ec, const AlphaSearch& search) {
    search.validate();
    const int n = search.grid_points;
    const double log_lo = std::log(search.lower);
    const double step = (std::log(search.upper) - log_lo) / (n - 1);
    std::vector<double> grid(static_cast<std::size_t>(n));
    std::vector<double> rates(grid.size());
    for (int i = 0; i < n; ++i) {
        grid[static_cast<std::size_t>(i)] = i == n - 1 ? search.upper : std::exp(log_lo + step * i);
        rates[static_cast<std::size_t>(i)] = rate_at(p, grid[static_cast<std::size_t>(i)], f_ec);
    }
    const auto best = static_cast<std::size_t>(std::max_element(rates.begin(), rates.end()) - rates.begin());

    AlphaOptimum out;
    if (!(rates[best] > 0.0)) {
        out.alpha = grid[best];
        out.rate = 0.0;
        out.zero_rate = true;
        ChannelParams q = p;
        q.alpha = out.alpha;
        out.stats = channel::evaluate(q);
        return out;
    }

    // Golden-section maximisation on [grid[best-1], grid[best+1]].
    double a = grid[best == 0 ? 0 : best - 1];
    double b = grid[std::min(best + 1, grid.size() - 1)];
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = rate_at(p, c, f_ec);
    double fd = rate_at(p, d, f_ec);
    while (b - a > search.rel_tol * 0.5 * (a + b)) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = rate_at(p, c, f_ec);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = rate_at(p, d, f_ec);
        }
    }
    double alpha = fc >= fd ? c : d;
    double rate = std::max(fc, fd);
    if (rates[best] > rate) {
        alpha = grid[best];
        rate = rates[best];
    }
    out.alpha = alpha;
    out.rate = rate;
    ChannelParams q = p;
    q.alpha = alpha;
    out.stats = channel::evaluate(q);
    return out;
}

namespace {

RatePoint evaluate_point(double distance, const ChannelParams& base, const SweepOptions& options) {
    ChannelParams p = base;
    p.distance_km = distance;
    RatePoint pt;
    pt.distance_km = distance;
    if (options.fixed_alpha) {
        p.alpha = *options.fixed_alpha;
        const ZStats z = channel::evaluate(p);
        pt.alpha_opt = p.alpha;
        pt.q_z = z.q_z;
        pt.e_z = z.e_z;
        pt.q_z1 = z.q_z1;
        pt.e_x1 = z.e_x1;
        pt.rate = secret_key_rate(z, options.f_ec);
        return pt;
    }
    const AlphaOptimum opt = optimize_alpha(p, options.f_ec, options.search);
    pt.alpha_opt = opt.alpha;
    pt.q_z = opt.stats.q_z;
    pt.e_z = opt.stats.e_z;
    pt.q_z1 = opt.stats.q_z1;
    pt.e_x1 = opt.stats.e_x1;
    pt.rate = opt.rate;
    return pt;
}

}  // namespace

std::vector<RatePoint> sweep(std::span<const double> distances, const ChannelParams& base,
                             const SweepOptions& options) {
    for (double d : distances) {
        if (!(d >= 0.0) || !std::isfinite(d)) throw ValidationError("distances must be >= 0");
    }
    ChannelParams check = base;
    check.validate();
    if (options.fixed_alpha && !(*options.fixed_alpha > 0.0)) throw ValidationError("alpha must be > 0");

    std::vector<RatePoint> out(distances.size());
    unsigned threads = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.threads;
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, distances.size())));
    if (threads <= 1) {
        for (std::size_t i = 0; i < distances.size(); ++i) out[i] = evaluate_point(distances[i], base, options);
        return out;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < distances.size(); i += threads) {
                    out[i] = evaluate_point(distances[i], base, options);
                }
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

}  // namespace ltqkd::keyrate
