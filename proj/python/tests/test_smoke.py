# Copyright 2026 The ltqkd Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
import math

import pytest

import ltqkd


def formula_stats(alpha, d, delta, ed=0.5e-7, eta=0.15, att=0.21):
    loss = 1 - eta * 10 ** (-att * d / 10)
    a = 1.5 * delta
    s, c = math.sin(a / 2), math.cos(a / 2)
    coef = {
        (0, 0): (1 + s + c) / (2 * math.sqrt(1 + s)),
        (1, 0): (1 + s - c) / (2 * math.sqrt(1 + s)),
        (0, 1): (1 - s - c) / (2 * math.sqrt(1 - s)),
        (1, 1): (1 - s + c) / (2 * math.sqrt(1 - s)),
    }
    y = {
        (k, j): (1 - loss) * coef[k, j] ** 2 * (1 - ed / 2)
        + ed * (1 - ed / 2)
        + (1 - loss) * coef[1 - k, j] ** 2 * ed
        for k in (0, 1)
        for j in (0, 1)
    }
    ex = (y[1, 0] + y[0, 1]) / sum(y.values())
    pj = [(1 + math.sin(delta / 2)) / 2, (1 - math.sin(delta / 2)) / 2]
    q1 = 0.5 * math.exp(-2 * alpha) * alpha * sum(y[k, j] * pj[j] for k in (0, 1) for j in (0, 1))
    return q1, ex


def test_version():
    assert ltqkd.__version__


def test_entropy():
    assert ltqkd.binary_entropy(0.5) == 1.0
    assert ltqkd.binary_entropy(0.0) == 0.0
    with pytest.raises(ltqkd.ValidationError):
        ltqkd.binary_entropy(2.0)


@pytest.mark.parametrize("distance", [0.0, 50.0, 120.0])
@pytest.mark.parametrize("delta", [0.0, 0.063, 0.126])
def test_single_photon_terms_match_formulas(distance, delta):
    st = ltqkd.evaluate(ltqkd.ChannelParams(distance_km=distance, delta=delta, alpha=0.4))
    q1, ex = formula_stats(0.4, distance, delta)
    assert st.q_z1 == pytest.approx(q1, rel=1e-12)
    assert st.e_x1 == pytest.approx(ex, rel=1e-12)


def test_optimizer_and_sweep():
    opt = ltqkd.optimize_alpha(ltqkd.ChannelParams(distance_km=50.0))
    assert opt.rate == pytest.approx(6.141594789681027e-4, rel=1e-9)
    pts = ltqkd.sweep([0.0, 50.0, 100.0], ltqkd.ChannelParams(delta=0.126))
    assert [p.distance_km for p in pts] == [0.0, 50.0, 100.0]
    assert all(p.rate > 0 for p in pts)


def test_closed_form_matches_general_estimate():
    # Bob's X measurement is ideal with 30 % efficiency and a small flip.
    eff, flip = 0.3, 0.02
    cells = {}
    for label, p0 in (("0z", 0.5), ("1z", 0.5), ("0x", 1.0)):
        cells[(label, 0)] = eff * (p0 * (1 - flip) + (1 - p0) * flip)
        cells[(label, 1)] = eff * ((1 - p0) * (1 - flip) + p0 * flip)
    closed = ltqkd.phase_error_three_state(cells)
    assert closed == pytest.approx(flip, abs=1e-12)
    assert ltqkd.estimate_phase_error(cells) == pytest.approx(closed, abs=1e-12)


def test_ill_posed_sources():
    cells = {(lab, s): 0.1 for lab in ("0z", "1z") for s in (0, 1)}
    with pytest.raises(ltqkd.WellPosednessError):
        ltqkd.estimate_phase_error(cells)


def test_simulation_is_reproducible():
    p = ltqkd.ChannelParams(distance_km=10.0, delta=0.126)
    a = ltqkd.simulate(p, 200000, seed=3)
    b = ltqkd.simulate(p, 200000, seed=3, threads=2)
    assert a == b
    ex, se = a
    assert abs(ex - ltqkd.evaluate(p).e_x1) < 5 * se


def test_params_accept_integers():
    p = ltqkd.ChannelParams(distance_km=50, alpha=1)
    assert p.distance_km == 50.0
    assert p.alpha == 1.0
