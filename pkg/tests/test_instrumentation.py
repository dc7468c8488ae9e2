import numpy as np
import pytest

from polar_rcsc.code import PolarCode, construct_frozen_set
from polar_rcsc.decoders import Decoder, DecoderConfig
from polar_rcsc.instrumentation import (
    EnergyModel,
    OpCounters,
    count_full_iteration,
    energy_ratio,
    formula_counts,
)


@pytest.mark.parametrize("n", [1, 2, 3, 6, 10])
@pytest.mark.parametrize("alg", ["BP", "SCAN", "RCSC"])
def test_measured_equals_closed_form(n, alg):
    code = construct_frozen_set(n, (1 << n) // 2)
    assert count_full_iteration(alg, code) == formula_counts(alg, n)


def test_closed_form_values():
    assert formula_counts("RCSC", 10) == (15872, 20480)
    assert formula_counts("RCSC", 3) == (40, 48)
    assert formula_counts("BP", 10) == formula_counts("SCAN", 10) == (20480, 20480)
    with pytest.raises(ValueError):
        formula_counts("SRCSC", 3)


def test_counts_do_not_depend_on_data_or_frozen_set():
    rng = np.random.default_rng(3)
    for alg in ("BP", "SCAN", "RCSC"):
        for K in (0, 5, 16):
            code = construct_frozen_set(4, K)
            dec = Decoder(code, DecoderConfig(algorithm=alg, i_max=2, early_stop=False))
            res = dec.decode_batch(rng.normal(0, 3, (4, 16)))
            per_frame = res.counts.sum(axis=0) / 4
            assert tuple(per_frame) == tuple(2 * x for x in formula_counts(alg, 4))


def test_srcsc_8_3_visits_and_counts():
    code = PolarCode.from_frozen_indices(3, [0, 1, 2, 3, 4])
    dec = Decoder(code, DecoderConfig(algorithm="SRCSC", i_max=1, early_stop=False))
    assert dec.visits_per_iteration == 7
    r = dec.decode(np.linspace(-1, 1, 8))
    assert r.counters.node_visits == 7
    a, c = r.counters.per_iteration[0]
    assert a < 40 and c < 48


@pytest.mark.parametrize("n", [3, 6, 10])
def test_srcsc_never_costs_more_than_rcsc(n):
    for K in (0, 1, (1 << n) // 3, (1 << n) // 2, (1 << n) - 1, 1 << n):
        code = construct_frozen_set(n, K)
        a, c = count_full_iteration("SRCSC", code)
        ra, rc = formula_counts("RCSC", n)
        assert a <= ra and c <= rc


def test_counters_accumulate():
    c = OpCounters.from_array(np.array([[3, 4], [5, 6]]), visits_per_iteration=7)
    assert (c.additions, c.comparisons, c.node_visits) == (8, 10, 14)
    c += OpCounters.from_array(np.array([[1, 1]]), 7)
    assert (c.additions, c.comparisons, c.node_visits) == (9, 11, 21)
    assert c.per_iteration == [(3, 4), (5, 6), (1, 1)]


def test_energy_ratio_examples():
    code = construct_frozen_set(10, 512)
    bp = 2 * code.N * code.n
    assert energy_ratio(EnergyModel(1.0, 1.0), bp, bp, code) == pytest.approx(1.0)
    assert energy_ratio(EnergyModel(1.0, 2.0), bp, bp, code) == pytest.approx(2.0)
    assert energy_ratio(EnergyModel(2.0, 1.0), bp, bp, code) == pytest.approx(0.5)
    # weighting only matters when the decoder mix differs from BP's
    assert energy_ratio(EnergyModel(1.0, 1.0, e_add=1, e_cmp=3), bp, bp, code) == pytest.approx(1.0)
    r1 = energy_ratio(EnergyModel(1.0, 1.0, 1, 1), 10000, 14000, code)
    r2 = energy_ratio(EnergyModel(1.0, 1.0, 1, 2), 10000, 14000, code)
    assert r1 == pytest.approx(40960 / 24000)
    assert r2 == pytest.approx(3 * 20480 / 38000)


def test_energy_model_validation():
    with pytest.raises(ValueError):
        EnergyModel(1.0, 1.0, e_add=0)
