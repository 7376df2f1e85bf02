import csv
import io

import pytest

import oracles
from mell.oracle import (
    decompose_length,
    medium_open,
    medium_ring,
    predict,
    region_csv,
    region_table,
    render_diagram,
    short_chain_prediction,
    short_open,
    short_open_literal,
    short_ring_literal,
    witten_from_prediction,
)
from mell.state_space import ChainSpec


def all_specs(ell, n):
    yield ChainSpec.periodic(n, ell)
    for c1 in range(ell + 1):
        for cN in range(ell + 1):
            yield ChainSpec.special(n, ell, c1, cN)


def brute_nonzero(spec):
    if spec.is_periodic:
        b = oracles.betti_brute(spec.n_sites, spec.max_cluster, True)
    else:
        b = oracles.betti_brute(spec.n_sites, spec.max_cluster, False, None, spec.boundary.c1, spec.boundary.cN)
    return [(f, d) for f, d in enumerate(b) if d]


def test_decompose_examples():
    assert decompose_length(3, 1) == (0, 2)
    assert decompose_length(8, 2) == (1, 3)
    assert decompose_length(12, 3) == (2, 1)
    with pytest.raises(ValueError):
        decompose_length(0, 1)


def test_predict_examples():
    assert predict(ChainSpec.periodic(3, 1)) == [(1, 2)]
    assert predict(ChainSpec.free(9, 2)) == []
    assert predict(ChainSpec.special(7, 2, 1, 1)) == [(3, 1)]


@pytest.mark.parametrize("ell", [1, 2, 3])
def test_predictions_match_brute_force(ell):
    for n in range(1, 9):
        for spec in all_specs(ell, n):
            expected = brute_nonzero(spec)
            assert predict(spec) == expected, spec
            short = short_chain_prediction(spec)
            if n <= 2 * ell + 2:
                assert short == expected, spec
            else:
                assert short is None


class TestShortChainReadings:
    def test_literal_and_clamped_open_readings_agree(self):
        for ell in (1, 2, 3, 4):
            for n in range(1, ell + 3):
                for c1 in range(ell + 1):
                    for cN in range(ell + 1):
                        assert short_open(n, c1, cN) == short_open_literal(n, ell, c1, cN)

    def test_unconstrained_short_chain_is_trivial(self):
        assert short_open(2, 2, 3) == []
        assert oracles.betti_brute(2, 2, False, None, 2, 2) == [0, 0, 0]

    def test_literal_ring_count_fails_only_at_ell_plus_two(self):
        for ell in (1, 2, 3):
            for n in range(1, ell + 3):
                computed = brute_nonzero(ChainSpec.periodic(n, ell))
                if n < ell + 2:
                    assert short_ring_literal(n, ell) == computed
                else:
                    assert short_ring_literal(n, ell) == [(n - 1, ell + 1)]
                    assert computed == [(ell, ell + 1)] == [(n - 2, ell + 1)]

    def test_medium_rules(self):
        for ell in (1, 2, 3):
            for n in range(ell + 3, 2 * ell + 3):
                assert brute_nonzero(ChainSpec.periodic(n, ell)) == medium_ring(n)
                for c1 in range(ell + 1):
                    for cN in range(ell + 1):
                        assert medium_open(n, ell, c1, cN) == brute_nonzero(ChainSpec.special(n, ell, c1, cN))


class TestInvariants:
    @pytest.mark.parametrize("ell", [1, 2, 3, 4])
    def test_free_chain_nonempty_only_for_top_remainders(self, ell):
        for n_sites in range(ell + 3, 40):
            _, p = decompose_length(n_sites, ell)
            assert bool(predict(ChainSpec.free(n_sites, ell))) == (p in (ell, ell + 1))

    @pytest.mark.parametrize("ell", [1, 2, 3, 4])
    def test_periodic_witten_magnitude(self, ell):
        for n_sites in range(1, 40):
            _, p = decompose_length(n_sites, ell)
            w = witten_from_prediction(predict(ChainSpec.periodic(n_sites, ell)))
            assert abs(w) == (ell + 1 if p == ell + 1 else 1)

    @pytest.mark.parametrize("ell", [1, 2, 3, 4])
    def test_ladder_at_prediction_level(self, ell):
        for n_sites in range(2 * ell + 3, 40):
            for spec in all_specs(ell, n_sites):
                small = spec.with_sites(n_sites - ell - 2)
                assert predict(spec) == [(f + ell, m) for f, m in predict(small)]


class TestRegions:
    def test_p_zero_is_a_triangle(self):
        for ell, n_sites in ((1, 4), (2, 5), (3, 6), (3, 11)):
            assert decompose_length(n_sites, ell)[1] == 0
            grid = region_table(ell, n_sites)
            for row in grid:
                for cell in row:
                    assert cell.region == (1 if cell.c1 + cell.cN <= ell else 0)

    def test_short_chain_white_cells(self):
        grid = region_table(2, 4)
        for row in grid:
            for cell in row:
                assert (cell.multiplicity == 1) == (cell.c1 + cell.cN >= 2)

    def test_gray_cells(self):
        grid = region_table(1, 4)
        assert grid[1][1].label == "." and grid[1][1].prediction == ()

    def test_render_and_csv(self):
        grid = region_table(2, 7)
        text = render_diagram(grid)
        assert text.splitlines()[0].startswith("cN=2")
        assert "ii" in text
        rows = list(csv.DictReader(io.StringIO(region_csv(grid))))
        assert len(rows) == 9
        cell = next(r for r in rows if r["c1"] == "1" and r["cN"] == "1")
        assert cell["region"] == "ii" and cell["grade"] == "3"
