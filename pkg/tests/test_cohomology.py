import csv
import io
import json
import random

import pytest

import oracles
from mell.cohomology import (
    betti,
    betti_from_kernel_image,
    betti_numbers,
    full_report,
    ground_states,
    parameter_independence_check,
    reports_to_csv,
    witten_index,
)
from mell.couplings import all_ones, random_scheme
from mell.hamiltonian import build_h
from mell.state_space import ChainSpec, enumerate_basis


def brute(spec, primitive=None):
    if spec.is_periodic:
        return oracles.betti_brute(spec.n_sites, spec.max_cluster, True, primitive)
    b = spec.boundary
    return oracles.betti_brute(spec.n_sites, spec.max_cluster, False, primitive, b.c1, b.cN)


class TestExamples:
    def test_three_site_ring(self):
        assert betti(ChainSpec.periodic(3, 1), None, 1) == 2

    def test_short_special_chain(self):
        spec = ChainSpec.special(4, 2, 1, 1)
        assert betti(spec, None, 2) == 1
        assert [betti(spec, None, f) for f in (0, 1, 3, 4)] == [0, 0, 0, 0]

    def test_five_site_ring_report(self):
        rep = full_report(ChainSpec.periodic(5, 1))
        assert rep.nonzero == {2: 1}
        assert rep.witten_index == 1
        assert rep.oracle_ok

    def test_three_site_free_chain_matches_oracle(self):
        rep = full_report(ChainSpec.free(3, 2))
        assert rep.betti == brute(ChainSpec.free(3, 2))
        assert rep.oracle_ok

    def test_out_of_range_grade_is_zero(self):
        assert betti(ChainSpec.periodic(4, 1), None, 7) == 0
        assert betti(ChainSpec.periodic(4, 1), None, -1) == 0

    def test_empty_state_not_closed(self):
        for spec in (ChainSpec.periodic(2, 1), ChainSpec.free(5, 2), ChainSpec.special(3, 3, 0, 0)):
            assert enumerate_basis(spec).dim(1) > 0
            assert betti(spec, None, 0) == 0
        # both sites of special(0,0) on two sites are forced empty, so the vacuum survives
        assert betti_numbers(ChainSpec.special(2, 2, 0, 0)) == [1]


@pytest.mark.parametrize("ell", [1, 2, 3])
def test_betti_matches_brute_force(ell):
    for n in range(1, 9):
        specs = [ChainSpec.periodic(n, ell)] + [
            ChainSpec.special(n, ell, c1, cN) for c1 in range(ell + 1) for cN in range(ell + 1)
        ]
        for spec in specs:
            assert betti_numbers(spec) == brute(spec), spec


def test_betti_matches_brute_force_random_couplings():
    rng = random.Random(4)
    for spec in (ChainSpec.periodic(7, 2), ChainSpec.free(7, 3), ChainSpec.special(8, 2, 0, 1)):
        scheme = random_scheme(spec.max_cluster, rng)
        assert betti_numbers(spec, scheme) == brute(spec, list(scheme.primitive))


def test_euler_equals_witten():
    for ell in (1, 2, 3):
        for n in range(1, 12):
            for spec in (ChainSpec.periodic(n, ell), ChainSpec.free(n, ell), ChainSpec.special(n, ell, 1, 0)):
                rep = full_report(spec, with_oracle=False)
                assert rep.witten_index == rep.euler_characteristic == witten_index(enumerate_basis(spec).dims())


@pytest.mark.parametrize("ell", [1, 2, 3])
def test_special_zero_zero_is_free_on_fewer_sites(ell):
    for n in range(3, 12):
        assert betti_numbers(ChainSpec.special(n, ell, 0, 0)) == betti_numbers(ChainSpec.free(n - 2, ell))


def test_kernel_image_route_agrees():
    rng = random.Random(2)
    for spec in (ChainSpec.periodic(8, 2), ChainSpec.free(9, 1), ChainSpec.special(7, 3, 2, 1)):
        scheme = random_scheme(spec.max_cluster, rng)
        b = betti_numbers(spec, scheme)
        assert [betti_from_kernel_image(spec, scheme, f) for f in range(len(b))] == b


class TestParameterIndependence:
    def test_examples(self):
        assert parameter_independence_check(ChainSpec.periodic(6, 2), 10, seed=1)
        assert parameter_independence_check(ChainSpec.free(4, 1), 10, seed=1)

    def test_self_comparison(self):
        assert parameter_independence_check(ChainSpec.periodic(7, 3), 1, seed=0, schemes=[all_ones(3)])

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            parameter_independence_check(ChainSpec.periodic(5, 1), 0, seed=0)
        with pytest.raises(ValueError):
            parameter_independence_check(ChainSpec.periodic(5, 1), 2, seed=0, schemes=[all_ones(1)])


def test_ground_states_are_zero_modes():
    spec, s = ChainSpec.periodic(6, 2), all_ones(2)
    b = betti_numbers(spec, s)
    for f in range(len(b)):
        states = ground_states(spec, s, f)
        assert len(states) == b[f]
        h = build_h(spec, s, f)
        assert all(not any(h @ v) for v in states)


def test_report_exports():
    reps = [full_report(ChainSpec.periodic(5, 1), check_hamiltonian=True), full_report(ChainSpec.special(7, 2, 1, 1))]
    data = json.loads(reps[0].to_json())
    assert data["schema_version"] == 1
    assert data["witten"] == data["euler"] == 1
    assert [g["kernel_h"] for g in data["grades"]] == reps[0].betti
    assert reps[0].hamiltonian_ok is True and reps[1].hamiltonian_ok is None
    rows = list(csv.DictReader(io.StringIO(reports_to_csv(reps))))
    assert len(rows) == len(reps[0].per_grade) + len(reps[1].per_grade)
    assert {r["predicted"] for r in rows if r["betti"] == "1"} == {"1"}
    assert reps[1].nonzero == {3: 1}
