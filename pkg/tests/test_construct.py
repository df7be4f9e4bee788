import random

import pytest

from dcellham.construct import (
    counted_dcell_hp, dcell_hp, hp_seq, make_sigma, verify_path,
)
from dcellham.errors import ParameterError, UnsupportedParametersError
from dcellham.topology import Params, label_from_uid, t


def labels(n, k):
    return [label_from_uid((), u, k, n) for u in range(t(n, k))]


def all_pairs_check(n, k):
    params = Params(n=n, k=k)
    vs = labels(n, k)
    for i, u in enumerate(vs):
        for v in vs[i + 1:]:
            diag = []
            p = dcell_hp(u, v, k, n)
            assert verify_path(params, p, u, v, diagnostics=diag), (u, v, diag)


def test_make_sigma_respects_constraints():
    seq = make_sigma(range(6), {2, 4}, first_forbidden=0, last_forbidden=5)
    assert sorted(seq) == [0, 1, 3, 5]
    assert seq[0] != 0 and seq[-1] != 5
    assert make_sigma(range(3), {0, 1, 2}) == []


def test_complete_graph_base_case():
    p = dcell_hp((2,), (0,), 0, 4)
    assert verify_path(Params(4, 0), p, (2,), (0,))


def test_refusals():
    with pytest.raises(UnsupportedParametersError):
        dcell_hp((0, 0), (1, 1), 1, 2)
    with pytest.raises(ParameterError):
        dcell_hp((0, 0), (0, 0), 1, 3)


@pytest.mark.parametrize("n,k", [(3, 1), (4, 1), (2, 2)])
def test_all_pairs_small(n, k):
    all_pairs_check(n, k)


@pytest.mark.parametrize("n,k,samples", [(3, 2, 120), (2, 3, 120), (4, 2, 60)])
def test_random_pairs_larger(n, k, samples):
    params = Params(n=n, k=k)
    rng = random.Random(20260824)
    vs = labels(n, k)
    for _ in range(samples):
        u, v = rng.sample(vs, 2)
        p = dcell_hp(u, v, k, n)
        diag = []
        assert verify_path(params, p, u, v, diagnostics=diag), (u, v, diag)


def test_prefix_digits_are_preserved():
    # operating inside copy (7, 2, *) of a deeper structure
    u = (7, 2, 0, 0)
    v = (7, 2, 3, 1)
    p = dcell_hp(u, v, 1, 3)
    assert all(x[:2] == (7, 2) for x in p)
    assert len(p) == t(3, 1)


def test_counted_calls_are_linear():
    _, counter = counted_dcell_hp((0, 0, 0), (12, 3, 2), 2, 3)
    assert counter.total <= t(3, 2)
    assert sum(counter.per_level.values()) == counter.total


def test_hp_seq_validates_sequence():
    with pytest.raises(ParameterError):
        hp_seq([0, 0], 1, 3, (0, 0), (0, 1))
    with pytest.raises(ParameterError):
        hp_seq([1, 2], 1, 3, (0, 0), (2, 1))


def test_verify_path_diagnostics():
    params = Params(3, 0)
    diag = []
    assert not verify_path(params, [(0,), (2,)], (0,), (2,), diagnostics=diag)
    assert diag and "covers" in diag[0]
    assert not verify_path(params, [], (0,), (2,))
    assert not verify_path(params, [(0,), (0,), (1,)], (0,), (1,))
