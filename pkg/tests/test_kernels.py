import numpy as np
import pytest

from dessins import kernels
from dessins.autgroup import automorphism_arrays
from dessins.group_core import Family, GroupSpec, enumerate_specs

NB = kernels.get_backend("numba")
NP = kernels.get_backend("numpy")

SPECS = (enumerate_specs(3, 1, 1) + enumerate_specs(3, 1, 2) + enumerate_specs(3, 2, 3)
         + enumerate_specs(3, 0, 3) + [GroupSpec(Family.M3, 3, 2, 4, 1, 3)])


@pytest.fixture(params=SPECS, ids=lambda s: s.label)
def spec(request):
    return request.param


def test_backend_selection(monkeypatch):
    assert NB.backend == "numba" and NP.backend == "numpy"
    assert set(kernels.KERNEL_NAMES) <= set(vars(NB)) & set(vars(NP))
    monkeypatch.setenv("DESSIN_NUMBA", "0")
    assert kernels.get_backend().backend == "numpy"
    monkeypatch.setenv("DESSIN_NUMBA", "1")
    assert kernels.get_backend().backend == "numba"
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")


def test_mul_and_power_agree(spec):
    A, B, C, qpow = spec.params
    rng = np.random.default_rng(0)
    i1, i2 = rng.integers(0, B, 500), rng.integers(0, B, 500)
    j1, j2 = rng.integers(0, A, 500), rng.integers(0, A, 500)
    for a, b in zip(NB.mul(i1, j1, i2, j2, A, B, C, qpow), NP.mul(i1, j1, i2, j2, A, B, C, qpow)):
        assert np.array_equal(a, b)
    for m in (0, 1, 2, 7, 81, 1000):
        for a, b in zip(NB.power(i1, j1, m, A, B, C, qpow), NP.power(i1, j1, m, A, B, C, qpow)):
            assert np.array_equal(a, b)


def test_mul_accepts_scalars(spec):
    A, B, C, qpow = spec.params
    for K in (NB, NP):
        i, j = K.mul(1 % B, 0, np.arange(B), np.zeros(B, dtype=np.int64), A, B, C, qpow)
        assert i.shape == (B,)


def test_power_matches_repeated_mul(spec):
    A, B, C, qpow = spec.params
    i, j = np.divmod(np.arange(spec.order), A)
    ai, aj = np.zeros_like(i), np.zeros_like(j)
    for m in range(12):
        pi, pj = NP.power(i, j, m, A, B, C, qpow)
        assert np.array_equal(pi, ai) and np.array_equal(pj, aj)
        ai, aj = NP.mul(ai, aj, i, j, A, B, C, qpow)


def test_tables_agree(spec):
    t1, t2 = NB.cayley_table(*spec.params), NP.cayley_table(*spec.params)
    assert np.array_equal(t1, t2)
    assert np.array_equal(NB.element_orders(t1), NP.element_orders(t1))
    for m in (1, 3, 9):
        assert np.array_equal(NB.power_map(t1, m), NP.power_map(t1, m))


def test_oracle_matrices_agree(spec):
    table = NP.cayley_table(*spec.params)
    orders = NP.element_orders(table)
    m, n = spec.p**spec.d, spec.p**spec.e
    assert np.array_equal(NB.pair_oracle_matrix(table, orders, m, n),
                          NP.pair_oracle_matrix(table, orders, m, n))
    if spec.order <= 243:
        args = (table, spec.a_range, spec.b_range, spec.carry, spec.q)
        assert np.array_equal(NB.aut_oracle_matrix(*args), NP.aut_oracle_matrix(*args))


def test_apply_automorphisms_agree(spec):
    A, B, C, qpow = spec.params
    r, s, t, u = automorphism_arrays(spec)
    for x in range(0, spec.order, max(1, spec.order // 17)):
        i, j = divmod(x, A)
        for a, b in zip(NB.apply_automorphisms(i, j, r, s, t, u, A, B, C, qpow),
                        NP.apply_automorphisms(i, j, r, s, t, u, A, B, C, qpow)):
            assert np.array_equal(a, b)


@pytest.mark.parametrize("seed", range(5))
def test_cycle_labels_agree(seed):
    rng = np.random.default_rng(seed)
    perm = rng.permutation(1000)
    lab = NB.cycle_labels(perm)
    assert np.array_equal(lab, NP.cycle_labels(perm))
    # label is the least point on the cycle and is constant along it
    assert np.array_equal(lab[perm], lab)
    assert (lab <= np.arange(1000)).all()
    assert (lab[lab] == lab).all()


def test_cycle_labels_identity_and_empty():
    for K in (NB, NP):
        assert np.array_equal(K.cycle_labels(np.arange(5)), np.arange(5))
        assert len(K.cycle_labels(np.zeros(0, dtype=np.int64))) == 0
