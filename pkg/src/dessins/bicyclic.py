"""Exact (p^d, p^e)-bicyclic generating pairs.

A pair (alpha, beta) is exact when |alpha| = p^d, |beta| = p^e and the two
cyclic subgroups meet trivially; then G = <alpha><beta> by counting. Pairs are
decided two ways: definitionally on the Cayley table (``oracle``) and by
congruences on the normal-form exponents alpha = b^i a^j, beta = b^k a^l.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .group_core import (
    Element,
    Family,
    GroupSpec,
    cayley_table,
    element_order,
    orders_array,
    subgroup_closure,
)
from .numtheory import euler_phi_prime_power

_CHUNK = 1 << 22


@dataclass(frozen=True)
class BicyclicPair:
    alpha: Element
    beta: Element

    def __post_init__(self):
        if self.alpha.spec != self.beta.spec:
            raise ValueError("pair elements belong to different groups")

    @property
    def spec(self) -> GroupSpec:
        return self.alpha.spec

    @property
    def target_orders(self) -> tuple[int, int]:
        return self.spec.p**self.spec.d, self.spec.p**self.spec.e

    @property
    def exponents(self) -> tuple[int, int, int, int]:
        """(i, j, k, l) with alpha = b^i a^j and beta = b^k a^l."""
        return self.alpha.i, self.alpha.j, self.beta.i, self.beta.j

    @property
    def key(self) -> int:
        return self.alpha.index * self.spec.order + self.beta.index

    @classmethod
    def from_key(cls, spec: GroupSpec, key: int) -> "BicyclicPair":
        x, y = divmod(int(key), spec.order)
        return cls(spec.from_index(x), spec.from_index(y))

    def swapped(self) -> "BicyclicPair":
        return BicyclicPair(self.beta, self.alpha)


def is_exact_pair_oracle(pair: BicyclicPair) -> bool:
    m, n = pair.target_orders
    if element_order(pair.alpha) != m or element_order(pair.beta) != n:
        return False
    common = subgroup_closure([pair.alpha]) & subgroup_closure([pair.beta])
    return common == {pair.spec.identity}


def _is_unit(x, p, n):
    # units of Z_{p^n}; every residue is a unit of the zero ring Z_1
    return (x % p != 0) | (n == 0)


def pair_predicate(spec: GroupSpec, i, j, k, l):
    """Congruence test for alpha = b^i a^j, beta = b^k a^l (broadcasts over arrays)."""
    p, d, e = spec.p, spec.d, spec.e
    i, j, k, l = (np.asarray(x, dtype=np.int64) for x in (i, j, k, l))
    fam = spec.family
    if fam is Family.CYCLIC:
        ok = (i == 0) & _is_unit(k, p, e) & (j == 0) & (l == 0)
    elif fam is Family.M1 and d == e:
        ok = (i * l - j * k) % p != 0
    elif fam is Family.M1:
        ok = (j % p ** (e - d) == 0) & ((i * l) % p != 0)
    elif fam is Family.M2:
        ok = (i % p ** (e - d) == 0) & ((j * k) % p != 0)
    else:
        h = spec.h
        step = p ** (e - h)
        # p^(e-h) exactly divides i; i = 0 fails by convention
        exact = (i % step == 0) & (i % (step * p) != 0)
        ok = exact & ((j + i // step) % p ** (h - d) == 0) & ((j * k) % p != 0)
    return np.broadcast_to(ok, np.broadcast_shapes(i.shape, j.shape, k.shape, l.shape))


def is_exact_pair_fast(spec: GroupSpec, i: int, j: int, k: int, l: int) -> bool:
    return bool(pair_predicate(spec, i, j, k, l))


def _row_chunks(n: int):
    step = max(1, _CHUNK // max(n, 1))
    for lo in range(0, n, step):
        yield lo, min(n, lo + step)


def fast_pair_keys(spec: GroupSpec) -> np.ndarray:
    """Sorted keys ``alpha_index * |G| + beta_index`` of all pairs passing the congruences."""
    n, A = spec.order, spec.a_range
    k, l = np.divmod(np.arange(n, dtype=np.int64), A)
    out = []
    for lo, hi in _row_chunks(n):
        i, j = np.divmod(np.arange(lo, hi, dtype=np.int64), A)
        mask = pair_predicate(spec, i[:, None], j[:, None], k[None, :], l[None, :])
        out.append(np.flatnonzero(mask) + lo * n)
    return np.concatenate(out) if out else np.zeros(0, dtype=np.int64)


def oracle_pair_matrix(spec: GroupSpec, orders: tuple[int, int] | None = None) -> np.ndarray:
    """Definitional exactness of every (alpha, beta), as a |G| x |G| boolean matrix.

    ``orders`` defaults to (p^d, p^e); pass (p^e, p^d) for the colour-swapped count.
    """
    m, nn = orders or (spec.p**spec.d, spec.p**spec.e)
    return kernels.K.pair_oracle_matrix(cayley_table(spec), np.asarray(orders_array(spec)), m, nn)


def exact_pair_keys(spec: GroupSpec, oracle: bool = False) -> np.ndarray:
    if oracle:
        return np.flatnonzero(oracle_pair_matrix(spec)).astype(np.int64)
    return fast_pair_keys(spec)


def enumerate_exact_pairs(spec: GroupSpec, oracle: bool = False, with_pairs: bool = False):
    """Count exact pairs; with ``with_pairs`` also return them as BicyclicPair objects."""
    if not oracle and not with_pairs:
        n, A = spec.order, spec.a_range
        k, l = np.divmod(np.arange(n, dtype=np.int64), A)
        count = 0
        for lo, hi in _row_chunks(n):
            i, j = np.divmod(np.arange(lo, hi, dtype=np.int64), A)
            count += int(pair_predicate(spec, i[:, None], j[:, None], k[None, :], l[None, :]).sum())
        return count
    keys = exact_pair_keys(spec, oracle=oracle)
    if with_pairs:
        return len(keys), [BicyclicPair.from_key(spec, x) for x in keys]
    return len(keys)


def pair_count_formula(spec: GroupSpec) -> int:
    p, d, e = spec.p, spec.d, spec.e
    if spec.family is Family.CYCLIC:
        return euler_phi_prime_power(p, e)
    if d == e:
        # |GL(2, Z_{p^e})|
        return p ** (4 * e - 3) * (p * p - 1) * (p - 1)
    return p ** (3 * d + e - 2) * (p - 1) ** 2
