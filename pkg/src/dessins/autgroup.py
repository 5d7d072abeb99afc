"""Automorphisms a -> b^r a^s, b -> b^t a^u of the classified groups."""
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
    power,
    subgroup_closure,
)
from .numtheory import euler_phi_prime_power

DEFAULT_LIST_BUDGET = 10**6
_CHUNK = 1 << 22


@dataclass(frozen=True)
class AutMap:
    """Stored by generator images: a -> b^r a^s and b -> b^t a^u."""

    r: int
    s: int
    t: int
    u: int
    spec: GroupSpec

    @classmethod
    def identity(cls, spec: GroupSpec) -> "AutMap":
        return cls(0, 1 % spec.a_range, 1 % spec.b_range, 0, spec)

    @classmethod
    def from_images(cls, a_image: Element, b_image: Element) -> "AutMap":
        return cls(a_image.i, a_image.j, b_image.i, b_image.j, a_image.spec)

    @property
    def a_image(self) -> Element:
        return Element(self.r, self.s, self.spec)

    @property
    def b_image(self) -> Element:
        return Element(self.t, self.u, self.spec)

    def __call__(self, x: Element) -> Element:
        return apply(self, x)

    def compose(self, other: "AutMap") -> "AutMap":
        """The map x -> self(other(x))."""
        return AutMap.from_images(self(other.a_image), self(other.b_image))


def apply(aut: AutMap, x: Element) -> Element:
    """Image of b^i a^j, namely (b^t a^u)^i (b^r a^s)^j."""
    if x.spec != aut.spec:
        raise ValueError("element and automorphism belong to different groups")
    return power(aut.b_image, x.i) * power(aut.a_image, x.j)


def is_automorphism_oracle(aut: AutMap) -> bool:
    """Check the defining relations on the images, then generation."""
    spec = aut.spec
    a1, b1 = aut.a_image, aut.b_image
    one = spec.identity
    if power(a1, spec.a_range) != one:
        return False
    if power(b1, spec.b_range) != power(a1, spec.carry):
        return False
    if b1.inverse() * a1 * b1 != power(a1, spec.q):
        return False
    return len(subgroup_closure([a1, b1])) == spec.order


def m1_case(d: int, e: int, f: int) -> str:
    """Which of the five parameter regimes of M1(d,e,f) applies."""
    cases = {
        "i": f == e == d,
        "ii": f < e == d,
        "iii": d < f == e,
        "iv": d <= f < e,
        "v": f < d < e,
    }
    hits = [name for name, hit in cases.items() if hit]
    assert len(hits) == 1, f"M1({d},{e},{f}) matched cases {hits}"
    return hits[0]


def aut_predicate(spec: GroupSpec, r, s, t, u):
    """Congruence test for a -> b^r a^s, b -> b^t a^u (broadcasts over arrays)."""
    p, d, e, f = spec.p, spec.d, spec.e, spec.f
    r, s, t, u = (np.asarray(x, dtype=np.int64) for x in (r, s, t, u))
    fam = spec.family
    if fam is Family.CYCLIC:
        ok = (r == 0) & ((t % p != 0) | (e == 0)) & (s == 0) & (u == 0)
    elif fam is Family.M1:
        case = m1_case(d, e, f)
        if case == "i":
            ok = (r * u - s * t) % p != 0
        elif case == "ii":
            ok = (r % p ** (e - f) == 0) & ((t - 1) % p ** (e - f) == 0) & (s % p != 0)
        elif case == "iii":
            ok = (u % p ** (e - d) == 0) & ((s * t) % p != 0)
        elif case == "iv":
            ok = (u % p ** (e - d) == 0) & ((t - 1) % p ** (e - f) == 0) & (s % p != 0)
        else:
            ok = ((r % p ** (d - f) == 0) & (u % p ** (e - d) == 0)
                  & ((t - 1) % p ** (e - f) == 0) & (s % p != 0))
    elif fam is Family.M2:
        ok = (r % p ** (e - f) == 0) & (s % p != 0) & ((t - 1) % p ** (d - f) == 0)
    else:
        h = spec.h
        ok = ((r % p ** (d + e - h - f) == 0)
              & ((s - 1 - u * p ** (e - h)) % p ** (h - d) == 0)
              & ((t - 1) % p ** (d - f) == 0)
              & ((r - (t - 1) * p ** (e - h)) % p ** (e - f) == 0))
    return np.broadcast_to(ok, np.broadcast_shapes(r.shape, s.shape, t.shape, u.shape))


def is_automorphism_fast(spec: GroupSpec, r: int, s: int, t: int, u: int) -> bool:
    return bool(aut_predicate(spec, r, s, t, u))


def oracle_aut_matrix(spec: GroupSpec) -> np.ndarray:
    """Definitional test of every (a-image, b-image) pair, indexed by element indices."""
    return kernels.K.aut_oracle_matrix(cayley_table(spec), spec.a_range, spec.b_range,
                                       spec.carry, spec.q)


def automorphism_arrays(spec: GroupSpec, oracle: bool = False) -> tuple[np.ndarray, ...]:
    """(r, s, t, u) of every automorphism, in lexicographic order."""
    n, A = spec.order, spec.a_range
    if oracle:
        keys = np.flatnonzero(oracle_aut_matrix(spec)).astype(np.int64)
    else:
        t, u = np.divmod(np.arange(n, dtype=np.int64), A)
        parts = []
        step = max(1, _CHUNK // n)
        for lo in range(0, n, step):
            r, s = np.divmod(np.arange(lo, min(n, lo + step), dtype=np.int64), A)
            mask = aut_predicate(spec, r[:, None], s[:, None], t[None, :], u[None, :])
            parts.append(np.flatnonzero(mask) + lo * n)
        keys = np.concatenate(parts)
    x, y = np.divmod(keys, n)
    r, s = np.divmod(x, A)
    t, u = np.divmod(y, A)
    return r, s, t, u


def enumerate_automorphisms(spec: GroupSpec, oracle: bool = False,
                            max_list: int = DEFAULT_LIST_BUDGET) -> tuple[int, list[AutMap] | None]:
    """Return ``(count, maps)``; ``maps`` is None when the count exceeds ``max_list``."""
    r, s, t, u = automorphism_arrays(spec, oracle=oracle)
    count = len(r)
    if count > max_list:
        return count, None
    return count, [AutMap(int(a), int(b), int(c), int(e), spec) for a, b, c, e in zip(r, s, t, u)]


def aut_count_formula(spec: GroupSpec) -> int:
    p, d, e, f = spec.p, spec.d, spec.e, spec.f
    if spec.family is Family.CYCLIC:
        return euler_phi_prime_power(p, e)
    if spec.family is Family.M2:
        return p ** (d + e + 2 * f - 1) * (p - 1)
    if spec.family is Family.M3:
        return p ** (2 * d + e + 2 * f - spec.h)
    return {
        "i": p ** (4 * e - 3) * (p * p - 1) * (p - 1),
        "ii": p ** (2 * (e + f) - 1) * (p - 1),
        "iii": p ** (3 * d + e - 2) * (p - 1) ** 2,
        "iv": p ** (3 * d + f - 1) * (p - 1),
        "v": p ** (2 * (d + f) - 1) * (p - 1),
    }[m1_case(d, e, f)]


def images_under(spec: GroupSpec, x: Element, auts: tuple[np.ndarray, ...]) -> np.ndarray:
    """Element indices of x's image under each automorphism in ``auts``."""
    r, s, t, u = auts
    A, B, C, qpow = spec.params
    ii, jj = kernels.K.apply_automorphisms(x.i, x.j, r, s, t, u, A, B, C, qpow)
    return ii * A + jj


def swapping_automorphism_exists(alpha: Element, beta: Element,
                                 auts: tuple[np.ndarray, ...] | None = None) -> bool:
    """Is there an automorphism with alpha -> beta and beta -> alpha?"""
    if element_order(alpha) != element_order(beta):
        return False
    spec = alpha.spec
    if auts is None:
        auts = automorphism_arrays(spec)
    img_a = images_under(spec, alpha, auts)
    img_b = images_under(spec, beta, auts)
    return bool(((img_a == beta.index) & (img_b == alpha.index)).any())
