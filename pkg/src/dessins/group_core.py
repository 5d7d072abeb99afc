"""Metacyclic p-groups that occur as automorphism groups of complete regular dessins.

Each group is given by a presentation on generators ``a`` and ``b``::

    M1(d,e,f)    a^(p^e) = b^(p^d) = 1,              a^b = a^(1+p^f)
    M2(d,e,f)    a^(p^d) = b^(p^e) = 1,              a^b = a^(1+p^f)
    M3(d,e,h,f)  a^(p^h) = 1, b^(p^(d+e-h)) = a^(p^d), a^b = a^(1+p^f)
    CYCLIC(e)    a = 1, b^(p^e) = 1

``<a>`` is normal in every family, so each element has a unique normal form
``b^i a^j`` with ``0 <= i < b_range`` and ``0 <= j < a_range``. Internally an
element is also addressed by its index ``i * a_range + j``.
"""
from __future__ import annotations

import enum
import functools
import os
from collections import Counter
from collections.abc import Iterable
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .numtheory import MAX_MODULUS, PrimePower, check_odd_prime, geom_sum

DEFAULT_BRUTE_FORCE_LIMIT = 3**6


class GroupTooLarge(ValueError):
    """Raised when a brute-force computation is requested on a group past the safety bound."""


def brute_force_limit() -> int:
    value = os.environ.get("DESSIN_MAX_ORDER")
    return int(value) if value else DEFAULT_BRUTE_FORCE_LIMIT


class Family(str, enum.Enum):
    M1 = "M1"
    M2 = "M2"
    M3 = "M3"
    CYCLIC = "CYCLIC"


@dataclass(frozen=True)
class GroupSpec:
    family: Family
    p: int
    d: int
    e: int
    f: int | None = None
    h: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        check_odd_prime(self.p)
        d, e, f, h = self.d, self.e, self.f, self.h
        fam = self.family
        if not 0 <= d <= e:
            raise ValueError(f"need 0 <= d <= e, got d={d}, e={e}")
        if fam is Family.CYCLIC:
            ok = d == 0 and f is None and h is None
        elif fam is Family.M1:
            # f < d is allowed for d = e as well: M1(e,e,f), 1 <= f < e, is needed
            # to account for every regular embedding of K_{p^e,p^e}.
            ok = h is None and f is not None and (
                (1 <= d <= f <= e <= d + f) or (1 <= f < d <= e <= d + f)
            )
        elif fam is Family.M2:
            ok = h is None and f is not None and 1 <= f < d < e
        else:
            ok = f is not None and h is not None and h - d <= f < d < h < e
        if not ok:
            raise ValueError(f"invalid parameters for {fam.value}: d={d}, e={e}, f={f}, h={h}")
        if self.p ** (d + e) > MAX_MODULUS:
            raise OverflowError(f"group order {self.p}^{d + e} exceeds 2^31")

    # -- derived quantities -------------------------------------------------

    @property
    def order(self) -> int:
        return self.p ** (self.d + self.e)

    @property
    def a_exp(self) -> int:
        return {Family.M1: self.e, Family.M2: self.d, Family.M3: self.h,
                Family.CYCLIC: 0}[self.family]

    @property
    def a_range(self) -> int:
        """Order of ``a``; the modulus of the a-exponent."""
        return self.p**self.a_exp

    @property
    def a_mod(self) -> PrimePower:
        return PrimePower(self.p, self.a_exp)

    @property
    def b_range(self) -> int:
        """Modulus of the b-exponent in the normal form (not the order of ``b`` in M3)."""
        return self.order // self.a_range

    @property
    def carry(self) -> int:
        """Exponent c with ``b^b_range = a^c``."""
        return self.p**self.d % self.a_range if self.family is Family.M3 else 0

    @property
    def q(self) -> int:
        """Conjugation multiplier: ``a^b = a^q``, reduced mod the order of ``a``."""
        if self.family is Family.CYCLIC:
            return 1 % self.a_range
        return (1 + self.p**self.f) % self.a_range

    @functools.cached_property
    def qpow(self) -> np.ndarray:
        """``q^k mod a_range`` for ``0 <= k < b_range``."""
        A, q = self.a_range, self.q
        out = np.empty(self.b_range, dtype=np.int64)
        cur = 1 % A
        for k in range(self.b_range):
            out[k] = cur
            cur = cur * q % A
        return out

    @property
    def params(self) -> tuple:
        return self.a_range, self.b_range, self.carry, self.qpow

    @property
    def label(self) -> str:
        if self.family is Family.CYCLIC:
            return f"CYCLIC(e={self.e})"
        if self.family is Family.M3:
            return f"M3({self.d},{self.e},{self.h},{self.f})"
        return f"{self.family.value}({self.d},{self.e},{self.f})"

    def __str__(self):
        return f"{self.label}[p={self.p}]"

    def to_dict(self) -> dict:
        return {"family": self.family.value, "p": self.p, "d": self.d, "e": self.e,
                "f": self.f, "h": self.h}

    @classmethod
    def from_dict(cls, data: dict) -> "GroupSpec":
        return cls(Family(data["family"]), data["p"], data["d"], data["e"],
                   data.get("f"), data.get("h"))

    # -- elements -----------------------------------------------------------

    def element(self, i: int = 0, j: int = 0) -> "Element":
        """The normal form ``b^i a^j`` (exponents are reduced, with carries in M3)."""
        A, B, C = self.a_range, self.b_range, self.carry
        return Element(i % B, (j + (i // B) * C) % A, self)

    def from_index(self, idx: int) -> "Element":
        i, j = divmod(int(idx), self.a_range)
        return Element(i, j, self)

    @property
    def identity(self) -> "Element":
        return Element(0, 0, self)

    @property
    def a(self) -> "Element":
        return self.element(0, 1)

    @property
    def b(self) -> "Element":
        return self.element(1, 0)

    def elements(self) -> list["Element"]:
        return [self.from_index(x) for x in range(self.order)]


@dataclass(frozen=True)
class Element:
    """Normal form ``b^i a^j``: ``i`` is always the b-exponent, ``j`` the a-exponent."""

    i: int
    j: int
    spec: GroupSpec = field(repr=False)

    @property
    def index(self) -> int:
        return self.i * self.spec.a_range + self.j

    def __mul__(self, other: "Element") -> "Element":
        return multiply(self, other)

    def __pow__(self, m: int) -> "Element":
        return power(self, m)

    def inverse(self) -> "Element":
        return inverse(self)

    def __repr__(self):
        return f"b^{self.i} a^{self.j}"


# ---------------------------------------------------------------------------
# enumeration of the classified families


def enumerate_specs(p: int, d: int, e: int) -> list[GroupSpec]:
    """All exact (p^d, p^e)-bicyclic groups, ordered by family then (f, h)."""
    check_odd_prime(p)
    if not 0 <= d <= e:
        raise ValueError(f"need 0 <= d <= e, got d={d}, e={e}")
    if p ** (d + e) > MAX_MODULUS:
        raise OverflowError(f"group order {p}^{d + e} exceeds 2^31")
    if d == 0:
        return [GroupSpec(Family.CYCLIC, p, 0, e)]
    specs = []
    for f in range(1, e + 1):
        if (d <= f <= e <= d + f) or (f < d <= e <= d + f):
            specs.append(GroupSpec(Family.M1, p, d, e, f))
    for f in range(1, d):
        if d < e:
            specs.append(GroupSpec(Family.M2, p, d, e, f))
    m3 = [(f, h) for h in range(d + 1, e) for f in range(max(1, h - d), d)]
    specs.extend(GroupSpec(Family.M3, p, d, e, f, h) for f, h in sorted(m3))
    return specs


# ---------------------------------------------------------------------------
# normal-form arithmetic


def _same_spec(x: Element, y: Element) -> GroupSpec:
    if x.spec != y.spec:
        raise ValueError(f"elements belong to different groups: {x.spec} vs {y.spec}")
    return x.spec


def multiply(x: Element, y: Element) -> Element:
    """``b^i1 a^j1 * b^i2 a^j2 = b^(i1+i2) a^(j1 q^i2 + j2)``, then reduce."""
    spec = _same_spec(x, y)
    A, B, C, qpow = spec.params
    s = x.i + y.i
    carry, i = divmod(s, B)
    # M3 only: b^B = a^(p^d) is central since p^(d+f) = 0 mod p^h, so the carry
    # may be moved next to the a-part.
    j = (x.j * int(qpow[y.i]) + y.j + carry * C) % A
    return Element(i, j, spec)


def power(x: Element, m: int) -> Element:
    """``(b^i a^j)^m = b^(im) a^(j (1 + q^i + ... + q^(i(m-1))))`` in O(log m) steps."""
    if m < 0:
        return power(inverse(x), -m)
    spec = x.spec
    A, B, C, qpow = spec.params
    carry, i = divmod(x.i * m, B)
    s = geom_sum(int(qpow[x.i]), m, spec.a_mod)
    j = (x.j * s + (carry % A) * C) % A
    return Element(i, j, spec)


def inverse(x: Element) -> Element:
    return power(x, element_order(x) - 1)


def element_order(x: Element) -> int:
    """Least p^k with x^(p^k) = 1."""
    spec = x.spec
    o = 1
    y = x
    while y != spec.identity:
        y = power(y, spec.p)
        o *= spec.p
    return o


def exponent_of(spec: GroupSpec) -> int:
    return int(orders_array(spec).max())


# ---------------------------------------------------------------------------
# brute-force structure (gated on the group order)


def require_brute_force(spec: GroupSpec) -> None:
    limit = brute_force_limit()
    if spec.order > limit:
        raise GroupTooLarge(
            f"{spec} has order {spec.order} > {limit}; raise DESSIN_MAX_ORDER to allow brute force"
        )


def cayley_table(spec: GroupSpec) -> np.ndarray:
    """Multiplication table on element indices (read-only)."""
    require_brute_force(spec)
    return _cached_table(spec)


@functools.lru_cache(maxsize=16)
def _cached_table(spec: GroupSpec) -> np.ndarray:
    table = kernels.K.cayley_table(*spec.params)
    table.flags.writeable = False
    return table


def orders_array(spec: GroupSpec) -> np.ndarray:
    require_brute_force(spec)
    return _cached_orders(spec)


@functools.lru_cache(maxsize=16)
def _cached_orders(spec: GroupSpec) -> np.ndarray:
    out = kernels.K.element_orders(_cached_table(spec))
    out.flags.writeable = False
    return out


def _to_indices(elements: Iterable[Element]) -> np.ndarray:
    return np.fromiter((g.index for g in elements), dtype=np.int64)


def _to_elements(spec: GroupSpec, mask: np.ndarray) -> set[Element]:
    return {spec.from_index(x) for x in np.flatnonzero(mask)}


def closure_mask(spec: GroupSpec, gens: np.ndarray) -> np.ndarray:
    """Boolean membership vector of the subgroup generated by element indices ``gens``."""
    table = cayley_table(spec)
    mask = np.zeros(spec.order, dtype=bool)
    mask[0] = True
    frontier = np.array([0], dtype=np.int64)
    gens = np.asarray(gens, dtype=np.int64)
    while len(frontier) and len(gens):
        nxt = np.unique(table[frontier][:, gens])
        nxt = nxt[~mask[nxt]]
        mask[nxt] = True
        frontier = nxt
    return mask


def subgroup_closure(gens: Iterable[Element]) -> set[Element]:
    gens = list(gens)
    if not gens:
        raise ValueError("need at least one generator to identify the group")
    spec = gens[0].spec
    for g in gens:
        _same_spec(g, gens[0])
    return _to_elements(spec, closure_mask(spec, _to_indices(gens)))


def _inverse_array(spec: GroupSpec) -> np.ndarray:
    return np.argmin(cayley_table(spec), axis=1)


def derived_subgroup(spec: GroupSpec) -> set[Element]:
    table = cayley_table(spec)
    inv = _inverse_array(spec)
    # [x, y] = x^-1 y^-1 x y
    comm = table[table[inv[:, None], inv[None, :]], table]
    return _to_elements(spec, closure_mask(spec, np.unique(comm)))


def center(spec: GroupSpec) -> set[Element]:
    table = cayley_table(spec)
    return _to_elements(spec, (table == table.T).all(axis=1))


def mho(spec: GroupSpec, i: int) -> set[Element]:
    pw = kernels.K.power_map(cayley_table(spec), spec.p**i)
    return _to_elements(spec, closure_mask(spec, np.unique(pw)))


def omega(spec: GroupSpec, i: int) -> set[Element]:
    pw = kernels.K.power_map(cayley_table(spec), spec.p**i)
    return _to_elements(spec, closure_mask(spec, np.flatnonzero(pw == 0)))


def is_pi_abelian(spec: GroupSpec, i: int) -> bool:
    """Whether (xy)^(p^i) = x^(p^i) y^(p^i) for all x, y."""
    table = cayley_table(spec)
    pw = kernels.K.power_map(table, spec.p**i)
    return bool((pw[table] == table[pw[:, None], pw[None, :]]).all())


# ---------------------------------------------------------------------------
# abelian invariants


def subgroup_table(spec: GroupSpec, members: Iterable[Element]) -> np.ndarray:
    """Cayley table of a subgroup, relabelled 0..k-1 in index order (identity first)."""
    idx = np.sort(_to_indices(members))
    table = cayley_table(spec)
    pos = np.full(spec.order, -1, dtype=np.int64)
    pos[idx] = np.arange(len(idx))
    sub = pos[table[np.ix_(idx, idx)]]
    if (sub < 0).any():
        raise ValueError("element set is not closed under multiplication")
    return sub


def quotient_table(spec: GroupSpec, normal: Iterable[Element]) -> np.ndarray:
    """Cayley table of G/N on cosets labelled by their smallest element index."""
    table = cayley_table(spec)
    nidx = _to_indices(normal)
    left = np.sort(table[:, nidx], axis=1)  # row g: gN
    right = np.sort(table[nidx, :].T, axis=1)  # row g: Ng
    if not (left == right).all():
        raise ValueError("subgroup is not normal")
    rep = left[:, 0]
    reps = np.unique(rep)
    pos = np.full(spec.order, -1, dtype=np.int64)
    pos[reps] = np.arange(len(reps))
    return pos[rep[table[np.ix_(reps, reps)]]]


def abelian_invariant_type(table: np.ndarray) -> list[int]:
    """Invariant factors (as prime powers, ascending) of a finite abelian group.

    ``table`` is a Cayley table on labels 0..n-1 with 0 the identity. For each
    prime p the number of elements killed by p^k determines the partition of
    the p-part: log_p #{g : g^(p^k) = 1} = sum_i min(k, lambda_i).
    """
    table = np.asarray(table, dtype=np.int64)
    n = table.shape[0]
    if not (table == table.T).all():
        raise ValueError("group is not abelian")
    orders = kernels.get_backend("numpy").element_orders(table)
    factors = []
    m = n
    primes = []
    k = 2
    while k * k <= m:
        if m % k == 0:
            primes.append(k)
            while m % k == 0:
                m //= k
        k += 1
    if m > 1:
        primes.append(m)
    for p in primes:
        logs = [0]
        k = 1
        while True:
            count = int((p**k % orders == 0).sum())
            logs.append(round(np.log(count) / np.log(p)))
            if logs[-1] == logs[-2]:
                break
            k += 1
        at_least = [logs[k] - logs[k - 1] for k in range(1, len(logs) - 1)]  # #{lambda_i >= k}
        parts = Counter()
        for k, c in enumerate(at_least, start=1):
            nxt = at_least[k] if k < len(at_least) else 0
            parts[k] += c - nxt
        factors.extend(p**k for k, c in parts.items() for _ in range(c))
    return sorted(factors)


def order_profile(spec: GroupSpec) -> Counter:
    """Element-order statistics ``{order: count}``."""
    return Counter(int(o) for o in orders_array(spec))
