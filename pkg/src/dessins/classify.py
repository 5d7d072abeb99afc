"""Count regular dessins with complete bipartite graph K_{p^d, p^e} by orbit counting.

Isomorphism classes of dessins with automorphism group G correspond to
Aut(G)-orbits on exact bicyclic pairs of G, and Aut(G) acts freely on those
pairs, so each group contributes |pairs| / |Aut(G)| classes. ``verify`` runs
this for every group in the classification and compares against the closed
forms.
"""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .autgroup import (
    aut_count_formula,
    automorphism_arrays,
    images_under,
    swapping_automorphism_exists,
)
from .bicyclic import BicyclicPair, exact_pair_keys, pair_count_formula
from .dessin import build_dessin, genus_formula, summarize
from .group_core import Family, GroupSpec, enumerate_specs

log = logging.getLogger(__name__)


class FalsificationError(RuntimeError):
    """A computed quantity contradicts a structural fact the counting relies on."""


@dataclass(frozen=True, eq=False)
class Orbit:
    spec: GroupSpec
    representative: int
    keys: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.keys)

    @property
    def pair(self) -> BicyclicPair:
        return BicyclicPair.from_key(self.spec, self.representative)


def _pairs_and_auts(spec, oracle, pair_keys=None, auts=None):
    if pair_keys is None:
        pair_keys = exact_pair_keys(spec, oracle=oracle)
    if auts is None:
        auts = automorphism_arrays(spec, oracle=oracle)
    return pair_keys, auts


def nu_of_group(spec: GroupSpec, oracle: bool = False) -> int:
    """|exact pairs| / |Aut(G)|, which must be an integer."""
    keys, auts = _pairs_and_auts(spec, oracle)
    n_pairs, n_auts = len(keys), len(auts[0])
    nu, rem = divmod(n_pairs, n_auts)
    if rem:
        raise FalsificationError(
            f"{spec}: {n_pairs} exact pairs is not a multiple of |Aut| = {n_auts}"
        )
    return nu


def orbit_partition(spec: GroupSpec, oracle: bool = False,
                    pair_keys: np.ndarray | None = None,
                    auts: tuple[np.ndarray, ...] | None = None) -> list[Orbit]:
    """Aut(G)-orbits on exact pairs, each represented by its lexicographically least pair.

    Raises FalsificationError if an orbit leaves the pair set, overlaps an
    earlier orbit, or is smaller than Aut(G).
    """
    keys, auts = _pairs_and_auts(spec, oracle, pair_keys, auts)
    n = spec.order
    n_auts = len(auts[0])
    visited = np.zeros(len(keys), dtype=bool)
    orbits = []
    pos = 0
    while True:
        rest = np.flatnonzero(~visited[pos:])
        if len(rest) == 0:
            break
        pos += int(rest[0])
        rep = int(keys[pos])
        pair = BicyclicPair.from_key(spec, rep)
        img = images_under(spec, pair.alpha, auts) * n + images_under(spec, pair.beta, auts)
        loc = np.minimum(np.searchsorted(keys, img), len(keys) - 1)
        if not (keys[loc] == img).all():
            raise FalsificationError(f"{spec}: automorphism image of {pair} is not an exact pair")
        if visited[loc].any():
            raise FalsificationError(f"{spec}: orbit of {pair} meets an earlier orbit")
        if len(np.unique(loc)) != n_auts:
            raise FalsificationError(f"{spec}: {pair} has a nontrivial stabiliser in Aut(G)")
        visited[loc] = True
        orbits.append(Orbit(spec, rep, np.sort(img)))
    return orbits


def is_isobicyclic(spec: GroupSpec, pair: BicyclicPair,
                   auts: tuple[np.ndarray, ...] | None = None) -> bool:
    if spec.d != spec.e:
        raise ValueError("isobicyclic pairs only exist when d = e")
    return swapping_automorphism_exists(pair.alpha, pair.beta, auts)


def theorem_formula(p: int, d: int, e: int) -> int:
    """Number of reciprocal pairs of regular dessins on K_{p^d, p^e}."""
    if not 0 <= d <= e:
        raise ValueError("need 0 <= d <= e")
    if d == 0:
        return 1
    if d == e:
        twice = p ** (e - 1) * (1 + p ** (e - 1))
        assert twice % 2 == 0
        return twice // 2
    return p ** (2 * d - 1)


def nu_formula(spec: GroupSpec) -> int:
    """Closed-form number of dessin classes (reciprocal pairs when d < e) for one group."""
    p, d, e, f = spec.p, spec.d, spec.e, spec.f
    fam = spec.family
    if fam is Family.CYCLIC:
        return 1
    if fam is Family.M1:
        if f == e:
            return 1
        if d == e:
            return p ** (2 * e - 2 * f - 2) * (p * p - 1)
        if d <= f:
            return p ** (e - f - 1) * (p - 1)
        return p ** (d + e - 2 * f - 1) * (p - 1)
    if fam is Family.M2:
        return p ** (2 * d - 2 * f - 1) * (p - 1)
    return p ** (d + spec.h - 2 * (f + 1)) * (p - 1) ** 2


@dataclass
class SpecRow:
    spec: GroupSpec
    pair_count: int
    aut_count: int
    pair_formula: int
    aut_formula: int
    nu: int | None
    nu_orbits: int | None
    nu_formula: int
    symmetric_count: int | None = None
    representatives: list[int] = field(default_factory=list)
    geometry: list[dict] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)

    @property
    def match(self) -> bool:
        return (not self.errors and self.pair_count == self.pair_formula
                and self.aut_count == self.aut_formula
                and self.nu == self.nu_orbits == self.nu_formula)

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.label, **{k: v for k, v in self.spec.to_dict().items() if k != "p"},
            "pairs": self.pair_count, "pair_formula": self.pair_formula,
            "auts": self.aut_count, "aut_formula": self.aut_formula,
            "nu": self.nu, "nu_orbits": self.nu_orbits, "nu_formula": self.nu_formula,
            "symmetric_count": self.symmetric_count,
            "representatives": [list(BicyclicPair.from_key(self.spec, k).exponents)
                                for k in self.representatives],
            "errors": self.errors, "match": self.match,
        }


@dataclass
class CountReport:
    p: int
    d: int
    e: int
    rows: list[SpecRow]
    nu_total: int
    theorem_value: int
    total_dessins: int | None = None
    symmetric_total: int | None = None
    expected_total_dessins: int | None = None
    expected_symmetric: int | None = None

    @property
    def reciprocal_pair_classes(self) -> int:
        if self.d == self.e and self.d > 0:
            return self.symmetric_total + (self.total_dessins - self.symmetric_total) // 2
        return self.nu_total

    @property
    def flags(self) -> dict[str, bool]:
        out = {"rows": all(r.match for r in self.rows),
               "theorem": self.reciprocal_pair_classes == self.theorem_value}
        if self.d == self.e and self.d > 0:
            out["total_dessins"] = self.total_dessins == self.expected_total_dessins
            out["symmetric"] = self.symmetric_total == self.expected_symmetric
        return out

    @property
    def match(self) -> bool:
        return all(self.flags.values())

    def to_dict(self) -> dict:
        return {
            "p": self.p, "d": self.d, "e": self.e,
            "rows": [r.to_dict() for r in self.rows],
            "nu_total": self.nu_total,
            "reciprocal_pair_classes": self.reciprocal_pair_classes,
            "theorem": self.theorem_value,
            "total_dessins": self.total_dessins,
            "symmetric_total": self.symmetric_total,
            "expected_total_dessins": self.expected_total_dessins,
            "expected_symmetric": self.expected_symmetric,
            "flags": self.flags, "match": self.match,
        }


def check_geometry(spec: GroupSpec, pair: BicyclicPair) -> tuple[dict, list[str]]:
    """Build the dessin of ``pair`` and compare it with the predicted type, genus and face count."""
    p, d, e = spec.p, spec.d, spec.e
    summary = summarize(build_dessin(spec, pair))
    problems = []
    if summary.type != (p**d, p**e, p**e):
        problems.append(f"type {summary.type} != {(p**d, p**e, p**e)}")
    if summary.genus != genus_formula(p, d, e):
        problems.append(f"genus {summary.genus} != {genus_formula(p, d, e)}")
    if summary.faces != p**d:
        problems.append(f"{summary.faces} faces != {p**d}")
    if summary.black_vertices != p**e or summary.white_vertices != p**d:
        problems.append("vertex counts differ from (p^e, p^d)")
    return summary.to_dict(), problems


def spec_row(spec: GroupSpec, oracle: bool = False, geometry: bool = True) -> SpecRow:
    """Every count for one group, with diagnostics instead of exceptions."""
    keys, auts = _pairs_and_auts(spec, oracle)
    row = SpecRow(spec, len(keys), len(auts[0]), pair_count_formula(spec), aut_count_formula(spec),
                  nu=None, nu_orbits=None, nu_formula=nu_formula(spec))
    try:
        nu, rem = divmod(row.pair_count, row.aut_count)
        if rem:
            raise FalsificationError(f"{spec}: |pairs| / |Aut| = {row.pair_count}/{row.aut_count}")
        row.nu = nu
        orbits = orbit_partition(spec, pair_keys=keys, auts=auts)
        row.nu_orbits = len(orbits)
        row.representatives = [o.representative for o in orbits]
    except FalsificationError as exc:
        row.errors.append(str(exc))
        return row
    if spec.d == spec.e and spec.d > 0:
        row.symmetric_count = sum(is_isobicyclic(spec, o.pair, auts) for o in orbits)
    if geometry:
        for o in orbits:
            summary, problems = check_geometry(spec, o.pair)
            row.geometry.append(summary)
            row.errors.extend(f"{o.pair.exponents}: {msg}" for msg in problems)
    return row


def _spec_row_task(args):
    return spec_row(*args)


def verify(p: int, d: int, e: int, oracle: bool = False, geometry: bool = True,
           workers: int = 1) -> CountReport:
    """Recount every group for K_{p^d,p^e} and compare with the closed forms."""
    specs = enumerate_specs(p, d, e)
    tasks = [(s, oracle, geometry) for s in specs]
    if workers > 1 and len(specs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_spec_row_task, tasks))
    else:
        rows = [_spec_row_task(t) for t in tasks]
    for r in rows:
        log.debug("%s: pairs=%d auts=%d nu=%s", r.spec, r.pair_count, r.aut_count, r.nu)
    nu_total = sum(r.nu or 0 for r in rows)
    report = CountReport(p, d, e, rows, nu_total, theorem_formula(p, d, e))
    if d == e and d > 0:
        report.total_dessins = nu_total
        report.symmetric_total = sum(r.symmetric_count or 0 for r in rows)
        report.expected_total_dessins = p ** (2 * (e - 1))
        report.expected_symmetric = p ** (e - 1)
    return report
