"""Regular dessins as rotation systems on the edge set G.

Edges are the group elements, indexed by normal form ``b^i a^j`` in
lexicographic order of (i, j). The black rotation is right multiplication by
alpha, the white rotation right multiplication by beta; black vertices are
the cosets g<alpha>, white vertices the cosets g<beta>, and faces are the
cycles of g -> g(alpha beta).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .bicyclic import BicyclicPair, is_exact_pair_fast
from .group_core import Element, GroupSpec, element_order

FORMAT_VERSION = 1


class DessinInvariantError(RuntimeError):
    """A constructed dessin violates a structural invariant (should never happen)."""


@dataclass(frozen=True, eq=False)
class Dessin:
    spec: GroupSpec
    alpha: Element
    beta: Element
    rot_black: np.ndarray = field(repr=False)
    rot_white: np.ndarray = field(repr=False)

    @property
    def n_edges(self) -> int:
        return len(self.rot_black)

    def same_rotation_data(self, other: "Dessin") -> bool:
        return (self.spec == other.spec and self.alpha == other.alpha and self.beta == other.beta
                and np.array_equal(self.rot_black, other.rot_black)
                and np.array_equal(self.rot_white, other.rot_white))


@dataclass(frozen=True)
class DessinSummary:
    type: tuple[int, int, int]
    black_vertices: int
    white_vertices: int
    edges: int
    faces: int
    genus: int
    symmetric: bool | None = None

    def to_dict(self) -> dict:
        return {"type": list(self.type), "black_vertices": self.black_vertices,
                "white_vertices": self.white_vertices, "edges": self.edges,
                "faces": self.faces, "genus": self.genus, "symmetric": self.symmetric}


def _right_multiplication(spec: GroupSpec, g: Element) -> np.ndarray:
    A, B, C, qpow = spec.params
    i, j = np.divmod(np.arange(spec.order, dtype=np.int64), A)
    ri, rj = kernels.K.mul(i, j, np.full_like(i, g.i), np.full_like(j, g.j), A, B, C, qpow)
    return ri * A + rj


def _cycles(perm: np.ndarray) -> list[np.ndarray]:
    """Cycles of a permutation, each starting at its smallest point, in order of that point."""
    perm = np.asarray(perm)
    lab = kernels.K.cycle_labels(perm)
    out = []
    for start in np.flatnonzero(lab == np.arange(len(perm))):
        cyc = [int(start)]
        x = int(perm[start])
        while x != start:
            cyc.append(x)
            x = int(perm[x])
        out.append(np.array(cyc, dtype=np.int64))
    return out


def _cycle_count(perm: np.ndarray) -> tuple[int, np.ndarray]:
    lab = kernels.K.cycle_labels(np.asarray(perm))
    sizes = np.bincount(lab, minlength=len(perm))
    sizes = sizes[sizes > 0]
    return len(sizes), sizes


def _check_structure(d: Dessin) -> None:
    spec = d.spec
    m, n = element_order(d.alpha), element_order(d.beta)
    nb, black_sizes = _cycle_count(d.rot_black)
    nw, white_sizes = _cycle_count(d.rot_white)
    if not ((black_sizes == m).all() and (white_sizes == n).all()):
        raise DessinInvariantError("vertex rotations do not have the expected cycle lengths")
    # complete bipartite: each (black, white) vertex pair shares exactly one edge
    lb = kernels.K.cycle_labels(d.rot_black)
    lw = kernels.K.cycle_labels(d.rot_white)
    incident = np.unique(lb * spec.order + lw)
    if nb * nw != spec.order or len(incident) != spec.order:
        raise DessinInvariantError("underlying graph is not complete bipartite")


def build_dessin(spec: GroupSpec, pair: BicyclicPair | tuple[Element, Element],
                 check: bool = True) -> Dessin:
    """Dessin of an exact (p^d, p^e)-bicyclic pair."""
    if not isinstance(pair, BicyclicPair):
        pair = BicyclicPair(*pair)
    if pair.spec != spec:
        raise ValueError("pair does not belong to this group")
    if not is_exact_pair_fast(spec, *pair.exponents):
        raise ValueError(f"({pair.alpha}, {pair.beta}) is not an exact bicyclic pair of {spec}")
    d = Dessin(spec, pair.alpha, pair.beta,
               _right_multiplication(spec, pair.alpha), _right_multiplication(spec, pair.beta))
    if check:
        _check_structure(d)
    return d


def reciprocal(d: Dessin) -> Dessin:
    """Swap the vertex colours: the dessin of (beta, alpha)."""
    return Dessin(d.spec, d.beta, d.alpha, d.rot_white, d.rot_black)


def face_permutation(d: Dessin) -> np.ndarray:
    # g -> g alpha beta
    return d.rot_white[d.rot_black]


def faces(d: Dessin) -> list[np.ndarray]:
    return _cycles(face_permutation(d))


def summarize(d: Dessin, symmetric: bool | None = None) -> DessinSummary:
    nb, _ = _cycle_count(d.rot_black)
    nw, _ = _cycle_count(d.rot_white)
    nf, face_sizes = _cycle_count(face_permutation(d))
    E = d.n_edges
    twice_genus = 2 - (nb + nw) + E - nf
    if twice_genus < 0 or twice_genus % 2:
        raise DessinInvariantError(f"Euler characteristic gives genus {twice_genus}/2")
    ab = element_order(d.alpha * d.beta)
    if not (face_sizes == ab).all():
        raise DessinInvariantError("face lengths differ from |alpha beta|")
    return DessinSummary(
        type=(element_order(d.alpha), element_order(d.beta), ab),
        black_vertices=nb, white_vertices=nw, edges=E, faces=nf,
        genus=twice_genus // 2, symmetric=symmetric,
    )


def genus_formula(p: int, d: int, e: int) -> int:
    return (p**d - 1) * (p**e - 2) // 2


def left_multiplication(d: Dessin, g: Element) -> np.ndarray:
    """Edge permutation x -> g x."""
    spec = d.spec
    A, B, C, qpow = spec.params
    i, j = np.divmod(np.arange(spec.order, dtype=np.int64), A)
    li, lj = kernels.K.mul(np.full_like(i, g.i), np.full_like(j, g.j), i, j, A, B, C, qpow)
    return li * A + lj


# ---------------------------------------------------------------------------
# serialisation


def to_dict(d: Dessin, adjacency: bool = False) -> dict:
    """JSON-ready form; ``adjacency`` adds explicit vertex, edge and face lists.

    Schema (version 1)::

        {"version": 1, "spec": {...}, "alpha": [i, j], "beta": [k, l],
         "rot_black": [...], "rot_white": [...],
         # only with adjacency:
         "black_vertices": [[edge, ...], ...],   # cyclic order around each vertex
         "white_vertices": [[edge, ...], ...],
         "edge_ends": [[black_vertex, white_vertex], ...],   # indexed by edge
         "faces": [[edge, ...], ...]}
    """
    out = {
        "version": FORMAT_VERSION,
        "spec": d.spec.to_dict(),
        "alpha": [d.alpha.i, d.alpha.j],
        "beta": [d.beta.i, d.beta.j],
        "rot_black": d.rot_black.tolist(),
        "rot_white": d.rot_white.tolist(),
    }
    if adjacency:
        black = _cycles(d.rot_black)
        white = _cycles(d.rot_white)
        ends = np.zeros((d.n_edges, 2), dtype=np.int64)
        for v, cyc in enumerate(black):
            ends[cyc, 0] = v
        for v, cyc in enumerate(white):
            ends[cyc, 1] = v
        out["black_vertices"] = [c.tolist() for c in black]
        out["white_vertices"] = [c.tolist() for c in white]
        out["edge_ends"] = ends.tolist()
        out["faces"] = [c.tolist() for c in faces(d)]
    return out


def to_json(d: Dessin, adjacency: bool = False) -> str:
    return json.dumps(to_dict(d, adjacency), separators=(",", ":"))


def from_dict(data: dict) -> Dessin:
    if data.get("version") != FORMAT_VERSION:
        raise ValueError(f"unsupported dessin format version {data.get('version')!r}")
    spec = GroupSpec.from_dict(data["spec"])
    alpha = spec.element(*data["alpha"])
    beta = spec.element(*data["beta"])
    d = Dessin(spec, alpha, beta,
               np.asarray(data["rot_black"], dtype=np.int64),
               np.asarray(data["rot_white"], dtype=np.int64))
    if not (np.array_equal(d.rot_black, _right_multiplication(spec, alpha))
            and np.array_equal(d.rot_white, _right_multiplication(spec, beta))):
        raise ValueError("rotation data is inconsistent with the generating pair")
    return d


def from_json(text: str) -> Dessin:
    return from_dict(json.loads(text))
