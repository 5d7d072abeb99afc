"""Hot loops over group elements, in two interchangeable flavours.

Every kernel exists as a numba ``@njit`` loop and as a vectorised numpy
routine with the same signature. The numba path is used by default; set
``DESSIN_NUMBA=0`` in the environment (before import) to force the numpy
path, e.g. on platforms without numba or to cross-check results.

Group elements are passed around as integer indices ``i * A + j`` of the
normal form ``b^i a^j``; a group is described by ``(A, B, C, qpow)``:
``a`` has order ``A``, ``b^B = a^C`` and ``qpow[k] = q^k mod A`` for
``0 <= k < B`` where ``a^b = a^q``. Index 0 is the identity.
"""
from __future__ import annotations

import os
from types import SimpleNamespace

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

KERNEL_NAMES = (
    "mul",
    "power",
    "cayley_table",
    "power_map",
    "element_orders",
    "pair_oracle_matrix",
    "aut_oracle_matrix",
    "apply_automorphisms",
    "cycle_labels",
)


def _env_wants_numba() -> bool:
    flag = os.environ.get("DESSIN_NUMBA", "1").strip().lower()
    return flag not in ("0", "false", "off", "no", "numpy")


# ---------------------------------------------------------------------------
# numpy implementations


def _mul_np(i1, j1, i2, j2, A, B, C, qpow):
    s = np.asarray(i1, dtype=np.int64) + i2
    carry = s // B
    i = s - carry * B
    j = (np.asarray(j1, dtype=np.int64) * qpow[i2] + j2 + carry * C) % A
    return i, j


def _power_np(i, j, m, A, B, C, qpow):
    """Elementwise ``(b^i a^j)^m`` for a scalar exponent ``m``."""
    i = np.asarray(i, dtype=np.int64)
    j = np.asarray(j, dtype=np.int64)
    ri = np.zeros_like(i + j)
    rj = np.zeros_like(ri)
    bi, bj = i + 0 * j, j + 0 * i
    while m:
        if m & 1:
            ri, rj = _mul_np(ri, rj, bi, bj, A, B, C, qpow)
        bi, bj = _mul_np(bi, bj, bi, bj, A, B, C, qpow)
        m >>= 1
    return ri, rj


def _cayley_table_np(A, B, C, qpow):
    n = A * B
    idx = np.arange(n, dtype=np.int64)
    i, j = np.divmod(idx, A)
    ti, tj = _mul_np(i[:, None], j[:, None], i[None, :], j[None, :], A, B, C, qpow)
    return ti * A + tj


def _power_map_np(table, m):
    n = table.shape[0]
    res = np.zeros(n, dtype=np.int64)
    base = np.arange(n, dtype=np.int64)
    while m:
        if m & 1:
            res = table[res, base]
        base = table[base, base]
        m >>= 1
    return res


def _element_orders_np(table):
    n = table.shape[0]
    idx = np.arange(n, dtype=np.int64)
    orders = np.zeros(n, dtype=np.int64)
    cur = idx.copy()
    k = 1
    while True:
        hit = (cur == 0) & (orders == 0)
        orders[hit] = k
        if orders.all():
            return orders
        cur = table[cur, idx]
        k += 1


def _cyclic_membership_np(table, orders):
    n = table.shape[0]
    idx = np.arange(n, dtype=np.int64)
    member = np.zeros((n, n), dtype=bool)
    cur = np.zeros(n, dtype=np.int64)
    for _ in range(int(orders.max())):
        member[idx, cur] = True
        cur = table[cur, idx]
    return member


def _pair_oracle_matrix_np(table, orders, m, nn):
    n = table.shape[0]
    out = np.zeros((n, n), dtype=bool)
    alphas = np.flatnonzero(orders == m)
    betas = np.flatnonzero(orders == nn)
    if len(alphas) == 0 or len(betas) == 0:
        return out
    member = _cyclic_membership_np(table, orders)
    common = member[alphas].astype(np.int32) @ member[betas].T.astype(np.int32)
    out[np.ix_(alphas, betas)] = common == 1
    return out


def _aut_oracle_matrix_np(table, A, B, C, q):
    n = table.shape[0]
    orders = _element_orders_np(table)
    inv = np.argmin(table, axis=1)  # table[x, inv[x]] == 0 is the unique minimum
    pw_C = _power_map_np(table, C)
    pw_B = _power_map_np(table, B)
    pw_q = _power_map_np(table, q)
    conj = table[inv[None, :], table]  # conj[x, y] = y^-1 x y
    ok = (A % orders == 0)[:, None] & (pw_B[None, :] == pw_C[:, None]) & (conj == pw_q[:, None])
    xs, ys = np.nonzero(ok)
    if len(xs) == 0:
        return ok
    idx = np.arange(n, dtype=np.int64)
    xpow = np.zeros((n, A), dtype=np.int64)
    ypow = np.zeros((n, B), dtype=np.int64)
    for k in range(1, max(A, B)):
        if k < A:
            xpow[:, k] = table[xpow[:, k - 1], idx]
        if k < B:
            ypow[:, k] = table[ypow[:, k - 1], idx]
    surjective = np.empty(len(xs), dtype=bool)
    chunk = max(1, (1 << 22) // n)
    for lo in range(0, len(xs), chunk):
        cx, cy = xs[lo:lo + chunk], ys[lo:lo + chunk]
        # image of the homomorphism: {y^i x^j}
        img = table[ypow[cy][:, :, None], xpow[cx][:, None, :]].reshape(len(cx), n)
        img.sort(axis=1)
        surjective[lo:lo + chunk] = (np.diff(img, axis=1) != 0).all(axis=1)
    ok[xs[~surjective], ys[~surjective]] = False
    return ok


def _apply_automorphisms_np(i, j, r, s, t, u, A, B, C, qpow):
    """Image of ``b^i a^j`` under every map ``a -> b^r a^s, b -> b^t a^u``."""
    bi, bj = _power_np(t, u, int(i), A, B, C, qpow)
    ai, aj = _power_np(r, s, int(j), A, B, C, qpow)
    return _mul_np(bi, bj, ai, aj, A, B, C, qpow)


def _cycle_labels_np(perm):
    """Label every point by the smallest point of its cycle (pointer jumping)."""
    perm = np.asarray(perm, dtype=np.int64)
    lab = np.arange(len(perm), dtype=np.int64)
    f = perm.copy()
    span = 1
    while span < len(perm):
        lab = np.minimum(lab, lab[f])
        f = f[f]
        span *= 2
    return lab


_NUMPY = SimpleNamespace(
    backend="numpy",
    mul=_mul_np,
    power=_power_np,
    cayley_table=_cayley_table_np,
    power_map=_power_map_np,
    element_orders=_element_orders_np,
    pair_oracle_matrix=_pair_oracle_matrix_np,
    aut_oracle_matrix=_aut_oracle_matrix_np,
    apply_automorphisms=_apply_automorphisms_np,
    cycle_labels=_cycle_labels_np,
)


# ---------------------------------------------------------------------------
# numba implementations


def _build_numba():
    njit = numba.njit(cache=True)

    @numba.njit(cache=True, inline="always")
    def mul1(i1, j1, i2, j2, A, B, C, qpow):
        s = i1 + i2
        carry = s // B
        return s - carry * B, (j1 * qpow[i2] + j2 + carry * C) % A

    @numba.njit(cache=True)
    def pow1(i, j, m, A, B, C, qpow):
        ri, rj = 0, 0
        bi, bj = i, j
        while m:
            if m & 1:
                ri, rj = mul1(ri, rj, bi, bj, A, B, C, qpow)
            bi, bj = mul1(bi, bj, bi, bj, A, B, C, qpow)
            m >>= 1
        return ri, rj

    @njit
    def mul_nb(i1, j1, i2, j2, A, B, C, qpow):
        n = i1.shape[0]
        oi = np.empty(n, dtype=np.int64)
        oj = np.empty(n, dtype=np.int64)
        for k in range(n):
            oi[k], oj[k] = mul1(i1[k], j1[k], i2[k], j2[k], A, B, C, qpow)
        return oi, oj

    @njit
    def power_nb(i, j, m, A, B, C, qpow):
        n = i.shape[0]
        oi = np.empty(n, dtype=np.int64)
        oj = np.empty(n, dtype=np.int64)
        for k in range(n):
            oi[k], oj[k] = pow1(i[k], j[k], m, A, B, C, qpow)
        return oi, oj

    @njit
    def cayley_table_nb(A, B, C, qpow):
        n = A * B
        table = np.empty((n, n), dtype=np.int64)
        for x in range(n):
            i1, j1 = x // A, x % A
            for y in range(n):
                i, j = mul1(i1, j1, y // A, y % A, A, B, C, qpow)
                table[x, y] = i * A + j
        return table

    @njit
    def power_map_nb(table, m):
        n = table.shape[0]
        out = np.zeros(n, dtype=np.int64)
        for x in range(n):
            res, base, e = 0, x, m
            while e:
                if e & 1:
                    res = table[res, base]
                base = table[base, base]
                e >>= 1
            out[x] = res
        return out

    @njit
    def element_orders_nb(table):
        n = table.shape[0]
        orders = np.empty(n, dtype=np.int64)
        for x in range(n):
            g, k = x, 1
            while g != 0:
                g = table[g, x]
                k += 1
            orders[x] = k
        return orders

    @njit
    def pair_oracle_matrix_nb(table, orders, m, nn):
        n = table.shape[0]
        out = np.zeros((n, n), dtype=np.bool_)
        mark = np.zeros(n, dtype=np.bool_)
        for x in range(n):
            if orders[x] != m:
                continue
            g = 0
            for _ in range(m):
                mark[g] = True
                g = table[g, x]
            for y in range(n):
                if orders[y] != nn:
                    continue
                ok = True
                g = y
                for _ in range(1, nn):
                    if mark[g]:
                        ok = False
                        break
                    g = table[g, y]
                out[x, y] = ok
            g = 0
            for _ in range(m):
                mark[g] = False
                g = table[g, x]
        return out

    @njit
    def aut_oracle_matrix_nb(table, A, B, C, q):
        n = table.shape[0]
        orders = element_orders_nb(table)
        inv = np.empty(n, dtype=np.int64)
        for x in range(n):
            for y in range(n):
                if table[x, y] == 0:
                    inv[x] = y
                    break
        pw_C = power_map_nb(table, C)
        pw_B = power_map_nb(table, B)
        pw_q = power_map_nb(table, q)
        out = np.zeros((n, n), dtype=np.bool_)
        seen = np.zeros(n, dtype=np.int64)
        stamp = 0
        xpow = np.empty(A, dtype=np.int64)
        for x in range(n):
            if A % orders[x] != 0:
                continue
            g = 0
            for k in range(A):
                xpow[k] = g
                g = table[g, x]
            for y in range(n):
                if pw_B[y] != pw_C[x]:
                    continue
                if table[inv[y], table[x, y]] != pw_q[x]:
                    continue
                stamp += 1
                distinct = 0
                yi = 0
                for _ in range(B):
                    for k in range(A):
                        z = table[yi, xpow[k]]
                        if seen[z] != stamp:
                            seen[z] = stamp
                            distinct += 1
                    yi = table[yi, y]
                out[x, y] = distinct == n
        return out

    @njit
    def apply_automorphisms_nb(i, j, r, s, t, u, A, B, C, qpow):
        n = r.shape[0]
        oi = np.empty(n, dtype=np.int64)
        oj = np.empty(n, dtype=np.int64)
        for k in range(n):
            bi, bj = pow1(t[k], u[k], i, A, B, C, qpow)
            ai, aj = pow1(r[k], s[k], j, A, B, C, qpow)
            oi[k], oj[k] = mul1(bi, bj, ai, aj, A, B, C, qpow)
        return oi, oj

    @njit
    def cycle_labels_nb(perm):
        n = perm.shape[0]
        lab = np.full(n, -1, dtype=np.int64)
        for x in range(n):
            if lab[x] >= 0:
                continue
            g = x
            while lab[g] < 0:
                lab[g] = x
                g = perm[g]
        return lab

    def _vec(fn):
        # accept scalars and broadcastable inputs like the numpy path does
        def wrapper(*args):
            shape = np.broadcast_shapes(*(np.shape(a) for a in args[:4]))
            flat = [np.ascontiguousarray(np.broadcast_to(np.asarray(a, dtype=np.int64), shape)).ravel()
                    for a in args[:4]]
            oi, oj = fn(*flat, *args[4:])
            return oi.reshape(shape), oj.reshape(shape)
        return wrapper

    def power(i, j, m, A, B, C, qpow):
        shape = np.broadcast_shapes(np.shape(i), np.shape(j))
        fi = np.ascontiguousarray(np.broadcast_to(np.asarray(i, dtype=np.int64), shape)).ravel()
        fj = np.ascontiguousarray(np.broadcast_to(np.asarray(j, dtype=np.int64), shape)).ravel()
        oi, oj = power_nb(fi, fj, int(m), A, B, C, qpow)
        return oi.reshape(shape), oj.reshape(shape)

    def apply_automorphisms(i, j, r, s, t, u, A, B, C, qpow):
        r, s, t, u = (np.ascontiguousarray(x, dtype=np.int64) for x in (r, s, t, u))
        return apply_automorphisms_nb(int(i), int(j), r, s, t, u, A, B, C, qpow)

    return SimpleNamespace(
        backend="numba",
        mul=_vec(mul_nb),
        power=power,
        cayley_table=cayley_table_nb,
        power_map=lambda table, m: power_map_nb(table, int(m)),
        element_orders=element_orders_nb,
        pair_oracle_matrix=lambda table, orders, m, nn: pair_oracle_matrix_nb(table, orders, int(m), int(nn)),
        aut_oracle_matrix=aut_oracle_matrix_nb,
        apply_automorphisms=apply_automorphisms,
        cycle_labels=lambda perm: cycle_labels_nb(np.ascontiguousarray(perm, dtype=np.int64)),
    )


_NUMBA = None


def get_backend(name: str | None = None) -> SimpleNamespace:
    """Return the kernel namespace for ``"numba"`` or ``"numpy"``.

    ``None`` honours the ``DESSIN_NUMBA`` environment flag.
    """
    global _NUMBA
    if name is None:
        name = "numba" if (numba is not None and _env_wants_numba()) else "numpy"
    if name == "numpy":
        return _NUMPY
    if name != "numba":
        raise ValueError(f"unknown kernel backend {name!r}")
    if numba is None:
        raise RuntimeError("numba is not installed")
    if _NUMBA is None:
        _NUMBA = _build_numba()
    return _NUMBA


K = get_backend()
BACKEND = K.backend
