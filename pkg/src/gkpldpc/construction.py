"""Quasi-cyclic LDPC construction and the lifted-product CSS codes.

A code is described by a small base matrix of circulant shift exponents.
Lifting replaces each exponent b by the L x L identity cyclically
right-shifted by b columns (-1 becomes the zero block).  The lifted product
combines a base matrix B with its ring conjugate transpose B* to produce a
CSS pair (Hx, Hz), which is validated and measured (n, k, girth) here.

The registry at the bottom holds the two simulated families (LP04 from
(3,4)-regular bases, LP118 from (3,5)-regular bases) plus the Steane code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._numba import njit
from .gf2 import BinaryMatrix, RowBasis, mat_mul

ACYCLIC = math.inf


class BaseMatrix:
    """Grid of circulant shift exponents with a common lift size.

    Entries are -1 (zero block) or a shift in [0, lift_size).  The regular
    families used here have no -1 entries in their defining bases; -1 shows
    up in the lifted-product block structure.
    """

    __slots__ = ("shifts", "lift_size")

    def __init__(self, shifts, lift_size: int):
        arr = np.asarray(shifts, dtype=np.int64)
        if arr.ndim != 2:
            raise ValueError("base matrix must be two-dimensional")
        if lift_size < 1:
            raise ValueError(f"lift size must be >= 1, got {lift_size}")
        bad = (arr < -1) | (arr >= lift_size)
        if bad.any():
            i, j = np.argwhere(bad)[0]
            raise ValueError(
                f"shift {arr[i, j]} at ({i}, {j}) invalid for lift size {lift_size}"
            )
        arr = arr.copy()
        arr.flags.writeable = False
        self.shifts = arr
        self.lift_size = int(lift_size)

    @property
    def mb(self) -> int:
        return self.shifts.shape[0]

    @property
    def nb(self) -> int:
        return self.shifts.shape[1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, BaseMatrix):
            return NotImplemented
        return self.lift_size == other.lift_size and np.array_equal(
            self.shifts, other.shifts
        )

    def __hash__(self):
        return hash((self.lift_size, self.shifts.tobytes()))

    def __repr__(self) -> str:
        return f"BaseMatrix({self.mb}x{self.nb}, L={self.lift_size})"

    def to_text(self) -> str:
        """Plain-text grid of shifts, one matrix row per line."""
        width = max(len(str(int(v))) for v in self.shifts.ravel())
        lines = [f"# circulant size L = {self.lift_size}"]
        for row in self.shifts:
            lines.append(" ".join(str(int(v)).rjust(width) for v in row))
        return "\n".join(lines) + "\n"


def cpm_expand(shift: int, lift_size: int) -> BinaryMatrix:
    """Circulant permutation matrix: identity right-shifted by `shift` columns.

    shift == -1 yields the zero block.
    """
    if shift < -1 or shift >= lift_size:
        raise ValueError(f"shift {shift} invalid for lift size {lift_size}")
    if shift == -1:
        return BinaryMatrix.zeros(lift_size, lift_size)
    dense = np.zeros((lift_size, lift_size), dtype=np.uint8)
    idx = (np.arange(lift_size) + shift) % lift_size
    dense[np.arange(lift_size), idx] = 1
    return BinaryMatrix.from_dense(dense)


def lift(base: BaseMatrix) -> BinaryMatrix:
    """Expand every shift entry into its circulant block."""
    L = base.lift_size
    dense = np.zeros((base.mb * L, base.nb * L), dtype=np.uint8)
    rows = np.arange(L)
    for i in range(base.mb):
        for j in range(base.nb):
            s = int(base.shifts[i, j])
            if s < 0:
                continue
            cols = (rows + s) % L
            dense[i * L + rows, j * L + cols] = 1
    return BinaryMatrix.from_dense(dense)


def conjugate_transpose(base: BaseMatrix) -> BaseMatrix:
    """Ring conjugate transpose: the lift of the result is lift(base)^T."""
    L = base.lift_size
    s = base.shifts
    out = np.where(s >= 0, (L - s) % L, -1).T
    return BaseMatrix(out, L)


def identity_base(n: int, lift_size: int) -> BaseMatrix:
    """Shift-matrix identity: shift 0 on the diagonal, zero blocks elsewhere."""
    out = np.full((n, n), -1, dtype=np.int64)
    np.fill_diagonal(out, 0)
    return BaseMatrix(out, lift_size)


def kron_base(a: BaseMatrix, b: BaseMatrix) -> BaseMatrix:
    """Kronecker product over the circulant shift ring.

    Shifts add modulo L and a -1 factor annihilates the block.  In the
    lifted product one of the factors is always an identity pattern, so in
    practice this places copies of the other matrix on a block diagonal.
    """
    if a.lift_size != b.lift_size:
        raise ValueError("lift sizes differ")
    sa, sb = a.shifts, b.shifts
    out = sa[:, None, :, None] + sb[None, :, None, :]
    zero = (sa[:, None, :, None] < 0) | (sb[None, :, None, :] < 0)
    out = np.where(zero, -1, out % a.lift_size)
    return BaseMatrix(
        out.reshape(a.mb * b.mb, a.nb * b.nb), a.lift_size
    )


def concat_base(a: BaseMatrix, b: BaseMatrix) -> BaseMatrix:
    if a.lift_size != b.lift_size or a.mb != b.mb:
        raise ValueError("incompatible base matrices")
    return BaseMatrix(np.hstack([a.shifts, b.shifts]), a.lift_size)


@dataclass(frozen=True, eq=False)
class CssCode:
    """A validated CSS code: Hx Hz^T = 0, with derived parameters.

    basis_x / basis_z are the row-reduced stabilizer bases used for the
    degeneracy test (is a residual error a stabilizer?).
    """

    name: str
    family: str  # "LP04" | "LP118" | "custom"
    hx: BinaryMatrix
    hz: BinaryMatrix
    n: int
    k: int
    girth_x: float
    girth_z: float
    distance_bound: int | None
    basis_x: RowBasis
    basis_z: RowBasis

    @property
    def rate(self) -> float:
        return self.k / self.n

    @property
    def girth(self) -> float:
        return min(self.girth_x, self.girth_z)

    def __repr__(self) -> str:
        return f"CssCode({self.name}: [[{self.n}, {self.k}]])"


def make_css_code(
    hx: BinaryMatrix,
    hz: BinaryMatrix,
    name: str = "",
    family: str = "custom",
    distance_bound: int | None = None,
) -> CssCode:
    """Validate a parity-check pair and fill in the derived parameters."""
    if hx.cols != hz.cols:
        raise ValueError(f"qubit counts differ: {hx.cols} vs {hz.cols}")
    if not mat_mul(hx, hz.transpose()).is_zero():
        raise ValueError(f"CSS condition violated for {name or 'code'}: Hx Hz^T != 0")
    n = hx.cols
    basis_x = RowBasis.from_matrix(hx)
    basis_z = RowBasis.from_matrix(hz)
    k = n - basis_x.rank - basis_z.rank
    return CssCode(
        name=name,
        family=family,
        hx=hx,
        hz=hz,
        n=n,
        k=k,
        girth_x=girth(hx),
        girth_z=girth(hz),
        distance_bound=distance_bound,
        basis_x=basis_x,
        basis_z=basis_z,
    )


def lifted_product(
    base: BaseMatrix,
    name: str = "",
    family: str = "custom",
    distance_bound: int | None = None,
) -> CssCode:
    """Lifted product LP(B, B*): Bx = [B (x) I, I (x) B*], Bz = [I (x) B, B* (x) I].

    Yields an [[L(nb^2 + mb^2), k]] CSS code with k >= L(nb - mb)^2.  The
    CSS condition is verified on the lifted binary matrices; a violation
    would be an internal error, not a property of the input.
    """
    bstar = conjugate_transpose(base)
    i_nb = identity_base(base.nb, base.lift_size)
    i_mb = identity_base(base.mb, base.lift_size)
    bx = concat_base(kron_base(base, i_nb), kron_base(i_mb, bstar))
    bz = concat_base(kron_base(i_nb, base), kron_base(bstar, i_mb))
    hx = lift(bx)
    hz = lift(bz)
    if not mat_mul(hx, hz.transpose()).is_zero():
        raise AssertionError(
            "lifted product produced a non-commuting pair; construction bug"
        )
    code = make_css_code(hx, hz, name=name, family=family, distance_bound=distance_bound)
    expected_n = base.lift_size * (base.nb**2 + base.mb**2)
    if code.n != expected_n:
        raise AssertionError(f"length {code.n} != L(nb^2+mb^2) = {expected_n}")
    return code


# -- Tanner graph girth ------------------------------------------------------


@njit(cache=True)
def _girth_bfs(var_ptr, var_check, var_edge, check_ptr, check_var, n_vars, n_checks):
    """Shortest cycle via BFS from every variable node.

    Nodes 0..n_vars-1 are variables, the rest checks.  While expanding a
    node at distance d, touching an already-visited node through a non-tree
    edge closes a cycle of length dist(u) + dist(w) + 1; the minimum over
    all roots is the exact girth.  Returns 0 when the graph is acyclic.
    """
    total = n_vars + n_checks
    best = 1 << 30
    dist = np.empty(total, np.int32)
    parent = np.empty(total, np.int64)
    queue = np.empty(total, np.int32)
    for root in range(n_vars):
        if best == 4:
            break
        dist[:] = -1
        dist[root] = 0
        parent[root] = -1
        queue[0] = root
        head, tail = 0, 1
        while head < tail:
            u = queue[head]
            head += 1
            du = dist[u]
            if 2 * du + 1 >= best:
                break
            if u < n_vars:
                lo, hi = var_ptr[u], var_ptr[u + 1]
            else:
                lo, hi = check_ptr[u - n_vars], check_ptr[u - n_vars + 1]
            for idx in range(lo, hi):
                if u < n_vars:
                    w = n_vars + var_check[idx]
                    eid = var_edge[idx]
                else:
                    w = check_var[idx]
                    eid = idx
                if eid == parent[u]:
                    continue
                if dist[w] < 0:
                    dist[w] = du + 1
                    parent[w] = eid
                    queue[tail] = w
                    tail += 1
                else:
                    cyc = du + dist[w] + 1
                    if cyc < best:
                        best = cyc
    return best


def _adjacency(h: BinaryMatrix):
    """CSR-style arrays for the Tanner graph of h (checks = rows)."""
    dense = h.to_dense()
    check_rows, var_cols = np.nonzero(dense)
    order = np.lexsort((var_cols, check_rows))  # group by check, vars ascending
    check_of_edge = check_rows[order].astype(np.int32)
    var_of_edge = var_cols[order].astype(np.int32)
    m, n = h.rows, h.cols
    check_ptr = np.zeros(m + 1, np.int32)
    np.add.at(check_ptr, check_of_edge + 1, 1)
    check_ptr = np.cumsum(check_ptr).astype(np.int32)
    # variable-side view: edge ids grouped by variable
    var_order = np.argsort(var_of_edge, kind="stable").astype(np.int64)
    var_ptr = np.zeros(n + 1, np.int32)
    np.add.at(var_ptr, var_of_edge + 1, 1)
    var_ptr = np.cumsum(var_ptr).astype(np.int32)
    var_edge = var_order.astype(np.int64)
    var_check = check_of_edge[var_order]
    return check_ptr, var_of_edge, check_of_edge, var_ptr, var_check, var_edge


def girth(h: BinaryMatrix) -> float:
    """Length of the shortest Tanner-graph cycle of h (ACYCLIC if none).

    Tanner graphs are bipartite, so the result is even and at least 4.
    """
    check_ptr, check_var, _, var_ptr, var_check, var_edge = _adjacency(h)
    best = _girth_bfs(
        var_ptr, var_check, var_edge, check_ptr, check_var, h.cols, h.rows
    )
    return ACYCLIC if best >= (1 << 30) else int(best)


# -- builtin code registry ---------------------------------------------------

STEANE_MATRIX = BinaryMatrix.from_dense(
    [
        [1, 1, 1, 0, 1, 0, 0],
        [1, 1, 0, 1, 0, 1, 0],
        [1, 0, 1, 1, 0, 0, 1],
    ]
)

# (3,5)-regular base of the [155, 64, 20] Tanner code; its lifted product is
# the [[1054, 140, 20]] code.
TANNER_BASE = BaseMatrix(
    [
        [1, 2, 4, 8, 16],
        [5, 10, 20, 9, 18],
        [25, 19, 7, 14, 28],
    ],
    31,
)

_LP_REGISTRY: dict[str, tuple[str, BaseMatrix, int]] = {
    # name: (family, base matrix, distance bound from the construction tables)
    "LP04-175": ("LP04", BaseMatrix([[0, 0, 0, 0], [0, 1, 2, 5], [0, 6, 3, 1]], 7), 10),
    "LP04-225": ("LP04", BaseMatrix([[0, 0, 0, 0], [0, 1, 6, 7], [0, 4, 5, 2]], 9), 12),
    "LP04-425": ("LP04", BaseMatrix([[0, 0, 0, 0], [0, 1, 2, 11], [0, 8, 12, 13]], 17), 18),
    "LP04-475": ("LP04", BaseMatrix([[0, 0, 0, 0], [0, 2, 6, 9], [0, 16, 7, 11]], 19), 20),
    "LP118-544": ("LP118", BaseMatrix([[0, 0, 0, 0, 0], [0, 2, 4, 7, 11], [0, 3, 10, 14, 15]], 16), 12),
    "LP118-714": ("LP118", BaseMatrix([[0, 0, 0, 0, 0], [0, 4, 5, 7, 17], [0, 14, 18, 12, 11]], 21), 16),
    "LP118-1020": ("LP118", BaseMatrix([[0, 0, 0, 0, 0], [0, 2, 14, 24, 25], [0, 16, 11, 14, 13]], 30), 20),
}

BUILTIN_NAMES: tuple[str, ...] = tuple(_LP_REGISTRY) + ("STEANE",)


def builtin_base(name: str) -> BaseMatrix:
    """Base matrix of a builtin lifted-product code."""
    if name not in _LP_REGISTRY:
        raise KeyError(f"no base matrix for {name!r}")
    return _LP_REGISTRY[name][1]


@lru_cache(maxsize=None)
def builtin_code(name: str) -> CssCode:
    """Construct (and cache) one of the registered codes by name."""
    if name == "STEANE":
        return make_css_code(
            STEANE_MATRIX, STEANE_MATRIX, name="STEANE", family="custom",
            distance_bound=3,
        )
    if name not in _LP_REGISTRY:
        raise KeyError(
            f"unknown code {name!r}; available: {', '.join(BUILTIN_NAMES)}"
        )
    family, base, dmin = _LP_REGISTRY[name]
    return lifted_product(base, name=name, family=family, distance_bound=dmin)


def builtin_names() -> tuple[str, ...]:
    return BUILTIN_NAMES
