"""Divisor-radix block transforms.

A length-N signal is split into N/d contiguous blocks and every block is
projected onto the d rows of a small basis matrix.  Row 0 of the cosine
basis is all ones, so its subband is a running block average; the remaining
rows produce detail subbands.  Applying the same step recursively to the
average subband yields a multi-level pyramid, with no restriction to
radix 2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_ORTHO_TOL = 1e-9


@dataclass(frozen=True)
class DivisorBasis:
    """A d x d real basis, stored row-wise together with the row l2 norms."""

    d: int
    rows: np.ndarray
    row_norms: np.ndarray

    @classmethod
    def from_rows(cls, rows) -> "DivisorBasis":
        rows = np.asarray(rows, dtype=np.float64)
        if rows.ndim != 2 or rows.shape[0] != rows.shape[1]:
            raise ValueError(f"basis must be square, got shape {rows.shape}")
        d = rows.shape[0]
        if d < 2:
            raise ValueError(f"divisor must be >= 2, got {d}")
        norms = np.linalg.norm(rows, axis=1)
        if np.any(norms == 0.0) or not np.all(np.isfinite(rows)):
            raise ValueError("basis matrix is singular")
        if np.linalg.cond(rows) > 1e12:
            raise ValueError("basis matrix is singular or ill-conditioned")
        return cls(d=d, rows=rows, row_norms=norms)

    def is_orthogonal(self, tol: float = _ORTHO_TOL) -> bool:
        gram = self.rows @ self.rows.T
        off = gram - np.diag(np.diag(gram))
        return bool(np.max(np.abs(off)) < tol)


def build_cosine_basis(d: int) -> DivisorBasis:
    """Unnormalized cosine basis: entry (n, m) is cos(pi*n*(2m+1)/(2d)).

    Row 0 is all ones (norm sqrt(d)); rows n >= 1 have norm sqrt(d/2).
    """
    if d < 2:
        raise ValueError(f"divisor must be >= 2, got {d}")
    n = np.arange(d).reshape(-1, 1)
    m = np.arange(d).reshape(1, -1)
    rows = np.cos(np.pi * n * (2 * m + 1) / (2 * d))
    return DivisorBasis.from_rows(rows)


def build_haar_basis() -> DivisorBasis:
    """Unnormalized Haar basis for d=2: rows [1, 1] and [1, -1]."""
    return DivisorBasis.from_rows([[1.0, 1.0], [1.0, -1.0]])


@dataclass(frozen=True)
class DecompositionPlan:
    """Ordered divisor list with chained divisibility against the signal length."""

    divisors: tuple[int, ...]
    signal_len: int

    def __post_init__(self):
        object.__setattr__(self, "divisors", tuple(int(d) for d in self.divisors))
        if len(self.divisors) < 1:
            raise ValueError("plan needs at least one divisor")
        n = self.signal_len
        for j, d in enumerate(self.divisors):
            if d < 2:
                raise ValueError(f"divisor must be >= 2, got {d}")
            if n % d != 0:
                raise ValueError(
                    f"level {j + 1}: length {n} not divisible by divisor {d}"
                )
            n //= d

    @property
    def levels(self) -> int:
        return len(self.divisors)

    def level_len(self, j: int) -> int:
        """Subband length after level j (1-based); j=0 gives the signal length."""
        n = self.signal_len
        for d in self.divisors[:j]:
            n //= d
        return n


@dataclass
class SubbandPyramid:
    """Multi-level decomposition: one deepest average plus details per level.

    ``details[j]`` holds the d_{j+1}-1 detail vectors of level j+1, each of
    length ``plan.level_len(j+1)``.  Serialization order is deepest average
    first, then details from the deepest level down to level 1.
    """

    deepest_average: np.ndarray
    details: list[list[np.ndarray]]
    plan: DecompositionPlan

    def check_shapes(self):
        k = self.plan.levels
        if len(self.details) != k:
            raise ValueError(f"expected {k} detail levels, got {len(self.details)}")
        if len(self.deepest_average) != self.plan.level_len(k):
            raise ValueError("deepest average length does not match plan")
        for j in range(k):
            d = self.plan.divisors[j]
            want = self.plan.level_len(j + 1)
            if len(self.details[j]) != d - 1:
                raise ValueError(f"level {j + 1}: expected {d - 1} detail vectors")
            for w in self.details[j]:
                if len(w) != want:
                    raise ValueError(f"level {j + 1}: detail length != {want}")

    def serialize(self) -> np.ndarray:
        """Flatten to the canonical order: v^k, w^k_i ..., down to w^1_i."""
        parts = [np.asarray(self.deepest_average)]
        for level in reversed(self.details):
            parts.extend(np.asarray(w) for w in level)
        return np.concatenate(parts)

    @classmethod
    def from_serialized(cls, flat, plan: DecompositionPlan) -> "SubbandPyramid":
        flat = np.asarray(flat)
        if len(flat) != plan.signal_len:
            raise ValueError(
                f"serialized length {len(flat)} != plan length {plan.signal_len}"
            )
        k = plan.levels
        pos = plan.level_len(k)
        deepest = flat[:pos].copy()
        details: list[list[np.ndarray]] = [[] for _ in range(k)]
        for j in range(k, 0, -1):
            m = plan.level_len(j)
            d = plan.divisors[j - 1]
            level = []
            for _ in range(d - 1):
                level.append(flat[pos : pos + m].copy())
                pos += m
            details[j - 1] = level
        return cls(deepest_average=deepest, details=details, plan=plan)


def _check_block_input(n: int, basis: DivisorBasis):
    if n % basis.d != 0:
        raise ValueError(f"length {n} not divisible by divisor {basis.d}")


def forward_block(x, basis: DivisorBasis) -> np.ndarray:
    """One transform level: d subbands of length N/d, concatenated.

    Subband i entry m is the inner product of basis row i with the m-th
    length-d block of ``x``.  Object-dtype inputs take a scalar path so the
    arithmetic can run on instrumented number types.
    """
    x = np.asarray(x)
    _check_block_input(x.shape[0], basis)
    if x.dtype == object:
        return _forward_block_scalar(x, basis)
    blocks = x.reshape(-1, basis.d)
    return (blocks @ basis.rows.T).T.reshape(-1)


def _forward_block_scalar(x, basis: DivisorBasis) -> np.ndarray:
    d = basis.d
    rows = basis.rows.tolist()
    xs = list(x)
    nblk = len(xs) // d
    out = [None] * len(xs)
    for i in range(d):
        row = rows[i]
        for m in range(nblk):
            blk = xs[m * d : (m + 1) * d]
            acc = blk[0] * row[0]
            for t in range(1, d):
                acc = acc + blk[t] * row[t]
            out[i * nblk + m] = acc
    res = np.empty(len(xs), dtype=object)
    res[:] = out
    return res


def inverse_block(s, basis: DivisorBasis) -> np.ndarray:
    """Exact inverse of :func:`forward_block`.

    Orthogonal-row bases invert analytically per block as
    sum_i (s_i / ||b_i||^2) * b_i; anything else falls back to the dense
    d x d inverse.
    """
    s = np.asarray(s, dtype=np.float64)
    _check_block_input(s.shape[0], basis)
    d = basis.d
    sub = s.reshape(d, -1)
    if basis.is_orthogonal():
        binv = basis.rows.T / (basis.row_norms**2)
    else:
        try:
            binv = np.linalg.inv(basis.rows)
        except np.linalg.LinAlgError as exc:
            raise ValueError("basis matrix is singular") from exc
    return (binv @ sub).T.reshape(-1)


def _cosine_bases_for(plan: DecompositionPlan) -> list[DivisorBasis]:
    return [build_cosine_basis(d) for d in plan.divisors]


def _check_bases(plan: DecompositionPlan, bases) -> list[DivisorBasis]:
    if bases is None:
        return _cosine_bases_for(plan)
    bases = list(bases)
    if len(bases) != plan.levels:
        raise ValueError(f"expected {plan.levels} bases, got {len(bases)}")
    for j, (d, b) in enumerate(zip(plan.divisors, bases)):
        if b.d != d:
            raise ValueError(f"level {j + 1}: basis d={b.d} != plan divisor {d}")
    return bases


def decompose(x, plan: DecompositionPlan, bases=None) -> SubbandPyramid:
    """Multi-level decomposition: each level transforms the previous average."""
    x = np.asarray(x, dtype=np.float64)
    if len(x) != plan.signal_len:
        raise ValueError(f"signal length {len(x)} != plan length {plan.signal_len}")
    bases = _check_bases(plan, bases)
    v = x
    details: list[list[np.ndarray]] = []
    for d, basis in zip(plan.divisors, bases):
        s = forward_block(v, basis)
        m = len(v) // d
        v = s[:m]
        details.append([s[i * m : (i + 1) * m] for i in range(1, d)])
    return SubbandPyramid(deepest_average=v, details=details, plan=plan)


def reconstruct(p: SubbandPyramid, bases=None) -> np.ndarray:
    """Inverse of :func:`decompose`."""
    p.check_shapes()
    bases = _check_bases(p.plan, bases)
    v = np.asarray(p.deepest_average, dtype=np.float64)
    for j in range(p.plan.levels - 1, -1, -1):
        s = np.concatenate([v] + [np.asarray(w) for w in p.details[j]])
        v = inverse_block(s, bases[j])
    return v


# -- 2D ----------------------------------------------------------------------


@dataclass
class Subband2D:
    """2D pyramid: per level the d^2-1 detail blocks of the d x d block grid,
    in row-major grid order with the (0, 0) average block excluded."""

    deepest_average: np.ndarray
    details: list[list[np.ndarray]]
    row_plan: DecompositionPlan
    col_plan: DecompositionPlan


def _forward_axis0(mat: np.ndarray, basis: DivisorBasis) -> np.ndarray:
    n, l = mat.shape
    blocks = mat.reshape(n // basis.d, basis.d, l)
    sub = np.einsum("rd,mdl->rml", basis.rows, blocks)
    return sub.reshape(n, l)


def _inverse_axis0(mat: np.ndarray, basis: DivisorBasis) -> np.ndarray:
    n, l = mat.shape
    d = basis.d
    if basis.is_orthogonal():
        binv = basis.rows.T / (basis.row_norms**2)
    else:
        binv = np.linalg.inv(basis.rows)
    sub = mat.reshape(d, n // d, l)
    blocks = np.einsum("tr,rml->mtl", binv, sub)
    return blocks.reshape(n, l)


def _check_2d_plans(row_plan: DecompositionPlan, col_plan: DecompositionPlan):
    if row_plan.divisors != col_plan.divisors:
        raise ValueError("2D decomposition requires equal per-level divisors")


def decompose_2d(X, row_plan: DecompositionPlan, col_plan: DecompositionPlan,
                 bases=None) -> Subband2D:
    """Separable 2D decomposition: per level, transform every column then
    every row of the current average block, then recurse on the top-left
    average block."""
    X = np.asarray(X, dtype=np.float64)
    _check_2d_plans(row_plan, col_plan)
    if X.shape != (row_plan.signal_len, col_plan.signal_len):
        raise ValueError(
            f"matrix shape {X.shape} != plans "
            f"({row_plan.signal_len}, {col_plan.signal_len})"
        )
    bases = _check_bases(row_plan, bases)
    v = X
    details: list[list[np.ndarray]] = []
    for d, basis in zip(row_plan.divisors, bases):
        s = _forward_axis0(_forward_axis0(v.T, basis).T, basis)
        nb, lb = v.shape[0] // d, v.shape[1] // d
        level = []
        for p in range(d):
            for q in range(d):
                if p == 0 and q == 0:
                    continue
                level.append(s[p * nb : (p + 1) * nb, q * lb : (q + 1) * lb].copy())
        details.append(level)
        v = s[:nb, :lb]
    return Subband2D(deepest_average=v, details=details,
                     row_plan=row_plan, col_plan=col_plan)


def reconstruct_2d(s2: Subband2D, bases=None) -> np.ndarray:
    """Inverse of :func:`decompose_2d`."""
    _check_2d_plans(s2.row_plan, s2.col_plan)
    bases = _check_bases(s2.row_plan, bases)
    v = np.asarray(s2.deepest_average, dtype=np.float64)
    for j in range(s2.row_plan.levels - 1, -1, -1):
        d = s2.row_plan.divisors[j]
        nb, lb = v.shape
        s = np.empty((nb * d, lb * d), dtype=np.float64)
        s[:nb, :lb] = v
        it = iter(s2.details[j])
        for p in range(d):
            for q in range(d):
                if p == 0 and q == 0:
                    continue
                s[p * nb : (p + 1) * nb, q * lb : (q + 1) * lb] = next(it)
        v = _inverse_axis0(_inverse_axis0(s.T, basis=bases[j]).T, bases[j])
    return v
