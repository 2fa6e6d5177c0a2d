"""Spin operators, tensor embedding, interval Hamiltonians, Sz sectors.

Basis conventions, fixed once and used everywhere (including file formats):

* single-site basis ordered by descending magnetization: index 0 is m = s,
  index d-1 is m = -s;
* in tensor products the leftmost site is the slowest-varying index, so the
  product state |a_0 a_1 ... a_{L-1}> has index sum(a_i * d**(L-1-i)).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionCapError, ValidationError
from .numerics import (
    OrthonormalBasis,
    SparseHermitian,
    hermitian_eig,
    kernel_basis,
    require_hermitian,
)

# Full-space sparse matrices are refused above this dimension; use the
# sector-restricted constructors instead.
DEFAULT_AMBIENT_CAP = 2_000_000


@dataclass(frozen=True)
class SpinRep:
    """Spin-s matrices in the descending-m basis."""

    s: float
    d: int
    S3: np.ndarray
    Splus: np.ndarray
    Sminus: np.ndarray


def spin_operators(s: float) -> SpinRep:
    """Standard spin-s representation: S3 diagonal, ladder operators with
    matrix elements sqrt(s(s+1) - m(m+1))."""
    two_s = 2 * s
    if abs(two_s - round(two_s)) > 1e-12 or s < 0.5:
        raise ValidationError(f"spin must be a half-integer >= 1/2, got {s}")
    d = int(round(two_s)) + 1
    m = s - np.arange(d)
    S3 = np.diag(m.astype(complex))
    Sp = np.zeros((d, d), dtype=complex)
    for k in range(1, d):
        Sp[k - 1, k] = np.sqrt(s * (s + 1) - m[k] * (m[k] + 1))
    return SpinRep(s=float(s), d=d, S3=S3, Splus=Sp, Sminus=Sp.conj().T)


def heisenberg_coupling(rep: SpinRep) -> np.ndarray:
    """Two-site S.S = (S+ S- + S- S+)/2 + S3 S3 on the d^2 product space."""
    return (
        0.5 * (np.kron(rep.Splus, rep.Sminus) + np.kron(rep.Sminus, rep.Splus))
        + np.kron(rep.S3, rep.S3)
    )


@dataclass(frozen=True, order=True)
class SiteInterval:
    """Closed integer interval [a, b] of chain sites."""

    a: int
    b: int

    def __post_init__(self):
        if self.a > self.b:
            raise ValidationError(f"empty interval [{self.a}, {self.b}]")

    @property
    def length(self) -> int:
        return self.b - self.a + 1

    def contains(self, other: "SiteInterval") -> bool:
        return self.a <= other.a and other.b <= self.b

    def __str__(self):
        return f"[{self.a},{self.b}]"


def _embed_coo(h: np.ndarray, d: int, left_dim: int, right_dim: int):
    """Upper-triangle COO of I_left (x) h (x) I_right.

    Only h entries with row <= col are walked; the embedding preserves the
    triangle because the site blocks contribute equal offsets to row and
    column.
    """
    p, q = np.nonzero(h)
    keep = p <= q
    p, q, v = p[keep], q[keep], h[p[keep], q[keep]]
    block = np.arange(left_dim, dtype=np.int64) * (h.shape[0] * right_dim)
    inner = np.arange(right_dim, dtype=np.int64)
    base = (block[:, None] + inner[None, :]).ravel()
    rows = (base[None, :] + (p * right_dim)[:, None]).ravel()
    cols = (base[None, :] + (q * right_dim)[:, None]).ravel()
    vals = np.broadcast_to(v[:, None], (v.size, base.size)).ravel()
    return rows, cols, vals


def embed_two_site(h: np.ndarray, bond: int, ambient: SiteInterval,
                   d: int, cap: int = DEFAULT_AMBIENT_CAP) -> SparseHermitian:
    """Embed a two-site operator acting on sites (bond, bond+1) into the
    ambient interval by tensoring with identities."""
    if not (ambient.a <= bond and bond + 1 <= ambient.b):
        raise ValidationError(
            f"bond ({bond},{bond + 1}) outside ambient interval {ambient}"
        )
    h = require_hermitian(h, "two-site operator")
    if h.shape[0] != d * d:
        raise ValidationError(
            f"two-site operator has dim {h.shape[0]}, expected {d * d}"
        )
    L = ambient.length
    dim = d ** L
    if dim > cap:
        raise DimensionCapError(f"ambient dimension {dim} exceeds cap {cap}")
    pos = bond - ambient.a
    rows, cols, vals = _embed_coo(h, d, d ** pos, d ** (L - 2 - pos))
    return SparseHermitian(dim, *_sort_upper(rows, cols, vals))


def _sort_upper(rows, cols, vals):
    order = np.lexsort((cols, rows))
    return rows[order], cols[order], vals[order]


@dataclass
class ChainHamiltonian:
    """Sum of embedded bond terms of a model over a support interval,
    acting on the Hilbert space of the ambient interval."""

    model: object
    ambient: SiteInterval
    support: SiteInterval
    matrix: SparseHermitian

    @property
    def dim(self) -> int:
        return self.matrix.dim

    def to_dense(self) -> np.ndarray:
        return self.matrix.to_dense()


def assemble(model, support: SiteInterval, ambient: SiteInterval | None = None,
             cap: int = DEFAULT_AMBIENT_CAP) -> ChainHamiltonian:
    """H(support) = sum of h(x, x+1) over bonds inside the support, as an
    operator on the ambient interval. A length-1 support gives the zero
    operator."""
    if ambient is None:
        ambient = support
    if not ambient.contains(support):
        raise ValidationError(f"support {support} not inside ambient {ambient}")
    d = model.d_loc
    L = ambient.length
    dim = d ** L
    if dim > cap:
        raise DimensionCapError(f"ambient dimension {dim} exceeds cap {cap}")
    h = model.interaction.matrix
    all_rows, all_cols, all_vals = [], [], []
    for bond in range(support.a, support.b):
        pos = bond - ambient.a
        r, c, v = _embed_coo(h, d, d ** pos, d ** (L - 2 - pos))
        all_rows.append(r)
        all_cols.append(c)
        all_vals.append(v)
    if all_rows:
        matrix = SparseHermitian.from_coo(
            dim,
            np.concatenate(all_rows),
            np.concatenate(all_cols),
            np.concatenate(all_vals),
        )
    else:
        matrix = SparseHermitian(dim, [], [], [])
    return ChainHamiltonian(model=model, ambient=ambient, support=support,
                            matrix=matrix)


@dataclass
class SzSectorIndex:
    """Product-basis states with a fixed total magnetization."""

    value: float
    indices: np.ndarray  # ascending == lexicographic within the sector


def _digit(indices, site_pos, L, d):
    return (indices // d ** (L - 1 - site_pos)) % d


def sz_sectors(model, interval: SiteInterval) -> list[SzSectorIndex]:
    """Partition of the product basis by total S3, descending in value.

    Requires the model to declare S3 conservation; the declaration is
    verified numerically on a 3-site chain before trusting it.
    """
    if not model.conserves_sz:
        raise ValidationError(
            f"model {model.name!r} does not declare S3 conservation; "
            "use full-space solvers"
        )
    validate_sz_conservation(model)
    d = model.d_loc
    L = interval.length
    dim = d ** L
    idx = np.arange(dim, dtype=np.int64)
    digit_sum = np.zeros(dim, dtype=np.int64)
    for pos in range(L):
        digit_sum += _digit(idx, pos, L, d)
    sectors = []
    for key in range(L * (d - 1) + 1):
        members = np.flatnonzero(digit_sum == key)
        if members.size:
            sectors.append(
                SzSectorIndex(value=L * model.spin - key, indices=members)
            )
    return sectors


_SZ_VALIDATED: set = set()


def validate_sz_conservation(model, L: int = 3, tol: float = 1e-10):
    """Check ||[H(1,L), total S3]||_max <= tol on a short chain."""
    key = id(model)
    if key in _SZ_VALIDATED:
        return
    rep = spin_operators(model.spin)
    H = assemble(model, SiteInterval(1, L)).to_dense()
    S3tot = total_sz_dense(rep, L)
    comm = H @ S3tot - S3tot @ H
    dev = float(np.abs(comm).max())
    if dev > tol:
        raise ValidationError(
            f"model {model.name!r} declares S3 conservation but "
            f"||[H, S3_tot]||_max = {dev:.3e} on {L} sites"
        )
    _SZ_VALIDATED.add(key)


def total_sz_dense(rep: SpinRep, L: int) -> np.ndarray:
    S3tot = np.zeros((rep.d ** L, rep.d ** L), dtype=complex)
    for pos in range(L):
        S3tot += np.kron(
            np.kron(np.eye(rep.d ** pos), rep.S3),
            np.eye(rep.d ** (L - 1 - pos)),
        )
    return S3tot


def sector_hamiltonian(model, support: SiteInterval, sector: SzSectorIndex,
                       ambient: SiteInterval | None = None) -> SparseHermitian:
    """H(support) restricted to one Sz sector of the ambient interval,
    built directly from the bond terms (the full-space matrix is never
    materialized)."""
    if ambient is None:
        ambient = support
    if not ambient.contains(support):
        raise ValidationError(f"support {support} not inside ambient {ambient}")
    d = model.d_loc
    L = ambient.length
    h = model.interaction.matrix
    S = sector.indices
    ns = S.size
    all_rows, all_cols, all_vals = [], [], []
    p, q = np.nonzero(h)
    keep = p <= q  # upper triangle of h maps to the upper triangle of H
    p, q, v = p[keep], q[keep], h[p[keep], q[keep]]
    for bond in range(support.a, support.b):
        pos = bond - ambient.a
        stride = d ** (L - 2 - pos)
        local2 = (S // stride) % (d * d)
        for pe, qe, ve in zip(p, q, v):
            col_pos = np.flatnonzero(local2 == qe)
            if not col_pos.size:
                continue
            row_full = S[col_pos] + (int(pe) - int(qe)) * stride
            row_pos = np.searchsorted(S, row_full)
            if np.any(row_pos >= ns) or np.any(S[np.minimum(row_pos, ns - 1)] != row_full):
                raise ValidationError(
                    "bond term leaves the Sz sector; model symmetry declaration "
                    "is inconsistent"
                )
            all_rows.append(row_pos)
            all_cols.append(col_pos)
            all_vals.append(np.full(col_pos.size, ve))
    if all_rows:
        return SparseHermitian.from_coo(
            ns,
            np.concatenate(all_rows),
            np.concatenate(all_cols),
            np.concatenate(all_vals),
        )
    return SparseHermitian(ns, [], [], [])


def embed_kernel_basis(K: np.ndarray, left_dim: int, right_dim: int,
                       span_tag: str = "") -> OrthonormalBasis:
    """Lift an orthonormal basis on a middle tensor factor to the full
    space: columns of I_left (x) K (x) I_right."""
    V = np.kron(np.kron(np.eye(left_dim), K), np.eye(right_dim))
    return OrthonormalBasis(V.astype(np.complex128), span_tag=span_tag)


@dataclass
class FrustrationReport:
    """Outcome of the frustration-freeness gate."""

    model_name: str
    interaction_psd: bool
    min_interaction_eigenvalue: float
    ground_degeneracy: dict[int, int] = field(default_factory=dict)
    intersection_dim: dict[int, int] = field(default_factory=dict)
    passed: bool = True
    failing_length: int | None = None
    reason: str = ""


def check_frustration_free(model, L_max: int,
                           dense_cap: int = 4096) -> FrustrationReport:
    """Validate the two frustration-freeness assumptions up to L_max sites:
    h >= 0, dim Ker H(1,L) > 0, and Ker H(1,L) equals the intersection of
    the kernels of the embedded bond terms."""
    if L_max < 2:
        raise ValidationError("L_max must be >= 2")
    d = model.d_loc
    if d ** L_max > dense_cap:
        raise DimensionCapError(
            f"frustration check at L={L_max} needs dense dim {d ** L_max}"
        )
    h = model.interaction.matrix
    w_h = hermitian_eig(h).eigenvalues
    report = FrustrationReport(
        model_name=model.name,
        interaction_psd=bool(w_h[0] >= -1e-10),
        min_interaction_eigenvalue=float(w_h[0]),
    )
    if not report.interaction_psd:
        report.passed = False
        report.reason = f"interaction not positive: min eigenvalue {w_h[0]:.3e}"
        return report
    for L in range(2, L_max + 1):
        interval = SiteInterval(1, L)
        H = assemble(model, interval)
        ker = kernel_basis(H.matrix)
        report.ground_degeneracy[L] = ker.dim
        if ker.dim == 0:
            report.passed = False
            report.failing_length = L
            report.reason = f"no ground state at L={L}"
            return report
        # intersection of bond kernels, computed from the projectors rather
        # than the energies
        acc = np.zeros((H.dim, H.dim), dtype=complex)
        for bond in range(1, L):
            term = embed_two_site(h, bond, interval, d)
            kb = kernel_basis(term)
            acc += np.eye(H.dim) - kb.vectors @ kb.vectors.conj().T
        inter = kernel_basis(acc)
        report.intersection_dim[L] = inter.dim
        if inter.dim != ker.dim:
            report.passed = False
            report.failing_length = L
            report.reason = (
                f"kernel dim {ker.dim} != bond-kernel intersection dim "
                f"{inter.dim} at L={L}"
            )
            return report
        declared = getattr(model, "ground_degeneracy", None)
        if declared is not None:
            expected = declared(L)
            if expected != ker.dim:
                report.passed = False
                report.failing_length = L
                report.reason = (
                    f"declared degeneracy {expected} != computed {ker.dim} "
                    f"at L={L}"
                )
                return report
    return report
