"""Dense and sparse Hermitian eigensolvers, kernel extraction, subspace tools.

Everything downstream (Hamiltonian assembly, ground projectors, overlap
spectra, gap tables) is built on the four operations here:

    hermitian_eig   full dense spectrum with orthonormal eigenvectors
    lanczos_lowest  k lowest eigenvalues of a sparse operator, optionally
                    restricted to the orthogonal complement of a given basis
    kernel_basis    orthonormal basis of the numerical kernel
    project_onto    orthogonal projection onto a stored basis

Dense work goes through LAPACK (``numpy.linalg``); the sparse matrix-vector
product dispatches to the kernels in :mod:`spingap.backend`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .backend import csr_matvec
from .errors import (
    ConvergenceError,
    DimensionCapError,
    NumericalAmbiguityError,
    ValidationError,
)

# Dense eigensolves refuse above this dimension; larger problems must go
# through the sparse Lanczos path (with sector reduction upstream).
DEFAULT_DENSE_CAP = 4096

_HERMITICITY_RTOL = 1e-12
_ORTHONORMALITY_TOL = 1e-10


def max_abs(A: np.ndarray) -> float:
    return float(np.abs(A).max()) if A.size else 0.0


def require_hermitian(A: np.ndarray, what: str = "matrix") -> np.ndarray:
    """Validate the Hermiticity invariant and return A as complex128."""
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValidationError(f"{what} must be square, got shape {A.shape}")
    if not np.all(np.isfinite(A.real)) or (
        np.iscomplexobj(A) and not np.all(np.isfinite(A.imag))
    ):
        raise ValidationError(f"{what} contains non-finite entries")
    A = A.astype(np.complex128, copy=False)
    asym = max_abs(A - A.conj().T)
    if asym > _HERMITICITY_RTOL * max(1.0, max_abs(A)):
        raise ValidationError(
            f"{what} is not Hermitian: max |A - A^dag| = {asym:.3e}"
        )
    return A


class SparseHermitian:
    """Hermitian matrix stored as coalesced upper-triangle COO entries.

    Only entries with row <= col are kept; the lower triangle is implied by
    conjugate symmetry. ``csr()`` materializes the full matrix in CSR form
    for the matvec kernels.
    """

    def __init__(self, dim, rows, cols, vals):
        self.dim = int(dim)
        self.rows = np.asarray(rows, dtype=np.int64)
        self.cols = np.asarray(cols, dtype=np.int64)
        self.vals = np.asarray(vals, dtype=np.complex128)
        self._csr = None
        self._validate()

    @classmethod
    def from_coo(cls, dim, rows, cols, vals) -> "SparseHermitian":
        """Build from arbitrary COO data: folds the lower triangle onto the
        upper one (conjugating), coalesces duplicates, drops exact zeros."""
        rows = np.asarray(rows, dtype=np.int64).copy()
        cols = np.asarray(cols, dtype=np.int64).copy()
        vals = np.asarray(vals, dtype=np.complex128).copy()
        lower = rows > cols
        rows[lower], cols[lower] = cols[lower], rows[lower]
        vals[lower] = vals[lower].conj()
        rows, cols, vals = _coalesce(rows, cols, vals)
        return cls(dim, rows, cols, vals)

    @classmethod
    def from_dense(cls, A) -> "SparseHermitian":
        A = require_hermitian(A)
        r, c = np.nonzero(A)
        keep = r <= c
        return cls.from_coo(A.shape[0], r[keep], c[keep], A[r[keep], c[keep]])

    def _validate(self):
        if self.dim < 1:
            raise ValidationError("dimension must be >= 1")
        if not (self.rows.shape == self.cols.shape == self.vals.shape):
            raise ValidationError("COO arrays must have equal length")
        if self.rows.size:
            if self.rows.min() < 0 or self.cols.max() >= self.dim:
                raise ValidationError("COO index out of range")
            if np.any(self.rows > self.cols):
                raise ValidationError("entries must satisfy row <= col")
            pairs = self.rows * self.dim + self.cols
            if np.any(np.diff(np.sort(pairs)) == 0):
                raise ValidationError("duplicate (row, col) entries")
            diag = self.rows == self.cols
            scale = max(1.0, max_abs(self.vals))
            if np.abs(self.vals[diag].imag).max(initial=0.0) > 1e-12 * scale:
                raise ValidationError("diagonal entries must be real")
        if not np.all(np.isfinite(self.vals)):
            raise ValidationError("non-finite values")

    @property
    def nnz_stored(self) -> int:
        return int(self.vals.size)

    def to_dense(self) -> np.ndarray:
        A = np.zeros((self.dim, self.dim), dtype=np.complex128)
        A[self.rows, self.cols] = self.vals
        off = self.rows != self.cols
        A[self.cols[off], self.rows[off]] = self.vals[off].conj()
        return A

    def csr(self):
        """(indptr, indices, data) of the Hermitian-completed matrix."""
        if self._csr is None:
            off = self.rows != self.cols
            r = np.concatenate([self.rows, self.cols[off]])
            c = np.concatenate([self.cols, self.rows[off]])
            v = np.concatenate([self.vals, self.vals[off].conj()])
            order = np.lexsort((c, r))
            r, c, v = r[order], c[order], v[order]
            indptr = np.zeros(self.dim + 1, dtype=np.int64)
            np.cumsum(np.bincount(r, minlength=self.dim), out=indptr[1:])
            self._csr = (indptr, c, v)
        return self._csr

    def matvec(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.complex128)
        if x.shape != (self.dim,):
            raise ValidationError(f"vector shape {x.shape} != ({self.dim},)")
        indptr, indices, data = self.csr()
        return csr_matvec(indptr, indices, data, x)

    def norm_inf_estimate(self) -> float:
        """Max absolute row sum of the completed matrix (upper bound on the
        spectral radius); used to scale tolerances."""
        if not self.vals.size:
            return 0.0
        s = np.zeros(self.dim)
        np.add.at(s, self.rows, np.abs(self.vals))
        off = self.rows != self.cols
        np.add.at(s, self.cols[off], np.abs(self.vals[off]))
        return float(s.max())

    def __add__(self, other: "SparseHermitian") -> "SparseHermitian":
        if not isinstance(other, SparseHermitian) or other.dim != self.dim:
            return NotImplemented
        return SparseHermitian.from_coo(
            self.dim,
            np.concatenate([self.rows, other.rows]),
            np.concatenate([self.cols, other.cols]),
            np.concatenate([self.vals, other.vals]),
        )


def _coalesce(rows, cols, vals):
    if not rows.size:
        return rows, cols, vals
    order = np.lexsort((cols, rows))
    rows, cols, vals = rows[order], cols[order], vals[order]
    boundary = np.empty(rows.size, dtype=bool)
    boundary[0] = True
    boundary[1:] = (rows[1:] != rows[:-1]) | (cols[1:] != cols[:-1])
    starts = np.flatnonzero(boundary)
    summed = np.add.reduceat(vals, starts)
    rows, cols = rows[starts], cols[starts]
    keep = summed != 0.0
    return rows[keep], cols[keep], summed[keep]


@dataclass(frozen=True)
class OrthonormalBasis:
    """Orthonormal columns spanning a subspace of the ambient space."""

    vectors: np.ndarray  # (ambient_dim, k), complex128
    span_tag: str = ""

    def __post_init__(self):
        V = np.asarray(self.vectors, dtype=np.complex128)
        if V.ndim != 2:
            raise ValidationError("basis must be a 2d array of column vectors")
        object.__setattr__(self, "vectors", V)
        if V.shape[1]:
            gram = V.conj().T @ V
            dev = max_abs(gram - np.eye(V.shape[1]))
            if dev > _ORTHONORMALITY_TOL:
                raise ValidationError(
                    f"basis not orthonormal: max |V^dag V - I| = {dev:.3e}"
                )

    @property
    def ambient_dim(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


def project_onto(basis: OrthonormalBasis, v: np.ndarray) -> np.ndarray:
    """Orthogonal projection V V^dag v of a vector onto the basis span."""
    v = np.asarray(v, dtype=np.complex128)
    if v.shape != (basis.ambient_dim,):
        raise ValidationError(
            f"vector shape {v.shape} does not match ambient dim {basis.ambient_dim}"
        )
    if basis.dim == 0:
        return np.zeros_like(v)
    V = basis.vectors
    return V @ (V.conj().T @ v)


@dataclass
class SpectralDecomposition:
    """Eigenpairs in ascending eigenvalue order with per-pair residuals."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns
    residuals: np.ndarray
    converged: bool = True
    breakdown: bool = False
    method: str = "dense"

    def validate(self, A=None, tol: float = 1e-9):
        """Check the stored invariants (ascending order, orthonormal columns,
        and, when A is given, the reconstruction bound)."""
        if np.any(np.diff(self.eigenvalues) < 0):
            raise ValidationError("eigenvalues not ascending")
        V = self.eigenvectors
        if V.shape[1]:
            dev = max_abs(V.conj().T @ V - np.eye(V.shape[1]))
            if dev > _ORTHONORMALITY_TOL:
                raise ValidationError(f"eigenvectors not orthonormal ({dev:.3e})")
        if A is not None:
            A = np.asarray(A, dtype=np.complex128)
            rec = V @ np.diag(self.eigenvalues) @ V.conj().T
            err = max_abs(A - rec)
            if err > tol * max(1.0, max_abs(A)):
                raise ValidationError(f"reconstruction error {err:.3e}")
        return self


def _eigh(A) -> tuple[np.ndarray, np.ndarray]:
    """Validated dense eigendecomposition without the residual matmul
    (the hot path for kernel extraction and sector scans)."""
    if isinstance(A, SparseHermitian):
        if A.dim > DEFAULT_DENSE_CAP:
            raise DimensionCapError(
                f"dense eigensolve refused at dim {A.dim} > {DEFAULT_DENSE_CAP}; "
                "use lanczos_lowest"
            )
        A = A.to_dense()
    A = require_hermitian(A)
    try:
        return np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise ConvergenceError(f"dense eigensolver failed: {exc}") from exc


def hermitian_eig(A) -> SpectralDecomposition:
    """Full spectrum of a dense Hermitian matrix, ascending, with residuals.

    SparseHermitian input is densified (subject to the dense cap).
    """
    if isinstance(A, SparseHermitian):
        A = A.to_dense() if A.dim <= DEFAULT_DENSE_CAP else A
    w, V = _eigh(A)
    resid = np.linalg.norm(np.asarray(A, dtype=np.complex128) @ V - V * w, axis=0)
    return SpectralDecomposition(w, V, resid, method="dense")


def _matvec_of(A):
    if isinstance(A, SparseHermitian):
        return A.matvec, A.dim, A.norm_inf_estimate()
    A = require_hermitian(A)
    return (lambda x: A @ x), A.shape[0], float(np.abs(A).sum(axis=1).max())


def lanczos_lowest(
    A,
    k: int = 1,
    deflate: OrthonormalBasis | None = None,
    tol: float = 1e-10,
    max_iter: int | None = None,
    seed: int = 7,
) -> SpectralDecomposition:
    """k lowest eigenpairs of A restricted to the complement of ``deflate``.

    Lanczos with full reorthogonalization against all stored Krylov vectors
    and the deflation basis at every step; the start vector is drawn from a
    fixed-seed generator so runs are reproducible. If the complement is
    exhausted before k pairs converge, the pairs found are returned with
    ``breakdown=True``.
    """
    if k < 1:
        raise ValidationError("k must be >= 1")
    matvec, n, scale = _matvec_of(A)
    D = None
    if deflate is not None and deflate.dim:
        if deflate.ambient_dim != n:
            raise ValidationError("deflation basis dimension mismatch")
        D = deflate.vectors
    n_deflate = 0 if D is None else D.shape[1]
    complement = n - n_deflate
    if complement <= 0:
        return SpectralDecomposition(
            np.zeros(0), np.zeros((n, 0), dtype=np.complex128), np.zeros(0),
            converged=True, breakdown=True, method="lanczos",
        )
    if max_iter is None:
        max_iter = min(complement, max(300, 20 * k))
    max_iter = min(max_iter, complement)

    def project_out(w):
        if D is not None:
            w = w - D @ (D.conj().T @ w)
        return w

    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v = project_out(v.astype(np.complex128))
    nv = np.linalg.norm(v)
    if nv < 1e-12:  # pathological but possible for tiny complements
        v = project_out(rng.standard_normal(n) + 0j)
        nv = np.linalg.norm(v)
    v /= nv

    V = np.empty((n, min(max_iter, 64)), dtype=np.complex128)
    alphas: list[float] = []
    betas: list[float] = []
    breakdown_tol = 1e-13 * max(1.0, scale)
    exhausted = False

    j = 0
    while j < max_iter:
        if j >= V.shape[1]:
            V = np.concatenate(
                [V, np.empty((n, min(max_iter, V.shape[1]) ), dtype=np.complex128)],
                axis=1,
            )
        V[:, j] = v
        w = project_out(matvec(v))
        alpha = float(np.vdot(v, w).real)
        w -= alpha * v
        if j > 0 and betas[j - 1] != 0.0:
            w -= betas[j - 1] * V[:, j - 1]
        # two passes of full reorthogonalization
        for _ in range(2):
            coeffs = V[:, : j + 1].conj().T @ w
            w -= V[:, : j + 1] @ coeffs
            w = project_out(w)
        alphas.append(alpha)
        beta = float(np.linalg.norm(w))

        done = False
        if j + 1 >= k or j + 1 == max_iter or beta <= breakdown_tol:
            theta, U = _tridiag_eig(alphas, betas[: j])
            est = np.abs(beta * U[-1, : min(k, j + 1)])
            if j + 1 >= k and np.all(est <= 0.5 * tol):
                done = True
        if beta <= breakdown_tol and not done:
            if j + 1 >= complement:
                exhausted = True
                done = True
            else:
                # invariant subspace hit before exhausting the complement:
                # restart with a fresh direction (beta = 0 keeps T block
                # tridiagonal, which eigh handles fine)
                w = project_out(
                    rng.standard_normal(n) + 1j * rng.standard_normal(n)
                )
                coeffs = V[:, : j + 1].conj().T @ w
                w -= V[:, : j + 1] @ coeffs
                w = project_out(w)
                nw = np.linalg.norm(w)
                if nw < 1e-12:
                    exhausted = True
                    done = True
                else:
                    w /= nw
                    beta = 0.0
        betas.append(beta)
        if done:
            break
        v = w if beta == 0.0 else w / beta
        j += 1

    m = len(alphas)
    theta, U = _tridiag_eig(alphas, betas[: m - 1])
    k_eff = min(k, m)
    ritz = V[:, :m] @ U[:, :k_eff]
    # re-normalize (guards against accumulated roundoff)
    ritz /= np.linalg.norm(ritz, axis=0)
    vals = theta[:k_eff]
    resid = np.empty(k_eff)
    for i in range(k_eff):
        r = project_out(matvec(ritz[:, i])) - vals[i] * ritz[:, i]
        resid[i] = np.linalg.norm(r)
    ok = bool(np.all(resid <= tol))
    if not ok and not exhausted:
        raise ConvergenceError(
            f"lanczos did not reach tol={tol:.1e} after {m} iterations "
            f"(worst residual {resid.max():.3e})",
            residuals=resid,
        )
    return SpectralDecomposition(
        vals,
        ritz,
        resid,
        converged=ok,
        breakdown=exhausted and k_eff < k,
        method="lanczos",
    )


def _tridiag_eig(alphas, betas):
    m = len(alphas)
    T = np.diag(np.asarray(alphas, dtype=float))
    if m > 1:
        b = np.asarray(betas, dtype=float)
        T += np.diag(b, 1) + np.diag(b, -1)
    return np.linalg.eigh(T)


def default_kernel_tol(norm_estimate: float) -> float:
    """Kernel threshold scaled by the operator size: 1e-10 * (1 + |A|)."""
    return 1e-10 * (1.0 + norm_estimate)


def kernel_basis(A, tol_ker: float | None = None, allow_ambiguous: bool = False,
                 dense_cap: int = DEFAULT_DENSE_CAP) -> OrthonormalBasis:
    """Orthonormal basis of the span of eigenvectors with eigenvalue <= tol.

    The operator must be positive semidefinite to within -tol_ker. An
    eigenvalue falling in the decade (tol_ker, 10 tol_ker] is ambiguous: it
    cannot be classified as kernel or gap, so the call fails unless
    ``allow_ambiguous`` is set.
    """
    sparse = isinstance(A, SparseHermitian)
    dim = A.dim if sparse else np.asarray(A).shape[0]
    if tol_ker is None:
        norm_est = A.norm_inf_estimate() if sparse else float(
            np.abs(np.asarray(A)).sum(axis=1).max()
        )
        tol_ker = default_kernel_tol(norm_est)
    if dim <= dense_cap:
        w, V = _eigh(A.to_dense() if sparse else A)
        if w[0] < -tol_ker:
            raise ValidationError(
                f"operator not positive semidefinite: min eigenvalue {w[0]:.3e}"
            )
        in_band = (w > tol_ker) & (w <= 10 * tol_ker)
        if np.any(in_band) and not allow_ambiguous:
            raise NumericalAmbiguityError(
                f"eigenvalue(s) {w[in_band]} inside the ambiguous kernel band "
                f"({tol_ker:.1e}, {10 * tol_ker:.1e}]; pass allow_ambiguous to "
                "override"
            )
        nk = int(np.sum(w <= tol_ker))
        return OrthonormalBasis(V[:, :nk], span_tag=f"kernel(dim={nk})")
    # sparse path: accumulate kernel vectors by repeated deflated Lanczos
    vecs: list[np.ndarray] = []
    while True:
        basis = OrthonormalBasis(
            np.array(vecs).T if vecs else np.zeros((dim, 0), dtype=np.complex128)
        )
        dec = lanczos_lowest(A, k=1, deflate=basis, max_iter=dim)
        if dec.eigenvalues.size == 0:
            break
        lam = dec.eigenvalues[0]
        if lam < -tol_ker:
            raise ValidationError(
                f"operator not positive semidefinite: eigenvalue {lam:.3e}"
            )
        if lam <= tol_ker:
            v = dec.eigenvectors[:, 0]
            for u in vecs:
                v = v - u * np.vdot(u, v)
            nv = np.linalg.norm(v)
            if nv < 0.5:
                break
            vecs.append(v / nv)
            continue
        if lam <= 10 * tol_ker and not allow_ambiguous:
            raise NumericalAmbiguityError(
                f"eigenvalue {lam:.3e} inside the ambiguous kernel band"
            )
        break
    V = np.array(vecs).T if vecs else np.zeros((dim, 0), dtype=np.complex128)
    return OrthonormalBasis(V, span_tag=f"kernel(dim={len(vecs)})")
