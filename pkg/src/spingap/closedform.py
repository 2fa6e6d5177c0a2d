"""Closed-form overlap spectra for the built-in models, and cross checks
against the brute-force route.

XXZ: epsilon(m,1) has an explicit expression in q^2 = e^(-2 xi), increasing
in m with limit q^2/(1+q^2).

AKLT: after the (nonlocal) unitary that turns the four ground states into
site-wise product states, all overlap data reduces to 4x4 Gram matrices of
the single-site vectors

    phi_{1,2} = (|0> +/- sqrt(2) |+>)/sqrt(3),
    phi_{3,4} = (|0> +/- sqrt(2) |->)/sqrt(3).

The overlap operator then has an explicit 16x16 matrix in the (nonorthogonal)
product basis, and its sub-unit eigenvalues are rational-plus-radical
functions of (-1/3)^m and (-1/3)^n. The cross validators assert that the
brute-force spectrum on the untransformed chain, the 16x16 matrix, and the
eigenvalue formulas all agree.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError, VerificationFailure


def xxz_epsilon_closed(xi: float, m: int) -> float:
    """epsilon(m,1) = q^2/(1+q^2) * (1-q^(2m))/(1-q^(2(m+1))), q = e^-xi."""
    if xi <= 0:
        raise ValidationError("xi must be > 0")
    if m < 1:
        raise ValidationError("m must be >= 1")
    q2 = np.exp(-2.0 * xi)
    return float(q2 / (1.0 + q2) * (1.0 - q2 ** m) / (1.0 - q2 ** (m + 1)))


def xxz_epsilon_limit(xi: float) -> float:
    """The m -> infinity limit q^2/(1+q^2); also sup_m epsilon(m,1) since
    the sequence increases with m."""
    if xi <= 0:
        raise ValidationError("xi must be > 0")
    q2 = np.exp(-2.0 * xi)
    return float(q2 / (1.0 + q2))


def kt_ground_states() -> np.ndarray:
    """The four single-site vectors whose products span the transformed
    ground space, as columns of a 3x4 array in the descending-m basis
    (|+>, |0>, |->)."""
    s2, s3 = np.sqrt(2.0), np.sqrt(3.0)
    phi = np.zeros((3, 4))
    phi[:, 0] = [s2 / s3, 1 / s3, 0.0]
    phi[:, 1] = [-s2 / s3, 1 / s3, 0.0]
    phi[:, 2] = [0.0, 1 / s3, s2 / s3]
    phi[:, 3] = [0.0, 1 / s3, -s2 / s3]
    return phi


def neg_third_power(k: int) -> float:
    """(-1/3)^k by repeated multiplication (exact sign handling)."""
    if k < 0:
        raise ValidationError("negative exponent")
    out = 1.0
    for _ in range(k):
        out *= -1.0 / 3.0
    return out


@dataclass(frozen=True)
class AKLTGram:
    """Gram matrix of the four product ground states on N sites and its
    inverse. The inverse exists only for N >= 2 (on a single site the four
    vectors live in C^3 and the Gram matrix is singular)."""

    N: int
    M: np.ndarray
    W: np.ndarray | None

    def __post_init__(self):
        if self.N < 1:
            raise ValidationError("interval length must be >= 1")


def _gram_pattern(sign: float) -> np.ndarray:
    return np.array([
        [0.0, sign, 1.0, 1.0],
        [sign, 0.0, 1.0, 1.0],
        [1.0, 1.0, 0.0, sign],
        [1.0, 1.0, sign, 0.0],
    ])


def aklt_gram(N: int) -> AKLTGram:
    """M(1,N) = I + 3^-N * pattern((-1)^N) and its closed-form inverse."""
    if N < 1:
        raise ValidationError("interval length must be >= 1")
    sign = -1.0 if N % 2 else 1.0
    scale = 3.0 ** (-N)
    M = np.eye(4) + scale * _gram_pattern(sign)
    if N == 1:
        return AKLTGram(N=N, M=M, W=None)
    pref = 1.0 / (1.0 + 2.0 * sign * scale - 3.0 * scale ** 2)
    inner = np.array([
        [-2 * sign, sign, 1.0, 1.0],
        [sign, -2 * sign, 1.0, 1.0],
        [1.0, 1.0, -2 * sign, sign],
        [1.0, 1.0, sign, -2 * sign],
    ])
    W = pref * (np.eye(4) - scale * inner)
    return AKLTGram(N=N, M=M, W=W)


def _product_states(N: int) -> np.ndarray:
    phi = kt_ground_states()
    out = phi
    for _ in range(N - 1):
        out = np.einsum("ai,bi->abi", out, phi).reshape(-1, 4)
    return out


def aklt_projector_product_basis(a: int, b: int,
                                 dense_cap: int = 8192) -> np.ndarray:
    """Ground projector on the interval [a, b] in the product-state picture:
    G = sum_ij Phi_i W_ij Phi_j^dag. For a single site the ground space is
    everything and the projector is the identity."""
    if b < a:
        raise ValidationError("need b >= a")
    N = b - a + 1
    if 3 ** N > dense_cap:
        raise ValidationError(f"projector at {N} sites needs dim {3 ** N}")
    if N == 1:
        return np.eye(3)
    Phi = _product_states(N)
    W = aklt_gram(N).W
    return Phi @ W @ Phi.T


def aklt_A_matrix(m: int, n: int) -> np.ndarray:
    """The overlap operator on the 16 product basis vectors
    Phi_i(-m,0) (x) Phi_j(1,n), as an explicit 16x16 matrix of Gram data.
    Exactly four eigenvalues are 1; the fifth largest is epsilon(m,n)."""
    if m < 1 or n < 1:
        raise ValidationError("m and n must be >= 1")
    W0n = aklt_gram(n + 1).W      # interval [0, n]
    M00 = aklt_gram(1).M          # single site
    M1n = aklt_gram(n).M          # interval [1, n]
    Wm0 = aklt_gram(m + 1).W      # interval [-m, 0]
    Mm1 = aklt_gram(m).M          # interval [-m, -1]
    F = np.einsum("kl,li,lj->kij", W0n, M00, M1n)
    B = np.einsum("rs,sk,si->rki", Wm0, M00, Mm1)
    return np.einsum("kij,rki->ijrk", F, B).reshape(16, 16)


@dataclass(frozen=True)
class AKLTSpectrum:
    """The four closed-form eigenvalue branches of the 16x16 overlap matrix
    (multiplicities 5, 1, 3, 3 beside the four unit eigenvalues) and their
    maximum, which is epsilon(m,n)."""

    m: int
    n: int
    lambda5: float
    lambda1: float
    lambda3_plus: float
    lambda3_minus: float
    R: float

    @property
    def epsilon(self) -> float:
        return max(self.lambda5, self.lambda1,
                   self.lambda3_plus, self.lambda3_minus)

    def multiset(self) -> np.ndarray:
        """All 16 eigenvalues (descending): four 1s plus the branches with
        multiplicities 5, 3, 3, 1."""
        vals = ([1.0] * 4 + [self.lambda5] * 5 + [self.lambda3_plus] * 3
                + [self.lambda3_minus] * 3 + [self.lambda1])
        return np.sort(np.array(vals))[::-1]


def aklt_lambda(m: int, n: int) -> AKLTSpectrum:
    """Closed-form eigenvalues in terms of x = (-1/3)^m, y = (-1/3)^n:

        lambda5 = (1/9) (1-x)(1-y) / ((1+x/3)(1+y/3))
        lambda1 = (1/9) (1+3x)(1+3y) / ((1+x/3)(1+y/3))
        lambda3+- = (1/9) (1 + x + y - 19xy/9 +- 2 sqrt(R)) / ((1+x/3)(1+y/3))
        R = (x-y)^2 - 128 x^2 y^2 / 81 + (4xy/9)(1+x)(1+y)
    """
    if m < 1 or n < 1:
        raise ValidationError("m and n must be >= 1")
    x = neg_third_power(m)
    y = neg_third_power(n)
    den = 9.0 * (1.0 + x / 3.0) * (1.0 + y / 3.0)
    R = ((x - y) ** 2 - 128.0 * x * x * y * y / 81.0
         + 4.0 * (x * y / 9.0) * (1.0 + x) * (1.0 + y))
    if R < -1e-12:
        raise ValidationError(f"discriminant R({m},{n}) = {R} is negative")
    root = np.sqrt(max(R, 0.0))
    core = 1.0 + x + y - 19.0 * x * y / 9.0
    return AKLTSpectrum(
        m=m,
        n=n,
        lambda5=(1.0 - x) * (1.0 - y) / den,
        lambda1=(1.0 + 3.0 * x) * (1.0 + 3.0 * y) / den,
        lambda3_plus=(core + 2.0 * root) / den,
        lambda3_minus=(core - 2.0 * root) / den,
        R=float(R),
    )


def aklt_epsilon_tail_bound(m_min: int, n: int) -> float:
    """Rigorous upper bound on sup_{m' >= m_min} epsilon(m', n), obtained by
    replacing (-1/3)^m' with worst-case signs of magnitude t = 3^-m_min in
    each eigenvalue branch."""
    if m_min < 1 or n < 1:
        raise ValidationError("m_min and n must be >= 1")
    t = 3.0 ** (-m_min)
    y = neg_third_power(n)
    ay = abs(y)
    den_min = 9.0 * (1.0 - t / 3.0) * (1.0 + y / 3.0)
    b5 = (1.0 + t) * (1.0 - y) / den_min
    b1 = (1.0 + 3.0 * t) * abs(1.0 + 3.0 * y) / den_min
    R_ub = (t + ay) ** 2 + 4.0 * (t * ay / 9.0) * (1.0 + t) * (1.0 + ay)
    core_ub = 1.0 + t + y + 19.0 * t * ay / 9.0
    b3 = (core_ub + 2.0 * np.sqrt(R_ub)) / den_min
    return float(max(b5, b1, b3))


@dataclass
class CrossValidationReport:
    """Agreement record between independent epsilon computations."""

    label: str
    values: dict
    max_spread: float
    tolerance: float
    passed: bool


def cross_validate_aklt(m: int, n: int,
                        tol: float = 2e-9) -> CrossValidationReport:
    """Three-way check of epsilon(m,n): brute force on the untransformed
    chain, the fifth largest eigenvalue of the 16x16 matrix, and the
    eigenvalue formulas. Raises on disagreement."""
    from .martingale import epsilon as brute_epsilon
    from .models import aklt_model

    brute = brute_epsilon(aklt_model(), m, n).epsilon
    ev = np.linalg.eigvals(aklt_A_matrix(m, n))
    if np.abs(ev.imag).max() > 1e-9:
        raise VerificationFailure(
            f"overlap matrix spectrum is not real: max imag "
            f"{np.abs(ev.imag).max():.3e}"
        )
    fifth = float(np.sort(ev.real)[::-1][4])
    formula = aklt_lambda(m, n).epsilon
    values = {
        "brute_force": brute,
        "matrix_fifth_eigenvalue": fifth,
        "lambda_formula": formula,
    }
    spread = max(values.values()) - min(values.values())
    report = CrossValidationReport(
        label=f"aklt({m},{n})", values=values, max_spread=spread,
        tolerance=tol, passed=bool(spread <= tol),
    )
    if not report.passed:
        raise VerificationFailure(
            f"aklt epsilon({m},{n}) disagreement: {values} "
            f"(spread {spread:.3e} > {tol:.1e})"
        )
    return report


def cross_validate_xxz(xi: float, m: int,
                       tol: float = 1e-10) -> CrossValidationReport:
    """Brute-force epsilon(m,1) against the closed form."""
    from .martingale import epsilon as brute_epsilon
    from .models import xxz_model

    closed = xxz_epsilon_closed(xi, m)
    brute = brute_epsilon(xxz_model(xi), m, 1).epsilon
    values = {"brute_force": brute, "closed_form": closed}
    spread = abs(brute - closed)
    report = CrossValidationReport(
        label=f"xxz(xi={xi}, m={m})", values=values, max_spread=spread,
        tolerance=tol, passed=bool(spread <= tol),
    )
    if not report.passed:
        raise VerificationFailure(
            f"xxz epsilon({m},1) at xi={xi} disagreement: {values}"
        )
    return report


SWEEP_COLUMNS = ("model", "xi", "m", "n", "epsilon_closed", "epsilon_numeric",
                 "gamma", "bound", "status")


def format_float(x) -> str:
    """binary64 rendered with 17 significant digits (lossless)."""
    if x is None:
        return ""
    return f"{float(x):.17g}"


def write_sweep_csv(stream, rows) -> None:
    """Emit sweep rows (dicts keyed by SWEEP_COLUMNS) as CSV."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for row in rows:
        writer.writerow([
            row.get("model", ""),
            format_float(row.get("xi")),
            row.get("m", ""),
            row.get("n", ""),
            format_float(row.get("epsilon_closed")),
            format_float(row.get("epsilon_numeric")),
            format_float(row.get("gamma")),
            format_float(row.get("bound")),
            row.get("status", "ok"),
        ])
