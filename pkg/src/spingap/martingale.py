"""Ground projectors, the overlap operator, gap tables, and the certified
lower bound on the spectral gap.

The pipeline: for a frustration-free nearest-neighbor chain, the overlap
operator

    K = G(-m,0) G(0,n) G(-m,0)

restricted to the ground space of the left interval has eigenvalue 1 with
multiplicity dim G(-m,n), and its largest sub-unit eigenvalue is the
overlap parameter epsilon(m,n). Whenever sup_{m' >= m} epsilon(m',n) < 1/2,
every finite-volume gap is bounded below by

    gamma_{m+n} * (1 - 2 sqrt(eps (1 - eps))),

where gamma_{m+n} is the worst gap among chains of up to m+n sites. The
operator inequality behind this (``verify_theorem_inequality``) and the two
Cauchy-Schwarz estimates driving its proof (``verify_lemma_cs``) can both
be checked numerically on explicit instances.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from . import closedform
from .errors import (
    DimensionCapError,
    InconclusiveBoundError,
    NumericalAmbiguityError,
    ValidationError,
    VerificationFailure,
)
from .numerics import (
    DEFAULT_DENSE_CAP,
    OrthonormalBasis,
    SparseHermitian,
    _eigh,
    default_kernel_tol,
    kernel_basis,
    lanczos_lowest,
)
from .spinchain import (
    SiteInterval,
    assemble,
    embed_kernel_basis,
    sector_hamiltonian,
    sz_sectors,
)

TOL_UNIT = 1e-8      # eigenvalues >= 1 - TOL_UNIT count as 1
UNIT_GUARD = 1e-3    # demanded separation below the unit band
LANCZOS_TOL = 1e-10
DEFAULT_SEED = 7

# ambient spaces for ground-projector bases are materialized densely
PROJECTOR_AMBIENT_CAP = 200_000


@dataclass
class GroundProjector:
    """Orthonormal basis of Ker H(support) inside the ambient interval."""

    support: SiteInterval
    ambient: SiteInterval
    basis: OrthonormalBasis
    degeneracy: int
    kernel_dim_support: int

    def matrix(self) -> np.ndarray:
        V = self.basis.vectors
        return V @ V.conj().T


def ground_projector(model, support: SiteInterval,
                     ambient: SiteInterval | None = None,
                     tol_ker: float | None = None) -> GroundProjector:
    """Ground projector of the interval Hamiltonian H(support), extended by
    identity to the ambient interval. A length-1 support has H = 0, so its
    projector is the identity."""
    if ambient is None:
        ambient = support
    if not ambient.contains(support):
        raise ValidationError(f"support {support} not inside ambient {ambient}")
    d = model.d_loc
    dim = d ** ambient.length
    if dim > PROJECTOR_AMBIENT_CAP:
        raise DimensionCapError(
            f"ambient dimension {dim} exceeds the projector cap "
            f"{PROJECTOR_AMBIENT_CAP}"
        )
    if support.length == 1:
        basis = OrthonormalBasis(
            np.eye(dim, dtype=np.complex128), span_tag=f"G{support}=1"
        )
        return GroundProjector(support, ambient, basis, dim, d)
    H_local = assemble(model, support)
    ker = kernel_basis(H_local.matrix, tol_ker=tol_ker)
    left = d ** (support.a - ambient.a)
    right = d ** (ambient.b - support.b)
    basis = embed_kernel_basis(
        ker.vectors, left, right, span_tag=f"ker H{support} in {ambient}"
    )
    return GroundProjector(
        support=support,
        ambient=ambient,
        basis=basis,
        degeneracy=ker.dim * left * right,
        kernel_dim_support=ker.dim,
    )


@dataclass
class KOperator:
    """The overlap operator written on an orthonormal basis of the left
    interval's ground space (a degeneracy x degeneracy Hermitian matrix,
    far smaller than the chain's Hilbert space)."""

    m: int
    n: int
    ambient: SiteInterval
    matrix: np.ndarray
    left: GroundProjector
    right: GroundProjector


def k_operator(model, m: int, n: int,
               ambient: SiteInterval | None = None) -> KOperator:
    """K = G(-m,0) G(0,n) G(-m,0) restricted to range G(-m,0)."""
    if m < 1 or n < 1:
        raise ValidationError("m and n must be >= 1")
    if ambient is None:
        ambient = SiteInterval(-m, n)
    if not ambient.contains(SiteInterval(-m, n)):
        raise ValidationError(f"ambient {ambient} must contain [-{m},{n}]")
    left = ground_projector(model, SiteInterval(-m, 0), ambient)
    right = ground_projector(model, SiteInterval(0, n), ambient)
    overlap = left.basis.vectors.conj().T @ right.basis.vectors
    Kmat = overlap @ overlap.conj().T
    return KOperator(m=m, n=n, ambient=ambient, matrix=Kmat,
                     left=left, right=right)


@dataclass
class EpsilonResult:
    """epsilon(m,n) with the full spectrum of the overlap operator."""

    m: int
    n: int
    epsilon: float
    unit_multiplicity: int
    spectrum: np.ndarray  # descending
    ambient_dim: int
    ground_dim: int       # dim Ker H(-m,n), independently computed


def epsilon(model, m: int, n: int, ambient: SiteInterval | None = None,
            tol_unit: float = TOL_UNIT,
            guard: float = UNIT_GUARD) -> EpsilonResult:
    """Largest sub-unit eigenvalue of the overlap operator.

    The eigenvalue-1 multiplicity is asserted against an independently
    computed dim Ker H(-m,n); eigenvalues falling between the unit band
    and the guard margin abort the computation rather than risk misreading
    epsilon.
    """
    op = k_operator(model, m, n, ambient=ambient)
    w = np.linalg.eigvalsh(op.matrix)[::-1].copy()
    if w.size and (w[0] > 1 + 1e-10 or w[-1] < -1e-10):
        raise ValidationError(
            f"overlap spectrum escapes [0, 1]: range [{w[-1]:.3e}, {w[0]:.3e}]"
        )
    d = model.d_loc
    core = SiteInterval(-m, n)
    pad = op.ambient.length - core.length
    ker_core = kernel_basis(assemble(model, core).matrix)
    ground_dim = ker_core.dim * d ** pad
    unit = int(np.sum(w >= 1 - tol_unit))
    if unit != ground_dim:
        raise VerificationFailure(
            f"unit multiplicity {unit} != dim Ker H({core}) embedded "
            f"({ground_dim}) for (m,n)=({m},{n})"
        )
    in_guard = (w < 1 - tol_unit) & (w > 1 - guard)
    if np.any(in_guard):
        raise NumericalAmbiguityError(
            f"overlap eigenvalue(s) {w[in_guard]} within {guard:.0e} of the "
            "unit band; spectral crowding requires manual review"
        )
    eps = float(w[unit]) if unit < w.size else 0.0
    eps = max(eps, 0.0)
    return EpsilonResult(
        m=m, n=n, epsilon=eps, unit_multiplicity=unit, spectrum=w,
        ambient_dim=d ** op.ambient.length, ground_dim=ground_dim,
    )


@dataclass
class EpsilonSup:
    """sup_{m' >= m} epsilon(m', n) with its provenance.

    provenance 'closed_form' means the tail over all m' is controlled by a
    registered formula and the value is rigorous; 'computed_sup(...)' means
    only finitely many m' were inspected and the tail is empirical.
    """

    m: int
    n: int
    value: float
    provenance: str
    rigorous_tail: bool
    samples: dict = field(default_factory=dict)


def epsilon_sup(model, m: int, n: int, m_max: int = 8) -> EpsilonSup:
    if m < 1 or n < 1:
        raise ValidationError("m and n must be >= 1")
    if model.name == "xxz" and n == 1:
        # epsilon(m,1) increases with m, so the sup over m' >= m is the
        # m -> infinity limit for every m
        xi = model.params["xi"]
        value = closedform.xxz_epsilon_limit(xi)
        return EpsilonSup(m=m, n=n, value=value, provenance="closed_form",
                          rigorous_tail=True,
                          samples={"limit": value,
                                   "epsilon(m,1)": closedform.xxz_epsilon_closed(xi, m)})
    if model.name == "aklt":
        m_tail = max(m, 60)
        vals = {mp: closedform.aklt_lambda(mp, n).epsilon
                for mp in range(m, m_tail + 1)}
        tail = closedform.aklt_epsilon_tail_bound(m_tail + 1, n)
        best_m = max(vals, key=vals.get)
        value = max(vals[best_m], tail)
        return EpsilonSup(
            m=m, n=n, value=value, provenance="closed_form",
            rigorous_tail=True,
            samples={"argmax_m": best_m, "max": vals[best_m],
                     "tail_bound": tail},
        )
    if m_max < m:
        raise ValidationError(f"m_max={m_max} below m={m}")
    vals = {mp: epsilon(model, mp, n).epsilon for mp in range(m, m_max + 1)}
    best_m = max(vals, key=vals.get)
    return EpsilonSup(
        m=m, n=n, value=vals[best_m],
        provenance=f"computed_sup(m_max={m_max})", rigorous_tail=False,
        samples={"argmax_m": best_m, "values": vals},
    )


@dataclass
class GammaTable:
    """Finite-volume gaps gamma(1,n) for 2 <= n <= N and their running
    minimum gamma_N."""

    model_name: str
    N: int
    gamma_of_n: dict[int, float]
    provenance: dict[int, str]
    gamma_N: float


def gamma_interval(model, n: int, method: str = "auto",
                   dense_cap: int = DEFAULT_DENSE_CAP,
                   sector_dense_cap: int = 1024,
                   tol_ker: float | None = None,
                   seed: int = DEFAULT_SEED) -> tuple[float, str]:
    """gamma(1,n): the smallest nonzero eigenvalue of H(1,n), equivalently
    the lowest eigenvalue after deflating the kernel."""
    if n < 2:
        raise ValidationError("gamma(1,n) requires n >= 2")
    d = model.d_loc
    dim = d ** n
    support = SiteInterval(1, n)
    if method == "auto":
        if dim <= 512 or not model.conserves_sz:
            method = "dense"
        else:
            method = "sector"
    if method == "dense":
        if dim > dense_cap:
            raise DimensionCapError(
                f"dense gap solve refused at dim {dim} > {dense_cap}; "
                "use a sector method"
            )
        H = assemble(model, support)
        w, _ = _eigh(H.matrix)
        tol = tol_ker if tol_ker is not None else default_kernel_tol(
            H.matrix.norm_inf_estimate()
        )
        nker = _kernel_count(w, tol)
        _check_degeneracy(model, n, nker)
        if nker >= w.size:
            raise ValidationError(f"H(1,{n}) has no nonzero spectrum")
        return float(w[nker]), "dense"
    if method not in ("sector", "sector-dense", "sector-lanczos"):
        raise ValidationError(f"unknown gap method {method!r}")
    sectors = sz_sectors(model, support)
    total_ker = 0
    best = np.inf
    worst_resid = 0.0
    used = set()
    for sector in sectors:
        A = sector_hamiltonian(model, support, sector)
        tol = tol_ker if tol_ker is not None else default_kernel_tol(
            A.norm_inf_estimate()
        )
        use_dense = (
            method == "sector-dense"
            or (method == "sector" and A.dim <= sector_dense_cap)
        )
        if use_dense:
            used.add("dense")
            w, _ = _eigh(A)
            nker = _kernel_count(w, tol)
            total_ker += nker
            if nker < w.size:
                best = min(best, float(w[nker]))
        else:
            used.add("lanczos")
            lam, resid, nker = _sector_gap_lanczos(A, tol, seed)
            total_ker += nker
            if lam is not None:
                best = min(best, lam)
                worst_resid = max(worst_resid, resid)
    _check_degeneracy(model, n, total_ker)
    if not np.isfinite(best):
        raise ValidationError(f"H(1,{n}) has no nonzero spectrum")
    tag = "+".join(sorted(used))
    prov = f"sector-{tag}"
    if "lanczos" in used:
        prov += f"(worst residual {worst_resid:.1e})"
    return float(best), prov


def _kernel_count(w: np.ndarray, tol: float) -> int:
    if w.size and w[0] < -tol:
        raise ValidationError(
            f"Hamiltonian not positive semidefinite: min eigenvalue {w[0]:.3e}"
        )
    in_band = (w > tol) & (w <= 10 * tol)
    if np.any(in_band):
        raise NumericalAmbiguityError(
            f"eigenvalue(s) {w[in_band]} in the ambiguous kernel band"
        )
    return int(np.sum(w <= tol))


def _check_degeneracy(model, n: int, nker: int):
    declared = getattr(model, "ground_degeneracy", None)
    if declared is not None and declared(n) != nker:
        raise VerificationFailure(
            f"computed kernel dimension {nker} != declared ground "
            f"degeneracy {declared(n)} at L={n}"
        )


def _sector_gap_lanczos(A: SparseHermitian, tol_ker: float, seed: int):
    """Kernel deflation loop within one sector: find kernel vectors one at
    a time, then the first eigenvalue above the kernel. Returns
    (gap or None, residual, kernel_dim)."""
    vecs: list[np.ndarray] = []
    while True:
        basis = OrthonormalBasis(
            np.array(vecs).T if vecs else np.zeros((A.dim, 0), dtype=np.complex128)
        )
        dec = lanczos_lowest(A, k=1, deflate=basis, tol=LANCZOS_TOL,
                             max_iter=A.dim, seed=seed)
        if dec.eigenvalues.size == 0:
            return None, 0.0, len(vecs)  # sector exhausted: all kernel
        lam = float(dec.eigenvalues[0])
        if lam < -tol_ker:
            raise ValidationError(
                f"sector Hamiltonian not positive semidefinite ({lam:.3e})"
            )
        if lam <= tol_ker:
            v = dec.eigenvectors[:, 0]
            for u in vecs:
                v = v - u * np.vdot(u, v)
            nv = np.linalg.norm(v)
            if nv < 0.5:
                return None, 0.0, len(vecs)
            vecs.append(v / nv)
            continue
        if lam <= 10 * tol_ker:
            raise NumericalAmbiguityError(
                f"sector eigenvalue {lam:.3e} in the ambiguous kernel band"
            )
        return lam, float(dec.residuals[0]), len(vecs)


def gamma_table(model, N: int, method: str = "auto",
                tol_ker: float | None = None,
                seed: int = DEFAULT_SEED) -> GammaTable:
    """gamma(1,n) for every 2 <= n <= N plus the running minimum."""
    if N < 2:
        raise ValidationError("N must be >= 2")
    gamma_of_n: dict[int, float] = {}
    provenance: dict[int, str] = {}
    for n in range(2, N + 1):
        value, prov = gamma_interval(model, n, method=method,
                                     tol_ker=tol_ker, seed=seed)
        if value <= 0:
            raise ValidationError(f"gamma(1,{n}) = {value} is not positive")
        gamma_of_n[n] = value
        provenance[n] = prov
    return GammaTable(
        model_name=model.name,
        N=N,
        gamma_of_n=gamma_of_n,
        provenance=provenance,
        gamma_N=min(gamma_of_n.values()),
    )


def alpha_beta(eps: float) -> tuple[float, float]:
    """Weights of the gap recursion:
    alpha = (sqrt(1-eps) - sqrt(eps))^2, beta = sqrt(1-eps) (sqrt(1-eps) - sqrt(eps)).
    Requires 0 <= eps < 1/2, which guarantees 0 < alpha <= beta <= 1.
    """
    if not 0 <= eps < 0.5:
        raise ValidationError(
            f"epsilon must be in [0, 1/2) for a positive bound, got {eps}"
        )
    root = np.sqrt(1 - eps) - np.sqrt(eps)
    return float(root * root), float(np.sqrt(1 - eps) * root)


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = int(epoch) if epoch else int(time.time())
    return datetime.fromtimestamp(t, tz=timezone.utc).isoformat()


def _hexfield(x: float) -> dict:
    return {"value": float(x), "hex": float(x).hex()}


def _unhex(obj) -> float:
    if isinstance(obj, dict):
        if "hex" in obj:
            return float.fromhex(obj["hex"])
        return float(obj["value"])
    return float(obj)


@dataclass
class BoundCertificate:
    """Everything needed to audit a spectral-gap lower bound."""

    model_name: str
    model_spin: float
    model_params: dict
    shift_log: list[str]
    m: int
    n: int
    m_max: int
    epsilon: float
    epsilon_provenance: str
    rigorous_tail: bool
    gamma: float
    gamma_table: dict[int, float]
    gamma_provenance: dict[int, str]
    alpha: float
    beta: float
    bound: float
    tolerances: dict
    seed: int
    timestamp: str

    def to_dict(self) -> dict:
        return {
            "format": "spingap.bound_certificate",
            "format_version": 1,
            "model": {
                "name": self.model_name,
                "spin": self.model_spin,
                "params": self.model_params,
                "shift_log": self.shift_log,
            },
            "m": self.m,
            "n": self.n,
            "m_max": self.m_max,
            "epsilon": {
                **_hexfield(self.epsilon),
                "provenance": self.epsilon_provenance,
                "rigorous_tail": self.rigorous_tail,
            },
            "gamma": {
                "interval_length": self.m + self.n,
                **_hexfield(self.gamma),
                "table": {
                    str(k): {**_hexfield(v), "provenance": self.gamma_provenance[k]}
                    for k, v in sorted(self.gamma_table.items())
                },
            },
            "alpha": _hexfield(self.alpha),
            "beta": _hexfield(self.beta),
            "bound": _hexfield(self.bound),
            "tolerances": self.tolerances,
            "seed": self.seed,
            "timestamp": self.timestamp,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, doc: dict) -> "BoundCertificate":
        if doc.get("format") != "spingap.bound_certificate":
            raise ValidationError("not a bound certificate document")
        if doc.get("format_version") != 1:
            raise ValidationError(
                f"unsupported certificate version {doc.get('format_version')}"
            )
        model = doc["model"]
        return cls(
            model_name=model["name"],
            model_spin=float(model["spin"]),
            model_params=dict(model["params"]),
            shift_log=list(model["shift_log"]),
            m=int(doc["m"]),
            n=int(doc["n"]),
            m_max=int(doc["m_max"]),
            epsilon=_unhex(doc["epsilon"]),
            epsilon_provenance=doc["epsilon"]["provenance"],
            rigorous_tail=bool(doc["epsilon"]["rigorous_tail"]),
            gamma=_unhex(doc["gamma"]),
            gamma_table={
                int(k): _unhex(v) for k, v in doc["gamma"]["table"].items()
            },
            gamma_provenance={
                int(k): v["provenance"] for k, v in doc["gamma"]["table"].items()
            },
            alpha=_unhex(doc["alpha"]),
            beta=_unhex(doc["beta"]),
            bound=_unhex(doc["bound"]),
            tolerances=dict(doc["tolerances"]),
            seed=int(doc["seed"]),
            timestamp=doc["timestamp"],
        )

    @classmethod
    def from_json(cls, text: str) -> "BoundCertificate":
        try:
            return cls.from_dict(json.loads(text))
        except (KeyError, TypeError, json.JSONDecodeError) as exc:
            raise ValidationError(f"malformed certificate: {exc}") from exc


def bound_certificate(model, m: int, n: int, m_max: int = 8,
                      gamma_method: str = "auto",
                      seed: int = DEFAULT_SEED) -> BoundCertificate:
    """Assemble the certified lower bound
    gamma_{m+n} * (1 - 2 sqrt(eps(1-eps))) with full provenance."""
    es = epsilon_sup(model, m, n, m_max=m_max)
    if es.value >= 0.5:
        raise InconclusiveBoundError(
            f"epsilon_sup = {es.value:.6g} >= 1/2: the method is inconclusive "
            f"for (m,n)=({m},{n}) (not a statement about the model's gap)",
            epsilon=es.value,
        )
    gt = gamma_table(model, m + n, method=gamma_method, seed=seed)
    alpha, beta = alpha_beta(es.value)
    bound = gt.gamma_N * (1.0 - 2.0 * np.sqrt(es.value * (1.0 - es.value)))
    return BoundCertificate(
        model_name=model.name,
        model_spin=model.spin,
        model_params=dict(model.params),
        shift_log=model.shift_log(),
        m=m,
        n=n,
        m_max=m_max,
        epsilon=float(es.value),
        epsilon_provenance=es.provenance,
        rigorous_tail=es.rigorous_tail,
        gamma=gt.gamma_N,
        gamma_table=gt.gamma_of_n,
        gamma_provenance=gt.provenance,
        alpha=alpha,
        beta=beta,
        bound=float(bound),
        tolerances={
            "tol_ker_rule": "1e-10 * (1 + norm_inf_estimate)",
            "tol_unit": TOL_UNIT,
            "unit_guard": UNIT_GUARD,
            "lanczos_tol": LANCZOS_TOL,
        },
        seed=seed,
        timestamp=_timestamp(),
    )


@dataclass
class CertificateCheck:
    passed: bool
    max_discrepancy: float
    details: dict


def verify_certificate(cert: BoundCertificate, model=None,
                       tol: float = 1e-12) -> CertificateCheck:
    """Recompute every certified number of a stored certificate and compare
    within tol. The model is rebuilt from the certificate unless given."""
    if model is None:
        from .models import model_from_selector

        if cert.model_name == "xxz":
            model = model_from_selector("xxz", xi=cert.model_params["xi"])
        elif cert.model_name == "aklt":
            model = model_from_selector("aklt")
        elif "source" in cert.model_params:
            model = model_from_selector(f"custom:{cert.model_params['source']}")
        else:
            raise ValidationError(
                f"cannot rebuild model {cert.model_name!r} for re-verification"
            )
    fresh = bound_certificate(model, cert.m, cert.n, m_max=cert.m_max,
                              seed=cert.seed)
    diffs = {
        "epsilon": abs(fresh.epsilon - cert.epsilon),
        "gamma": abs(fresh.gamma - cert.gamma),
        "alpha": abs(fresh.alpha - cert.alpha),
        "beta": abs(fresh.beta - cert.beta),
        "bound": abs(fresh.bound - cert.bound),
    }
    for k, v in fresh.gamma_table.items():
        diffs[f"gamma({k})"] = abs(v - cert.gamma_table.get(k, np.inf))
    worst = max(diffs.values())
    return CertificateCheck(passed=bool(worst <= tol), max_discrepancy=worst,
                            details=diffs)


@dataclass
class TheoremReport:
    """Minimum eigenvalue of the gap-recursion operator inequality."""

    model_name: str
    m: int
    n: int
    N: int
    epsilon: float
    gamma: float
    alpha: float
    beta: float
    min_eigenvalue: float
    passed: bool


def verify_theorem_inequality(model, m: int, n: int, N: int,
                              dense_cap: int = 6561,
                              tol: float = 1e-9) -> TheoremReport:
    """Check, on range(1 - G(1,N)), that

        H(1,N) >= gamma_{m+n} (alpha (1-P) + beta (P - G))

    with P = G(1,N-n) and G = G(1,N), by diagonalizing the difference.
    For N <= n+1 the projector P degenerates to the identity and the check
    reduces to H >= gamma_{m+n} beta (1 - G).
    """
    dim = model.d_loc ** N
    if dim > dense_cap:
        raise DimensionCapError(f"theorem check needs dense dim {dim}")
    es = epsilon_sup(model, m, n)
    if es.value >= 0.5:
        raise InconclusiveBoundError(
            f"epsilon_sup = {es.value:.6g} >= 1/2", epsilon=es.value
        )
    alpha, beta = alpha_beta(es.value)
    gamma = gamma_table(model, m + n).gamma_N
    ambient = SiteInterval(1, N)
    H = assemble(model, ambient)
    w, V = _eigh(H.matrix)
    nker = _kernel_count(w, default_kernel_tol(H.matrix.norm_inf_estimate()))
    Q1 = V[:, nker:]
    G = V[:, :nker] @ V[:, :nker].conj().T
    if N - n <= 1:
        P = np.eye(dim, dtype=np.complex128)
    else:
        P = ground_projector(model, SiteInterval(1, N - n), ambient).matrix()
    M = H.to_dense() - gamma * (
        alpha * (np.eye(dim) - P) + beta * (P - G)
    )
    Mr = Q1.conj().T @ M @ Q1
    Mr = 0.5 * (Mr + Mr.conj().T)
    min_eig = float(np.linalg.eigvalsh(Mr)[0]) if Mr.size else 0.0
    return TheoremReport(
        model_name=model.name, m=m, n=n, N=N, epsilon=es.value, gamma=gamma,
        alpha=alpha, beta=beta, min_eigenvalue=min_eig,
        passed=bool(min_eig >= -tol),
    )


@dataclass
class LemmaReport:
    """Random-instance check of the two Cauchy-Schwarz estimates."""

    trials: int
    dim: int
    seed: int
    violations: list
    passed: bool


def verify_lemma_cs(trials: int, dim: int, seed: int = 42,
                    slack: float = 1e-10) -> LemmaReport:
    """Part (a): for positive H with gap gamma and kernel projector G,

        <psi, H psi> >= gamma |<psi, (1-G) phi>|^2 / <phi, (1-G) phi>.

    Part (b): for a projector G and psi orthogonal to phi,

        |<psi, G phi>|^2 <= |psi|^2 |phi|^2 <G>_phi (1 - <G>_phi).

    Random instances; any violation beyond the slack is serialized into
    the report.
    """
    if dim < 2:
        raise ValidationError("dim must be >= 2")
    rng = np.random.default_rng(seed)
    violations = []

    def rand_vec():
        return rng.standard_normal(dim) + 1j * rng.standard_normal(dim)

    def rand_unitary():
        Z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        Q, R = np.linalg.qr(Z)
        return Q * np.sign(np.diag(R))

    for t in range(trials):
        # part (a)
        kd = int(rng.integers(0, dim // 2 + 1))
        pos = np.sort(rng.uniform(0.2, 2.0, size=dim - kd))
        w = np.concatenate([np.zeros(kd), pos])
        U = rand_unitary()
        H = (U * w) @ U.conj().T
        gamma = pos[0]
        G = U[:, :kd] @ U[:, :kd].conj().T
        phi = rand_vec()
        denom = float(np.real(np.vdot(phi, phi - G @ phi)))
        while denom < 1e-8:
            phi = rand_vec()
            denom = float(np.real(np.vdot(phi, phi - G @ phi)))
        psi = rand_vec()
        lhs = float(np.real(np.vdot(psi, H @ psi)))
        rhs = gamma * abs(np.vdot(psi, phi - G @ phi)) ** 2 / denom
        if lhs - rhs < -slack:
            violations.append({
                "part": "a", "trial": t, "lhs": lhs, "rhs": rhs,
                "eigenvalues": w.tolist(),
                "phi": _vec_to_list(phi), "psi": _vec_to_list(psi),
            })
        # part (b)
        g = int(rng.integers(0, dim + 1))
        U2 = rand_unitary()
        G2 = U2[:, :g] @ U2[:, :g].conj().T
        phi2 = rand_vec()
        psi2 = rand_vec()
        psi2 = psi2 - phi2 * (np.vdot(phi2, psi2) / np.vdot(phi2, phi2))
        mean = float(np.real(np.vdot(phi2, G2 @ phi2) / np.vdot(phi2, phi2)))
        lhs2 = abs(np.vdot(psi2, G2 @ phi2)) ** 2
        rhs2 = (
            float(np.real(np.vdot(psi2, psi2) * np.vdot(phi2, phi2)))
            * mean * (1 - mean)
        )
        if rhs2 - lhs2 < -slack:
            violations.append({
                "part": "b", "trial": t, "lhs": lhs2, "rhs": rhs2,
                "rank": g, "phi": _vec_to_list(phi2), "psi": _vec_to_list(psi2),
            })
    return LemmaReport(trials=trials, dim=dim, seed=seed,
                       violations=violations, passed=not violations)


def _vec_to_list(v: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in v]
