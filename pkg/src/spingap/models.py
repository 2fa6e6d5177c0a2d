"""Built-in two-site interactions (XXZ kink, AKLT) and the custom loader.

Both built-ins are shifted so the two-site ground energy is exactly zero,
which is what makes the chains frustration free; every certificate records
the shift that was applied.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import FrustrationFreeViolation, ValidationError
from .numerics import hermitian_eig, max_abs, require_hermitian
from .spinchain import check_frustration_free, heisenberg_coupling, spin_operators

CUSTOM_FORMAT_VERSION = 1
_CUSTOM_KEYS = {
    "format_version", "name", "two_s", "matrix", "auto_shift", "conserves_sz",
}


@dataclass(frozen=True)
class LocalInteraction:
    """Positive two-site operator h(x, x+1) on the d^2 product space."""

    d_loc: int
    matrix: np.ndarray
    shift_applied: float = 0.0

    def __post_init__(self):
        M = require_hermitian(self.matrix, "interaction")
        if M.shape[0] != self.d_loc ** 2:
            raise ValidationError(
                f"interaction dim {M.shape[0]} != d_loc^2 = {self.d_loc ** 2}"
            )
        object.__setattr__(self, "matrix", M)
        w = hermitian_eig(M).eigenvalues
        scale = max(1.0, max_abs(M))
        if abs(w[0]) > 1e-12 * scale:
            raise ValidationError(
                f"interaction minimum eigenvalue {w[0]:.3e} not zero; "
                "apply a shift first (or enable auto_shift)"
            )

    @classmethod
    def from_matrix(cls, M: np.ndarray, d_loc: int,
                    auto_shift: bool = False) -> "LocalInteraction":
        """Validate a raw matrix; with auto_shift, subtract the minimum
        eigenvalue so the two-site ground energy is exactly zero."""
        M = require_hermitian(M, "interaction")
        w = hermitian_eig(M).eigenvalues
        shift = 0.0
        scale = max(1.0, max_abs(M))
        if abs(w[0]) > 1e-12 * scale:
            if not auto_shift:
                raise ValidationError(
                    f"interaction minimum eigenvalue is {w[0]:.6e}, not 0 "
                    "(auto_shift disabled)"
                )
            shift = -float(w[0])
            M = M + shift * np.eye(M.shape[0])
        return cls(d_loc=d_loc, matrix=M, shift_applied=shift)


@dataclass(frozen=True)
class XXZParams:
    """Anisotropy parameters of the spin-1/2 XXZ kink chain.

    xi > 0 is gapped; xi = 0 (the isotropic point) is gapless and only
    allowed for exploratory spectra, never for certification.
    """

    xi: float
    j: float = 0.5

    def __post_init__(self):
        if self.xi < 0:
            raise ValidationError(f"anisotropy must be >= 0, got {self.xi}")
        if self.j != 0.5:
            raise ValidationError("only j = 1/2 is supported")

    @property
    def q(self) -> float:
        return float(np.exp(-self.xi))


@dataclass(frozen=True)
class ModelSpec:
    """A validated nearest-neighbor model."""

    name: str
    spin: float
    interaction: LocalInteraction
    conserves_sz: bool = False
    ground_degeneracy: Callable[[int], int] | None = None
    params: dict = field(default_factory=dict)

    @property
    def d_loc(self) -> int:
        return self.interaction.d_loc

    def shift_log(self) -> list[str]:
        if self.interaction.shift_applied:
            return [
                f"two-site interaction shifted by "
                f"{self.interaction.shift_applied:+.17g} to zero the ground energy"
            ]
        return []


def xxz_interaction(params: XXZParams, allow_gapless: bool = False) -> LocalInteraction:
    """Spin-1/2 XXZ kink interaction, shifted by +1/4 so the two-site
    spectrum is (0, 0, 0, 1):

        h = -sech(xi) S.S - (1 - sech(xi)) S3 S3
            + (1/2) tanh(xi) (S3 x 1 - 1 x S3) + 1/4
    """
    if params.xi <= 0 and not allow_gapless:
        raise ValidationError(
            "xi must be > 0 on the certification path (xi = 0 is gapless)"
        )
    rep = spin_operators(0.5)
    sech = 1.0 / np.cosh(params.xi)
    tanh = np.tanh(params.xi)
    I2 = np.eye(2)
    h = (
        -sech * heisenberg_coupling(rep)
        - (1.0 - sech) * np.kron(rep.S3, rep.S3)
        + params.j * tanh * (np.kron(rep.S3, I2) - np.kron(I2, rep.S3))
        + 0.25 * np.eye(4)
    )
    return LocalInteraction(d_loc=2, matrix=h, shift_applied=0.25)


def aklt_interaction() -> LocalInteraction:
    """AKLT interaction: the projector onto total spin 2 of two spin-1s,
    built from the polynomial identity P2 = 1/3 + (S.S)/2 + (S.S)^2/6."""
    rep = spin_operators(1.0)
    SS = heisenberg_coupling(rep)
    P2 = np.eye(9) / 3.0 + SS / 2.0 + (SS @ SS) / 6.0
    return LocalInteraction(d_loc=3, matrix=P2, shift_applied=0.0)


def xxz_model(xi: float, allow_gapless: bool = False) -> ModelSpec:
    params = XXZParams(xi=xi)
    return ModelSpec(
        name="xxz",
        spin=0.5,
        interaction=xxz_interaction(params, allow_gapless=allow_gapless),
        conserves_sz=True,
        ground_degeneracy=lambda L: L + 1,
        params={"xi": float(xi)},
    )


def aklt_model() -> ModelSpec:
    return ModelSpec(
        name="aklt",
        spin=1.0,
        interaction=aklt_interaction(),
        conserves_sz=True,
        ground_degeneracy=lambda L: 4,
        params={},
    )


def load_custom(path, frustration_L: int = 4) -> ModelSpec:
    """Load and validate a custom model file (see the README for the
    schema). Validation failures are reported distinctly: parse errors,
    Hermiticity violations, positivity, and the frustration-freeness gate.
    """
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot parse model file {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValidationError("model file must contain a JSON object")
    unknown = set(doc) - _CUSTOM_KEYS
    if unknown:
        raise ValidationError(f"unknown keys in model file: {sorted(unknown)}")
    missing = _CUSTOM_KEYS - set(doc)
    if missing:
        raise ValidationError(f"missing keys in model file: {sorted(missing)}")
    if doc["format_version"] != CUSTOM_FORMAT_VERSION:
        raise ValidationError(
            f"unsupported format_version {doc['format_version']}"
        )
    two_s = doc["two_s"]
    if not isinstance(two_s, int) or two_s < 1:
        raise ValidationError(f"two_s must be a positive integer, got {two_s!r}")
    d = two_s + 1
    entries = doc["matrix"]
    if len(entries) != d ** 4:
        raise ValidationError(
            f"matrix must have d^4 = {d ** 4} entries, got {len(entries)}"
        )
    try:
        flat = np.array(
            [complex(float(re), float(im)) for re, im in entries],
            dtype=np.complex128,
        )
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"matrix entries must be [re, im] pairs: {exc}") from exc
    M = flat.reshape(d ** 2, d ** 2)
    asym = max_abs(M - M.conj().T)
    if asym > 1e-12 * max(1.0, max_abs(M)):
        raise ValidationError(
            f"matrix is not Hermitian: max |M - M^dag| = {asym:.6e}"
        )
    interaction = LocalInteraction.from_matrix(
        M, d_loc=d, auto_shift=bool(doc["auto_shift"])
    )
    model = ModelSpec(
        name=str(doc["name"]),
        spin=two_s / 2.0,
        interaction=interaction,
        conserves_sz=bool(doc["conserves_sz"]),
        ground_degeneracy=None,
        params={"source": str(path)},
    )
    report = check_frustration_free(model, frustration_L)
    if not report.passed:
        raise FrustrationFreeViolation(
            f"model {model.name!r} failed the frustration-freeness gate: "
            f"{report.reason}",
            failing_length=report.failing_length,
            report=report,
        )
    return model


def model_from_selector(selector: str, xi: float | None = None) -> ModelSpec:
    """Resolve a CLI model selector: 'xxz', 'aklt', or 'custom:<path>'."""
    if selector == "xxz":
        if xi is None:
            raise ValidationError("the xxz model requires --xi")
        return xxz_model(xi)
    if selector == "aklt":
        return aklt_model()
    if selector.startswith("custom:"):
        return load_custom(selector.split(":", 1)[1])
    raise ValidationError(
        f"unknown model selector {selector!r} (expected xxz | aklt | custom:path)"
    )
