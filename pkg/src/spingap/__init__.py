"""Certified spectral-gap lower bounds for frustration-free spin chains."""

from .backend import get_backend, set_backend
from .closedform import (
    AKLTGram,
    AKLTSpectrum,
    aklt_A_matrix,
    aklt_gram,
    aklt_lambda,
    aklt_projector_product_basis,
    cross_validate_aklt,
    cross_validate_xxz,
    kt_ground_states,
    xxz_epsilon_closed,
    xxz_epsilon_limit,
)
from .errors import (
    ConvergenceError,
    DimensionCapError,
    FrustrationFreeViolation,
    InconclusiveBoundError,
    NumericalAmbiguityError,
    SpingapError,
    ValidationError,
    VerificationFailure,
)
from .martingale import (
    BoundCertificate,
    EpsilonResult,
    GammaTable,
    GroundProjector,
    alpha_beta,
    bound_certificate,
    epsilon,
    epsilon_sup,
    gamma_interval,
    gamma_table,
    ground_projector,
    k_operator,
    verify_certificate,
    verify_lemma_cs,
    verify_theorem_inequality,
)
from .models import (
    LocalInteraction,
    ModelSpec,
    XXZParams,
    aklt_interaction,
    aklt_model,
    load_custom,
    xxz_interaction,
    xxz_model,
)
from .numerics import (
    OrthonormalBasis,
    SparseHermitian,
    SpectralDecomposition,
    hermitian_eig,
    kernel_basis,
    lanczos_lowest,
    project_onto,
)
from .spinchain import (
    ChainHamiltonian,
    SiteInterval,
    SpinRep,
    assemble,
    check_frustration_free,
    embed_two_site,
    sector_hamiltonian,
    spin_operators,
    sz_sectors,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
