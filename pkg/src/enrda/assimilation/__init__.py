"""The four assimilators behind a single forecast -> analysis interface."""

from .config import (
    METHODS,
    AssimilatorConfig,
    EtaPolicy,
    GammaPolicy,
    SinkhornSettings,
)
from .cycle import (
    MethodState,
    heteroscedastic_background_cov,
    floored_diagonal,
    observation_digest,
    run_assimilation_cycle,
)
from .field_transport import (
    FieldCoupling,
    couple_fields,
    displace_coupling,
    field_transport_analysis,
)
from .kalman import enkf_analysis, enkf_update
from .particle import likelihood_weights, particle_filter_analysis
from .result import AnalysisResult, CycleDiagnostics
from .transport import enrda_analysis, transport_analysis
from .variational import kalman_gain, three_d_var_analysis

__all__ = [
    "METHODS",
    "AnalysisResult",
    "AssimilatorConfig",
    "CycleDiagnostics",
    "EtaPolicy",
    "FieldCoupling",
    "GammaPolicy",
    "MethodState",
    "SinkhornSettings",
    "couple_fields",
    "displace_coupling",
    "enkf_analysis",
    "enkf_update",
    "enrda_analysis",
    "field_transport_analysis",
    "floored_diagonal",
    "heteroscedastic_background_cov",
    "kalman_gain",
    "likelihood_weights",
    "observation_digest",
    "particle_filter_analysis",
    "run_assimilation_cycle",
    "three_d_var_analysis",
    "transport_analysis",
]
