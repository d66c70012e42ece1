"""Multi-source fusion of subjective logic opinions."""

from .core import (
    Domain,
    HyperOpinion,
    MultinomialOpinion,
    base_rate_of_set,
    is_dogmatic,
    is_vacuous,
    project_probability,
    project_probability_hyper,
    relative_base_rate,
    uncertainty_maximize,
    uniform_base_rate,
    validate,
)
from .dirichlet import (
    DogmaticLimit,
    EvidenceRecord,
    dirichlet_pdf,
    dogmatic_weights,
    evidence_to_opinion,
    hyper_dirichlet_pdf,
    opinion_to_evidence,
)
from .fusion import (
    OPERATORS,
    CcfTrace,
    FusionOptions,
    MassFunction,
    dempster_combine,
    fuse,
    fuse_averaging,
    fuse_consensus_compromise,
    fuse_constraint,
    fuse_cumulative,
    fuse_epistemic_cumulative,
    fuse_weighted,
)

__version__ = "0.1.0"
