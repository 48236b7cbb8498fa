"""Inferential-model plausibility toolkit.

Associations link data, parameter and an auxiliary uniform variable; nested
predictive random sets predict the auxiliary variable; belief and
plausibility follow by containment.  The engine constructs, for any test,
the predictive random set whose plausibility of the null equals the
classical p-value, and the validity lab audits the calibration claims by
Monte Carlo.
"""

from .core import (
    Assertion,
    AssociationModel,
    EmptyFocalSetError,
    NestedRandomSet,
    PlausibilityReport,
    UnsupportedModelError,
    belief,
    check_admissible,
    containment_prob,
    focal_set,
    one_sided_prs,
    plausibility,
    plausibility_region,
    plausibility_value,
    symmetric_prs,
)
from .distributions import (
    Beta,
    Binomial,
    ChiSquared,
    Normal,
    ParameterDomainError,
    Uniform01,
    make_rng,
)
from .engine import (
    ConfigurationError,
    SupConfig,
    TestStatistic,
    canonical_stat,
    check_assumptions,
    plausibility_equals_pvalue,
    pvalue,
    synthesize_pvalue_prs,
)
from .intervals import Interval, IntervalSet
from .models import (
    BinomialModel,
    NormalMeanModel,
    NormalVarianceModel,
    make_model,
    sample_summary,
)
from .validity import (
    audit_region_coverage,
    audit_uniformity,
    audit_validity,
    coherence_demo,
    distorted_prs,
    ks_distance,
)

__version__ = "0.1.0"
