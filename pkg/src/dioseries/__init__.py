"""Certified numerics for sum sin^n(pi n theta)/n^alpha and sum cos^n(pi n theta)/n^alpha."""

__version__ = "0.1.0"

from .angles import (  # noqa: E402
    ContinuedFractionAngle,
    DecimalAngle,
    NamedAngle,
    Rational,
    ReducedAngle,
    SeriesKind,
    parse_theta,
    reduce_angle,
    signed_term,
    term_magnitude,
)
from .ball import BoundedReal, PrecisionBudget  # noqa: E402
from .cf import ContinuedFractionExpansion, Convergent, convergents, estimate_mu, expand  # noqa: E402
from .dyadic import Dyadic  # noqa: E402
from .errors import *  # noqa: E402,F401,F403
from .liouville import DivergenceCertificate, LiouvilleSchedule, build_schedule, certify, demo_divergence  # noqa: E402
from .measure import MonteCarloReport, WallisValue, expected_abs_sum, mc_estimate, wallis  # noqa: E402
from .rational import ClassificationReport, ConvergenceClass, classify, residue_bases  # noqa: E402
from .series import (  # noqa: E402
    accelerated_value,
    compute_Aq,
    decompose,
    gelfond_asymptotic,
    partial_sum,
    polylog_sum,
    rate_certificate,
    tail_bound,
)
from .shells import ShellRecord, enumerate_shell, enumerate_shells, fit_gap_exponent, shell_sums  # noqa: E402
