"""Sets in R^d that avoid a sequence of distances while keeping prescribed density.

Typical use::

    from distavoid import NormSpec, FSpec, build, certify

    m = build(1, NormSpec.l2(1), FSpec.parse("inv_poly:1"), stage_count=2)
    assert certify(m).ok
"""
__version__ = "0.1.0"

from .builder import Budgets, build, place_cube, plan_stage, threshold
from .certify import CertReport, certify
from .decay import FSpec
from .errors import (BudgetExceeded, CertificationError, ConfigError, DistAvoidError, EnumerationBudgetExceeded,
                     FactorizationBudgetExceeded, ManifestError, NonExactNormError, ScaleBudgetExceeded)
from .manifest_io import dumps, loads, read_manifest, write_manifest
from .model import CertSummary, ConstructionManifest, Stage
from .norms import (EquivalenceConstants, NormSpec, compare_norm_to, equivalence_constants, eval_norm,
                    min_lattice_norm, unit_ball_volume)
from .oracle import (SamplerConfig, brute_pair_check, contains, mc_density, pair_margin, sample_point,
                     thickened_lattice_demo)
from .render import render
from .scale import Lin, Scale
from .spectrum import GapCertificate, find_gap, representable, spectrum_window, verify_gap

__all__ = [
    "Budgets", "BudgetExceeded", "CertReport", "CertSummary", "CertificationError", "ConfigError",
    "ConstructionManifest", "DistAvoidError", "EnumerationBudgetExceeded", "EquivalenceConstants", "FSpec",
    "FactorizationBudgetExceeded", "GapCertificate", "Lin", "ManifestError", "NonExactNormError", "NormSpec",
    "SamplerConfig", "Scale", "ScaleBudgetExceeded", "Stage", "brute_pair_check", "build", "certify", "compare_norm_to", "contains",
    "dumps", "equivalence_constants", "eval_norm", "find_gap", "loads", "mc_density", "min_lattice_norm",
    "pair_margin", "place_cube", "plan_stage", "read_manifest", "render", "representable", "sample_point",
    "spectrum_window", "thickened_lattice_demo", "threshold", "unit_ball_volume", "verify_gap", "write_manifest",
]
