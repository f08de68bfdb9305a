"""Log-space tools for real-rooted polynomials, their coefficient profiles and
finite free convolutions."""

from .closedform import (
    Bernoulli01,
    DiracMixture,
    MeasureSpec,
    MuKappa,
    NuAB,
    Uniform,
    lambert_w0,
    lambert_w0_above,
    parse_closed_form,
)
from .freeconv import ExactPoly, boxplus_n, boxtimes_n, hadamard_n, repeated_action, t_poly
from .logpoly import EmpiricalMeasure, LogPoly, empirical_measure, from_roots, roots
from .profile import Profile, TiltingContext, cauchy_from_profile, empirical_profile, profile_from_measure
from .rootspace import RootSet
from .samples import TransformSample
from .transforms import cauchy, psi_transform, r_transform, s_transform

__version__ = "0.1.0"

__all__ = [
    "LogPoly",
    "EmpiricalMeasure",
    "RootSet",
    "Profile",
    "TiltingContext",
    "TransformSample",
    "ExactPoly",
    "MeasureSpec",
    "DiracMixture",
    "Uniform",
    "Bernoulli01",
    "NuAB",
    "MuKappa",
    "from_roots",
    "roots",
    "empirical_measure",
    "empirical_profile",
    "profile_from_measure",
    "cauchy_from_profile",
    "boxplus_n",
    "boxtimes_n",
    "hadamard_n",
    "repeated_action",
    "t_poly",
    "cauchy",
    "r_transform",
    "psi_transform",
    "s_transform",
    "lambert_w0",
    "lambert_w0_above",
    "parse_closed_form",
    "__version__",
]
