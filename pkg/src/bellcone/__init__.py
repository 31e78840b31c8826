"""Exact duality between Bell cones and no-signaling cones in (n,2,2) scenarios.

Correlation tensors, the two F maps, exact cone enumeration, the symmetry
group with orbit classification, and the lifting constructions that add a
party.  ``bellcone.kernels.BACKEND`` tells which DD kernel is in use.
"""
from importlib.metadata import PackageNotFoundError, version

from .cone import ConeHRep, ConeVRep, enumerate_rays, membership
from .kernels import BACKEND
from .lifting import (ExtensionError, extend_box, extend_box2, extend_inequality,
                      mermin_klyshko, recognize_extension, ww_zb_local_test)
from .scenario import (bell_cone, bell_facets, chsh_functional, in_bell, in_ns, ns_cone,
                       ns_extreme_rays, pr_box)
from .symmetry import (Involution, SymmetryElement, act, classify_orbits,
                       orbit_canonical_form, parse_spec)
from .tensor import CorrelationTensor, FunctionalTensor, lower, pair, raise_

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # pragma: no cover - running from a source tree
    __version__ = "0.1.0"

__all__ = [
    "BACKEND", "ConeHRep", "ConeVRep", "CorrelationTensor", "ExtensionError",
    "FunctionalTensor", "Involution", "SymmetryElement", "act", "bell_cone", "bell_facets",
    "chsh_functional", "classify_orbits", "enumerate_rays", "extend_box", "extend_box2",
    "extend_inequality", "in_bell", "in_ns", "lower", "membership", "mermin_klyshko",
    "ns_cone", "ns_extreme_rays", "orbit_canonical_form", "pair", "parse_spec", "pr_box",
    "raise_", "recognize_extension", "ww_zb_local_test",
]
