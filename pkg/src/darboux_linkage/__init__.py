"""Overconstrained 4RC linkage realizing a vertical Darboux motion."""

from .darboux_factor import (
    DesignParams,
    Factorization,
    InvalidDesign,
    LinkageDescription,
    VerificationFailure,
    extract_linkage,
    factorize,
    make_vertical_darboux,
)
from .dq_core import DualQuaternion, PlueckerLine, ProjectivePoint, Quaternion
from .linkage_model import JointValues, chain_pose, coupler_transform, trace_point
from .mode_analysis import enumerate_modes, mode_A, mode_B
from .motion_poly import MotionPolynomial

__all__ = [
    "DesignParams",
    "DualQuaternion",
    "Factorization",
    "InvalidDesign",
    "JointValues",
    "LinkageDescription",
    "MotionPolynomial",
    "PlueckerLine",
    "ProjectivePoint",
    "Quaternion",
    "VerificationFailure",
    "chain_pose",
    "coupler_transform",
    "enumerate_modes",
    "extract_linkage",
    "factorize",
    "make_vertical_darboux",
    "mode_A",
    "mode_B",
    "trace_point",
]
