"""Unextendible sets of mutually unbiased bases in dimension p^2 from
two-qudit generalized Pauli classes."""

__version__ = "0.1.0"

from .classes import CommutingClass, disjoint, enumerate_all_classes, span_class  # noqa: E402
from .entropy import eur_bounds, h1, h2, strong_unext_probe, theorem3_check  # noqa: E402
from .pauli import PauliWord, Prime, compose, independent, power, symplectic_form  # noqa: E402
from .spreads import (  # noqa: E402
    ClassSet,
    UnextCertificate,
    assemble_unextendible,
    build_complete_set,
    certify_unextendible,
    new_classes_from_subset,
    search_unextendible,
    theorem2_scan,
)
from .states import build_basis, projector_from_label, realize_word, verify_unbiased  # noqa: E402

__all__ = [
    "ClassSet",
    "CommutingClass",
    "PauliWord",
    "Prime",
    "UnextCertificate",
    "assemble_unextendible",
    "build_basis",
    "build_complete_set",
    "certify_unextendible",
    "compose",
    "disjoint",
    "enumerate_all_classes",
    "eur_bounds",
    "h1",
    "h2",
    "independent",
    "new_classes_from_subset",
    "power",
    "projector_from_label",
    "realize_word",
    "search_unextendible",
    "span_class",
    "strong_unext_probe",
    "symplectic_form",
    "theorem2_scan",
    "theorem3_check",
    "verify_unbiased",
]
