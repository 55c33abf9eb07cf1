"""Artinian BCAs, finite-length modules, their duals and trace maps."""
from .algebra import ArtinianBca, CoeffField, sigma_apply
from .derham import DeRhamComplex, omega_complex
from .duals import (
    ContinuousDO,
    DualElement,
    DualMap,
    DualModule,
    bca_order,
    dij_matrix,
    dual_do,
    dual_eval,
    dual_module,
    dual_of_do,
    evaluation_matrix,
    k_dualizing,
    psi,
    residue_pairing,
    sigma_coords,
)
from .modules import FinLenModule
from .traces import BcaMorphism, extend_coefficient_field, f_sharp, trace_gram_rank, trace_map

__all__ = [
    "ArtinianBca", "CoeffField", "sigma_apply", "DeRhamComplex", "omega_complex",
    "ContinuousDO", "DualElement", "DualMap", "DualModule", "bca_order", "dij_matrix",
    "dual_do", "dual_eval", "dual_module", "dual_of_do", "evaluation_matrix", "k_dualizing",
    "psi", "residue_pairing", "sigma_coords", "FinLenModule", "BcaMorphism",
    "extend_coefficient_field", "f_sharp", "trace_gram_rank", "trace_map",
]
