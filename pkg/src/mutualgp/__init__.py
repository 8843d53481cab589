"""Mutual geometric phase of multiqubit Dicke superpositions under local cyclic loops."""
from .closed_form import (
    SignPattern,
    composite_gp,
    composite_trace,
    esp_all,
    esp_eval,
    multiset_perm_sum,
    mutual_gp,
    s_state_gp,
    s_state_subsystem_gp,
    subsystem_gp,
    w_state_gp,
    w_state_subsystem_gp,
)
from .core import (
    Angle,
    DickeSuperposition,
    LocalLoop,
    PhaseReport,
    ReducedQubit,
    eigen2,
    load_state,
    principal_arg,
    reduced_qubit,
    tracked_arg,
    unwrap,
    wrap,
)
from .entanglement import (
    EntanglementReport,
    attribute,
    closest_separable_gp_s,
    closest_separable_gp_w,
    er_s_state,
    er_w_state,
    inverse_er_s,
)

__version__ = "0.1.0"
