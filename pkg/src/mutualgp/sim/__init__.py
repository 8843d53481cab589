"""Dense statevector oracle: explicit local paths, dynamical and total phases."""
from .paths import (
    HarmonicDrive,
    PTReport,
    UnitaryPath,
    enforce_pt,
    pt_alpha_for_phase,
    pt_exact,
    pt_loop_phase,
    pt_path_z,
    pt_report,
    random_drive,
    random_local_path,
)
from .phases import dynamical_phase, subsystem_gp_oracle, total_phase
from .statevector import (
    MAX_QUBITS,
    StateVector,
    apply_local,
    dicke_state,
    partial_trace_single,
    random_state,
    superpose,
)

__all__ = [
    "HarmonicDrive", "PTReport", "UnitaryPath", "enforce_pt", "pt_alpha_for_phase",
    "pt_exact", "pt_loop_phase", "pt_path_z", "pt_report", "random_drive",
    "random_local_path", "dynamical_phase", "subsystem_gp_oracle", "total_phase",
    "MAX_QUBITS", "StateVector", "apply_local", "dicke_state", "partial_trace_single",
    "random_state", "superpose",
]
