"""Zero-range-potential scattering on multi-centre targets with Darboux dressing."""
from .core import (HARTREE_EV, INF, Channel, DressingError, DressingStep, Geometry,
                   GeometryError, Site, UnsupportedStructureError, ZRPError, build_xn,
                   build_yxn, energy_to_wavenumber, ev_to_hartree, hartree_to_ev,
                   wavenumber_to_energy)
from .gzrp import bound_state, phase, resonance_poles, riccati_bessel, s_matrix_element, tan_phase
from .multicenter import PhaseSolution, cross_sections, phases, scattering_amplitude, solve_phases
from .structures import xn_cross_section, xn_phases, yxn_phases

__version__ = "0.1.0"

__all__ = [
    "HARTREE_EV", "INF", "Channel", "DressingError", "DressingStep", "Geometry",
    "GeometryError", "Site", "UnsupportedStructureError", "ZRPError", "build_xn", "build_yxn",
    "energy_to_wavenumber", "ev_to_hartree", "hartree_to_ev", "wavenumber_to_energy",
    "bound_state", "phase", "resonance_poles", "riccati_bessel", "s_matrix_element", "tan_phase",
    "PhaseSolution", "cross_sections", "phases", "scattering_amplitude", "solve_phases",
    "xn_cross_section", "xn_phases", "yxn_phases",
]
