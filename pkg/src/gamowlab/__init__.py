"""Resonance (Gamow) states of the spherical shell potential.

Pole locations, normalised eigenfunctions, energy-representation
functionals, and resonance expansions of amplitudes and survival
probabilities, in natural units hbar = 2m = 1.
"""

from .core import (JostPair, MatchingCoefficients, ShellPotential,
                   green_function, jost, match_coefficients, regular_solution,
                   s_matrix)
from .errors import (BackgroundDivergenceError, BoundaryZeroError,
                     CertificateError, ConfigError, ConvergenceError,
                     DomainError, ExtrapolationError, FalloffError,
                     GamowLabError, NoPolesError, NonIntegerWindingError,
                     PoleError, RegulatorSignError, ResidueError,
                     SemigroupDomainError, WindowNotFoundError)
from .expansion import (ExpansionReport, SurvivalCurve, direct_amplitude,
                        dominant_pole_split, expansion_amplitude, survival)
from .packets import (PacketTerm, ResonancePacket, WavePacket, overlap,
                      standard_packets)
from .poles import (Pole, PoleKind, SearchRegion, classify, count_zeros,
                    default_region, find_poles)
from .spectral import (EnergyTransform, breit_wigner_action,
                       complex_delta_action, residue_action, transform)
from .states import (EvolutionFactor, GamowState, build_state, build_states,
                     evolution_factor, green_residue, pair_bra, pair_ket,
                     regulated_overlap, zeldovich_norm)

__version__ = "0.1.0"

__all__ = [
    "ShellPotential", "JostPair", "MatchingCoefficients", "jost",
    "match_coefficients", "s_matrix", "regular_solution", "green_function",
    "Pole", "PoleKind", "SearchRegion", "default_region", "count_zeros",
    "find_poles", "classify",
    "GamowState", "EvolutionFactor", "build_state", "build_states",
    "zeldovich_norm", "regulated_overlap", "green_residue", "pair_ket",
    "pair_bra", "evolution_factor",
    "WavePacket", "PacketTerm", "ResonancePacket", "overlap", "standard_packets",
    "EnergyTransform", "transform", "complex_delta_action", "residue_action",
    "breit_wigner_action",
    "ExpansionReport", "SurvivalCurve", "direct_amplitude",
    "expansion_amplitude", "dominant_pole_split", "survival",
    "GamowLabError", "DomainError", "PoleError", "BoundaryZeroError",
    "NonIntegerWindingError", "ConvergenceError", "ResidueError",
    "ExtrapolationError", "FalloffError", "CertificateError",
    "SemigroupDomainError", "RegulatorSignError", "BackgroundDivergenceError",
    "WindowNotFoundError", "NoPolesError", "ConfigError",
]
