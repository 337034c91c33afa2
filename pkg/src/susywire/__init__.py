"""Exact and numeric spectra of a neutron bound to a current-carrying wire.

The reduced radial problem has a hidden su(2) symmetry: the partner
Hamiltonians ``H_+-`` of a broken-SUSY pair are Poschl-Teller operators
whose eigenstates, built exactly in a ring of half-integer powers of
``sin(beta/2)`` and ``cos(beta/2)``, fill multiplets of dimension ``2j+1``.
"""

from .trigring import HalfInt, TrigPoly
from .operators import SectorParams, SpinorState
from .multiplets import Multiplet, build_multiplet, spectrum_table

__all__ = [
    "HalfInt",
    "TrigPoly",
    "SectorParams",
    "SpinorState",
    "Multiplet",
    "build_multiplet",
    "spectrum_table",
]
__version__ = "0.1.0"
