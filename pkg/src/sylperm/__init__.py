"""Exact permanents of Sylvester Hadamard matrices.

Classical and Ryser engines, the class-collapsed (cocyclic) Ryser
evaluation, and checkers for the structural facts it relies on.
"""

from .cocyclic import per_cocyclic_full, per_cocyclic_half, phi, phi_wht
from .engines import OpCount, PermanentResult, per_naive, per_ryser, per_ryser_gray
from .hadamard import GroupElement, SignMatrix, cocycle_entry, sylvester
from .pequiv import SiorMatrix, canonical_form, enumerate_classes

__version__ = "0.1.0"
