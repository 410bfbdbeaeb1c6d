"""Entanglement detection with decomposable witnesses built from local measurements.

Submodules
----------
qmat      Hermitian matrices, tensor products, partial transpose, Jacobi eigensolver.
states    Bell, separable, controlled-rotation and pseudopure states; negativity, fidelity.
measure   The fifteen two-qubit observables and a seeded Gaussian readout model.
sdp       Small dense interior-point solver for linear matrix inequalities.
witness   Witness SDP, adaptive detection and decomposability checks.
hybrid23  Qubit-qutrit two-parameter family, its witness and detection fractions.
tomo      Linear-inversion tomography.
cli       Command-line front end.
"""

from .qmat import DensityMatrix, HermitianMatrix, partial_transpose
from .measure import MeasurementRecord, measure_noisy, observable_set
from .states import bell, from_label, negativity
from .witness import WitnessProblem, adaptive_detect, solve_witness_sdp

__version__ = "0.1.0"

__all__ = [
    "DensityMatrix", "HermitianMatrix", "MeasurementRecord", "WitnessProblem",
    "adaptive_detect", "bell", "from_label", "measure_noisy", "negativity",
    "observable_set", "partial_transpose", "solve_witness_sdp",
]
