"""1-D phase-space quantum mechanics.

From a wavefunction to the characteristic amplitude xi(x, x'), the phase-space
amplitude phi(x, p) and density F(x, p), moments along three independent
routes, the Wigner-Moyal kernel, and the Schrodinger eigenproblem.
"""

from .grid import (
    ComplexField1D,
    Grid1D,
    GridError,
    MomentumField,
    MomentumGrid,
    from_momentum,
    make_grid,
    spectral_derivative,
    to_momentum,
)
from .internal_space import (
    CharacteristicAmplitude,
    DensityKernel,
    analyticity_residual,
    build_characteristic,
    symmetry_residual,
    translation_kernel,
)
from .moments import (
    MomentRequest,
    MomentResult,
    moment_p,
    moment_table,
    moment_x,
    moment_xp,
    separable_moment,
)
from .phase_space import (
    PhaseSpaceDensity,
    ProbabilityAmplitudePS,
    density,
    ensemble_average,
    marginals,
    probability_amplitude,
    reconstruct_characteristic,
    wigner_moyal,
)
from .schrodinger import (
    EigenSolution,
    EigenSolverError,
    HamiltonianSpec,
    build_hamiltonian,
    derivation_consistency,
    energy_expectation,
    solve_eigen,
)
from .states import (
    StateError,
    StateSpec,
    TailMassError,
    WaveFunction,
    build_state,
    gaussian,
    ho_eigenstate,
    normalize,
    plane_wave,
)
from .estimators import MomentFeatures, PhaseSpaceDensityTransformer, SchrodingerEigensolver

__version__ = "0.1.0"
