"""Gridless Fourier particle simulator for 2D free-space plasmas.

The package solves the electrostatic Vlasov-Poisson system for charged
particles in an open domain, optionally under an axial magnetic field and
optionally enclosed by a conducting disk with Dirichlet data.  Fields are
represented by a finite set of Fourier modes with free-space boundary
behavior supplied by a truncated Green's function, so no spatial grid
ever touches the particles.

Layering, bottom up:

- nufft: nonuniform FFTs between particles and the mode lattice
- shapes: compactly supported radial particle shapes and their spectra
- greens: truncated free-space kernel and precomputed kernel tables
- fields: the gridless field solver (deposit, solve, gather, energy)
- dirichlet: boundary-integral correction enforcing disk boundary data
- dynamics: particle ensembles and the magnetized leapfrog pushers
- pic: lattice-based baseline solver with the same kernel
- io: diagnostics CSV and field snapshot formats
- scenarios: experiment configs, initialization, drivers, studies
- cli: the freepif command line tool
"""

from freepif.dirichlet import (
    DirichletSolver,
    DiskBoundary,
    harmonic_field,
    harmonic_potential,
)
from freepif.dynamics import (
    ParticleEnsemble,
    boris_velocity_update,
    bootstrap_half_velocity,
    drift,
    finite_step_gyroradius,
    kinetic_energy,
    leapfrog_velocity_update,
    momentum,
    synchronized_velocity,
)
from freepif.fields import FieldSolveConfig, FieldSolver
from freepif.greens import (
    PrecomputedKernels,
    ghat,
    load_kernels,
    min_truncation_radius,
    precompute_kernels,
    save_kernels,
)
from freepif.io import (
    DIAGNOSTIC_COLUMNS,
    DiagnosticsWriter,
    load_field_snapshot,
    read_diagnostics,
    save_field_snapshot,
    snapshot_to_csv,
)
from freepif.nufft import (
    Gridder,
    ModeGrid,
    type1,
    type1_direct,
    type2,
    type2_direct,
)
from freepif.pic import PICSolver
from freepif.scenarios import (
    SCENARIOS,
    RunResult,
    ScenarioConfig,
    energy_convergence_study,
    gaussian_blob_potential,
    init_beam,
    laplace_convergence_study,
    load_config,
    poisson_convergence_study,
    run,
)
from freepif.shapes import RadialBSpline, ShapeFunction, TruncatedGaussian

__version__ = "0.1.0"

__all__ = [
    "DIAGNOSTIC_COLUMNS",
    "DiagnosticsWriter",
    "DirichletSolver",
    "DiskBoundary",
    "FieldSolveConfig",
    "FieldSolver",
    "Gridder",
    "ModeGrid",
    "PICSolver",
    "ParticleEnsemble",
    "PrecomputedKernels",
    "RadialBSpline",
    "RunResult",
    "SCENARIOS",
    "ScenarioConfig",
    "ShapeFunction",
    "TruncatedGaussian",
    "__version__",
    "boris_velocity_update",
    "bootstrap_half_velocity",
    "drift",
    "energy_convergence_study",
    "finite_step_gyroradius",
    "gaussian_blob_potential",
    "ghat",
    "harmonic_field",
    "harmonic_potential",
    "init_beam",
    "kinetic_energy",
    "laplace_convergence_study",
    "leapfrog_velocity_update",
    "load_config",
    "load_field_snapshot",
    "load_kernels",
    "min_truncation_radius",
    "momentum",
    "poisson_convergence_study",
    "precompute_kernels",
    "read_diagnostics",
    "run",
    "save_field_snapshot",
    "save_kernels",
    "snapshot_to_csv",
    "synchronized_velocity",
    "type1",
    "type1_direct",
    "type2",
    "type2_direct",
]
