"""Free-space electrostatic field solves on scattered particles.

The solver carries no grid for the particles themselves.  Each solve is a
type-1 transform of the charges onto a lattice of Fourier modes, a
multiplication by precomputed kernel tables, and type-2 transforms back to
whatever points need values.  Because the convolution kernel is cut off at
a radius no image copy can reach, the periodic mode sum reproduces the true
free-space interaction inside the box to solver tolerance.

Forces are always evaluated through the spectral derivative of the
interaction-energy table, never through an independently sampled force
kernel.  That choice makes the discrete force exactly the negative gradient
of the discrete energy, which is what keeps long Boris runs free of secular
energy drift.  Outputs of the inverse transforms are real up to roundoff;
the residual imaginary part is monitored and escalates from a warning to an
error if it grows suspicious.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from freepif.greens import (
    PrecomputedKernels,
    ghat,
    min_truncation_radius,
    mode_quadrature_weight,
    precompute_kernels,
)
from freepif.nufft import Gridder, ModeGrid, type2
from freepif.shapes import ShapeFunction

__all__ = ["FieldSolveConfig", "FieldSolver"]

def _realify(
    values: np.ndarray,
    bound: float,
    context: str,
    warn: float = 1e-10,
    fail: float = 1e-8,
) -> np.ndarray:
    """Drop the imaginary part after checking it is roundoff-sized.

    bound is an a-priori amplitude bound for the mode sum (the l1 norm of the
    coefficients); measuring against it instead of the computed real part
    avoids false alarms when the true answer is itself near zero.
    """
    if bound == 0.0:
        return values.real.copy()
    residue = np.max(np.abs(values.imag)) / bound
    if residue > fail:
        raise RuntimeError(
            f"imaginary residue {residue:.3e} in {context}: kernel tables or "
            "transforms are inconsistent"
        )
    if residue > warn:
        warnings.warn(
            f"imaginary residue {residue:.3e} in {context} exceeds {warn:.0e}",
            RuntimeWarning,
            stacklevel=3,
        )
    return values.real.copy()


@dataclass
class FieldSolveConfig:
    """Parameters of a free-space field solve.

    n_modes sets the resolved bandwidth (modes per dimension before
    extension).  The kernel truncation radius must clear the box diameter
    plus two shape radii; violating that silently corrupts the far field,
    so it is checked eagerly.  precompute=True switches from the quadruply
    extended direct lattice to condensed tables on the doubly extended one.
    """

    n_modes: int
    shape: ShapeFunction
    truncation_radius: float
    half_extent: float = 0.5
    tol: float = 1e-12
    precompute: bool = False
    workers: int = 1

    def __post_init__(self):
        lmin = min_truncation_radius(2, self.shape.support_radius, self.half_extent)
        if self.truncation_radius < lmin:
            raise ValueError(
                f"truncation radius {self.truncation_radius} is below the "
                f"admissible minimum {lmin:.6f} for this box and shape"
            )


class FieldSolver:
    """Evaluates potentials, fields, and energies of mollified point charges.

    Typical stepping usage binds the particle positions once per step and
    then reuses the cached spreading stencil for the deposit and the two
    force gathers:

        solver.bind(positions)
        rho = solver.deposit(charges)
        acc = solver.accelerations(rho, q_over_m)
        energy = solver.field_energy(rho)
    """

    def __init__(self, config: FieldSolveConfig, kernels: PrecomputedKernels | None = None):
        self.config = config
        alpha = 2 if config.precompute else 4
        self.grid = ModeGrid(config.n_modes, alpha=alpha, half_extent=config.half_extent)
        if config.precompute:
            if kernels is None:
                kernels = precompute_kernels(
                    config.n_modes,
                    config.shape,
                    config.truncation_radius,
                    half_extent=config.half_extent,
                    workers=config.workers,
                )
            elif not kernels.matches(
                config.n_modes, config.truncation_radius, config.half_extent, config.shape
            ):
                raise ValueError("supplied kernel tables do not match this configuration")
            self.kernels = kernels
            pot = kernels.pot_coeff
            energy = kernels.energy_coeff
        else:
            if kernels is not None:
                raise ValueError("kernel tables are only used when precompute is enabled")
            self.kernels = None
            s = self.grid.k_radius
            w = mode_quadrature_weight(self.grid)
            g = ghat(s, config.truncation_radius)
            sh = config.shape.fourier(s)
            pot = w * g * sh
            energy = w * g * sh * sh
        # the lowest row and column have no negative-frequency partners and
        # cannot take part in representing a real field; dropping them from
        # every table keeps outputs real and, crucially, keeps the force the
        # exact gradient of the tabulated energy
        mask = np.ones_like(pot)
        mask[0, :] = 0.0
        mask[:, 0] = 0.0
        self._pot = pot * mask
        self._energy = energy * mask
        kx, ky = self.grid.k_meshgrid()
        self._force_x = -1j * kx * self._energy
        self._force_y = -1j * ky * self._energy
        self._gridder: Gridder | None = None
        self._is_bound = False
        # residue thresholds track the transform tolerance when it is coarse
        self._imag_warn = max(1e-10, 100.0 * self.config.tol)
        self._imag_fail = max(1e-8, 1e4 * self.config.tol)

    # ------------------------------------------------------------------
    # per-step pipeline

    def bind(self, positions: np.ndarray) -> None:
        """Cache the spreading stencil for one set of particle positions."""
        if self._gridder is None:
            self._gridder = Gridder(self.grid, tol=self.config.tol, workers=self.config.workers)
        self._gridder.bind(positions)
        self._is_bound = True

    def _bound(self) -> Gridder:
        if not self._is_bound:
            raise RuntimeError("no particle positions bound; call bind() first")
        return self._gridder

    def deposit(self, charges) -> np.ndarray:
        """Charge modes sum_j q_j exp(-i k.X_j) on the extended lattice."""
        gridder = self._bound()
        q = np.broadcast_to(np.asarray(charges, dtype=float), (gridder.n_points,))
        return gridder.type1(q)

    def _real_output(self, values: np.ndarray, coeff: np.ndarray, context: str) -> np.ndarray:
        bound = float(np.sum(np.abs(coeff)))
        return _realify(values, bound, context, self._imag_warn, self._imag_fail)

    def accelerations(self, rho_modes: np.ndarray, q_over_m) -> np.ndarray:
        """Per-particle acceleration (N, 2) from the deposited charge modes."""
        gridder = self._bound()
        cx = self._force_x * rho_modes
        cy = self._force_y * rho_modes
        ax = self._real_output(gridder.type2(cx), cx, "acceleration x")
        ay = self._real_output(gridder.type2(cy), cy, "acceleration y")
        acc = np.column_stack([ax, ay])
        return acc * np.reshape(np.asarray(q_over_m, dtype=float), (-1, 1))

    def potential_at_sources(self, rho_modes: np.ndarray, mollified: bool = True) -> np.ndarray:
        """Potential at the bound particle positions.

        mollified=True evaluates the shape-averaged potential each particle
        actually feels; that is the variant whose weighted sum gives the
        interaction energy.
        """
        gridder = self._bound()
        table = self._energy if mollified else self._pot
        coeff = table * rho_modes
        return self._real_output(gridder.type2(coeff), coeff, "potential at sources")

    # ------------------------------------------------------------------
    # evaluation at arbitrary targets

    def potential_at(self, targets, rho_modes: np.ndarray, mollified: bool = False) -> np.ndarray:
        """Potential at arbitrary points inside the box."""
        table = self._energy if mollified else self._pot
        coeff = table * rho_modes
        out = type2(targets, coeff, self.grid, tol=self.config.tol, workers=self.config.workers)
        return self._real_output(out, coeff, "potential at targets")

    def field_at(self, targets, rho_modes: np.ndarray) -> np.ndarray:
        """Mollified electric field (K, 2) at arbitrary points."""
        cfg = self.config
        cx = self._force_x * rho_modes
        cy = self._force_y * rho_modes
        ex = type2(targets, cx, self.grid, tol=cfg.tol, workers=cfg.workers)
        ey = type2(targets, cy, self.grid, tol=cfg.tol, workers=cfg.workers)
        return np.column_stack(
            [
                self._real_output(ex, cx, "field x at targets"),
                self._real_output(ey, cy, "field y at targets"),
            ]
        )

    # ------------------------------------------------------------------
    # scalar diagnostics

    def field_energy(self, rho_modes: np.ndarray) -> float:
        """Interaction energy 1/2 sum_k E(k) |rho(k)|^2 of the mollified charges."""
        mag2 = rho_modes.real**2 + rho_modes.imag**2
        return 0.5 * float(np.sum(self._energy * mag2))

    def charge_residual(self, rho_modes: np.ndarray, total_charge: float) -> float:
        """Relative defect of the zero mode against the known total charge.

        The zero mode is the best-resolved quantity the transform produces,
        so this is a cheap running check on deposit accuracy.
        """
        m = self.grid.m_total
        zero_mode = rho_modes[m // 2, m // 2]
        return abs(zero_mode / total_charge - 1.0)

    # ------------------------------------------------------------------
    # gridded output for studies and plots

    def grid_coordinates(self, n_out: int) -> np.ndarray:
        """Sample abscissae of eval_on_grid along one axis."""
        h = self.config.half_extent
        return (np.arange(n_out) - n_out // 2) * (2.0 * h / n_out)

    def eval_on_grid(self, rho_modes: np.ndarray, n_out: int, mollified: bool = False) -> np.ndarray:
        """Potential sampled on an n_out x n_out lattice covering the box.

        Uses zero-padded inverse FFTs, which evaluate the mode sum exactly,
        so it doubles as an independent check on the scattered-point path.
        """
        if n_out < self.config.n_modes or n_out % 2:
            raise ValueError("n_out must be an even number >= n_modes")
        table = self._energy if mollified else self._pot
        coeff = table * rho_modes
        m = self.grid.m_total
        big = self.grid.alpha * n_out
        padded = np.zeros((big, big), dtype=complex)
        off = big // 2 - m // 2
        padded[off : off + m, off : off + m] = coeff
        samples = sfft.ifft2(np.fft.ifftshift(padded), workers=self.config.workers) * (big * big)
        samples = np.fft.fftshift(self._real_output(samples, coeff, "gridded potential"))
        start = big // 2 - n_out // 2
        return samples[start : start + n_out, start : start + n_out]
