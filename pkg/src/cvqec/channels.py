"""Error channels: random displacement, qubit dephasing, boson-number confinement.

The displacement channel exists in two interchangeable forms, a
density-matrix transform (2-D Gauss-Hermite average over displacements)
and a Kraus-sampling form (draw one displacement per trajectory); the
Monte Carlo engine uses the latter.  Confinement is the dissipative map
that pumps every n >= 2 Fock level of an auxiliary mode back to |1>,
turning the mode into a qubit.
"""

from __future__ import annotations

import numpy as np
from numpy.polynomial.hermite import hermgauss

from .fock import DensityMatrix, DisplacementEngine, TruncationError
from .gaussian import NoiseModel

__all__ = [
    "sample_displacement",
    "apply_displacement_channel",
    "dephasing",
    "confine_single_boson",
    "confinement_kraus",
]

_Z = np.diag([1.0, -1.0]).astype(complex)


def sample_displacement(noise: NoiseModel, rng: np.random.Generator) -> complex:
    """One draw of the complex displacement; both quadratures are i.i.d.
    zero-mean Gaussian with variance sigma^2 / 2."""
    scale = noise.sigma / np.sqrt(2.0)
    bq, bp = rng.normal(0.0, scale, size=2)
    return complex(bq, bp)


def apply_displacement_channel(rho: DensityMatrix, noise: NoiseModel,
                               n_nodes: int = 64) -> DensityMatrix:
    """Average D(beta) rho D(beta)^dag over the Gaussian displacement
    distribution with a tensor-product Gauss-Hermite rule."""
    dim = rho.dim
    t, w = hermgauss(n_nodes)
    # Effective support: nodes past |t| ~ 5.7 carry Gaussian weight < 1e-14.
    beta_eff = noise.sigma * min(t[-1], 5.7)
    if 2.0 * beta_eff**2 > (dim - 1) / 4.0:
        raise TruncationError(
            f"sigma={noise.sigma} needs displacements up to |beta|^2="
            f"{2 * beta_eff**2:.3g}, beyond headroom (dim-1)/4={(dim - 1) / 4}")
    engine = DisplacementEngine(dim)
    # The 2-D average factorizes: D(bq + i bp) rho D^dag is a q-congruence
    # followed by a p-congruence, so two 1-D passes suffice.
    inner = np.zeros((dim, dim), dtype=complex)
    for j in range(n_nodes):
        d = engine.matrix(complex(noise.sigma * t[j], 0.0))
        inner += w[j] * (d @ rho.matrix @ d.conj().T)
    out = np.zeros((dim, dim), dtype=complex)
    for i in range(n_nodes):
        d = engine.matrix(complex(0.0, noise.sigma * t[i]))
        out += w[i] * (d @ inner @ d.conj().T)
    out /= np.pi
    out = 0.5 * (out + out.conj().T)
    return DensityMatrix(out)


def dephasing(rho: DensityMatrix, p_phi: float) -> DensityMatrix:
    """(1 - p) rho + p Z rho Z on a single qubit."""
    if rho.dim != 2:
        raise ValueError(f"dephasing acts on a qubit, got dimension {rho.dim}")
    if not 0.0 <= p_phi <= 0.5:
        raise ValueError(f"p_phi must lie in [0, 1/2], got {p_phi}")
    m = (1.0 - p_phi) * rho.matrix + p_phi * (_Z @ rho.matrix @ _Z)
    return DensityMatrix(m)


def confinement_kraus(dim: int) -> list[np.ndarray]:
    """Kraus operators (dim -> 2) confining a mode to the {|0>, |1>} subspace.

    The qubit subspace is untouched (single identity-like Kraus term, so
    0-1 coherence survives); each n >= 2 level is pumped incoherently to
    |1>.  Composed with the displacement channel this reproduces the
    closed-form single-boson-qubit error channel.
    """
    if dim < 3:
        raise ValueError("confinement needs at least 3 Fock levels")
    k0 = np.zeros((2, dim), dtype=complex)
    k0[0, 0] = 1.0
    k0[1, 1] = 1.0
    ops = [k0]
    for n in range(2, dim):
        k = np.zeros((2, dim), dtype=complex)
        k[1, n] = 1.0
        ops.append(k)
    return ops


def confine_single_boson(rho_mode: DensityMatrix) -> DensityMatrix:
    """Dissipative map sending all population with n >= 1 to |1> while
    leaving the {|0>, |1>} block coherent; returns a qubit state."""
    if rho_mode.dim < 8:
        raise ValueError(f"mode truncation {rho_mode.dim - 1} too small, need >= 8")
    out = np.zeros((2, 2), dtype=complex)
    for k in confinement_kraus(rho_mode.dim):
        out += k @ rho_mode.matrix @ k.conj().T
    return DensityMatrix(out)
