"""Exact spectra by diagonalization in a harmonic-oscillator basis.

With x = sqrt(hbar / (2 m W)) (a + a^dagger) at basis frequency W,

    H = hbar W (k + 1/2) + m (w^2 - W^2) x^2 / 2 + g x^(2p) / (2p)

and the powers of x are banded. Building them as products of the
tridiagonal x on a basis padded by p states gives the exact projection of H
onto the first ``size`` states, so enlarging the basis can only lower each
eigenvalue.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh

from .errors import ConvergenceError, DomainError
from .model import Family

DEFAULT_CAP = 4096


class Parity(str, enum.Enum):
    EVEN = "even"
    ODD = "odd"
    BOTH = "both"


@dataclass(frozen=True)
class BasisConfig:
    size: int
    scale_frequency: float
    parity: Parity = Parity.BOTH

    def __post_init__(self):
        object.__setattr__(self, "parity", Parity(self.parity))
        if self.size < 4:
            raise DomainError("basis size must be >= 4")
        if not self.scale_frequency > 0:
            raise DomainError("scale_frequency must be positive")


@dataclass(frozen=True)
class OracleSpectrum:
    energies: tuple
    basis_size_used: int
    convergence_estimate: tuple


def default_scale_frequency(spec):
    """Basis frequency matched to the stiffer of the harmonic and anharmonic parts."""
    hbar, m, g = spec.hbar, spec.mass, spec.coupling
    if spec.family is Family.HARMONIC:
        return spec.omega
    if spec.family is Family.QUARTIC:
        natural = (hbar * g / m**2) ** (1 / 3)
    else:
        # x^6 elements grow like size^3; a stiffer basis keeps roundoff below 1e-9
        natural = 3 * (hbar**2 * g / m**3) ** (1 / 4)
    return max(spec.omega, natural)


def position_matrix(size, scale):
    """Tridiagonal x on ``size`` states, in units where x = scale (a + a^dagger)."""
    off = scale * np.sqrt(np.arange(1, size))
    return np.diag(off, 1) + np.diag(off, -1)


def hamiltonian_matrix(spec, basis):
    """Full (parity='both') or single-parity block of H, exactly symmetric."""
    hbar, m, W = spec.hbar, spec.mass, basis.scale_frequency
    p = spec.power or 1
    N = basis.size
    pad = N + p
    X = position_matrix(pad, math.sqrt(hbar / (2 * m * W)))
    X2 = X @ X
    H = np.diag(hbar * W * (np.arange(pad) + 0.5))
    H = H + 0.5 * m * (spec.omega**2 - W**2) * X2
    if spec.power is not None:
        Xp = X2
        for _ in range(p - 1):
            Xp = Xp @ X2
        H = H + spec.coupling / (2 * p) * Xp
    H = H[:N, :N]
    H = 0.5 * (H + H.T)
    if basis.parity is Parity.EVEN:
        return H[0::2, 0::2]
    if basis.parity is Parity.ODD:
        return H[1::2, 1::2]
    return H


def _lowest(spec, size, scale, count):
    """Lowest ``count`` eigenvalues from the two parity blocks."""
    vals, norm = [], 0.0
    for parity in (Parity.EVEN, Parity.ODD):
        H = hamiltonian_matrix(spec, BasisConfig(size, scale, parity))
        k = min(H.shape[0], count // 2 + 1)
        vals.append(eigh(H, eigvals_only=True, subset_by_index=[0, k - 1]))
        norm = max(norm, float(np.abs(H).sum(axis=1).max()))
    return np.sort(np.concatenate(vals))[:count], norm


def exact_spectrum(spec, n_max, tol=1e-10, scale_frequency=None, cap=DEFAULT_CAP):
    """Levels 0..n_max converged to relative tolerance ``tol`` under basis doubling."""
    if n_max < 0:
        raise DomainError("n_max must be >= 0")
    if not 1e-12 <= tol <= 1e-4:
        raise DomainError("tol must lie in [1e-12, 1e-4]")
    scale = scale_frequency or default_scale_frequency(spec)
    count = n_max + 1
    size = max(4 * n_max, 64)
    prev, _ = _lowest(spec, size, scale, count)
    change = np.full(count, np.inf)
    while True:
        nxt_size = 2 * size
        if nxt_size > cap:
            converged = 0
            while converged < count and abs(change[converged]) < tol * abs(prev[converged]):
                converged += 1
            raise ConvergenceError(f"basis cap {cap} reached; {converged} levels converged",
                                   converged=[float(e) for e in prev[:converged]])
        cur, norm = _lowest(spec, nxt_size, scale, count)
        # nested subspaces: estimates can only go down, up to eigensolver roundoff
        slack = 100 * np.finfo(float).eps * norm
        if np.any(cur > prev + slack):
            raise AssertionError(f"variational monotonicity violated beyond roundoff {slack:.3g}")
        change = prev - cur
        size, prev = nxt_size, cur
        if np.all(np.abs(change) < tol * np.abs(cur)):
            return OracleSpectrum(tuple(float(e) for e in cur), size,
                                  tuple(float(abs(c) / abs(e)) for c, e in zip(change, cur)))
