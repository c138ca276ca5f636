"""Two-atom reduced state and Wootters concurrence."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# basis order |ee>, |eg>, |ge>, |gg>
EE, EG, GE, GG = range(4)

_SIGMA_Y = np.array([[0.0, -1j], [1j, 0.0]])
_YY = np.kron(_SIGMA_Y, _SIGMA_Y)


@dataclass(frozen=True)
class TwoQubitState:
    rho: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        if rho.shape != (4, 4):
            raise ValueError("two-qubit density matrix must be 4x4")
        if not np.allclose(rho, rho.conj().T, atol=1e-12):
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(rho).real - 1.0) > 1e-12:
            raise ValueError("density matrix trace differs from 1")
        if np.linalg.eigvalsh(rho).min() < -1e-10:
            raise ValueError("density matrix is not positive semidefinite")
        object.__setattr__(self, "rho", rho)


def reduced_density_matrix(c1: complex, c2: complex) -> TwoQubitState:
    """Atomic state after tracing out the field from ``c1|eg,0> + c2|ge,0> + |gg>(field)``."""
    p = abs(c1) ** 2 + abs(c2) ** 2
    if p > 1.0 + 1e-9:
        raise ValueError(f"|c1|^2 + |c2|^2 = {p} exceeds 1")
    phi = np.zeros(4, dtype=complex)
    phi[EG], phi[GE] = c1, c2
    rho = np.outer(phi, phi.conj())
    rho[GG, GG] = max(1.0 - p, 0.0)
    # renormalize away the <= 1e-9 overshoot so the state stays valid
    return TwoQubitState(rho / np.trace(rho).real)


def _sqrt_psd(rho: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(rho)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def concurrence(state: TwoQubitState, method: str = "svd") -> float:
    """Wootters concurrence ``max(0, s1 - s2 - s3 - s4)``.

    The ``s_i`` are square roots of the eigenvalues of ``rho rho~`` with
    ``rho~ = (Y x Y) rho* (Y x Y)``.  The default computes them as the
    singular values of ``sqrt(rho) (Y x Y) sqrt(rho)*``, which avoids taking
    square roots of round-off sized eigenvalues (a 1e-16 eigenvalue would
    otherwise contribute 1e-8).  ``method="eig"`` is the direct eigensolve.
    """
    rho = state.rho
    if method == "svd":
        root = _sqrt_psd(rho)
        s = np.linalg.svd(root @ _YY @ root.conj(), compute_uv=False)
    elif method == "eig":
        rho_tilde = _YY @ rho.conj() @ _YY
        lam = np.linalg.eigvals(rho @ rho_tilde)
        if np.max(np.abs(lam.imag)) > 1e-12:
            raise ValueError("rho rho~ has non-real eigenvalues")
        lam = lam.real
        if lam.min() < -1e-10:
            raise ValueError("rho rho~ has negative eigenvalues")
        s = np.sqrt(np.sort(np.clip(lam, 0.0, None))[::-1])
    else:
        raise ValueError(f"unknown method {method!r}")
    return float(max(0.0, s[0] - s[1] - s[2] - s[3]))


def concurrence_series(amplitudes: np.ndarray) -> np.ndarray:
    """Concurrence along a two-atom amplitude trajectory of shape ``(n, 2)``.

    For this single-excitation family the Wootters value reduces to
    ``2 |c1| |c2|``, which is what is returned.
    """
    amplitudes = np.asarray(amplitudes)
    if amplitudes.ndim != 2 or amplitudes.shape[1] != 2:
        raise ValueError("need amplitudes of shape (n, 2)")
    return 2.0 * np.abs(amplitudes[:, 0]) * np.abs(amplitudes[:, 1])
