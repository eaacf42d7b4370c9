"""Liouvillian superoperators and steady states.

Density matrices are column-stacked, ``vec(rho)[i + n*j] = rho[i, j]``, so
that ``vec(A rho B) = (B.T kron A) vec(rho)``.
"""

from __future__ import annotations

import numpy as np
from scipy import linalg

from .errors import DegenerateSteadyStateError, SingularityError


def vec(rho):
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v, n=None):
    v = np.asarray(v)
    if n is None:
        n = int(round(np.sqrt(v.size)))
    return v.reshape(n, n, order="F")


def vec_index(i, j, n):
    """Position of rho_ij (1-based levels) inside ``vec(rho)``."""
    return (i - 1) + n * (j - 1)


def trace_functional(n):
    """Row vector t with ``t @ vec(rho) == trace(rho)``."""
    return vec(np.eye(n)).astype(complex)


def commutator_superop(h):
    """Matrix of ``rho -> -i [h, rho]``."""
    h = np.asarray(h, dtype=complex)
    eye = np.eye(h.shape[0])
    return -1j * (np.kron(eye, h) - np.kron(h.T, eye))


def dissipator_superop(op, rate=1.0):
    """Matrix of ``rate * (c rho c^+ - {c^+ c, rho} / 2)``."""
    c = np.asarray(op, dtype=complex)
    eye = np.eye(c.shape[0])
    cdc = c.conj().T @ c
    return rate * (np.kron(c.conj(), c) - 0.5 * np.kron(eye, cdc) - 0.5 * np.kron(cdc.T, eye))


def build_liouvillian(hamiltonian, channels=()):
    """Lindblad generator for ``H`` (rad/s) and a list of dissipator channels.

    ``channels`` holds objects with ``operator`` and ``rate`` attributes or
    plain ``(operator, rate)`` pairs.
    """
    lv = commutator_superop(hamiltonian)
    for ch in channels:
        op, rate = (ch.operator, ch.rate) if hasattr(ch, "operator") else ch
        if rate:
            lv = lv + dissipator_superop(op, rate)
    return lv


def steady_state(liouvillian, check_degeneracy=True, rtol=1e-12):
    """Unique trace-one null vector of ``liouvillian`` as an n x n matrix.

    The first row of L rho = 0 is swapped for the trace condition and the
    system is solved by dense LU. With ``check_degeneracy`` the null space
    dimension is first counted from the singular values; anything other
    than one raises :class:`DegenerateSteadyStateError`.
    """
    lv = np.asarray(liouvillian, dtype=complex)
    dim = lv.shape[0]
    n = int(round(np.sqrt(dim)))
    if check_degeneracy:
        s = linalg.svdvals(lv)
        scale = s[0] if s[0] > 0 else 1.0
        null = int(np.sum(s <= rtol * scale))
        if null != 1:
            raise DegenerateSteadyStateError(null)
    a = lv.copy()
    a[0, :] = trace_functional(n)
    b = np.zeros(dim, dtype=complex)
    b[0] = 1.0
    try:
        x = linalg.solve(a, b)
    except linalg.LinAlgError as exc:
        raise SingularityError(f"steady-state system singular: {exc}") from exc
    rho = unvec(x, n)
    return 0.5 * (rho + rho.conj().T)


def residual(liouvillian, rho):
    """``||L rho|| / ||L||``; the generator norm makes it independent of the time unit."""
    lv = np.asarray(liouvillian)
    return float(np.linalg.norm(lv @ vec(rho)) / np.linalg.norm(lv, 2))


def linear_response(l0, l1, rho0, omega, readout=None):
    """First-order response ``(i w - L0)^-1 L1 rho0`` to ``L0 + f(t) L1``.

    The perturbation ``f(t) = Re[f_w exp(i w t)]`` moves the state by
    ``Re[x exp(i w t)] f_w``; this returns ``x`` (or ``x[readout]`` for a
    ``(i, j)`` pair of 1-based levels). The solve keeps the trace-zero
    constraint explicit, which is exact for every ``omega`` including zero.
    """
    l0 = np.asarray(l0, dtype=complex)
    dim = l0.shape[0]
    n = int(round(np.sqrt(dim)))
    src = np.asarray(l1) @ vec(rho0)
    om = np.atleast_1d(np.asarray(omega, dtype=float))
    out = []
    tr = trace_functional(n)
    for w in om:
        a = 1j * w * np.eye(dim) - l0
        a[0, :] = tr
        b = src.copy()
        b[0] = 0.0
        x = np.linalg.solve(a, b)
        out.append(x if readout is None else x[vec_index(*readout, n)])
    out = np.array(out)
    return out[0] if np.ndim(omega) == 0 else out
