"""Finite oscillator algebra built on spin-j representations of su(2).

A single finite oscillator mode lives in the (2j+1)-dimensional spin-j
representation.  The energy-mode index ``n = mu + j`` runs over 0..2j, the
ladder operators raise/lower ``n`` with matrix elements
``sqrt((n+1)(2j-n))``, and position/momentum/energy are identified with
``Jx``, ``-Jy`` and ``Jz + (j+1/2)I``.  Rescaling the ladders by
``1/sqrt(2j)`` contracts the algebra onto the usual bosonic ladder
operators as ``j -> inf``; the truncated bosonic matrices are provided
here as the reference point of that limit.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sparse
from scipy.linalg import expm


def _check_rep_label(j) -> int:
    """Validate a representation label: integer j >= 1."""
    if isinstance(j, bool):
        raise ValueError(f"representation label must be an integer >= 1, got {j!r}")
    if not isinstance(j, (int, np.integer)):
        # accept integral floats (5.0) but nothing fractional
        if not (isinstance(j, float) and j.is_integer()):
            raise ValueError(f"representation label must be an integer >= 1, got {j!r}")
    j = int(j)
    if j < 1:
        raise ValueError(
            f"representation label must be >= 1 (j=0 is the trivial representation), got {j}"
        )
    return j


class SpinRep:
    """Spin-j generator matrices in the energy-mode ordering n = 0..2j.

    ``Jz`` is diagonal with entries ``mu = n - j`` ascending, ``Jplus`` has
    subdiagonal entries ``sqrt((n+1)(2j-n))`` (it raises the mode index),
    and ``Jminus = Jplus.conj().T``.  Dense matrices are built lazily and
    cached; the band data is exposed directly so large-j callers can stay
    in sparse/banded storage.  Treat all attributes as read-only.
    """

    def __init__(self, j):
        self.j = _check_rep_label(j)
        self.dim = 2 * self.j + 1
        n = np.arange(self.dim)
        #: diagonal of Jz: mu = n - j, ascending
        self.jz_diagonal = (n - self.j).astype(float)
        #: raising matrix elements: Jplus[n+1, n] = ladder_weights[n]
        self.ladder_weights = np.sqrt((n[:-1] + 1.0) * (2.0 * self.j - n[:-1]))

    # ---- dense views -------------------------------------------------

    @cached_property
    def Jz(self) -> np.ndarray:
        return np.diag(self.jz_diagonal).astype(complex)

    @cached_property
    def Jplus(self) -> np.ndarray:
        return np.diag(self.ladder_weights, -1).astype(complex)

    @cached_property
    def Jminus(self) -> np.ndarray:
        return np.diag(self.ladder_weights, 1).astype(complex)

    @cached_property
    def Jx(self) -> np.ndarray:
        return 0.5 * (self.Jplus + self.Jminus)

    @cached_property
    def Jy(self) -> np.ndarray:
        return -0.5j * (self.Jplus - self.Jminus)

    # ---- banded / sparse views ---------------------------------------

    def jz_sparse(self) -> sparse.csr_array:
        return sparse.csr_array(sparse.diags_array(self.jz_diagonal.astype(complex)))

    def jplus_sparse(self) -> sparse.csr_array:
        return sparse.csr_array(
            sparse.diags_array(self.ladder_weights.astype(complex), offsets=-1)
        )

    def jminus_sparse(self) -> sparse.csr_array:
        return sparse.csr_array(
            sparse.diags_array(self.ladder_weights.astype(complex), offsets=1)
        )

    def jx_sparse(self) -> sparse.csr_array:
        w = 0.5 * self.ladder_weights.astype(complex)
        return sparse.csr_array(sparse.diags_array([w, w], offsets=[-1, 1]))

    def jy_sparse(self) -> sparse.csr_array:
        w = 0.5j * self.ladder_weights.astype(complex)
        return sparse.csr_array(sparse.diags_array([-w, w], offsets=[-1, 1]))

    def __repr__(self):
        return f"SpinRep(j={self.j}, dim={self.dim})"


@dataclass(frozen=True)
class BosonRep:
    """Truncated bosonic ladder matrices (the j -> inf reference point).

    ``adag`` has subdiagonal entries ``sqrt(n+1)``; the commutator
    ``[a, adag]`` equals the identity except in the last diagonal entry,
    which is the unavoidable truncation artifact.
    """

    cutoff: int
    a: np.ndarray
    adag: np.ndarray
    number: np.ndarray


def build_spin_rep(j) -> SpinRep:
    """Construct the spin-j representation for an integer label j >= 1."""
    return SpinRep(j)


def oscillator_observables(rep: SpinRep):
    """Position, momentum and free energy of one finite oscillator mode.

    Returns ``(Q, P, H_free)`` with ``Q = Jx``, ``P = -Jy`` and
    ``H_free = Jz + (j + 1/2) I``.  These satisfy the discrete Hamilton
    equations ``[Q, H_free] = iP`` and ``[P, H_free] = -iQ``, and close
    under ``i[Q, P] = H_free - (j + 1/2) I``.
    """
    q = rep.Jx.copy()
    p = -rep.Jy
    h_free = rep.Jz + (rep.j + 0.5) * np.eye(rep.dim)
    return q, p, h_free


def kravchuk_rotation(rep: SpinRep) -> np.ndarray:
    """Unitary K = exp(-i (pi/2) Jy) mapping energy modes to positions.

    Column ``n`` of K is the eigenvector of ``Jx`` with eigenvalue
    ``q = n - j`` (up to a global phase), so ``K Jz K^dag = Jx``.  For
    integer j the rotation is 4-periodic: ``K^4 = I``.
    """
    return expm(-0.5j * np.pi * rep.Jy)


def contracted_ladders(rep: SpinRep):
    """Rescaled ladders (Alike, Adaglike) = (Jminus, Jplus) / sqrt(2j).

    ``Adaglike`` has subdiagonal entries ``sqrt((n+1)(1 - n/2j))``, which
    tend to the bosonic ``sqrt(n+1)`` as j grows.  The pair obeys
    ``[Alike, Adaglike] = I - N/j`` with ``N = Jz + j I``, so the bosonic
    commutator is recovered in the contraction limit.
    """
    scale = 1.0 / np.sqrt(2.0 * rep.j)
    return scale * rep.Jminus, scale * rep.Jplus


def build_boson_rep(cutoff: int) -> BosonRep:
    """Truncated bosonic ladder matrices of size ``cutoff``."""
    if not isinstance(cutoff, (int, np.integer)) or isinstance(cutoff, bool):
        raise ValueError(f"cutoff must be an integer >= 2, got {cutoff!r}")
    if cutoff < 2:
        raise ValueError(f"cutoff must be >= 2, got {cutoff}")
    n = np.arange(cutoff)
    adag = np.diag(np.sqrt(n[:-1] + 1.0), -1).astype(complex)
    a = adag.conj().T.copy()
    number = np.diag(n.astype(float)).astype(complex)
    return BosonRep(cutoff=int(cutoff), a=a, adag=adag, number=number)
