"""Dynamical Lie algebra of the drift and control Hamiltonians.

Matrices are treated as real vectors under ``<A, B> = Re tr(A^dagger B)``.
The closure keeps an orthonormal basis and commutes every newly accepted
element with everything already in the basis until nothing new appears.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ClosureIterationLimit, IndexOutOfRange
from .spectrum import EnergySpectrum, Protocol, coupled_pair, transition_table

RANK_TOL = 1e-9


@dataclass(frozen=True)
class GeneratorSet:
    matrices: tuple[np.ndarray, ...]
    labels: tuple[str, ...]

    @property
    def dim(self) -> int:
        return self.matrices[0].shape[0]


@dataclass(frozen=True)
class ClosureReport:
    dimension: int
    is_fully_controllable: bool
    iterations: int
    rank_tolerance: float
    basis: tuple[np.ndarray, ...] = ()

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "is_fully_controllable": self.is_fully_controllable,
            "iterations": self.iterations,
            "rank_tolerance": self.rank_tolerance,
        }


def build_generators(spectrum: EnergySpectrum, protocol_kind: Protocol | str,
                     restrict: Sequence[int] | None = None) -> GeneratorSet:
    """``iH0`` plus ``iH_m`` for every cycle (or only the cycles in ``restrict``)."""
    protocol = Protocol.parse(protocol_kind)
    transition_table(spectrum, protocol)    # raises IncompatibleProtocol
    n = spectrum.n
    cycles = range(1, n) if restrict is None else list(restrict)
    mats, labels = [1j * spectrum.hamiltonian()], ["iH0"]
    for m in cycles:
        if not 1 <= m <= n - 1:
            raise IndexOutOfRange(f"cycle {m} outside 1..{n - 1}")
        a, b = coupled_pair(protocol, m)
        h = np.zeros((n, n), dtype=complex)
        h[a - 1, b - 1] = h[b - 1, a - 1] = 1.0
        mats.append(1j * h)
        labels.append(f"iH{m}")
    return GeneratorSet(tuple(mats), tuple(labels))


def _vec(a: np.ndarray) -> np.ndarray:
    return np.concatenate([a.real.ravel(), a.imag.ravel()])


def _unvec(v: np.ndarray, n: int) -> np.ndarray:
    k = n * n
    return (v[:k] + 1j * v[k:]).reshape(n, n)


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def _residual(basis: list[np.ndarray], v: np.ndarray) -> np.ndarray:
    # modified Gram-Schmidt, applied twice
    for _ in range(2):
        for q in basis:
            v = v - (q @ v) * q
    return v


def lie_closure_dimension(generators: GeneratorSet | Sequence[np.ndarray],
                          rank_tolerance: float = RANK_TOL,
                          max_commutators: int | None = None) -> ClosureReport:
    mats = generators.matrices if isinstance(generators, GeneratorSet) else tuple(generators)
    n = mats[0].shape[0]
    cap = n ** 4 if max_commutators is None else max_commutators
    basis: list[np.ndarray] = []
    pending: list[np.ndarray] = []

    def accept(v: np.ndarray) -> None:
        norm = np.linalg.norm(v)
        if norm == 0.0:
            return
        r = _residual(basis, v / norm)
        rn = np.linalg.norm(r)
        if rn > rank_tolerance:
            basis.append(r / rn)
            pending.append(r / rn)

    for g in mats:
        accept(_vec(np.asarray(g, dtype=complex)))
    evaluations = 0
    processed = 0
    while processed < len(basis):
        new = basis[processed]
        x = _unvec(new, n)
        for j in range(processed):
            evaluations += 1
            if evaluations > cap:
                raise ClosureIterationLimit(
                    f"more than {cap} commutators; check rank_tolerance={rank_tolerance}")
            accept(_vec(commutator(x, _unvec(basis[j], n))))
        processed += 1
    dim = len(basis)
    return ClosureReport(dimension=dim, is_fully_controllable=dim == n * n - 1,
                         iterations=evaluations, rank_tolerance=rank_tolerance,
                         basis=tuple(_unvec(q, n) for q in basis))


def check_controllability(spectrum: EnergySpectrum, protocol_kind: Protocol | str,
                          restrict: Sequence[int] | None = None,
                          rank_tolerance: float = RANK_TOL) -> ClosureReport:
    return lie_closure_dimension(build_generators(spectrum, protocol_kind, restrict),
                                 rank_tolerance)


def span_residual(report: ClosureReport, element: np.ndarray) -> float:
    """Norm of the part of ``element`` (normalized) outside the closure span."""
    v = _vec(np.asarray(element, dtype=complex))
    v = v / np.linalg.norm(v)
    return float(np.linalg.norm(_residual([_vec(b) for b in report.basis], v)))


def chevalley_elements(n: int) -> list[tuple[str, np.ndarray]]:
    """Explicit ``ix_k, iy_k, ih_k`` for k = 1..n-1."""
    out = []
    for k in range(n - 1):
        up = np.zeros((n, n), dtype=complex)
        up[k, k + 1] = 1.0
        down = up.T.copy()
        out.append((f"ix{k + 1}", 1j * (up + down)))
        out.append((f"iy{k + 1}", up - down))
        h = np.zeros((n, n), dtype=complex)
        h[k, k], h[k + 1, k + 1] = 1.0, -1.0
        out.append((f"ih{k + 1}", 1j * h))
    return out


def star_recursion_elements(spectrum: EnergySpectrum) -> list[tuple[str, np.ndarray]]:
    """Adjacent-level elements generated from the star couplings by brackets.

    ``[iH_m, iH_{m-1}]`` is the antisymmetric element on levels (m, m+1);
    bracketing it with ``iH0`` and dividing by the gap gives the symmetric
    one, and their bracket the diagonal one.
    """
    gens = build_generators(spectrum, Protocol.SYSTEM_I)
    ih0, ih = gens.matrices[0], gens.matrices[1:]
    gaps = spectrum.gaps
    out = [("ix1", ih[0])]
    y1 = commutator(1j * spectrum.hamiltonian(), ih[0]) / gaps[0]
    out += [("iy1", y1), ("ih1", -commutator(ih[0], y1) / 2)]
    for m in range(2, spectrum.n):
        y = commutator(ih[m - 1], ih[m - 2])
        x = commutator(y, ih0) / gaps[m - 1]
        out += [(f"iy{m}", y), (f"ix{m}", x), (f"ih{m}", -commutator(x, y) / 2)]
    return out
