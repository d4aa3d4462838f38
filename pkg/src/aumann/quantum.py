"""Quantum layer: density-operator-valued measures and agreement.

A DOVM assigns a PSD matrix to each world, the atoms summing to a density
operator. Conditioning on an event sums the atoms over the event and
normalizes by the trace. Sandwiching with the square root (or pseudo-inverse
square root) of a state converts between DOVMs and POVMs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConditioningOnNull, NotHermitian, NotPsd
from .knowledge import Event, KnowledgeModel, common_knowledge
from .tolerances import (
    HERMITIAN_TOL,
    MATCH_TOL,
    NULL_MASS_TOL,
    PSD_EIG_TOL,
    SUPPORT_CUTOFF,
    WEIGHT_SUM_TOL,
)
from .verdicts import AgreementVerdict, VerdictStatus

__all__ = [
    "require_hermitian",
    "psd_sqrt",
    "psd_sqrt_pinv",
    "trace_norm",
    "DensityOperator",
    "Dovm",
    "Povm",
    "dovm_value",
    "conditional_state",
    "dovm_to_povm",
    "povm_to_dovm",
    "quantum_agreement_event",
    "verify_quantum_aumann",
]


def require_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Symmetrize ``(m + m^dagger)/2`` if within ``tol`` of Hermitian, else raise."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    deviation = float(np.abs(a - a.conj().T).max()) if a.size else 0.0
    if deviation > tol:
        raise NotHermitian(f"matrix deviates from Hermitian by {deviation:.3e} (> {tol:.0e})")
    return (a + a.conj().T) / 2.0


def psd_sqrt(m: np.ndarray, tol: float = PSD_EIG_TOL) -> np.ndarray:
    """PSD square root via eigendecomposition.

    Eigenvalues in ``[-tol, 0)`` are clamped to zero; anything below ``-tol``
    raises :class:`NotPsd`.
    """
    h = require_hermitian(m)
    vals, vecs = np.linalg.eigh(h)
    if vals.size and vals[0] < -tol:
        raise NotPsd(f"minimum eigenvalue {vals[0]:.3e} below -{tol:.0e}")
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def psd_sqrt_pinv(m: np.ndarray, cutoff: float = SUPPORT_CUTOFF) -> tuple[np.ndarray, np.ndarray]:
    """Pseudo-inverse square root of a PSD matrix and its support projector.

    Eigenvalues at or below ``cutoff`` count as zero rank, so the first
    return value satisfies ``r @ m @ r = support`` on the support of ``m``.
    """
    h = require_hermitian(m)
    vals, vecs = np.linalg.eigh(h)
    if vals.size and vals[0] < -PSD_EIG_TOL:
        raise NotPsd(f"minimum eigenvalue {vals[0]:.3e} below -{PSD_EIG_TOL:.0e}")
    keep = vals > cutoff
    inv_sqrt = np.where(keep, 1.0 / np.sqrt(np.where(keep, vals, 1.0)), 0.0)
    root = (vecs * inv_sqrt) @ vecs.conj().T
    support = (vecs * keep.astype(float)) @ vecs.conj().T
    return root, support


def trace_norm(m: np.ndarray) -> float:
    """Trace norm of a Hermitian matrix (sum of absolute eigenvalues)."""
    return float(np.abs(np.linalg.eigvalsh(require_hermitian(m, tol=1e-9))).sum())


def _check_psd(a: np.ndarray, what: str) -> None:
    vals = np.linalg.eigvalsh(a)
    if vals.size and vals[0] < -PSD_EIG_TOL:
        raise NotPsd(f"{what} has eigenvalue {vals[0]:.3e} below -{PSD_EIG_TOL:.0e}")


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """PSD matrix of unit trace; the input is symmetrized on construction."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = require_hermitian(self.matrix)
        _check_psd(m, "density operator")
        tr = float(m.trace().real)
        if abs(tr - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"trace is {tr!r}, expected 1")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class Dovm:
    """One PSD atom per world; the atoms sum to a density operator."""

    atoms: np.ndarray

    def __post_init__(self) -> None:
        raw = np.asarray(self.atoms, dtype=complex)
        if raw.ndim != 3 or raw.shape[1] != raw.shape[2] or raw.shape[0] < 1:
            raise ValueError(f"atoms must have shape (n_worlds, d, d), got {raw.shape}")
        stacked = np.stack([require_hermitian(a) for a in raw])
        for w, atom in enumerate(stacked):
            _check_psd(atom, f"atom {w}")
        DensityOperator(stacked.sum(axis=0))  # total must be a valid state
        stacked.flags.writeable = False
        object.__setattr__(self, "atoms", stacked)

    @property
    def n_worlds(self) -> int:
        return self.atoms.shape[0]

    @property
    def dim(self) -> int:
        return self.atoms.shape[1]

    @property
    def total(self) -> np.ndarray:
        return self.atoms.sum(axis=0)

    def _check_event(self, e: Event) -> None:
        if e.n != self.n_worlds:
            raise ValueError(f"event over {e.n} worlds, DOVM has {self.n_worlds}")


@dataclass(frozen=True, eq=False)
class Povm:
    """PSD effects summing to an orthogonal projector (the identity when
    complete; :attr:`is_complete` reports which).

    The sub-normalized case exists so that converting a rank-deficient DOVM
    stays well-defined: its effects sum to the support projector of the
    total state rather than the full identity.
    """

    effects: np.ndarray

    def __post_init__(self) -> None:
        raw = np.asarray(self.effects, dtype=complex)
        if raw.ndim != 3 or raw.shape[1] != raw.shape[2] or raw.shape[0] < 1:
            raise ValueError(f"effects must have shape (n_worlds, d, d), got {raw.shape}")
        stacked = np.stack([require_hermitian(a) for a in raw])
        for w, eff in enumerate(stacked):
            _check_psd(eff, f"effect {w}")
        total = stacked.sum(axis=0)
        if float(np.abs(total @ total - total).max()) > WEIGHT_SUM_TOL:
            raise ValueError("effects do not sum to an orthogonal projector")
        stacked.flags.writeable = False
        object.__setattr__(self, "effects", stacked)

    @property
    def n_worlds(self) -> int:
        return self.effects.shape[0]

    @property
    def dim(self) -> int:
        return self.effects.shape[1]

    @property
    def is_complete(self) -> bool:
        """True when the effects sum to the identity within tolerance."""
        total = self.effects.sum(axis=0)
        return float(np.abs(total - np.eye(self.dim)).max()) <= WEIGHT_SUM_TOL


def dovm_value(rho: Dovm, lam: Event) -> np.ndarray:
    """Measure value on ``lam``: the sum of atoms over its worlds."""
    rho._check_event(lam)
    if not lam:
        return np.zeros((rho.dim, rho.dim), dtype=complex)
    idx = np.fromiter(lam, dtype=np.intp)
    return rho.atoms[idx].sum(axis=0)


def conditional_state(rho: Dovm, lam: Event, *, null_tol: float = NULL_MASS_TOL) -> DensityOperator:
    """Conditional state ``rho(lam) / Tr[rho(lam)]``."""
    value = dovm_value(rho, lam)
    tr = float(value.trace().real)
    if tr <= null_tol:
        raise ConditioningOnNull(f"event {lam.worlds()} has trace mass {tr!r}")
    return DensityOperator(value / tr)


def dovm_to_povm(rho: Dovm) -> Povm:
    """Sandwich each atom with the pseudo-inverse square root of the total.

    Effects sum to the support projector of the total state (the identity
    when it has full rank).
    """
    inv_root, _ = psd_sqrt_pinv(rho.total)
    return Povm(np.stack([inv_root @ atom @ inv_root for atom in rho.atoms]))


def povm_to_dovm(e: Povm, sigma: DensityOperator) -> Dovm:
    """Sandwich each effect with the square root of ``sigma``."""
    if e.dim != sigma.dim:
        raise ValueError(f"dimension mismatch: POVM is {e.dim}, state is {sigma.dim}")
    root = psd_sqrt(sigma.matrix)
    return Dovm(np.stack([root @ eff @ root for eff in e.effects]))


def _as_matrix(target) -> np.ndarray:
    if isinstance(target, DensityOperator):
        return target.matrix
    return require_hermitian(target, tol=1e-9)


def quantum_agreement_event(
    model: KnowledgeModel,
    rho: Dovm,
    sigmas: Sequence,
    tol: float = MATCH_TOL,
) -> Event:
    """Worlds where every agent's cell-conditional state matches its target.

    Matching is trace-norm distance at most ``tol``; worlds whose cell has
    trace mass at most ``NULL_MASS_TOL`` are excluded. Targets may be
    :class:`DensityOperator` or plain Hermitian matrices (an unnormalized
    target simply never matches).
    """
    if rho.n_worlds != model.n_worlds:
        raise ValueError(f"DOVM over {rho.n_worlds} worlds, model has {model.n_worlds}")
    if len(sigmas) != model.n_agents:
        raise ValueError(f"expected {model.n_agents} targets, got {len(sigmas)}")
    targets = [_as_matrix(s) for s in sigmas]
    acc = (1 << model.n_worlds) - 1
    for agent, target in enumerate(targets):
        agent_mask = 0
        for cell in model.partitions[agent].cells:
            value = dovm_value(rho, cell)
            tr = float(value.trace().real)
            if tr <= NULL_MASS_TOL:
                continue
            if trace_norm(value / tr - target) <= tol:
                agent_mask |= cell.mask
        acc &= agent_mask
        if not acc:
            break
    return Event(acc, model.n_worlds)


def verify_quantum_aumann(
    model: KnowledgeModel,
    rho: Dovm,
    sigmas: Sequence,
    tol: float = MATCH_TOL,
    *,
    max_iters: int | None = None,
) -> AgreementVerdict:
    """Check the quantum agreement theorem for target states ``sigmas``.

    Vacuous when the common knowledge of the agreement event is empty or has
    trace mass at most ``tol``; otherwise each target must be within ``tol``
    trace-norm distance of the conditional state on the common event.
    """
    e = quantum_agreement_event(model, rho, sigmas, tol)
    c = common_knowledge(model, e, max_iters=max_iters)
    posteriors = tuple(_as_matrix(s) for s in sigmas)
    if not c:
        return AgreementVerdict(VerdictStatus.VACUOUS_EMPTY_COMMON_KNOWLEDGE, c, posteriors, None)
    value = dovm_value(rho, c)
    tr = float(value.trace().real)
    if tr <= tol:
        return AgreementVerdict(VerdictStatus.VACUOUS_NULL_COMMON_KNOWLEDGE, c, posteriors, None)
    pooled = DensityOperator(value / tr)
    ok = all(trace_norm(t - pooled.matrix) <= tol for t in posteriors)
    status = VerdictStatus.HOLDS if ok else VerdictStatus.VIOLATED
    return AgreementVerdict(status, c, posteriors, pooled)
