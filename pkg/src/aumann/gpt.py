"""Generalized-probabilistic-theory layer: cones, effects, and agreement.

A theory is a pointed convex cone with a linear unit functional; states are
cone elements of unit value. A state-valued measure assigns a cone element
to each world with unit total. Three cone kinds are supported: the
nonnegative orthant (classical), the PSD cone in Hermitian-matrix
coordinates (quantum), and finitely generated polyhedral cones.

Hermitian matrices enter coordinates through a fixed orthonormal basis
(Frobenius inner product): the ``k`` unit diagonal matrices, then
``(E_jk + E_kj)/sqrt(2)`` and ``i(E_jk - E_kj)/sqrt(2)`` for ``j < k`` in
row-major order. :func:`vectorize` and :func:`devectorize` realize the
isometry, so serialized coordinates are portable.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import isqrt
from typing import Sequence

import numpy as np
from scipy.optimize import lsq_linear

from .classical import ProbabilityMeasure
from .errors import ConditioningOnNull
from .knowledge import Event, KnowledgeModel, common_knowledge
from .quantum import Dovm, require_hermitian
from .tolerances import (
    CONE_FEAS_TOL,
    MATCH_TOL,
    NULL_MASS_TOL,
    PSD_EIG_TOL,
    WEIGHT_SUM_TOL,
)
from .verdicts import AgreementVerdict, VerdictStatus

__all__ = [
    "hermitian_basis",
    "vectorize",
    "devectorize",
    "ConeSpace",
    "SimplexCone",
    "PsdCone",
    "PolyhedralCone",
    "Effect",
    "cone_membership",
    "effect_valid",
    "GptState",
    "Svm",
    "svm_value",
    "gpt_conditional_state",
    "gpt_agreement_event",
    "verify_gpt_aumann",
    "embed_classical",
    "embed_quantum",
]

_SQRT2 = np.sqrt(2.0)


@lru_cache(maxsize=None)
def hermitian_basis(k: int) -> np.ndarray:
    """Orthonormal Hermitian basis of the ``k x k`` matrices, shape ``(k*k, k, k)``.

    Order: unit diagonals ``E_00..E_(k-1)(k-1)``, symmetric pairs, then
    antisymmetric pairs, pairs in row-major ``j < k`` order.
    """
    if k < 1:
        raise ValueError("matrix dimension must be positive")
    basis = np.zeros((k * k, k, k), dtype=complex)
    for i in range(k):
        basis[i, i, i] = 1.0
    pos = k
    pairs = [(j, l) for j in range(k) for l in range(j + 1, k)]
    for j, l in pairs:
        basis[pos, j, l] = basis[pos, l, j] = 1.0 / _SQRT2
        pos += 1
    for j, l in pairs:
        basis[pos, j, l] = 1.0j / _SQRT2
        basis[pos, l, j] = -1.0j / _SQRT2
        pos += 1
    basis.flags.writeable = False
    return basis


def vectorize(m: np.ndarray) -> np.ndarray:
    """Real coordinates of a Hermitian matrix in :func:`hermitian_basis` order."""
    a = require_hermitian(m, tol=1e-9)
    k = a.shape[0]
    iu = np.triu_indices(k, 1)
    upper = a[iu]
    return np.concatenate([a.diagonal().real, _SQRT2 * upper.real, _SQRT2 * upper.imag])


def devectorize(v: np.ndarray) -> np.ndarray:
    """Hermitian matrix with the given coordinates (inverse of :func:`vectorize`)."""
    v = np.asarray(v, dtype=float)
    k = isqrt(v.size)
    if k * k != v.size:
        raise ValueError(f"coordinate length {v.size} is not a perfect square")
    n_pairs = k * (k - 1) // 2
    m = np.zeros((k, k), dtype=complex)
    np.fill_diagonal(m, v[:k])
    iu = np.triu_indices(k, 1)
    upper = (v[k : k + n_pairs] + 1.0j * v[k + n_pairs :]) / _SQRT2
    m[iu] = upper
    m[(iu[1], iu[0])] = upper.conj()
    return m


class ConeSpace:
    """Pointed convex cone in ``R^dim`` with a linear unit functional.

    ``observables`` is an optional tuple of effect functionals, validated on
    construction; the agreement machinery never consumes them.
    """

    kind = "abstract"

    def __init__(self, dim: int, unit: np.ndarray, observables: Sequence = ()):
        if dim < 1:
            raise ValueError("cone dimension must be positive")
        unit = np.asarray(unit, dtype=float)
        if unit.shape != (dim,):
            raise ValueError(f"unit functional must have shape ({dim},), got {unit.shape}")
        unit = unit.copy()
        unit.flags.writeable = False
        self._dim = dim
        self._unit = unit
        self._observables = tuple(
            obs if isinstance(obs, Effect) else Effect(self, obs) for obs in observables
        )

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def unit(self) -> np.ndarray:
        return self._unit

    @property
    def observables(self) -> tuple:
        return self._observables

    def unit_value(self, v: np.ndarray) -> float:
        return float(self._unit @ self._coerce(v))

    def _coerce(self, v) -> np.ndarray:
        a = np.asarray(v, dtype=float)
        if a.shape != (self._dim,):
            raise ValueError(f"expected a vector of length {self._dim}, got shape {a.shape}")
        return a

    def contains(self, v, tol: float | None = None) -> bool:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{type(self).__name__}(dim={self._dim})"


class SimplexCone(ConeSpace):
    """Nonnegative orthant; unit functional sums the coordinates."""

    kind = "simplex"

    def __init__(self, dim: int, observables: Sequence = ()):
        super().__init__(dim, np.ones(dim), observables)

    @property
    def generators(self) -> np.ndarray:
        return np.eye(self._dim)

    def contains(self, v, tol: float | None = None) -> bool:
        tol = PSD_EIG_TOL if tol is None else tol
        return bool((self._coerce(v) >= -tol).all())


class PsdCone(ConeSpace):
    """PSD matrices in Hermitian-basis coordinates; unit is the trace functional."""

    kind = "psd"

    def __init__(self, matrix_dim: int, observables: Sequence = ()):
        if matrix_dim < 1:
            raise ValueError("matrix dimension must be positive")
        self._matrix_dim = matrix_dim
        super().__init__(matrix_dim * matrix_dim, vectorize(np.eye(matrix_dim)), observables)

    @property
    def matrix_dim(self) -> int:
        return self._matrix_dim

    def contains(self, v, tol: float | None = None) -> bool:
        tol = PSD_EIG_TOL if tol is None else tol
        vals = np.linalg.eigvalsh(devectorize(self._coerce(v)))
        return bool(vals[0] >= -tol)


class PolyhedralCone(ConeSpace):
    """Cone generated by finitely many rays.

    Construction enforces: nonzero generators, ``u(g) > 0`` on every
    generator, and pointedness (no generator's negation is a nonnegative
    combination of the generators).
    """

    kind = "polyhedral"

    def __init__(self, generators: np.ndarray, unit: np.ndarray, observables: Sequence = ()):
        g = np.asarray(generators, dtype=float)
        if g.ndim != 2 or g.shape[0] < 1:
            raise ValueError(f"generators must have shape (m, dim), got {g.shape}")
        g = g.copy()
        g.flags.writeable = False
        self._generators = g
        super().__init__(g.shape[1], unit, observables=())
        norms = np.linalg.norm(g, axis=1)
        if (norms == 0).any():
            raise ValueError("generators must be nonzero")
        for j, gen in enumerate(g):
            if self.contains(-gen):
                raise ValueError(f"cone is not pointed: -generators[{j}] lies in the cone")
        values = g @ self._unit
        if (values <= 0).any():
            raise ValueError("unit functional must be strictly positive on every generator")
        self._observables = tuple(
            obs if isinstance(obs, Effect) else Effect(self, obs) for obs in observables
        )

    @property
    def generators(self) -> np.ndarray:
        return self._generators

    def contains(self, v, tol: float | None = None) -> bool:
        tol = CONE_FEAS_TOL if tol is None else tol
        v = self._coerce(v)
        # BVLS: nonnegative least squares against the generator matrix
        fit = lsq_linear(self._generators.T, v, bounds=(0.0, np.inf), method="bvls")
        return float(np.linalg.norm(self._generators.T @ fit.x - v)) <= tol


@dataclass(frozen=True, eq=False)
class Effect:
    """Linear functional between 0 and the unit in the cone order."""

    cone: ConeSpace
    functional: np.ndarray

    def __post_init__(self) -> None:
        f = self.cone._coerce(self.functional).copy()
        f.flags.writeable = False
        object.__setattr__(self, "functional", f)
        if not effect_valid(self.cone, f):
            raise ValueError("functional is not between 0 and the unit on the cone")

    def __call__(self, v) -> float:
        return float(self.functional @ self.cone._coerce(v))


def cone_membership(cone: ConeSpace, v, tol: float | None = None) -> bool:
    """Whether ``v`` lies in the cone, to tolerance ``tol`` (kind-specific default)."""
    return cone.contains(v, tol)


def effect_valid(cone: ConeSpace, phi, tol: float = PSD_EIG_TOL) -> bool:
    """Whether ``0 <= phi(v) <= u(v)`` holds (within ``tol``) across the cone.

    Checked on generators for simplex and polyhedral cones, via eigenvalue
    bounds for the PSD cone.
    """
    f = phi.functional if isinstance(phi, Effect) else cone._coerce(phi)
    if isinstance(cone, PsdCone):
        low = np.linalg.eigvalsh(devectorize(f))[0]
        high = np.linalg.eigvalsh(devectorize(cone.unit - f))[0]
        return bool(low >= -tol and high >= -tol)
    if isinstance(cone, (SimplexCone, PolyhedralCone)):
        gens = cone.generators
        lower = gens @ f
        upper = gens @ (cone.unit - f)
        return bool((lower >= -tol).all() and (upper >= -tol).all())
    raise TypeError(f"unsupported cone kind {cone.kind!r}")


@dataclass(frozen=True, eq=False)
class GptState:
    """Cone element with unit value 1."""

    cone: ConeSpace
    coords: np.ndarray

    def __post_init__(self) -> None:
        coords = self.cone._coerce(self.coords).copy()
        if not self.cone.contains(coords):
            raise ValueError("coordinates lie outside the cone")
        u = float(self.cone.unit @ coords)
        if abs(u - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"unit value is {u!r}, expected 1")
        coords.flags.writeable = False
        object.__setattr__(self, "coords", coords)


@dataclass(frozen=True, eq=False)
class Svm:
    """State-valued measure: one cone element per world, unit total."""

    cone: ConeSpace
    atoms: np.ndarray

    def __post_init__(self) -> None:
        atoms = np.asarray(self.atoms, dtype=float)
        if atoms.ndim != 2 or atoms.shape[0] < 1 or atoms.shape[1] != self.cone.dim:
            raise ValueError(f"atoms must have shape (n_worlds, {self.cone.dim}), got {atoms.shape}")
        for w, atom in enumerate(atoms):
            if not self.cone.contains(atom):
                raise ValueError(f"atom {w} lies outside the cone")
        total_u = float(self.cone.unit @ atoms.sum(axis=0))
        if abs(total_u - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"total unit value is {total_u!r}, expected 1")
        atoms = atoms.copy()
        atoms.flags.writeable = False
        object.__setattr__(self, "atoms", atoms)

    @property
    def n_worlds(self) -> int:
        return self.atoms.shape[0]

    @property
    def total(self) -> np.ndarray:
        return self.atoms.sum(axis=0)

    def _check_event(self, e: Event) -> None:
        if e.n != self.n_worlds:
            raise ValueError(f"event over {e.n} worlds, SVM has {self.n_worlds}")


def svm_value(mu: Svm, lam: Event) -> np.ndarray:
    """Measure value on ``lam``: the coordinate-wise sum of atoms."""
    mu._check_event(lam)
    if not lam:
        return np.zeros(mu.cone.dim)
    idx = np.fromiter(lam, dtype=np.intp)
    return mu.atoms[idx].sum(axis=0)


def gpt_conditional_state(mu: Svm, lam: Event, *, null_tol: float = NULL_MASS_TOL) -> GptState:
    """Conditional state ``mu(lam) / u[mu(lam)]``."""
    value = svm_value(mu, lam)
    u = float(mu.cone.unit @ value)
    if u <= null_tol:
        raise ConditioningOnNull(f"event {lam.worlds()} has unit mass {u!r}")
    return GptState(mu.cone, value / u)


def _as_coords(cone: ConeSpace, target) -> np.ndarray:
    if isinstance(target, GptState):
        return target.coords
    return cone._coerce(target)


def gpt_agreement_event(
    model: KnowledgeModel,
    mu: Svm,
    targets: Sequence,
    tol: float = MATCH_TOL,
) -> Event:
    """Worlds where every agent's cell-conditional state matches its target.

    Matching is coordinate max-norm distance at most ``tol``; worlds whose
    cell has unit mass at most ``NULL_MASS_TOL`` are excluded. Targets may be
    :class:`GptState` or plain coordinate vectors (an unnormalized target
    simply never matches).
    """
    if mu.n_worlds != model.n_worlds:
        raise ValueError(f"SVM over {mu.n_worlds} worlds, model has {model.n_worlds}")
    if len(targets) != model.n_agents:
        raise ValueError(f"expected {model.n_agents} targets, got {len(targets)}")
    coords = [_as_coords(mu.cone, t) for t in targets]
    unit = mu.cone.unit
    acc = (1 << model.n_worlds) - 1
    for agent, target in enumerate(coords):
        agent_mask = 0
        for cell in model.partitions[agent].cells:
            value = svm_value(mu, cell)
            u = float(unit @ value)
            if u <= NULL_MASS_TOL:
                continue
            if float(np.abs(value / u - target).max()) <= tol:
                agent_mask |= cell.mask
        acc &= agent_mask
        if not acc:
            break
    return Event(acc, model.n_worlds)


def verify_gpt_aumann(
    model: KnowledgeModel,
    mu: Svm,
    targets: Sequence,
    tol: float = MATCH_TOL,
    *,
    max_iters: int | None = None,
) -> AgreementVerdict:
    """Check the GPT agreement theorem for target states ``targets``.

    Vacuous when the common knowledge of the agreement event is empty or has
    unit mass at most ``tol``; otherwise each target must be within ``tol``
    (max-norm) of the conditional state on the common event.
    """
    e = gpt_agreement_event(model, mu, targets, tol)
    c = common_knowledge(model, e, max_iters=max_iters)
    posteriors = tuple(_as_coords(mu.cone, t) for t in targets)
    if not c:
        return AgreementVerdict(VerdictStatus.VACUOUS_EMPTY_COMMON_KNOWLEDGE, c, posteriors, None)
    value = svm_value(mu, c)
    u = float(mu.cone.unit @ value)
    if u <= tol:
        return AgreementVerdict(VerdictStatus.VACUOUS_NULL_COMMON_KNOWLEDGE, c, posteriors, None)
    pooled = GptState(mu.cone, value / u)
    ok = all(float(np.abs(t - pooled.coords).max()) <= tol for t in posteriors)
    status = VerdictStatus.HOLDS if ok else VerdictStatus.VIOLATED
    return AgreementVerdict(status, c, posteriors, pooled)


def embed_classical(mu: ProbabilityMeasure) -> Svm:
    """Probability measure as an SVM over the simplex cone.

    The atom for world ``w`` is ``weight(w)`` times the ``w``-th basis
    vector, so conditional states are conditional distributions.
    """
    n = mu.n_worlds
    return Svm(SimplexCone(n), np.diag(mu.weights))


def embed_quantum(rho: Dovm) -> Svm:
    """DOVM as an SVM over the PSD cone in Hermitian-basis coordinates.

    Vectorization commutes with conditioning: trace normalization becomes
    unit-functional normalization.
    """
    return Svm(PsdCone(rho.dim), np.stack([vectorize(a) for a in rho.atoms]))
