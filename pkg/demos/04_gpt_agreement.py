#!/usr/bin/env python3
"""Beyond quantum: agreement in generalized probabilistic theories.

A theory is a pointed convex cone with a unit functional; states are cone
elements of unit value, and a state-valued measure assigns a cone element to
each world. Classical probability (simplex cone) and quantum theory (PSD
cone in Hermitian coordinates) are special cases; polyhedral cones give
genuinely post-quantum examples. The agreement theorem survives in all of
them.
"""

import numpy as np

from aumann import (
    Dovm,
    Effect,
    Event,
    PolyhedralCone,
    ProbabilityMeasure,
    Svm,
    cone_membership,
    devectorize,
    embed_classical,
    embed_quantum,
    gen_planted_scenario,
    gpt_conditional_state,
    svm_value,
    verify_bundle,
    verify_gpt_aumann,
    verify_quantum_aumann,
)

# A polyhedral cone in R^3: four rays, unit functional = first coordinate.
generators = np.array([
    [1.0, 1.0, 0.0],
    [1.0, -1.0, 0.0],
    [1.0, 0.0, 1.0],
    [1.0, 0.0, -1.0],
])
unit = np.array([1.0, 0.0, 0.0])
cone = PolyhedralCone(generators, unit)
print("cone membership of (2, 0, 1):", cone_membership(cone, [2.0, 0.0, 1.0]))
print("cone membership of (0, 1, 0):", cone_membership(cone, [0.0, 1.0, 0.0]))

# Effects are functionals squeezed between 0 and the unit on the cone.
phi = Effect(cone, np.array([0.5, 0.25, 0.0]))
state = np.array([1.0, 0.5, 0.0])  # a valid state: unit value 1, inside cone
print("phi(state) =", phi(state))

# A state-valued measure over three worlds; conditioning renormalizes by u.
raw = np.array([
    [0.5, 0.3, 0.1],
    [0.3, -0.1, 0.2],
    [0.2, 0.0, -0.1],
])
svm = Svm(cone, raw)
lam = Event.from_worlds([0, 1], 3)
print("\nmu(lam) =", svm_value(svm, lam))
print("conditional state:", gpt_conditional_state(svm, lam).coords)

# Planted agreement in the native polyhedral theory.
bundle = gen_planted_scenario(4, "gpt", n_worlds=6, n_agents=2,
                              dim=4, cone_kind="polyhedral", n_generators=8)
verdict = verify_bundle(bundle)
print("\npolyhedral planted verdict:", verdict.status.value)

# Reduction squares: the classical and quantum layers embed exactly.
mu = ProbabilityMeasure.uniform(4)
simplex_svm = embed_classical(mu)
print("\nclassical embedding cone:", type(simplex_svm.cone).__name__,
      "| atoms diagonal:", np.allclose(simplex_svm.atoms, np.diag(mu.weights)))

qbundle = gen_planted_scenario(9, "quantum", 5, 2, dim=2)
rho: Dovm = qbundle.measure
psd_svm = embed_quantum(rho)
from aumann import vectorize  # noqa: E402

targets = tuple(vectorize(t.matrix) for t in qbundle.targets)
v_gpt = verify_gpt_aumann(qbundle.model, psd_svm, targets)
v_q = verify_quantum_aumann(qbundle.model, rho, qbundle.targets)
print("quantum vs embedded-GPT status:", v_q.status.value, "/", v_gpt.status.value)
gap = np.abs(devectorize(v_gpt.pooled_posterior.coords) - v_q.pooled_posterior.matrix).max()
print("pooled states agree to", f"{gap:.2e}")
