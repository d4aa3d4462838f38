#!/usr/bin/env python3
"""Quantum measures over classical knowledge: DOVMs and the agreement theorem.

A density-operator-valued measure assigns a PSD atom to each world; the atoms
sum to a density operator. Conditioning normalizes by the trace. The same
set-theoretic common knowledge then forces agents announcing conditional
states to announce the same state.
"""

import numpy as np

from aumann import (
    Dovm,
    Event,
    conditional_state,
    dovm_to_povm,
    dovm_value,
    gen_planted_scenario,
    povm_to_dovm,
    trace_norm,
    verify_bundle,
    verify_quantum_aumann,
)

# A DOVM with off-diagonal atoms over two worlds.
atoms = np.array([
    [[0.35, 0.10 + 0.05j], [0.10 - 0.05j, 0.20]],
    [[0.25, -0.10 - 0.05j], [-0.10 + 0.05j, 0.20]],
])
rho = Dovm(atoms)
print("total state:\n", rho.total.round(3))
print("trace of total:", rho.total.trace().real)

w0 = Event.from_worlds([0], 2)
print("\nvalue on {w0}:\n", dovm_value(rho, w0).round(3))
print("conditional state on {w0}:\n", conditional_state(rho, w0).matrix.round(3))

# DOVM -> POVM: sandwich with the inverse square root of the total state.
povm = dovm_to_povm(rho)
print("\nPOVM effects sum to identity:", povm.is_complete)

# POVM + state -> DOVM inverts the construction for full-rank totals.
back = povm_to_dovm(povm, conditional_state(rho, Event.full(2)))
print("round trip error:", np.abs(back.atoms - rho.atoms).max())

# Agreement: plant a shared cell, announce its conditional state.
bundle = gen_planted_scenario(11, "quantum", n_worlds=6, n_agents=3, dim=3)
verdict = verify_quantum_aumann(bundle.model, bundle.measure, bundle.targets)
print("\nplanted quantum verdict:", verdict.status.value)
worst = max(trace_norm(t - verdict.pooled_posterior.matrix) for t in verdict.posteriors)
print("max trace-norm gap to pooled state:", f"{worst:.2e}")

# Diagonal DOVMs are classical probability in disguise: the conditional
# state's diagonal is the classical conditional distribution.
weights = np.array([0.4, 0.3, 0.2, 0.1])
diag_atoms = np.zeros((4, 4, 4), dtype=complex)
for w, p in enumerate(weights):
    diag_atoms[w, w, w] = p
diag_rho = Dovm(diag_atoms)
lam = Event.from_worlds([0, 2], 4)
cs = conditional_state(diag_rho, lam)
print("\ndiagonal conditional:", np.diag(cs.matrix).real)
print("classical conditional:", [0.4 / 0.6, 0.0, 0.2 / 0.6, 0.0])

# Random scenarios never produce a violation; vacuous cases abound instead.
from collections import Counter  # noqa: E402
from aumann import gen_unconstrained_scenario  # noqa: E402

tally = Counter()
for seed in range(300):
    b = gen_unconstrained_scenario(seed, "quantum", 5, 2, dim=2)
    tally[verify_bundle(b).status.value] += 1
print("\n300 unconstrained quantum scenarios:", dict(tally))
