#!/usr/bin/env python3
"""Agents cannot agree to disagree: the classical agreement theorem.

Each agent announces a posterior for a hypothesis H. The agreement event E
collects the worlds where those announcements are correct given each agent's
information; if the announcements are common knowledge somewhere (with
positive probability), they must all equal the posterior given C(E).
"""

import numpy as np

from aumann import (
    KnowledgeModel,
    ProbabilityMeasure,
    agreement_event,
    common_knowledge,
    gen_planted_scenario,
    posterior_function,
    verify_aumann,
    verify_bundle,
)

model = KnowledgeModel.from_blocks(4, [
    [[0, 1], [2, 3]],
    [[0, 1], [2], [3]],
])
mu = ProbabilityMeasure.uniform(4)
h = model.event([0, 2])

# Per-world posteriors P(H | agent's cell):
for agent, name in enumerate(["alice", "bob"]):
    print(f"{name}'s posterior at each world:", posterior_function(model, mu, agent, h))

# Both announce 1/2. Alice's announcement is correct everywhere; Bob's only
# on {0, 1}, so  E = {0, 1}  and it is common knowledge there.
q = (0.5, 0.5)
e = agreement_event(model, mu, h, q)
print("\nagreement event:", e.worlds())
print("common knowledge:", common_knowledge(model, e).worlds())

verdict = verify_aumann(model, mu, h, q)
print("status:", verdict.status.value)
print("pooled posterior P(H | C(E)):", verdict.pooled_posterior)

# Announcing incompatible posteriors does not violate the theorem; it just
# empties the agreement event, so its hypothesis never applies.
bad = verify_aumann(model, mu, h, (0.5, 1.0))
print("\nincompatible announcements:", bad.status.value)

# Planted scenarios guarantee the interesting branch: a cell shared by all
# agents forces non-empty common knowledge, and the theorem then forces
# every announcement to match the pooled posterior.
rng_seeds = range(5)
for seed in rng_seeds:
    bundle = gen_planted_scenario(seed, "classical", n_worlds=8, n_agents=3)
    v = verify_bundle(bundle)
    gap = max(abs(t - v.pooled_posterior) for t in v.posteriors)
    print(f"seed {seed}: {v.status.value}, max |q_i - pooled| = {gap:.2e}")

# The theorem is about equal priors; the measure itself can be anything.
skewed = ProbabilityMeasure(np.array([0.7, 0.1, 0.1, 0.1]))
q_skew = (posterior_function(model, skewed, 0, h)[0],) * 2
print("\nskewed prior verdict:", verify_aumann(model, skewed, h, q_skew).status.value)
