#!/usr/bin/env python3
"""Knowledge models from the ground up.

Two agents observe the same world through different partitions. We build the
knowledge operator, climb the mutual-knowledge hierarchy, and compare the
fixpoint computation of common knowledge against the meet-partition oracle.
"""

from aumann import (
    KnowledgeModel,
    cell_decomposition,
    cell_of,
    common_knowledge,
    common_knowledge_via_meet,
    know,
    meet_partition,
    mutual_knowledge,
)

# Four worlds. Alice can only tell the lower half {0,1} from the upper half
# {2,3}; Bob additionally distinguishes 2 from 3.
model = KnowledgeModel.from_blocks(4, [
    [[0, 1], [2, 3]],        # alice
    [[0, 1], [2], [3]],      # bob
])

print("alice's cell at world 2:", cell_of(model, 0, 2).worlds())
print("bob's cell at world 2:  ", cell_of(model, 1, 2).worlds())

# Where does each agent know the event E = {0, 1, 2}?
e = model.event([0, 1, 2])
print("\nE =", e.worlds())
print("alice knows E at:", know(model, 0, e).worlds())   # her cell {2,3} pokes out of E
print("bob knows E at:  ", know(model, 1, e).worlds())

# "Everybody knows", iterated. The chain shrinks and then freezes.
for degree in range(4):
    print(f"mutual knowledge degree {degree}:", mutual_knowledge(model, e, degree).worlds())

c = common_knowledge(model, e)
print("\ncommon knowledge of E:", c.worlds())

# The meet partition (finest common coarsening) characterizes the same set:
# C(E) is the union of meet cells inside E.
meet = meet_partition(model)
print("meet partition:", [cell.worlds() for cell in meet.cells])
print("oracle agrees:", common_knowledge_via_meet(model, e) == c)

# A non-empty common-knowledge set is a disjoint union of each agent's cells.
for agent, name in enumerate(["alice", "bob"]):
    cells = cell_decomposition(model, agent, c)
    print(f"C(E) as {name}'s cells:", [cell.worlds() for cell in cells])

# Interlocking partitions can make common knowledge impossible: here the
# meet is the trivial partition, so only E = Omega has non-empty C(E).
tangled = KnowledgeModel.from_blocks(5, [
    [[0, 1], [2, 3], [4]],
    [[0], [1, 2], [3, 4]],
])
print("\ntangled meet:", [cell.worlds() for cell in meet_partition(tangled).cells])
print("C({0,1,2,3}):", common_knowledge(tangled, tangled.event([0, 1, 2, 3])).worlds())
