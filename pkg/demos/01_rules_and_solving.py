"""A tour of the game rules and the exact solver.

Two salesmen alternate single-edge moves on a graph; landing on a vertex
with a customer claims it. Majority wins; a game that never ends is a
draw, ranked just below a tie for the side to move.
"""

from cspgame import (
    Move,
    apply_move,
    legal_moves,
    oracle_value,
    solve,
    terminal_status,
)
from cspgame.catalog import gen_wheel

inst = gen_wheel(5)
print("the directed wheel on 5 rim customers")
print("vertices:", inst.graph.vertex_count, " customers:", sorted(inst.customers))

state = inst.initial_state()
print("\ninitial state:", state)
print("legal moves:", legal_moves(inst, state))

state, delta = apply_move(inst, state, Move.step(0, 1))
print("\nplayer I steps onto rim vertex 1, capturing:", delta)
print("now:", state, " terminal:", terminal_status(inst, state))

res = solve(inst)
print("\nexact value (I's perspective):", res.value)
print("states explored:", res.stats.states_visited,
      " layers:", res.stats.layers_solved)
print("optimal reply for II here:", res.policy[state])

print("\nindependent oracle agrees:", oracle_value(inst))

print("\nthe second player wins 2-n on every odd wheel:")
for n in (3, 5, 7, 9):
    print(f"  wheel({n}): {solve(gen_wheel(n)).value}")
