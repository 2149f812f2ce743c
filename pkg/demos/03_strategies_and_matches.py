"""Playable strategies, the match runner, and best responses.

The match runner mirrors the draw semantics operationally: a position
repeated since the last capture ends the game as a repetition draw.
"""

from cspgame import Player, best_response, run_match, solve_value
from cspgame.catalog import catalog_entry, gen_star
from cspgame.strategies import (
    APrioriStrategy,
    GreedyStrategy,
    OptimalStrategy,
    StolenStrategy,
)

star = gen_star([(2, (2,)), (3, (3,)), (1, (1,))])
print("greedy vs greedy on a star with leaf customers (greedy is optimal there):")
rec = run_match(star, GreedyStrategy(), GreedyStrategy())
print("  match:", rec.outcome, "| solver value:", solve_value(star))

print("\nno best response beats greedy on stars, from either side:")
print("  free II vs fixed greedy I:", best_response(star, GreedyStrategy(), Player.I))
print("  free I vs fixed greedy II:", best_response(star, GreedyStrategy(), Player.II))

draw = catalog_entry("draw-game").instance
rec = run_match(draw, OptimalStrategy(), OptimalStrategy())
print("\noptimal vs optimal on the draw game:", rec.outcome, f"({rec.reason})")

apriori = catalog_entry("apriori-tree").instance
prio = sorted(apriori.customers)
print("\na fixed customer-priority plan loses on the a-priori tree:")
out = best_response(apriori, APrioriStrategy(prio), Player.I)
print(f"  priority {prio} vs best response: {out}")

print("\nstolen strategies waste two moves, then answer the opponent's")
print("lagged move sequence with the inner strategy's replies:")
two_leaf = gen_star([(1, (1,)), (1, (1,))])
rec = run_match(two_leaf, StolenStrategy(GreedyStrategy()), GreedyStrategy())
print("  stolen(greedy) vs greedy on a two-leaf star:", rec.outcome)
