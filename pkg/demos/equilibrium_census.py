# -*- coding: utf-8 -*-
"""Census of selfconfirming equilibria on a small directed network.

Four agents, one shared spillover intensity. With positive spillovers every
subset of agents that can justify dropping out yields its own equilibrium,
so the census is large even though the Nash count is one. Flipping the sign
to a strong negative changes both counts and moves the Nash active set.
"""

import numpy as np

from netsce import WeightedNetwork, enumerate_sce, make_game, solve_full_ne

ADJ = np.array(
    [
        [0, 0, 0, 1],
        [1, 0, 1, 1],
        [0, 0, 0, 0],
        [1, 0, 1, 0],
    ],
    dtype=float,
)
ALPHA = 0.1


def census(gamma):
    net = WeightedNetwork(z=gamma * ADJ)
    game = make_game(net, alpha=ALPHA)
    records, diag = enumerate_sce(game)
    nes, _ = solve_full_ne(game)
    print(f"\nspillover weight {gamma:+.2f}: "
          f"{len(records)} selfconfirming, {len(nes)} Nash "
          f"({diag.examined} active sets examined)")
    print(f"  {'active set':<14} {'kind':<11} actions")
    for rec in sorted(records, key=lambda r: (-len(r.active_set), r.bitmask)):
        label = "{" + ",".join(str(i) for i in sorted(rec.active_set)) + "}"
        acts = "  ".join(f"{a:7.4f}" for a in rec.actions)
        print(f"  {label:<14} {rec.kind:<11} {acts}")


if __name__ == "__main__":
    census(0.2)
    census(-0.6)
