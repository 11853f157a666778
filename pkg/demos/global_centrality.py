# -*- coding: utf-8 -*-
"""Misreading distant spillovers as local ones changes everybody's play.

In the global variant each agent's payoff also collects a share of what the
whole network does, but agents attribute the extra feedback to their own
neighborhood, scaled by a perceived-centrality coefficient c. On the line,
c = 0.2 overstates the edge agents' realized ratio (0.1), so the rest point
sits above the Nash profile. On the complete network every agent's realized
ratio is exactly 0.2 no matter what is played, so the same c is correct for
everyone and the rest point IS the Nash profile. Along a ray of c's the
rest-point actions rise monotonically.
"""

import numpy as np

from netsce import (
    WeightedNetwork,
    bonacich,
    make_game,
    make_global_game,
    phi_map,
    residual,
    solve_global_sce,
    true_centrality,
)

LINE = WeightedNetwork(z=0.2 * np.array(
    [[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=float))
COMPLETE = WeightedNetwork(z=0.2 * np.array(
    [[0, 1, 1], [1, 0, 1], [1, 1, 0]], dtype=float))
ALPHA = 0.1
BETA = 1.0
C = 0.2

if __name__ == "__main__":
    for name, net in (("line", LINE), ("complete", COMPLETE)):
        game = make_game(net, alpha=ALPHA)
        ne = bonacich(net, game.alpha)
        g = make_global_game(game, beta=BETA, c=np.full(net.n, C))
        out = solve_global_sce(g)
        acts = ", ".join(f"{a:.6f}" for a in out.actions)
        ne_s = ", ".join(f"{a:.6f}" for a in ne)
        print(f"\n{name} network")
        print(f"  Nash profile (no global term):  {ne_s}")
        print(f"  rest point with c = {C}:         {acts}")
        print(f"  method {out.method}, {out.iterations} iterations, "
              f"certified max residual {out.residual:.2e}")
        tc = true_centrality(g, out.actions)
        pairs = ", ".join(
            f"{p:.3f}/{t:.3f}" for p, t in zip(g.c, tc.values)
        )
        print(f"  perceived vs realized centrality: {pairs}")

    # one ray of perceived centralities on the line network
    game = make_game(LINE, alpha=ALPHA)
    ray = [t * np.full(3, C) for t in (0.25, 0.5, 0.75, 1.0)]
    print("\nline network, scaling all perceived centralities together:")
    print(f"  {'scale':>6} {'a_1 (middle agent)':>19} {'residual':>10}")
    for t, entry in zip((0.25, 0.5, 0.75, 1.0), phi_map(game, BETA, ray)):
        mid = entry.solve.actions[1]
        print(f"  {t:6.2f} {mid:19.6f} {entry.solve.residual:10.2e}")
