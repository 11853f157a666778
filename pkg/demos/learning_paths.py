# -*- coding: utf-8 -*-
"""Two runs of the conjecture dynamics: one settles, one cycles forever.

Agents best-reply to a conjectured aggregate, observe their realized payoff,
and back out what the aggregate must have been. At moderate intensity the
map contracts and the path lands on the Nash equilibrium. Push the same
network a little hotter and the path falls into a recurring cycle driven by
the two agents who feed back on each other.
"""

import numpy as np

from netsce import WeightedNetwork, is_sce, make_game, run_learning, solve_full_ne

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
START = np.zeros(4)  # flat priors: everyone expects no spillover at all


def show(gamma, max_iter=5000):
    game = make_game(WeightedNetwork(z=gamma * ADJ), alpha=ALPHA)
    traj = run_learning(game, START, max_iter=max_iter)
    print(f"\nspillover weight {gamma:+.2f}: {traj.classification} "
          f"after {traj.steps} periods")
    for t in (0, 1, 2, 5, 10, 20):
        if t < traj.steps:
            acts = "  ".join(f"{a:8.5f}" for a in traj.actions[t])
            print(f"  t={t:<4d} actions {acts}")
    if traj.classification == "converged":
        check = is_sce(game, traj.limit.actions, traj.limit.conjectures)
        nes, _ = solve_full_ne(game)
        gap = float(np.max(np.abs(traj.limit.actions - nes[0].actions)))
        print(f"  limit is selfconfirming: {check.ok}; "
              f"distance to the Nash profile: {gap:.2e}")
    elif traj.classification == "oscillating":
        print(f"  cycle period {traj.period} ({traj.period_kind} recurrence), "
              f"agents riding the cycle: {traj.cycle_agents}")
        if traj.period_kind == "state":
            for k, row in enumerate(traj.actions[-traj.period:]):
                acts = "  ".join(f"{a:8.5f}" for a in row)
                print(f"  cycle[{k}] actions {acts}")
        else:
            # states drift while the per-period conjecture increments repeat
            deltas = np.diff(traj.conjectures[-(traj.period + 1):], axis=0)
            for k, row in enumerate(deltas):
                incr = "  ".join(f"{d:+8.5f}" for d in row)
                print(f"  recurring increment[{k}] {incr}")


if __name__ == "__main__":
    show(0.9)
    show(1.0)
