"""
Finite ladder operators contracting to the bosonic oscillator
=============================================================

A (2j+1)-dimensional su(2) representation carries a complete oscillator
analog: ladder operators with a hard top rung, a bounded number operator,
and discrete position/momentum.  Rescaling the ladders by 1/sqrt(2j) and
letting j grow recovers the ordinary boson algebra.  This script measures
how fast that happens on the low-lying states.
"""

import numpy as np

from finitejc import build_boson_rep, build_spin_rep, contracted_ladders

# Compare against the truncated boson ladders on the lowest WINDOW levels;
# the finite weights sqrt((n+1)(1 - n/2j)) approach sqrt(n+1) like n/(4j).
WINDOW = 8
boson = build_boson_rep(WINDOW)

print(f"deviation of the rescaled ladders from boson operators, lowest {WINDOW} levels")
print(f"{'j':>6}   {'|weights - sqrt(n+1)|':>22}   {'|[a, adag] - 1|':>16}")

rows = []
for j in (4, 16, 64, 256, 1024):
    rep = build_spin_rep(j)
    lowering, raising = contracted_ladders(rep)

    weight_err = np.max(np.abs(np.diag(raising, -1)[:WINDOW - 1]
                               - np.diag(boson.adag, -1)))

    # The finite commutator is 1 - N/j exactly, so its distance from the
    # boson identity on the window is (WINDOW - 1)/j.
    commutator = lowering @ raising - raising @ lowering
    comm_err = np.max(np.abs(commutator[:WINDOW, :WINDOW] - np.eye(WINDOW)))

    rows.append((j, weight_err, comm_err))
    print(f"{j:>6}   {weight_err:>22.3e}   {comm_err:>16.3e}")

# Both columns shrink like 1/j: quadrupling j divides the error by ~4.
ratios = [rows[k][2] / rows[k + 1][2] for k in range(len(rows) - 1)]
print("commutator error ratios between successive j (expect ~4):",
      ", ".join(f"{r:.2f}" for r in ratios))
