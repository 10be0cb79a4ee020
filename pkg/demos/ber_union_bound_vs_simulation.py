"""Union bound against full-chain simulated BER for both users.

The simulation runs the complete transmit, superpose, detect and cancel
chain, so the near user's curve includes real cancellation errors. The
bound enumerates every pairwise hypothesis with closed-form averages.
The CSV carries both with Wilson confidence bands; the bound should sit
at or above the band everywhere once it is below its saturation value.
"""

import csv
from pathlib import Path

from lisnoma.channel import simulate_ber
from lisnoma.config import default_config
from lisnoma.union_bound import union_bound_curve

OUT = Path(__file__).resolve().parent / "output"

GRID = list(range(0, 25, 3))
FRAMES = 150_000


def main() -> None:
    OUT.mkdir(exist_ok=True)
    cfg = default_config()
    sim = simulate_ber(cfg, GRID, FRAMES, seed=5)
    bounds = {u: union_bound_curve(cfg, u, GRID) for u in (1, 2)}

    path = OUT / "ber_union_bound_vs_simulation.csv"
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["snr_db", "user", "bound", "ber", "ci_low", "ci_high"])
        for u in (1, 2):
            b, s = bounds[u], sim[u]
            for i, sdb in enumerate(GRID):
                w.writerow([sdb, u, f"{b.value[i]:.8g}", f"{s.ber[i]:.8g}",
                            f"{s.ci_low[i]:.8g}", f"{s.ci_high[i]:.8g}"])

    print(f"wrote {path}")
    for u in (1, 2):
        b, s = bounds[u], sim[u]
        breaches = [sdb for i, sdb in enumerate(GRID)
                    if b.value[i] < s.ci_low[i]]
        gaps = [b.value[i] / s.ber[i] for i in range(len(GRID))
                if s.ber[i] > 0 and b.value[i] < 1.0]
        msg = "holds everywhere" if not breaches else f"breached at {breaches}"
        print(f"user {u}: bound {msg}; bound/sim factor "
              f"{min(gaps):.2f}..{max(gaps):.2f} where unsaturated")


if __name__ == "__main__":
    main()
