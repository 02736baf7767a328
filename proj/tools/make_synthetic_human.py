#!/usr/bin/env python3
"""Writes a SYNTHETIC human-ratings CSV for exercising the evaluation harness.

No real participant data is involved. Ratings are drawn around the model's own
posteriors (read from a stimulus_id,trophy,value CSV such as the one written by
`goalinf infer --all`), plus one participant who answers at random so the
agreement-based exclusion has something to catch.
"""
import argparse
import csv

import numpy as np


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--model", required=True, help="stimulus_id,trophy,value CSV")
    ap.add_argument("--out", required=True)
    ap.add_argument("--participants", type=int, default=14)
    ap.add_argument("--noise", type=float, default=1.0, help="rating noise (Likert points)")
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args()

    with open(args.model, newline="") as f:
        rows = [(r["stimulus_id"], r["trophy"], float(r["value"])) for r in csv.DictReader(f)]

    rng = np.random.default_rng(args.seed)
    with open(args.out, "w", newline="") as f:
        f.write("# SYNTHETIC DATA for testing the evaluation harness; not collected from people.\n")
        f.write(f"# tools/make_synthetic_human.py --participants {args.participants} "
                f"--noise {args.noise} --seed {args.seed}\n")
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["participant_id", "stimulus_id", "trophy", "rating"])
        for p in range(1, args.participants + 1):
            pid = f"synthetic-{p:02d}"
            random_responder = p == args.participants
            for stimulus, trophy, value in rows:
                if random_responder:
                    rating = int(rng.integers(1, 8))
                else:
                    rating = int(np.clip(np.rint(1 + 6 * value + rng.normal(0, args.noise)), 1, 7))
                w.writerow([pid, stimulus, trophy, rating])


if __name__ == "__main__":
    main()
