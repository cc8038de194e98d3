#!/usr/bin/env python3
"""Adaptive step-size trace on the double spherical pendulum.

The chain passes through a near-vertical configuration around t = 2.2
where the dynamics stiffen; the controller should shrink the step there
and re-expand afterwards."""

from __future__ import annotations

import argparse
from pathlib import Path

from geomint.harness import RunConfig, run


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--method", default="rkmk54")
    ap.add_argument("--tol", type=float, default=1e-6)
    ap.add_argument("--t-end", type=float, default=3.0)
    ap.add_argument("--out", default="results/pendulum-adaptive")
    args = ap.parse_args()

    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    cfg = RunConfig(
        system="pendulum",
        method=args.method,
        mode="adaptive",
        t_end=args.t_end,
        h=0.05,
        tol=args.tol,
        out=args.out,
    )
    paths = run(cfg)
    steps = [
        line.split(",")
        for line in Path(paths[-1]).read_text().splitlines()
        if line and not line.startswith(("#", "t,"))
    ]
    accepted = [(float(t), float(h)) for t, h, _, acc in steps if acc == "1"]
    rejected = sum(1 for *_, acc in steps if acc == "0")
    t_min, h_min = min(accepted, key=lambda th: th[1])
    print(f"{len(accepted)} accepted steps, {rejected} rejected")
    print(f"smallest accepted step h = {h_min:.3e} at t = {t_min:.3f}")
    for p in paths:
        print(p)


if __name__ == "__main__":
    main()
