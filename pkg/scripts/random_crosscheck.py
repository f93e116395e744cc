"""Cross-check the two weight-space routes and the two stabilizer routes on random fans.

Writes one JSON line per fan and a summary to stdout.

    python3 scripts/random_crosscheck.py --fans 200 --seed 0 --max-p 4 --max-q 4
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from dataclasses import asdict, dataclass

from supertoric.decofan import (
    induced_sigma_weight_space,
    orbit_stabilizer,
    orbit_stabilizer_from_chart,
    sigma_weight_space,
)
from supertoric.lattice import characters_to_test
from supertoric.sampling import SampleConfig, sample_valid


@dataclass(frozen=True)
class CrossCheckConfig:
    fans: int = 100
    seed: int = 0
    max_p: int = 4
    max_q: int = 4
    degree: int = 2
    large_orbit: bool = True
    output: str | None = None


def check_fan(df, degree: int) -> dict:
    checks = mismatches = 0
    for idx in df.fan.all_cones:
        if orbit_stabilizer(df, idx) != orbit_stabilizer_from_chart(df, idx):
            mismatches += 1
        if not df.is_large_orbit:
            continue
        for m in characters_to_test(df.cone(idx), degree):
            checks += 1
            a = sigma_weight_space(df, idx, m)
            b = induced_sigma_weight_space(df, idx, m)
            if not (a <= b and b <= a):
                mismatches += 1
    return {"p": df.torus.p, "q": df.torus.q, "cones": len(df.fan.all_cones), "abelian": df.torus.is_abelian,
            "weight_checks": checks, "mismatches": mismatches}


def run(cfg: CrossCheckConfig) -> dict:
    sample_cfg = SampleConfig(max_p=cfg.max_p, max_q=cfg.max_q, large_orbit=cfg.large_orbit)
    rows = []
    t0 = time.perf_counter()
    for k in range(cfg.fans):
        df = sample_valid(random.Random(cfg.seed + k), sample_cfg)
        row = check_fan(df, cfg.degree)
        row["seed"] = cfg.seed + k
        rows.append(row)
    summary = {
        "config": asdict(cfg),
        "fans": len(rows),
        "nonabelian": sum(not r["abelian"] for r in rows),
        "weight_checks": sum(r["weight_checks"] for r in rows),
        "mismatches": sum(r["mismatches"] for r in rows),
        "seconds": round(time.perf_counter() - t0, 2),
    }
    if cfg.output:
        with open(cfg.output, "w") as fh:
            for r in rows:
                fh.write(json.dumps(r, sort_keys=True) + "\n")
    return summary


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--fans", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-p", type=int, default=4)
    p.add_argument("--max-q", type=int, default=4)
    p.add_argument("--degree", type=int, default=2)
    p.add_argument("--general", action="store_true", help="sample abelian fans with arbitrary chains")
    p.add_argument("--output", default=None, help="JSON-lines file with per-fan results")
    a = p.parse_args(argv)
    cfg = CrossCheckConfig(a.fans, a.seed, a.max_p, a.max_q, a.degree, not a.general, a.output)
    summary = run(cfg)
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0 if summary["mismatches"] == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
