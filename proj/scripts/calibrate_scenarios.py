#!/usr/bin/env python3
"""Calibrate the built-in scenarios against target selection rates.

Runs `lcga replicate` on one scenario from config/scenarios.json with a few
candidate values of one parameter and prints the resulting Table-1 style
percentages. With --write, the chosen value is stored back in the config.

Example:
    scripts/calibrate_scenarios.py scenario1 --param sigma2_intercept \
        --values 0.01 0.02 0.04 --n 500 --replications 50 --bootstraps 20
"""
import argparse
import json
import pathlib
import subprocess
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent
CONFIG = ROOT / "config" / "scenarios.json"


def set_param(spec, param, value):
    if param == "separation":
        # Scale the gap of every group from the first group's curve.
        base = spec["coeffs"][0]
        spec["coeffs"] = [[b + value * (c - b) for b, c in zip(base, row)] for row in spec["coeffs"]]
    elif param.startswith("prob:"):
        # Set one group's proportion and rescale the others to keep the sum at 1.
        k = int(param.split(":")[1])
        probs = spec["group_probs"]
        rest = sum(probs) - probs[k]
        spec["group_probs"] = [value if j == k else p * (1 - value) / rest for j, p in enumerate(probs)]
    elif param.startswith("coeff:"):
        _, k, j = param.split(":")
        spec["coeffs"][int(k)][int(j)] = value
    else:
        spec[param] = value
    return spec


def run(exe, spec, args):
    with tempfile.TemporaryDirectory() as tmp:
        cfg = {
            "scenario": spec,
            "n_subjects": args.n,
            "replications": args.replications,
            "bootstraps": args.bootstraps,
            "k_max": 5,
            "degree": 3,
            "master_seed": args.seed,
        }
        path = pathlib.Path(tmp) / "config.json"
        path.write_text(json.dumps(cfg))
        subprocess.run([str(exe), "replicate", str(path), "--out-dir", tmp, "--quiet", "--jobs", str(args.jobs)],
                       check=True, stdout=subprocess.DEVNULL)
        report = json.loads((pathlib.Path(tmp) / "report.json").read_text())
        pooled = {}
        adequate = 0
        for line in (pathlib.Path(tmp) / "results.jsonl").read_text().splitlines()[1:]:
            rec = json.loads(line)
            for k, c in rec["bootstrap_counts"].items():
                pooled[k] = pooled.get(k, 0) + c
            a = rec["adequacy"]
            adequate += bool(a and a["app_pass"] and a["occ_pass"] and a["entropy_pass"])
        report["bootstrap_counts"] = dict(sorted(pooled.items()))
        report["pct_adequate"] = 100.0 * adequate / args.replications
        return report


def main():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("scenario")
    p.add_argument("--param", default="sigma2_intercept")
    p.add_argument("--values", type=float, nargs="+", required=True)
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--replications", type=int, default=50)
    p.add_argument("--bootstraps", type=int, default=0)
    p.add_argument("--seed", type=int, default=20240101)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--exe", default=str(ROOT / "build" / "tools" / "lcga"))
    p.add_argument("--write", type=float, help="store this value in the config afterwards")
    args = p.parse_args()

    doc = json.loads(CONFIG.read_text())
    spec = next(s for s in doc["scenarios"] if s["name"] == args.scenario)
    print(f"{args.param:>18} {'bic%':>7} {'bayes%':>7} {'boot%':>7} {'adeq%':>6} {'ent_min':>7}  selected")
    for v in args.values:
        r = run(args.exe, set_param(json.loads(json.dumps(spec)), args.param, v), args)
        boot = r["pct_correct_bootstrap_pooled"] if args.bootstraps else float("nan")
        print(f"{v:>18g} {r['pct_correct_bic']:>7.1f} {r['mean_bayes_correct']:>7.1f} {boot:>7.1f} {r['pct_adequate']:>6.1f} {r['adequacy']['relative_entropy']['min']:>7.3f}  {r['selected_counts']} boot {r['bootstrap_counts']}", flush=True)

    if args.write is not None:
        set_param(spec, args.param, args.write)
        CONFIG.write_text(json.dumps(doc, indent=2) + "\n")
        print(f"wrote {args.param}={args.write} for {args.scenario} to {CONFIG}")


if __name__ == "__main__":
    main()
