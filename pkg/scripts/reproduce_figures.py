#!/usr/bin/env python3
"""Run every figure config and print the headline numbers.

    python3 scripts/reproduce_figures.py [--out-dir out] [--workers N]
"""
import argparse
from pathlib import Path

import numpy as np

from optoqubit import cli, sweeps
from optoqubit.params import baseline

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def curve(path, key, eta):
    rows = [r for r in sweeps.read_csv(path) if r["eta"] == eta]
    return (np.array([r["axis"] for r in rows]),
            np.array([np.nan if r[key] is None else r[key] for r in rows]))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default="out")
    ap.add_argument("--workers", type=int, default=None)
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    paths = {}
    for cfg_path in sorted(CONFIGS.glob("fig*.yaml")):
        mode = cli.load_config(cfg_path)["mode"]
        paths[cfg_path.stem] = out / f"{cfg_path.stem}.csv"
        argv = [mode, "--config", str(cfg_path), "-o", str(paths[cfg_path.stem])]
        if args.workers and mode != "stability-map":
            argv += ["--workers", str(args.workers)]
        if cli.main(argv) != cli.EXIT_OK:
            raise SystemExit(f"{cfg_path.name} failed")
        print(f"wrote {paths[cfg_path.stem]}")

    argv = ["stability-map", "--config", str(CONFIGS / "fig2_stability.yaml")]
    cfg, _ = cli.make_config(cli.build_parser().parse_args(argv))
    for eta, m in zip(cfg.eta_list, sweeps.run_stability_map(cfg)):
        print(f"stability  eta={eta:g}: uniform stable G < {m.uniform_limit():.4f}  (RH disagreements {m.disagreements})")

    for eta in (0.0, 0.6):
        d, e = sweeps.locate_maximum(*curve(paths["fig3a_detuning"], "E_N", eta))
        print(f"E_N peak   eta={eta:g}: {e:.4f} at delta={d:.4f}")
    t = baseline(delta=0.5)
    for eta in (0.0, 0.6):
        g = sweeps.find_onset("g_eff", t.replace(eta=eta), (0.0, 0.6))
        n = sweeps.find_onset("n_th", t.replace(eta=eta, g_eff=0.6), (0.0, 14000.0))
        print(f"onset      eta={eta:g}: G_c={g:.4f}  extinction n_th={n:.0f}")
    for key in ("I_M", "D_G"):
        d, v = sweeps.locate_maximum(*curve(paths["fig5_discord"], key, 0.6))
        print(f"{key} peak   eta=0.6: {v:.4f} at delta={d:.4f}")


if __name__ == "__main__":
    main()
