"""Command-line experiment runner.

Every command reads an optional JSON config (``--config``) and flag
overrides (flags win), validates the merged config, and writes its
artifacts to ``--out``.  Each artifact carries the sha256 of the config and
of the calibration manifest.  Failures exit with status 2 and print a JSON
error object.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import DensityLabError

# key -> (type, default); None default means required unless noted optional
COMMON = {"out": (str, "out"), "manifest": (str, ""), "workers": (int, 1)}
SCHEMAS = {
    "calibrate": {"seed": (int, 20240917)},
    "scan-R": {"T": (float, 1000.0), "sigma": (float, None), "eta": (float, None),
               "dt": (float, 0.05), "refine": (bool, False)},
    "scan-theorem-lhs": {"T": (list, [1000.0]), "nu": (float, 0.4), "eps": (float, 0.25),
                         "dt": (float, 0.05), "zero_table": (str, ""), "C": (float, 1.0)},
    "find-zeros": {"T": (float, 100.0)},
    "verify-lemma": {"ids": (list, None), "samples": (int, 0)},
    "detect": {"T": (float, 1e4), "eps": (float, 0.3), "nu": (float, 0.5), "U": (float, 200.0),
               "zero_table": (str, None)},
    "exponents": {"profile": (str, "DH"), "delta": (str, ""), "profile_eps": (str, "0"),
                  "nu": (str, None), "eps": (str, None)},
    "report": {},
}


class ConfigError(DensityLabError, ValueError):
    """Unknown key, wrong type or missing required value in a run config."""


def _coerce(key, typ, value):
    try:
        if typ is bool:
            if isinstance(value, str):
                return value.lower() in ("1", "true", "yes")
            return bool(value)
        if typ is list:
            vals = value if isinstance(value, list) else [value]
            return [v if key == "ids" else float(v) for v in vals]
        if typ is float:
            v = float(value)
            if not math.isfinite(v):
                raise ValueError("non-finite")
            return v
        return typ(value)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"config key {key!r}: {e}") from None


def build_config(command, file_cfg: dict, overrides: dict) -> dict:
    schema = {**COMMON, **SCHEMAS[command]}
    unknown = sorted(set(file_cfg) - set(schema))
    if unknown:
        raise ConfigError(f"unknown config keys for {command}: {unknown}")
    cfg = {}
    for key, (typ, default) in schema.items():
        if key in overrides and overrides[key] is not None:
            val = overrides[key]
        elif key in file_cfg:
            val = file_cfg[key]
        elif default is None:
            raise ConfigError(f"{command} needs {key!r}")
        else:
            val = default
        cfg[key] = _coerce(key, typ, val)
    if cfg["workers"] < 1:
        raise ConfigError("workers must be at least 1")
    return cfg


def config_hash(command, cfg) -> str:
    core = {k: v for k, v in cfg.items() if k != "out"}
    blob = json.dumps({"command": command, **core}, sort_keys=True, default=_jsonable)
    return hashlib.sha256(blob.encode()).hexdigest()


def _jsonable(o):
    if isinstance(o, Fraction):
        return str(o)
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, tuple):
        return list(o)
    raise TypeError(f"not serializable: {type(o).__name__}")


def dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_jsonable) + "\n"


class Run:
    """Output directory plus the provenance stamped on every artifact."""

    def __init__(self, command, cfg):
        from .calibration import load_manifest
        self.command = command
        self.cfg = cfg
        self.manifest = load_manifest(cfg["manifest"] or None)
        self.out = Path(cfg["out"])
        self.out.mkdir(parents=True, exist_ok=True)
        self.stamp = {"config_sha256": config_hash(command, cfg),
                      "manifest_sha256": self.manifest.sha256}

    def json(self, name, payload):
        body = {"command": self.command, "config": {k: v for k, v in self.cfg.items()
                                                    if k != "out"}, **self.stamp, **payload}
        (self.out / name).write_text(dump_json(body), encoding="utf-8")
        return body

    def svg(self, name, draw):
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
        matplotlib.rcParams["svg.hashsalt"] = "densitylab"
        fig, ax = plt.subplots(figsize=(6, 4))
        draw(ax)
        fig.tight_layout()
        desc = " ".join(f"{k}={v}" for k, v in self.stamp.items())
        fig.savefig(self.out / name, format="svg",
                    metadata={"Date": None, "Creator": "densitylab", "Description": desc})
        plt.close(fig)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_calibrate(run):
    from .calibration import calibrate
    m = calibrate(seed=run.cfg["seed"])
    m.write(run.out / "calibration.txt")
    return run.json("calibrate.json", {"constants": m.constants, "new_manifest_sha256": m.sha256})


def cmd_scan_R(run):
    from .large_values import ScanConfig, measure_R
    c = run.cfg
    sc = ScanConfig(T=c["T"], dt=c["dt"], refine=c["refine"])
    iv = measure_R(c["sigma"], c["eta"], sc)
    iv.write_csv(run.out / "scan_R.csv", extra=run.stamp)
    return run.json("scan_R.json", {"measure": iv.measure, "intervals": len(iv),
                                    "discretization_error": iv.discretization_error,
                                    "threshold": c["T"] ** c["eta"]})


def _load_table(path, need):
    from .calibration import zero_table
    from .zeros import ingest_zeros
    if path:
        p = Path(path)
        if not p.exists():
            raise FileNotFoundError(f"zero table not found: {p}")
        return ingest_zeros(p)
    return zero_table(float(math.ceil(need)))


def cmd_scan_theorem_lhs(run):
    from .large_values import ScanConfig, measure_theorem_lhs, theorem_rhs
    c = run.cfg
    Ts = sorted(c["T"])
    table = _load_table(c["zero_table"], c["C"] * max(Ts))
    rows = []
    for T in Ts:
        iv = measure_theorem_lhs(ScanConfig(T=T, dt=c["dt"], nu=c["nu"], eps=c["eps"]))
        iv.write_csv(run.out / f"theorem_lhs_T{T:g}.csv", extra=run.stamp)
        rhs = theorem_rhs(T, c["nu"], c["eps"], table, c["C"])
        rows.append({"T": T, "lhs": iv.measure, "discretization_error": iv.discretization_error,
                     "intervals": len(iv), "rhs": rhs["rhs"], "zero_term": rhs["zero_term"],
                     "nu_term": rhs["nu_term"], "bound_8": 8 * T ** (c["nu"] / 2 + c["eps"]),
                     "lhs_over_T_nu_half": iv.measure / T ** (c["nu"] / 2)})

    def draw(ax):
        x = [r["T"] for r in rows]
        ax.loglog(x, [r["lhs"] for r in rows], "o-", label="measured LHS")
        ax.loglog(x, [r["rhs"] for r in rows], "s--", label="RHS with zero counts")
        ax.loglog(x, [r["bound_8"] for r in rows], ":", label="8 T^(nu/2+eps)")
        ax.set_xlabel("T")
        ax.set_ylabel("measure")
        ax.legend()

    run.svg("theorem_lhs.svg", draw)
    return run.json("theorem_lhs.json", {"rows": rows})


def cmd_find_zeros(run):
    from .zeros import find_zeros
    table = find_zeros(run.cfg["T"])
    table.write(run.out / "zeros.txt")
    return run.json("zeros.json", {"count": len(table), "t_max": table.t_max,
                                   "first": float(table.gammas[0]) if len(table) else None})


def cmd_verify_lemma(run):
    from .lemmas import LEMMA_IDS, run_check
    results = []
    for i in run.cfg["ids"]:
        if i not in LEMMA_IDS:
            raise ConfigError(f"unknown lemma id {i!r}; known: {list(LEMMA_IDS)}")
        results.append(run_check(i, run.cfg["samples"] or None, run.manifest))
    return run.json("verify_lemma.json", {"results": results,
                                          "passed": all(r["passed"] for r in results)})


def cmd_detect(run):
    from .detector import DetectorConfig, run_detector
    c = run.cfg
    table = _load_table(c["zero_table"], 2 * c["U"])
    det = run_detector(DetectorConfig(c["nu"], c["eps"], c["T"], c["U"]), table)
    det.write_csv(run.out / "witnesses.csv", extra=run.stamp)

    def draw(ax):
        tags = sorted({w.tag for w in det.witnesses})
        for tag in tags:
            ks = [math.log2(w.K) for w in det.witnesses if w.tag == tag]
            ax.hist(ks, bins=20, alpha=0.7, label=tag)
        ax.set_xlabel("log2 K of the first large dyadic block")
        ax.set_ylabel("zeros")
        if tags:
            ax.legend()

    run.svg("witnesses.svg", draw)
    fails = [{"gamma": g, "stage": e.stage, "message": str(e)} for g, e in det.failures]
    return run.json("detect.json", {"summary": det.summary(), "failures": fails})


def cmd_exponents(run):
    from .exponents import profile_by_name, q, rhs_exponent
    c = run.cfg
    prof = profile_by_name(c["profile"], c["delta"] or None, c["profile_eps"])
    rep = rhs_exponent(q(c["nu"]), q(c["eps"]), prof)
    return run.json("exponents.json", {"report": rep.as_dict(), "profile": prof.to_text()})


def cmd_report(run):
    files = []
    for p in sorted(run.out.glob("*")):
        if p.name == "report.json" or not p.is_file():
            continue
        entry = {"file": p.name, "sha256": hashlib.sha256(p.read_bytes()).hexdigest()}
        if p.suffix == ".json":
            try:
                body = json.loads(p.read_text(encoding="utf-8"))
                entry["command"] = body.get("command")
                if "passed" in body:
                    entry["passed"] = body["passed"]
            except json.JSONDecodeError:
                pass
        files.append(entry)
    return run.json("report.json", {"files": files})


COMMANDS = {
    "calibrate": cmd_calibrate, "scan-R": cmd_scan_R, "scan-theorem-lhs": cmd_scan_theorem_lhs,
    "find-zeros": cmd_find_zeros, "verify-lemma": cmd_verify_lemma, "detect": cmd_detect,
    "exponents": cmd_exponents, "report": cmd_report,
}


def _parser():
    p = argparse.ArgumentParser(prog="densitylab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, schema in SCHEMAS.items():
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON config file")
        for key, (typ, _) in {**COMMON, **schema}.items():
            if key == "ids":
                sp.add_argument("ids", nargs="+", help="lemma ids")
                continue
            flag = "--" + key.replace("_", "-")
            if typ is list:
                sp.add_argument(flag, dest=key, nargs="+", default=None)
            elif typ is bool:
                sp.add_argument(flag, dest=key, action="store_const", const=True, default=None)
            else:
                sp.add_argument(flag, dest=key, default=None)
    return p


def run(command: str, config: dict, overrides: dict | None = None) -> dict:
    """Programmatic entry: validate the config, execute, return the summary."""
    cfg = build_config(command, config, overrides or {})
    return COMMANDS[command](Run(command, cfg))


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        file_cfg = {}
        if args.config:
            file_cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
            if not isinstance(file_cfg, dict):
                raise ConfigError("config file must hold a JSON object")
        overrides = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
        summary = run(args.command, file_cfg, overrides)
    except (DensityLabError, ValueError, KeyError, OSError) as e:
        err = {"error": type(e).__name__, "message": str(e)}
        if isinstance(e, FileNotFoundError) and e.filename:
            err["path"] = str(e.filename)
        elif isinstance(e, FileNotFoundError):
            err["path"] = str(e).split(": ", 1)[-1]
        sys.stdout.write(dump_json(err))
        return 2
    sys.stdout.write(dump_json(summary))
    if args.command == "verify-lemma" and not summary.get("passed", True):
        return 1
    return 0


def acceptance_preset() -> dict:
    """The pinned inputs of the acceptance experiments."""
    from importlib import resources
    text = resources.files("densitylab").joinpath("data/acceptance_preset.json").read_text("utf-8")
    return json.loads(text)


if __name__ == "__main__":
    sys.exit(main())
