"""Command line entry point: ``ctqw build | sweep | spectral | gatecount``.

Exit codes: 0 success, 1 user error, 2 internal error.  Files are written to a
temporary sibling and renamed into place, so a failed run leaves nothing behind.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field

import numpy as np

from . import builders, oracle
from .circuit import (
    Circuit,
    basic_gate_total,
    decompose,
    export_qasm,
    gate_count,
    reload_emitted,
    simulate,
)
from .spectral import Family, GraphSpec, spectrum

log = logging.getLogger("ctqw")

EXIT_OK, EXIT_USER, EXIT_INTERNAL = 0, 1, 2
SOURCE_COLUMNS = {"circuit": "p_circuit", "oracle": "p_oracle", "approx": "p_approx"}
SOURCE_NAMES = {"circuit": "circuit", "oracle": "oracle", "approx": "circuit-approx"}


class UserError(Exception):
    pass


class InternalError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    graph: str
    qubits: int
    steps: int = 40
    mode: str = "exact"
    fmt: str = "csv"
    out: str | None = None
    t: float = 1.0
    dt: float = 1.0
    seed: int = 0
    asymptotic_eigs: bool = False
    sources: list[str] = field(default_factory=lambda: ["circuit", "oracle"])

    def spec(self) -> GraphSpec:
        try:
            return GraphSpec(Family(self.graph), self.qubits)
        except ValueError as exc:
            raise UserError(str(exc)) from exc

    def validate(self) -> None:
        self.spec()
        if self.steps < 0:
            raise UserError("--steps must be non-negative")
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise UserError("--dt must be positive")
        if not math.isfinite(self.t):
            raise UserError("--t must be finite")
        unknown = [s for s in self.sources if s not in SOURCE_COLUMNS]
        if unknown:
            raise UserError(f"unknown source(s): {', '.join(unknown)}")


def fmt_float(x: float) -> str:
    return format(float(x), ".12g")


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".ctqw-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit(cfg: RunConfig, text: str) -> None:
    if cfg.out:
        write_atomic(cfg.out, text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _counts(circuit: Circuit, decomposed: bool) -> dict[str, int]:
    hist = gate_count(circuit, decomposed=decomposed)
    return {k: int(v) for k, v in sorted(hist.items()) if v or decomposed}


def cmd_build(cfg: RunConfig) -> str:
    spec = cfg.spec()
    circuit = builders.build_search(spec, cfg.t, approx=(cfg.mode == "approx"),
                                    asymptotic_eigs=cfg.asymptotic_eigs)
    model = spectrum(spec, asymptotic=cfg.asymptotic_eigs)
    flat = decompose(circuit)
    lines = [
        f"graph: {spec.family.value}",
        f"width: {circuit.width}",
        f"t: {fmt_float(cfg.t)}",
        f"raw gates: {len(circuit)} {json.dumps(_counts(circuit, False))}",
        f"decomposed gates: {basic_gate_total(circuit)} {json.dumps(_counts(circuit, True))}",
        f"t_opt = {math.floor(model.t_opt)}",
    ]
    if cfg.out:
        text = export_qasm(flat)
        err = _resimulation_error(circuit, reload_emitted(text), cfg.seed)
        if err > 1e-10:
            raise InternalError(f"exported QASM re-simulates with error {err:.3g}")
        write_atomic(cfg.out, text)
        lines.append(f"wrote {cfg.out} (re-simulation error {err:.2e})")
    return "\n".join(lines) + "\n"


def _resimulation_error(original: Circuit, reloaded: Circuit, seed: int, probes: int = 4) -> float:
    rng = np.random.default_rng(seed)
    dim = 2**original.width
    worst = 0.0
    for _ in range(probes):
        psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        psi /= np.linalg.norm(psi)
        worst = max(worst, float(np.abs(simulate(original, psi) - simulate(reloaded, psi)).max()))
    return worst


def cmd_sweep(cfg: RunConfig) -> str:
    spec = cfg.spec()
    sources = list(dict.fromkeys(cfg.sources + (["approx"] if cfg.mode == "approx" else [])))
    if "oracle" in sources and spec.N > oracle.MAX_DIMENSION:
        raise UserError(f"oracle limited to N <= {oracle.MAX_DIMENSION}")
    columns = {}
    for name in ("circuit", "oracle", "approx"):
        if name not in sources:
            continue
        try:
            res = oracle.success_curve(spec, SOURCE_NAMES[name], cfg.steps, cfg.dt,
                                       asymptotic_eigs=cfg.asymptotic_eigs)
        except ValueError as exc:
            raise UserError(str(exc)) from exc
        columns[SOURCE_COLUMNS[name]] = res.probabilities
    times = np.arange(cfg.steps + 1) * cfg.dt
    if cfg.fmt == "json":
        rows = [{"step": fmt_float(t), **{k: fmt_float(v[i]) for k, v in columns.items()}}
                for i, t in enumerate(times)]
        return _json({"graph": spec.family.value, "qubits": spec.qubits, "rows": rows})
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["step", *columns])
    for i, t in enumerate(times):
        step = str(i) if cfg.dt == 1.0 else fmt_float(t)
        writer.writerow([step, *(fmt_float(v[i]) for v in columns.values())])
    return buf.getvalue()


def spectral_summary(spec: GraphSpec, asymptotic: bool = False) -> dict:
    model = spectrum(spec, asymptotic=asymptotic)
    out = {
        "graph": spec.family.value,
        "qubits": spec.qubits,
        "N": spec.N,
        "gamma": model.gamma,
        "epsilon": model.epsilon,
        "lambda_minus": model.minus.value,
        "lambda_plus": model.plus.value,
        "t_opt": model.t_opt,
        "t_opt_steps": math.floor(model.t_opt),
        "overlap_marked": model.overlap_marked,
        "overlap_initial": model.overlap_initial,
        "exact_eigenpairs": all(p.exact for p in model.eigen),
    }
    if spec.family is Family.COMPLETE:
        out["energy_shift"] = model.shift
    out.update(model.extras)
    return out


def cmd_spectral(cfg: RunConfig) -> str:
    return _json(spectral_summary(cfg.spec(), cfg.asymptotic_eigs))


def cmd_gatecount(cfg: RunConfig) -> str:
    spec = cfg.spec()
    step = builders.build_search(spec, cfg.t, approx=(cfg.mode == "approx"),
                                 asymptotic_eigs=cfg.asymptotic_eigs)
    preps = builders.stateprep_circuits(spec, cfg.asymptotic_eigs)
    report = {
        "graph": spec.family.value,
        "qubits": spec.qubits,
        "search_step": {"raw": _counts(step, False), "decomposed": _counts(step, True),
                        "total": basic_gate_total(step)},
        "stateprep": [{"raw": _counts(p, False), "decomposed": _counts(p, True),
                       "total": basic_gate_total(p)} for p in preps],
    }
    if cfg.fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["circuit", "kind", "count"])
        for kind, cnt in report["search_step"]["decomposed"].items():
            writer.writerow(["search_step", kind, cnt])
        for i, p in enumerate(report["stateprep"]):
            for kind, cnt in p["decomposed"].items():
                writer.writerow([f"stateprep_{i}", kind, cnt])
        return buf.getvalue()
    return _json(report)


COMMANDS = {"build": cmd_build, "sweep": cmd_sweep, "spectral": cmd_spectral,
            "gatecount": cmd_gatecount}


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ctqw", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--graph", required=True, choices=[f.value for f in Family])
        p.add_argument("--qubits", required=True, type=int)
        p.add_argument("--mode", choices=["exact", "approx"], default="exact")
        p.add_argument("--t", type=float, default=1.0, help="evolution time of one circuit")
        p.add_argument("--asymptotic-eigs", action="store_true",
                       help="hypercube: use lambda = -1 -/+ 1/sqrt(N)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None)
        p.add_argument("--format", dest="fmt", choices=["csv", "json"],
                       default="json" if name in ("spectral", "gatecount") else "csv")
        if name == "sweep":
            p.add_argument("--steps", type=int, default=40)
            p.add_argument("--dt", type=float, default=1.0)
            p.add_argument("--sources", default="circuit,oracle",
                           help="comma list from circuit, oracle, approx")
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(
        command=ns.command, graph=ns.graph, qubits=ns.qubits, mode=ns.mode, fmt=ns.fmt,
        out=ns.out, t=ns.t, seed=ns.seed, asymptotic_eigs=ns.asymptotic_eigs,
    )
    if ns.command == "sweep":
        cfg.steps, cfg.dt = ns.steps, ns.dt
        cfg.sources = [s.strip() for s in ns.sources.split(",") if s.strip()]
    return cfg


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = config_from_args(ns)
        cfg.validate()
        text = COMMANDS[cfg.command](cfg)
        if cfg.command == "build":
            sys.stdout.write(text)
        else:
            emit(cfg, text)
    except UserError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USER
    except Exception as exc:  # noqa: BLE001
        log.debug("internal failure", exc_info=True)
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
