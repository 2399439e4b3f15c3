"""Command-line interface: ``nnthreshold <subcommand> [options]``.

Exit codes: 0 success, 1 domain error (bad values, above-threshold input,
invalid circuit), 2 usage error (unknown flag or choice). Data goes to stdout,
diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import cost_model, expander, fault_sim, layout, threshold
from .circuit_ir import CircuitFormatError, parse, to_dict, validate_nearest_neighbor
from .cost_model import CommModel
from .layout import BlockVariant
from .report import OutputFormat, render

PREP = {"none": BlockVariant.MINIMAL_27, "inline": BlockVariant.WITH_PREP_46}
PREP_NAME = {v: k for k, v in PREP.items()}


def _positive_int(text: str) -> int:
    try:
        v = int(float(text)) if "e" in text.lower() else int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _level(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}")
    return v


def _model_args(p, required=True):
    p.add_argument("--model", choices=[m.value for m in CommModel], required=required)
    p.add_argument("--prep", choices=list(PREP), default="none")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=[f.value for f in OutputFormat], default="text")

    ap = argparse.ArgumentParser(prog="nnthreshold", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True, metavar="COMMAND")

    sub.add_parser("table", parents=[common], help="threshold table for all six model/variant pairs")

    p = sub.add_parser("counts", parents=[common], help="gate-count breakdown with named terms")
    _model_args(p)

    p = sub.add_parser("threshold", parents=[common], help="P_th and accuracy threshold")
    _model_args(p)

    p = sub.add_parser("logical-error", parents=[common], help="logical error bound per level")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--levels", type=_level, required=True)
    _model_args(p)

    p = sub.add_parser("depth", parents=[common], help="concatenation level needed for a computation length")
    p.add_argument("--length", type=float, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--pth", type=float)
    _model_args(p, required=False)

    p = sub.add_parser("resources", parents=[common], help="qubits, stripe width and gate count per level")
    p.add_argument("--levels", type=_level, required=True)
    _model_args(p, required=False)

    p = sub.add_parser("expand", help="emit a level-1 circuit as JSON")
    p.add_argument("--block", choices=[b.value for b in expander.Block], required=True)
    p.add_argument("--prep", choices=list(PREP), default="none")
    p.add_argument("--output", "-o", help="write to this file instead of stdout")

    p = sub.add_parser("validate", parents=[common], help="nearest-neighbour check of a circuit file")
    p.add_argument("file")

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo estimate of P1")
    p.add_argument("--scenario", choices=[s.value for s in fault_sim.ScenarioKind], required=True)
    p.add_argument("--epsilon", type=float, nargs="+", required=True)
    p.add_argument("--trials", type=_positive_int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=_positive_int)
    p.add_argument("--prep", choices=list(PREP), default="none")

    p = sub.add_parser("fault-scan", parents=[common], help="exhaustive single-fault check")
    p.add_argument("--scenario", choices=[s.value for s in fault_sim.ScenarioKind], required=True)
    p.add_argument("--prep", choices=list(PREP), default="none")
    return ap


# -- subcommands -------------------------------------------------------------------


def _table(_a) -> dict:
    rows = []
    for r in threshold.table_report():
        rows.append(
            {
                "model": r.model.value,
                "prep": PREP_NAME[r.variant],
                "ec_count": r.ec_count,
                "unitary_count": r.unitary_count,
                "n_total": r.n_total,
                "p_th": r.p_th,
                "p_th_2sf": f"{r.p_th_rounded:.1e}",
                "published_p_th": f"{r.published_p_th:.1e}",
                "p_th_match": r.p_th_matches,
                "phi_th_deg": r.phi_th_deg,
                "published_phi_deg": str(r.published_phi_deg),
                "phi_delta_deg": r.phi_delta_deg,
                "note": r.note or "",
            }
        )
    return {"schema": "threshold_table", "rows": rows}


def _counts(a) -> dict:
    b = cost_model.breakdown(a.model, PREP[a.prep])
    rows = [
        {
            "part": part,
            "term": t.label,
            "multiplier": t.multiplier,
            "computational": t.n_comp,
            "communication": t.n_comm,
            "count": t.count,
        }
        for part, terms in (("unitary", b.unitary_terms), ("ec", b.ec_terms))
        for t in terms
    ]
    return {
        "schema": "count_breakdown",
        "model": b.model.value,
        "prep": a.prep,
        "n_u": b.n_u,
        "n_uc": b.n_uc,
        "n_e": b.n_e,
        "n_ec": b.n_ec,
        "ec_total": b.ec_total,
        "unitary_total": b.unitary_total,
        "n_total": b.n_total,
        "rows": rows,
    }


def _threshold(a) -> dict:
    n = cost_model.level_cost(a.model, PREP[a.prep])
    p = threshold.p_threshold(n)
    return {
        "schema": "threshold",
        "model": a.model,
        "prep": a.prep,
        "n_total": n,
        "p_th": p,
        "phi_th_deg": threshold.accuracy_threshold_deg(p),
    }


def _logical_error(a) -> dict:
    n = cost_model.level_cost(a.model, PREP[a.prep])
    p = threshold.p_threshold(n)
    rows = [{"level": L, "p_l": threshold.logical_error(a.epsilon, L, p)} for L in range(a.levels + 1)]
    return {
        "schema": "logical_error",
        "model": a.model,
        "prep": a.prep,
        "epsilon": a.epsilon,
        "p_th": p,
        "below_threshold": a.epsilon < p,
        "p_l": rows[-1]["p_l"],
        "rows": rows,
    }


def _depth(a) -> dict:
    if a.pth is not None:
        p, source = a.pth, "given"
    elif a.model is not None:
        p, source = threshold.p_threshold(cost_model.level_cost(a.model, PREP[a.prep])), f"{a.model}/{a.prep}"
    else:
        raise _Usage("depth needs either --pth or --model")
    level, note = threshold.explain_level(a.length, a.epsilon, p)
    out = {
        "schema": "sufficient_level",
        "length": a.length,
        "epsilon": a.epsilon,
        "p_th": p,
        "p_th_source": source,
        "level": level,
        "log10_accessible_length": threshold.log10_accessible_length(a.epsilon, level, p),
    }
    if note:
        out["note"] = note
    return out


def _resources(a) -> dict:
    variant = PREP[a.prep]
    model = a.model or CommModel.FREE.value
    rows = [
        {
            "level": L,
            "physical_qubits": layout.physical_qubits(L, variant),
            "stripe_width": layout.stripe_width(L),
            "physical_gate_count": cost_model.physical_gate_count(L, model, variant),
        }
        for L in range(a.levels + 1)
    ]
    return {"schema": "resources", "model": model, "prep": a.prep, "rows": rows}


def _validate(a) -> dict:
    try:
        with open(a.file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise _Domain(f"cannot read {a.file}: {e.strerror}") from None
    c = parse(text)
    bad = validate_nearest_neighbor(c)
    rows = [
        {"timestep": v.timestep, "gate_index": v.gate_index, "kind": v.gate.kind.value, "targets": str([tuple(s) for s in v.gate.targets])}
        for v in bad
    ]
    return {"schema": "nn_validation", "file": a.file, "gates": sum(len(s) for s in c.timesteps), "violations": len(bad), "rows": rows}


def _simulate(a) -> dict:
    scn = fault_sim.build_scenario(a.scenario, PREP[a.prep])
    rows = []
    for eps in a.epsilon:
        est = fault_sim.monte_carlo_p1(scn, fault_sim.ErrorModel(eps), a.trials, a.seed, workers=a.workers)
        rows.append(
            {
                "epsilon": eps,
                "trials": est.trials,
                "failures": est.failures,
                "p1_hat": est.p1_hat,
                "ci_low": est.ci_low,
                "ci_high": est.ci_high,
                "union_bound": est.union_bound,
            }
        )
    out = {"schema": "p1_estimate", "scenario": scn.name, "locations": scn.locations, "seed": a.seed, "rows": rows}
    pts = [(r["epsilon"], r["p1_hat"]) for r in rows if r["p1_hat"] > 0]
    if len(pts) >= 3:
        out["slope"] = fault_sim.scaling_fit(pts)
    return out


def _fault_scan(a) -> dict:
    scn = fault_sim.build_scenario(a.scenario, PREP[a.prep])
    rep = fault_sim.exhaustive_single_fault(scn)
    rows = [{"timestep": f.timestep, "gate_index": f.gate_index, "pauli": f.pauli.label()} for f in rep.failures]
    return {
        "schema": "fault_scan",
        "scenario": rep.scenario,
        "gate_locations": rep.gate_locations,
        "faults_checked": rep.faults_checked,
        "logical_failures": len(rep.failures),
        "rows": rows,
    }


class _Usage(Exception):
    pass


class _Domain(Exception):
    pass


HANDLERS = {
    "table": _table,
    "counts": _counts,
    "threshold": _threshold,
    "logical-error": _logical_error,
    "depth": _depth,
    "resources": _resources,
    "validate": _validate,
    "simulate": _simulate,
    "fault-scan": _fault_scan,
}


def _expand(a, out) -> None:
    req = expander.ExpansionRequest(expander.Block(a.block), variant=PREP[a.prep])
    doc = to_dict(expander.expand(req))
    doc = {"schema": "circuit", **doc}
    text = json.dumps(doc, indent=1) + "\n"
    if a.output:
        with open(a.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        if a.command == "expand":
            _expand(a, stdout)
            return 0
        payload = HANDLERS[a.command](a)
    except _Usage as e:
        print(f"nnthreshold {a.command}: error: {e}", file=stderr)
        return 2
    except (_Domain, CircuitFormatError, ValueError, OverflowError) as e:
        print(f"nnthreshold {a.command}: {e}", file=stderr)
        return 1
    stdout.write(render(payload, a.format))
    if a.command == "validate" and payload["violations"]:
        return 1
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
