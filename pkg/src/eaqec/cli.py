"""Command-line front end.

Commands: analyze, decompose, verify, distance, scan, fixtures.  Codes come
from a built-in fixture, a code JSON file, inline stabilizer strings, or a
stabilizer JSON file; reports go to stdout (or --output) as text or JSON.

Exit codes: 0 ok, 1 input error, 2 not correctable, 3 structure violation
(also used for a failed verification), 4 model mismatch.  Qubit indices are
1-based on the command line, qubit 1 leftmost in Pauli strings.

Tolerance precedence: --tol-rank / --tol-residual flags beat the
EAQEC_TOL_RANK / EAQEC_TOL_RESIDUAL environment variables, which beat the
built-in defaults.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import analysis, codes, qla, simulate, stab, structure
from .config import MAX_SUBSET, RANK_TOL, RESIDUAL_TOL
from .errors import (ConsistencyError, ContractError, EaqecError,
                     ModelMismatchError, NotCorrectableError, SizeError,
                     StructureViolationError)

ENV_TOL_RANK = "EAQEC_TOL_RANK"
ENV_TOL_RESIDUAL = "EAQEC_TOL_RESIDUAL"


def _resolve_tol(flag_value, env_name: str, default: float) -> float:
    if flag_value is not None:
        return float(flag_value)
    env = os.environ.get(env_name)
    if env is not None:
        try:
            return float(env)
        except ValueError:
            raise ContractError(f"{env_name} is not a number: {env!r}") from None
    return default


def _tolerances(args) -> tuple[float, float]:
    rank = _resolve_tol(getattr(args, "tol_rank", None), ENV_TOL_RANK, RANK_TOL)
    residual = _resolve_tol(getattr(args, "tol_residual", None),
                            ENV_TOL_RESIDUAL, RESIDUAL_TOL)
    if rank <= 0 or residual <= 0:
        raise ContractError("tolerances must be positive")
    return rank, residual


def _load_code(args) -> codes.QuantumCode:
    sources = [("--fixture", args.fixture), ("--code", args.code),
               ("--stabilizers", args.stabilizers), ("--stab-json", args.stab_json)]
    given = [(name, val) for name, val in sources if val is not None]
    if len(given) != 1:
        raise ContractError(
            "exactly one input source required: --fixture, --code, "
            "--stabilizers, or --stab-json")
    name, value = given[0]
    if name == "--fixture":
        return codes.fixture(value)
    if name == "--code":
        data = json.loads(Path(value).read_text())
        return codes.code_from_json(data)
    if name == "--stabilizers":
        gens = [s.strip() for s in value.split(",") if s.strip()]
        phases = None
        if args.phases is not None:
            phases = [p.strip() for p in args.phases.split(",")]
        group = stab.StabilizerGroup.from_strings(gens, phases=phases)
        return stab.codewords(group)
    data = json.loads(Path(value).read_text())
    return stab.codewords(stab.group_from_json(data))


def _parse_subset(text: str, n: int) -> tuple[int, ...]:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    try:
        subset = tuple(int(p) for p in parts)
    except ValueError:
        raise ContractError(f"subset must be a comma list of integers, got {text!r}") from None
    for q in subset:
        if not 1 <= q <= n:
            raise ContractError(f"qubit index {q} outside 1..{n}")
    if len(set(subset)) != len(subset):
        raise ContractError("subset has repeated qubit indices")
    return subset


def _emit(args, text: str, payload: dict) -> None:
    if args.format == "json":
        out = json.dumps(payload, indent=2)
    else:
        out = text
    if getattr(args, "output", None):
        Path(args.output).write_text(out + "\n")
    else:
        print(out)


def _fmt_floats(values, digits=12) -> str:
    return ", ".join(f"{float(v):.{digits}g}" for v in values)


def _subset_str(subset) -> str:
    return "{" + ",".join(str(q) for q in subset) + "}"


def _c2(z) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def _report_json(report: analysis.KLReport, full: bool) -> dict:
    data = {
        "n": report.split.n,
        "subset": list(report.split.erased),
        "verdict": "correctable" if report.correctable else "not_correctable",
        "correctable": report.correctable,
        "trichotomy": report.trichotomy,
        "C": report.marginal_rank,
        "marginal_spectrum": [float(x) for x in report.marginal_spectrum],
        "kept_marginal_ranks": list(report.kept_marginal_ranks),
        "matrix_rank": report.matrix_rank,
        "matrix_dim": report.matrix.shape[0],
        "residual_max": report.residual_max,
    }
    if full:
        data["matrix"] = [[_c2(z) for z in row] for row in report.matrix]
        data["kernel"] = [[_c2(z) for z in row] for row in report.kernel]
    return data


def _wide_analyze(args, code, subset, rank_tol, residual_tol) -> int:
    """Subsets too wide for the full error enumeration: certify structurally.

    Correctability is decided by attempting the certified factorization;
    marginal data comes straight from the codeword matrices.  No error
    coefficient matrix is reported.
    """
    split = qla.SubsystemSplit(n=code.n, erased=subset)
    mats = [qla.bipartite_matrix(v, split) for v in code.basis]
    rho = sum(m.T @ m.conj() for m in mats) / code.k_dim
    spectrum, _ = qla.eig_hermitian(rho)
    spectrum = np.maximum(spectrum, 0.0)
    c = qla.numerical_rank(spectrum, rank_tol)
    kept_ranks = [qla.numerical_rank(np.linalg.svd(m, compute_uv=False), rank_tol)
                  for m in mats]
    try:
        structure.decompose(code, subset, rank_tol=rank_tol,
                            certify_tol=residual_tol)
        correctable = True
    except StructureViolationError:
        correctable = False
    trichotomy = None
    if correctable:
        if c < split.dim_erased:
            trichotomy = analysis.DEGENERATE
        elif float(np.max(np.abs(spectrum - 1.0 / split.dim_erased))) <= 1e-10:
            trichotomy = analysis.PURE
        else:
            trichotomy = analysis.IMPURE_NONDEGENERATE
    lines = [
        f"subset: {_subset_str(subset)}",
        f"correctable: {'yes' if correctable else 'no'}",
    ]
    if trichotomy is not None:
        lines.append(f"class: {trichotomy}")
    lines += [
        f"C: {c}",
        f"marginal spectrum: {_fmt_floats(spectrum)}",
        "method: structural certificate (subset too wide for the error basis)",
    ]
    payload = {
        "n": code.n,
        "subset": list(subset),
        "verdict": "correctable" if correctable else "not_correctable",
        "correctable": correctable,
        "trichotomy": trichotomy,
        "C": c,
        "marginal_spectrum": [float(x) for x in spectrum],
        "kept_marginal_ranks": kept_ranks,
        "method": "structural",
    }
    _emit(args, "\n".join(lines), payload)
    return 0 if correctable else 2


def cmd_analyze(args) -> int:
    rank_tol, residual_tol = _tolerances(args)
    code = _load_code(args)
    subset = _parse_subset(args.subset, code.n)
    b = len(subset)
    if b > MAX_SUBSET:
        return _wide_analyze(args, code, subset, rank_tol, residual_tol)
    report = analysis.analyze_subset(code, subset, residual_tol=residual_tol,
                                     rank_tol=rank_tol)
    lines = [
        f"subset: {_subset_str(subset)}",
        f"correctable: {'yes' if report.correctable else 'no'}",
    ]
    if report.trichotomy is not None:
        lines.append(f"class: {report.trichotomy}")
    lines += [
        f"C: {report.marginal_rank}",
        f"marginal spectrum: {_fmt_floats(report.marginal_spectrum)}",
        f"coefficient matrix rank: {report.matrix_rank} of {4 ** b}",
        f"max residual: {report.residual_max:.3e}",
    ]
    _emit(args, "\n".join(lines), _report_json(report, args.full))
    return 0 if report.correctable else 2


def _distance_for(code, args, residual_tol) -> int:
    if getattr(args, "distance", None) is not None:
        d = int(args.distance)
        if d < 1:
            raise ContractError("distance must be >= 1")
        return d
    d = codes.min_distance(code, residual_tol=residual_tol)
    if d is None:
        raise ContractError("could not determine the distance; pass --distance")
    return d


def _check_correctable(code, subset, rank_tol, residual_tol) -> None:
    """Cheap KL gate so non-correctable subsets exit 2, not 3."""
    if len(subset) > MAX_SUBSET:
        return  # too wide for the dense check; decompose will still certify
    report = analysis.kl_matrix(code, subset, residual_tol=residual_tol,
                                rank_tol=rank_tol)
    if not report.correctable:
        raise NotCorrectableError(
            f"subset {_subset_str(subset)} fails the correctability condition "
            f"(residual {report.residual_max:.3e})")


def _ea_line(label: str, ea: structure.EACode) -> str:
    form = ea.params.dimension_form()
    stab_form = ea.params.stabilizer_form()
    models = ("noiseless only" if ea.model_validity == structure.NOISELESS_ONLY
              else "noiseless+noisy")
    parts = [form]
    if stab_form is not None:
        parts.append(stab_form)
    return f"{label} {' = '.join(parts)}, ebit cost {ea.ebit_cost}, {models}"


def cmd_decompose(args) -> int:
    rank_tol, residual_tol = _tolerances(args)
    code = _load_code(args)
    subset = _parse_subset(args.subset, code.n)
    _check_correctable(code, subset, rank_tol, residual_tol)
    dec = structure.decompose(code, subset, rank_tol=rank_tol,
                              certify_tol=residual_tol)
    d = _distance_for(code, args, residual_tol)
    ea_pre = structure.presend_from_decomposition(dec, code, d)
    ea_unc = structure.ea_from_structure(dec, d)
    ea_cmp = structure.compress(dec, d, rank_tol=rank_tol)
    lines = [
        f"subset: {_subset_str(subset)}",
        f"kept qubits: {len(dec.split.kept)}",
        f"K: {dec.k_dim}",
        f"dim_A: {dec.ancilla_dim}",
        f"ancilla spectrum: {_fmt_floats(dec.ancilla_spectrum)}",
        f"reconstruction residual: {dec.residual:.3e}",
        f"isometry defect: {dec.isometry_defect:.3e}",
        f"distance: {d}",
        _ea_line("presend:     ", ea_pre),
        _ea_line("uncompressed:", ea_unc),
        _ea_line("compressed:  ", ea_cmp),
    ]
    payload = {
        "decomposition": structure.decomposition_to_json(dec),
        "distance": d,
        "ea": {
            "presend": structure.eacode_to_json(ea_pre),
            "structure": structure.eacode_to_json(ea_unc),
            "compressed": structure.eacode_to_json(ea_cmp),
        },
    }
    _emit(args, "\n".join(lines), payload)
    return 0


def cmd_verify(args) -> int:
    rank_tol, residual_tol = _tolerances(args)
    code = _load_code(args)
    subset = _parse_subset(args.subset, code.n)
    _check_correctable(code, subset, rank_tol, residual_tol)
    dec = structure.decompose(code, subset, rank_tol=rank_tol,
                              certify_tol=residual_tol)
    d = _distance_for(code, args, residual_tol)
    strategy = "compressed" if args.compressed else args.strategy
    if strategy == structure.COMPRESSED:
        ea = structure.compress(dec, d, rank_tol=rank_tol)
    elif strategy == structure.PRESEND:
        ea = structure.presend_from_decomposition(dec, code, d)
    else:
        ea = structure.ea_from_structure(dec, d)
    report = simulate.verify_ea(ea, dec, code, args.model, args.weight,
                                exploratory=args.exploratory,
                                residual_tol=residual_tol, rank_tol=rank_tol)
    lines = [
        f"strategy: {report.strategy}",
        f"model: {report.model}",
        f"weight: {report.error_weight}",
        f"cases: {report.cases_run}",
        f"min fidelity: {report.min_fidelity:.12f}",
    ]
    if report.exploratory:
        lines.append("exploratory: results reported without guarantee")
    if report.failures:
        worst = ", ".join(f"{p} ({f:.6f})" for p, f in report.failures[:8])
        lines.append(f"failures: {worst}")
    else:
        lines.append("failures: none")
    lines.append(f"verdict: {'pass' if report.passed else 'fail'}")
    payload = {
        "strategy": report.strategy,
        "model": report.model,
        "weight": report.error_weight,
        "cases_run": report.cases_run,
        "min_fidelity": report.min_fidelity,
        "failures": [{"error": p, "fidelity": f} for p, f in report.failures],
        "exploratory": report.exploratory,
        "passed": report.passed,
    }
    _emit(args, "\n".join(lines), payload)
    if report.exploratory:
        return 0
    return 0 if report.passed else 3


def cmd_distance(args) -> int:
    _, residual_tol = _tolerances(args)
    code = _load_code(args)
    d = codes.min_distance(code, max_weight=args.max_weight,
                           residual_tol=residual_tol)
    if d is None:
        text = f">= {args.max_weight + 1}"
        payload = {"distance": None, "lower_bound": args.max_weight + 1,
                   "exact": False}
    else:
        text = str(d)
        payload = {"distance": d, "exact": True}
    _emit(args, text, payload)
    return 0


def cmd_scan(args) -> int:
    from itertools import combinations

    rank_tol, residual_tol = _tolerances(args)
    code = _load_code(args)
    size = args.size
    if not 1 <= size <= code.n:
        raise ContractError(f"scan size must be within 1..{code.n}")
    if size > MAX_SUBSET:
        raise SizeError(f"scan size {size} exceeds cap {MAX_SUBSET}")
    rows = []
    correctable_count = 0
    for subset in combinations(range(1, code.n + 1), size):
        report = analysis.analyze_subset(code, subset, residual_tol=residual_tol,
                                         rank_tol=rank_tol)
        if report.correctable:
            correctable_count += 1
            rows.append((subset, True, report.trichotomy, report.marginal_rank))
        else:
            rows.append((subset, False, None, report.marginal_rank))
    lines = []
    for subset, ok, cls, c in rows:
        if ok:
            lines.append(f"{_subset_str(subset)}: correctable, {cls}, C={c}")
        else:
            lines.append(f"{_subset_str(subset)}: not correctable")
    lines.append(f"{correctable_count} of {len(rows)} subsets correctable")
    payload = {
        "n": code.n,
        "size": size,
        "correctable_count": correctable_count,
        "subsets": [
            {"subset": list(s), "correctable": ok, "trichotomy": cls, "C": c}
            for s, ok, cls, c in rows
        ],
    }
    _emit(args, "\n".join(lines), payload)
    return 0


def cmd_fixtures(args) -> int:
    if args.list == (args.emit is not None):
        raise ContractError("pass exactly one of --list or --emit NAME")
    if args.list:
        text = "\n".join(codes.FIXTURE_NAMES)
        payload = {"fixtures": list(codes.FIXTURE_NAMES)}
        _emit(args, text, payload)
        return 0
    code = codes.fixture(args.emit)
    payload = codes.code_to_json(code)
    out = json.dumps(payload, indent=2)
    if getattr(args, "output", None):
        Path(args.output).write_text(out + "\n")
    else:
        print(out)
    return 0


def _add_input_options(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("input (exactly one)")
    g.add_argument("--fixture", choices=codes.FIXTURE_NAMES,
                   help="built-in code by name")
    g.add_argument("--code", metavar="PATH", help="code JSON file")
    g.add_argument("--stabilizers", metavar="GENS",
                   help='inline generators, e.g. "XZZXI,ZXZZX,..."')
    g.add_argument("--phases", metavar="PHASES",
                   help='optional phases for --stabilizers, e.g. "+,-,+i,+"')
    g.add_argument("--stab-json", metavar="PATH", dest="stab_json",
                   help="stabilizer JSON file")


def _add_common_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol-rank", type=float, default=None, dest="tol_rank",
                   metavar="T", help="relative numerical-rank cutoff")
    p.add_argument("--tol-residual", type=float, default=None, dest="tol_residual",
                   metavar="T", help="correctability residual threshold")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--output", metavar="PATH", help="write the report to a file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eaqec",
        description="Erasure analysis and entanglement-assisted descriptions "
                    "of explicit-basis quantum codes.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="correctability and degeneracy of a subset")
    _add_input_options(p)
    _add_common_options(p)
    p.add_argument("--subset", required=True, metavar="Q1,Q2,...",
                   help="erased qubits, 1-based")
    p.add_argument("--full", action="store_true",
                   help="include the coefficient matrix and kernel in JSON")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("decompose",
                       help="factor the code and emit EA descriptions")
    _add_input_options(p)
    _add_common_options(p)
    p.add_argument("--subset", required=True, metavar="Q1,Q2,...")
    p.add_argument("--distance", type=int, default=None,
                   help="skip the distance search and use this value")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("verify", help="simulate errors and canonical recovery")
    _add_input_options(p)
    _add_common_options(p)
    p.add_argument("--subset", required=True, metavar="Q1,Q2,...")
    p.add_argument("--model", choices=(simulate.NOISELESS, simulate.NOISY),
                   default=simulate.NOISELESS)
    p.add_argument("--weight", type=int, default=1)
    p.add_argument("--strategy",
                   choices=(structure.STRUCTURE, structure.PRESEND,
                            structure.COMPRESSED),
                   default=structure.STRUCTURE)
    p.add_argument("--compressed", action="store_true",
                   help="shorthand for --strategy compressed")
    p.add_argument("--exploratory", action="store_true",
                   help="run unsupported model/strategy combinations anyway")
    p.add_argument("--distance", type=int, default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("distance", help="brute-force minimum distance")
    _add_input_options(p)
    _add_common_options(p)
    p.add_argument("--max-weight", type=int, default=None, dest="max_weight",
                   help="stop after this weight and report a bound")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("scan", help="classify every subset of a given size")
    _add_input_options(p)
    _add_common_options(p)
    p.add_argument("--size", type=int, required=True, metavar="B")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("fixtures", help="list or emit built-in codes")
    p.add_argument("--list", action="store_true")
    p.add_argument("--emit", metavar="NAME", choices=codes.FIXTURE_NAMES)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--output", metavar="PATH")
    p.set_defaults(func=cmd_fixtures)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except NotCorrectableError as exc:
        print(f"not correctable: {exc}", file=sys.stderr)
        return 2
    except (StructureViolationError, ConsistencyError) as exc:
        print(f"structure violation: {exc}", file=sys.stderr)
        return 3
    except ModelMismatchError as exc:
        print(f"model mismatch: {exc}", file=sys.stderr)
        return 4
    except (EaqecError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
