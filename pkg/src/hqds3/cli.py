"""Command-line front end.

Subcommands: classify | simulate | verify | spectrum | derivations.
Input is a JSON document {"structure_constants": [[[...]]], "label": "..."}
holding the 3x3x3 tensor c[i][j][k] (row-major, the product of basis vectors
i and j read off along k).  Asymmetric tensors are rejected, never silently
symmetrized.  Reports go to standard output as JSON; diagnostics to stderr.

Exit codes: 0 success (classify: tag A1..A4), 1 parse/IO/flag error,
2 NotInFamily or NullAlgebra, 3 cross-path disagreement, 4 verify failure.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .algebra import Algebra, idempotents, nilpotent_cone, squares_batch
from .catalog import CANONICAL_TAGS
from .classify import classify, classify_via_derivation, fingerprint
from .derivations import (
    ALWAYS_ZERO_LETTERS,
    SingularSpectrum,
    SsndSearchConfig,
    admissible_mask,
    arrangement_lines,
    derivation_space,
    find_real_ssnd,
    normalize_spectrum,
)
from .dynamics import (
    IntegratorConfig,
    affine_flow,
    PreconditionFailed,
    integrate,
    linear_first_integrals,
    ray_solution,
    save_csv,
    trajectory_to_csv,
)
from .tolerances import TAU_RES


class _Parser(argparse.ArgumentParser):
    """argparse, but every usage error exits with code 1."""

    def error(self, message: str):  # noqa: D401
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _emit(doc: dict) -> None:
    json.dump(_jsonable(doc), sys.stdout, indent=2)
    sys.stdout.write("\n")


def load_algebra(path: str) -> tuple[Algebra, str | None]:
    """Parse and validate an input document; raises ValueError on bad input."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict) or "structure_constants" not in doc:
        raise ValueError("document must be an object with 'structure_constants'")
    raw = doc["structure_constants"]
    try:
        c = np.array(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"structure_constants must be numeric: {exc}") from exc
    if c.shape != (3, 3, 3):
        raise ValueError(f"structure_constants must be 3x3x3, got shape {c.shape}")
    if not np.all(np.isfinite(c)):
        raise ValueError("structure_constants must be finite")
    if not np.array_equal(c, c.transpose(1, 0, 2)):
        bad = np.argwhere(c != c.transpose(1, 0, 2))[0]
        i, j, k = (int(v) + 1 for v in bad)
        raise ValueError(
            f"asymmetric constants: c[{i}][{j}][{k}] != c[{j}][{i}][{k}] "
            "(commutativity requires symmetry in the first two indices; fix the input, "
            "it is not symmetrized automatically)"
        )
    label = doc.get("label")
    return Algebra(c), label


# ---------------------------------------------------------------------------
# classify / derivations


def _derivation_report(alg: Algebra, seed: int) -> dict:
    space = derivation_space(alg)
    found = find_real_ssnd(alg, SsndSearchConfig(seed=seed))
    ssnd: dict = {"present": found is not None}
    if found is not None:
        d, rep = found
        ssnd["matrix"] = d
        ssnd["spectrum"] = sorted(float(v.real) for v in rep.eigenvalues)
    return {"dim": space.dim, "basis": space.basis, "ssnd": ssnd}


def cmd_classify(args) -> int:
    try:
        alg, label = load_algebra(args.input)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    fp = fingerprint(alg)
    res = classify(alg)
    via = classify_via_derivation(alg, seed=args.seed)
    der = _derivation_report(alg, args.seed)

    warnings = []
    if res.is_definite and via.is_definite and res.tag != via.tag:
        warnings.append(
            f"cross-path disagreement: invariant route says {res.tag}, "
            f"derivation route says {via.tag}"
        )
    if res.tag == "NotInFamily" and der["ssnd"]["present"]:
        warnings.append(
            "invertible real-diagonalizable derivation found on a NotInFamily "
            "input; this contradicts the classification and deserves a bug report"
        )

    classification = {"tag": res.tag, "residual": res.residual, "method": res.method}
    if res.tag in CANONICAL_TAGS:
        classification["basis_change"] = res.certificate

    report = {
        "label": label,
        "fingerprint": vars(fp).copy(),
        "classification": classification,
        "via_derivation": {"tag": via.tag, "method": via.method},
        "derivation_space": der,
        "first_integrals": linear_first_integrals(alg),
        "warnings": warnings,
    }
    _emit(report)
    if warnings and res.is_definite and via.is_definite and res.tag != via.tag:
        return 3
    return 0 if res.tag in CANONICAL_TAGS else 2


def cmd_derivations(args) -> int:
    try:
        alg, label = load_algebra(args.input)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    report = {"label": label}
    report.update(_derivation_report(alg, args.seed))
    _emit(report)
    return 0


# ---------------------------------------------------------------------------
# simulate


def _parse_vec3(text: str) -> np.ndarray:
    parts = text.split(",")
    if len(parts) != 3:
        raise ValueError(f"expected three comma-separated numbers, got {text!r}")
    return np.array([float(p) for p in parts])


def cmd_simulate(args) -> int:
    try:
        alg, _ = load_algebra(args.input)
        x0 = _parse_vec3(args.x0)
        if args.t_end <= 0.0:
            raise ValueError("--t-end must be positive")
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    res = classify(alg)
    cell_tag = res.tag if res.tag in CANONICAL_TAGS else None
    cert = res.certificate if cell_tag else None
    config = IntegratorConfig(h0=args.h0)
    traj = integrate(alg, x0, args.t_end, config, cell_tag=cell_tag, cell_certificate=cert)

    ints = linear_first_integrals(alg)
    drift = 0.0
    if ints.shape[0]:
        vals = traj.states @ ints.T
        drift = float(np.max(np.abs(vals - vals[0])))

    summary = (
        f"terminated: {traj.terminated} at t={traj.times[-1]:.9g} "
        f"({len(traj.times)} samples); "
        f"first integrals: {ints.shape[0]}, max drift {drift:.3e}"
    )
    if args.out:
        save_csv(traj, args.out)
        print(summary)
    else:
        sys.stdout.write(trajectory_to_csv(traj))
        print(summary, file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# verify


def _check_steady_states(alg, rng, tag, res):
    cone = nilpotent_cone(alg)
    norm, _ = alg.normalized()
    if cone.samples.shape[0]:
        on_res = float(np.max(np.abs(squares_batch(norm, cone.samples))))
    else:
        on_res = 0.0
    if on_res > TAU_RES:
        return "FAIL", f"sampled cone point has residual {on_res:.2e}"
    if cone.kind == "whole-space":
        return "PASS", f"cone samples steady (residual {on_res:.2e}); cone is everything"
    off = rng.standard_normal((50, 3))
    off /= np.linalg.norm(off, axis=1, keepdims=True)
    off_res = np.max(np.abs(squares_batch(norm, off)), axis=1)
    clear = off_res[off_res > 10.0 * TAU_RES]
    if clear.shape[0] < 40:
        return "FAIL", "random sphere points look steady too often"
    return "PASS", f"cone residual {on_res:.2e}; off-cone points clearly non-steady"


def _check_first_integrals(alg, rng, tag, res):
    ints = linear_first_integrals(alg)
    if ints.shape[0] == 0:
        return "SKIP", "no linear first integrals (A*A spans everything)"
    worst = 0.0
    for _ in range(10):
        x0 = rng.standard_normal(3)
        x0 /= max(1.0, float(np.linalg.norm(x0)))
        traj = integrate(alg, x0, 1.0)
        vals = traj.states @ ints.T
        worst = max(worst, float(np.max(np.abs(vals - vals[0]))))
    if worst < 1e-8:
        return "PASS", f"{ints.shape[0]} integrals, max drift {worst:.2e}"
    return "FAIL", f"first-integral drift {worst:.2e} exceeds 1e-8"


def _check_cell_invariance(alg, rng, tag, res):
    if tag not in CANONICAL_TAGS:
        return "SKIP", "no cell partition without a canonical class"
    worst = True
    for _ in range(5):
        x0 = rng.standard_normal(3)
        x0 /= max(1.0, float(np.linalg.norm(x0)))
        traj = integrate(
            alg, x0, 1.0, cell_tag=tag, cell_certificate=res.certificate
        )
        first = traj.cells[0]
        if not all(c.same_cell(first) for c in traj.cells):
            worst = False
            break
    if worst:
        return "PASS", "cell id constant on all sampled trajectories"
    return "FAIL", "trajectory changed cell"


def _check_curvature(alg, rng, tag, res):
    if tag not in ("A2", "A3", "A4"):
        return "SKIP", "straight-line claim applies to classes A2-A4"
    worst = 0.0
    for _ in range(5):
        x0 = rng.standard_normal(3)
        traj = integrate(alg, x0, 1.0)
        defined = traj.curvature[traj.curvature_defined]
        if defined.shape[0]:
            worst = max(worst, float(np.max(defined)))
    if worst < 1e-9:
        return "PASS", f"max curvature {worst:.2e}"
    return "FAIL", f"curvature {worst:.2e} exceeds 1e-9"


def _check_torsion(alg, rng, tag, res):
    if tag not in CANONICAL_TAGS:
        return "SKIP", "torsion-free claim needs a classified algebra"
    worst = 0.0
    n_defined = 0
    for _ in range(5):
        x0 = rng.standard_normal(3)
        x0 /= max(1.0, float(np.linalg.norm(x0)))
        traj = integrate(alg, x0, 1.0)
        defined = traj.torsion[traj.torsion_defined]
        n_defined += defined.shape[0]
        if defined.shape[0]:
            worst = max(worst, float(np.max(np.abs(defined))))
    if worst < 1e-6:
        return "PASS", f"|torsion| <= {worst:.2e} on {n_defined} defined samples"
    return "FAIL", f"torsion {worst:.2e} exceeds 1e-6"


def _check_affine_form(alg, rng, tag, res):
    try:
        worst = 0.0
        for _ in range(5):
            x0 = rng.standard_normal(3)
            traj = integrate(alg, x0, 2.0)
            expect = affine_flow(alg, x0, traj.times)
            worst = max(worst, float(np.max(np.abs(traj.states - expect))))
    except PreconditionFailed:
        return "SKIP", "A*A not inside the annihilator; solutions are not affine"
    if worst < 1e-9 * max(1.0, alg.scale):
        return "PASS", f"affine closed form matched, max deviation {worst:.2e}"
    return "FAIL", f"deviation from affine form {worst:.2e}"


def _check_ray_solutions(alg, rng, tag, res):
    ids = idempotents(alg)
    if not ids:
        return "SKIP", "no idempotents found"
    worst = 0.0
    for v in ids[:3]:
        traj = integrate(alg, v, 0.9)
        expect = ray_solution(v, traj.times)
        denom = np.maximum(1.0, np.abs(expect))
        worst = max(worst, float(np.max(np.abs(traj.states - expect) / denom)))
    if worst < 1e-6:
        return "PASS", f"{len(ids)} idempotent rays matched, rel err {worst:.2e}"
    return "FAIL", f"ray solution mismatch {worst:.2e}"


_VERIFY_CHECKS = {
    "affine-form": _check_affine_form,
    "cell-invariance": _check_cell_invariance,
    "curvature": _check_curvature,
    "first-integral-drift": _check_first_integrals,
    "ray-solutions": _check_ray_solutions,
    "steady-states": _check_steady_states,
    "torsion": _check_torsion,
}


def cmd_verify(args) -> int:
    try:
        alg, label = load_algebra(args.input)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    res = classify(alg)
    tag = res.tag
    print(f"class: {tag}" + (f"  label: {label}" if label else ""))
    failed = False
    for name in sorted(_VERIFY_CHECKS):
        rng = np.random.default_rng(args.seed)
        status, detail = _VERIFY_CHECKS[name](alg, rng, tag, res)
        failed = failed or status == "FAIL"
        print(f"{status:4s} {name}: {detail}")
    return 4 if failed else 0


# ---------------------------------------------------------------------------
# spectrum


def cmd_spectrum(args) -> int:
    try:
        mask = admissible_mask(args.lam, args.mu)
    except SingularSpectrum:
        print(
            "error: an invertible diagonal derivation requires lambda * mu != 0",
            file=sys.stderr,
        )
        return 1
    case = normalize_spectrum(np.array([1.0, args.lam, args.mu]))
    report = {
        "lambda": args.lam,
        "mu": args.mu,
        "mask": {
            "allowed": list(mask.allowed_letters()),
            "forbidden": list(mask.forbidden_letters()),
            "always_zero": list(ALWAYS_ZERO_LETTERS),
        },
        "arrangement_lines": arrangement_lines(args.lam, args.mu),
        "representative": {
            "family": case.family,
            "triple": case.representative,
            "scale": case.scale,
            "permutation": list(case.permutation),
        },
    }
    _emit(report)
    return 0


# ---------------------------------------------------------------------------


def main(argv=None) -> int:
    parser = _Parser(prog="hqds3", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--seed", type=int, default=0, help="seed for randomized steps")

    p = sub.add_parser("classify", help="classify an algebra and print the report")
    p.add_argument("input", help="JSON document with structure_constants")
    common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("simulate", help="integrate x' = x*x and export CSV")
    p.add_argument("input")
    p.add_argument("--x0", required=True, help="initial state, e.g. 1,0.5,0")
    p.add_argument("--t-end", type=float, required=True, dest="t_end")
    p.add_argument("--h0", type=float, default=1e-3, help="initial step size")
    p.add_argument("--out", default=None, help="CSV output path (default: stdout)")
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="run the qualitative-dictionary battery")
    p.add_argument("input")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("spectrum", help="constant mask for diag(1, lambda, mu)")
    p.add_argument("--lambda", type=float, required=True, dest="lam")
    p.add_argument("--mu", type=float, required=True)
    common(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("derivations", help="derivation space and SSND search")
    p.add_argument("input")
    common(p)
    p.set_defaults(func=cmd_derivations)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
