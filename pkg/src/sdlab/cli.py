"""Command-line front end: ``sdlab <command> ...``.

Every command writes one JSON report to standard output and exits with 0 when
all checks pass, 1 when some residual check fails, and 2 on invalid input or
an unmet precondition (the message goes to standard error).

``sdlab run SPEC.json`` executes a spec file holding the same information as
the command line::

    {"command": "verify", "sigma": {...SuperMap...}, "d": {"file": "d.json"},
     "tolerances": {"identity_tol": 1e-9}}
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .algebra import Tolerances
from .constructions import (
    construct_sigma_thm32,
    construct_sigma_thm33,
    reduce_general_prop36,
    reduce_to_hom_prop34,
)
from .derivations import (
    derivation_space,
    leibniz_residual,
    lemma22_residual,
    sigma_tau_residual,
    symmetrize,
)
from .errors import InvalidSpecError, PreconditionError, SdlabError
from .example26 import build_example26
from .samplers import complex_normal
from .semidirect import SemidirectContext, element_distance, phi_d, semidirect_mul, semidirect_norm_estimate
from .serialization import (
    construction_report_to_json,
    dumps,
    matrix_to_json,
    supermap_from_json,
    supermap_to_json,
)
from .supermap import is_homomorphism, is_star_linear

log = logging.getLogger("sdlab")

EXIT_PASSED = 0
EXIT_FAILED = 1
EXIT_INVALID = 2

CONSTRUCTIONS = {
    "thm32": construct_sigma_thm32,
    "thm33": construct_sigma_thm33,
    "prop34": reduce_to_hom_prop34,
    "prop36": reduce_general_prop36,
}

MAP_ROLES = ("sigma", "tau", "d", "candidate")


def load_document(path):
    """Parse a JSON file; returns ``(document, sha256 hex digest)``."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise InvalidSpecError(f"{path}: cannot read ({exc.strerror})") from None
    try:
        doc = json.loads(raw.decode("utf-8"))
    except UnicodeDecodeError as exc:
        raise InvalidSpecError(f"{path}: byte {exc.start}: not valid UTF-8") from None
    except json.JSONDecodeError as exc:
        raise InvalidSpecError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    return doc, hashlib.sha256(raw).hexdigest()


class Job:
    """A validated command with its loaded inputs."""

    def __init__(self, command, echo, tol, maps=None, options=None, digests=None):
        self.command = command
        self.echo = echo
        self.tol = tol
        self.maps = maps or {}
        self.options = options or {}
        self.digests = digests or {}

    def need(self, *roles):
        missing = [r for r in roles if r not in self.maps]
        if missing:
            raise InvalidSpecError(f"{self.command}: missing input(s) {', '.join(missing)}")
        return [self.maps[r] for r in roles]


# -- command handlers ---------------------------------------------------------


def _verify(job):
    sigma, d = job.need("sigma", "d")
    tol = job.tol
    outcome = {"residuals": {}, "checks": {}, "result": {}}
    if "tau" in job.maps:
        check = sigma_tau_residual(d, sigma, job.maps["tau"], tol)
        _put(outcome, "sigma_tau", check)
    else:
        _put(outcome, "leibniz", leibniz_residual(d, sigma, tol))
        _put(outcome, "lemma22", lemma22_residual(d, sigma, tol))
    outcome["result"] = {
        "sigma_star_linear": is_star_linear(sigma, tol)[0],
        "sigma_homomorphism": is_homomorphism(sigma, tol)[0],
        "d_star_preserving": is_star_linear(d, tol)[0],
    }
    return outcome


def _solve(job):
    (sigma,) = job.need("sigma")
    tau = job.maps.get("tau")
    star = bool(job.options.get("star", False))
    basis = derivation_space(sigma, star_constrained=star, tol=job.tol, tau=tau)
    worst = 0.0
    ok = True
    for d in basis:
        check = sigma_tau_residual(d, sigma, tau or sigma, job.tol)
        worst = max(worst, check.residual)
        ok = ok and check.passed
    return {
        "residuals": {"leibniz_max": worst},
        "checks": {"leibniz_max": ok},
        "result": {
            "dimension": len(basis),
            "field": "real" if star else "complex",
            "basis": [supermap_to_json(d) for d in basis],
        },
    }


def _construct(job):
    sigma, d = job.need("sigma", "d")
    method = job.options.get("method")
    if method not in CONSTRUCTIONS:
        raise InvalidSpecError(f"construct: method must be one of {sorted(CONSTRUCTIONS)}, got {method!r}")
    if method == "thm32":
        report = construct_sigma_thm32(d, sigma, job.tol, candidate=job.maps.get("candidate"))
    else:
        report = CONSTRUCTIONS[method](d, sigma, job.tol)
    return {
        "residuals": dict(report.residuals),
        "checks": dict(report.checks),
        "singular_values": [float(v) for v in report.singular_values],
        "result": {"method": method, "rank": report.rank, "report": construction_report_to_json(report)},
    }


def _symmetrize(job):
    sigma, tau, d = job.need("sigma", "tau", "d")
    mid, report = symmetrize(d, sigma, tau, job.tol)
    outcome = {"residuals": {}, "checks": {}, "result": {"mid": supermap_to_json(mid)}}
    _put(outcome, "sigma_tau", report.sigma_tau)
    _put(outcome, "tau_sigma", report.tau_sigma)
    _put(outcome, "midpoint", report.midpoint)
    return outcome


def _example26(job):
    opts = job.options
    n = opts.get("n", 9)
    alpha = opts.get("alpha", "zero")
    if alpha not in ("zero", "random"):
        raise InvalidSpecError(f"example26: alpha must be 'zero' or 'random', got {alpha!r}")
    inst = build_example26(n, alpha, seed=opts.get("seed", 0))
    tol = job.tol
    outcome = {"residuals": {}, "checks": {}, "result": {}}
    _put(outcome, "leibniz", leibniz_residual(inst.d, inst.sigma, tol))
    _put(outcome, "leibniz_global_sigma", leibniz_residual(inst.d, inst.global_sigma(), tol))
    thm32 = construct_sigma_thm32(inst.d, inst.sigma, tol, candidate=inst.global_sigma())
    for name, value in thm32.residuals.items():
        outcome["residuals"][f"thm32.{name}"] = value
        outcome["checks"][f"thm32.{name}"] = thm32.checks[name]
    indicator_error = float(np.abs(thm32.P - np.diag(inst.positive_support)).max())
    outcome["residuals"]["thm32.P_indicator"] = indicator_error
    outcome["checks"]["thm32.P_indicator"] = bool(tol.accepts(indicator_error))
    prop36 = reduce_general_prop36(inst.d, inst.sigma, tol)
    for name, value in prop36.residuals.items():
        outcome["residuals"][f"prop36.{name}"] = value
        outcome["checks"][f"prop36.{name}"] = prop36.checks[name]
    outcome["singular_values"] = [float(v) for v in thm32.singular_values]
    outcome["result"] = {
        "grid": inst.grid,
        "h": inst.h,
        "alpha": inst.alpha,
        "thm32_P_diagonal": np.diag(thm32.P).real,
        "prop36_P_diagonal": np.diag(prop36.P).real,
    }
    return outcome


def _semidirect(job):
    sigma, d = job.need("sigma", "d")
    tol = job.tol
    budget = int(job.options.get("norm_budget", 16))
    if budget < 1:
        raise InvalidSpecError(f"semidirect: norm budget must be positive, got {budget}")
    seed = int(job.options.get("seed", 0))
    ctx = SemidirectContext(sigma, tol)
    phi, report = phi_d(ctx, d, tol)
    alg = ctx.alg
    rng = np.random.default_rng(seed)
    worst = 0.0
    scale = 1.0
    for _ in range(50):
        u, v, w = (ctx.element(complex_normal(rng, alg.dim), complex_normal(rng, (alg.N, alg.N))) for _ in range(3))
        left = semidirect_mul(ctx, semidirect_mul(ctx, u, v), w)
        right = semidirect_mul(ctx, u, semidirect_mul(ctx, v, w))
        worst = max(worst, element_distance(ctx, left, right))
        scale = max(scale, ctx.a_norm(left.a) + float(np.linalg.norm(left.x, 2)))
    norms = []
    for i in range(alg.dim):
        est = semidirect_norm_estimate(ctx, phi(np.eye(alg.dim)[i]), starts=budget, seed=seed)
        norms.append(est.value)
    return {
        "residuals": {"phi_hom": report.hom_residual, "associativity": worst},
        "checks": {"phi_hom": report.passed, "associativity": bool(tol.accepts(worst, scale))},
        "result": {"injective": report.injective, "phi_basis_norm_lower_bounds": norms},
    }


HANDLERS = {
    "verify": _verify,
    "solve": _solve,
    "construct": _construct,
    "symmetrize": _symmetrize,
    "example26": _example26,
    "semidirect": _semidirect,
}


def _put(outcome, name, check):
    outcome["residuals"][name] = check.residual
    outcome["checks"][name] = check.passed


def execute(job):
    """Run ``job``; returns ``(report dict, exit status)``."""
    outcome = HANDLERS[job.command](job)
    passed = all(outcome["checks"].values())
    report = {
        "command": job.echo,
        "inputs": job.digests,
        "tolerances": job.tol.as_dict(),
        "residuals": outcome["residuals"],
        "checks": outcome["checks"],
        "passed": passed,
        "result": outcome.get("result", {}),
        "version": __version__,
    }
    if "singular_values" in outcome:
        report["singular_values"] = outcome["singular_values"]
    return report, EXIT_PASSED if passed else EXIT_FAILED


# -- argument handling --------------------------------------------------------


def _load_map(role, path, digests):
    doc, digest = load_document(path)
    digests[role] = digest
    try:
        return supermap_from_json(doc, where=f"{path}")
    except SdlabError as exc:
        raise InvalidSpecError(str(exc)) from None


def job_from_args(args):
    tol = Tolerances(args.tol, args.rank_tol)
    maps, digests = {}, {}
    for role in MAP_ROLES:
        path = getattr(args, role, None)
        if path is not None:
            maps[role] = _load_map(role, path, digests)
    options = {}
    for key in ("star", "method", "n", "alpha", "seed", "norm_budget"):
        if getattr(args, key, None) is not None:
            options[key] = getattr(args, key)
    echo = [args.command] + [f"--{k.replace('_', '-')}={v}" for k, v in sorted(options.items())]
    echo += [f"--{role}={getattr(args, role)}" for role in MAP_ROLES if getattr(args, role, None) is not None]
    return Job(args.command, echo, tol, maps, options, digests)


def job_from_spec(path):
    """Build a job from a spec file; map inputs are inline or ``{"file": ...}``."""
    doc, digest = load_document(path)
    base = Path(path).parent
    if not isinstance(doc, dict):
        raise InvalidSpecError(f"{path}: top level must be an object")
    command = doc.get("command")
    if command not in HANDLERS:
        raise InvalidSpecError(f"{path}: 'command' must be one of {sorted(HANDLERS)}, got {command!r}")
    tol_doc = doc.get("tolerances", {})
    if not isinstance(tol_doc, dict) or set(tol_doc) - {"identity_tol", "rank_tol_factor"}:
        raise InvalidSpecError(f"{path}: 'tolerances' accepts only identity_tol and rank_tol_factor")
    tol = Tolerances(**tol_doc)
    maps, digests = {}, {"spec": digest}
    for role in MAP_ROLES:
        if role not in doc:
            continue
        entry = doc[role]
        if isinstance(entry, dict) and set(entry) == {"file"}:
            maps[role] = _load_map(role, base / entry["file"], digests)
        else:
            try:
                maps[role] = supermap_from_json(entry, where=f"{path}: {role}")
            except SdlabError as exc:
                raise InvalidSpecError(str(exc)) from None
    options = {k: doc[k] for k in ("star", "method", "n", "alpha", "seed", "norm_budget") if k in doc}
    return Job(command, ["run", Path(path).name], tol, maps, options, digests)


def build_parser():
    parser = argparse.ArgumentParser(prog="sdlab", description="Verify and construct twisted derivations.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log diagnostics to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--tol", type=float, default=1e-9, help="relative identity tolerance")
        p.add_argument("--rank-tol", type=float, default=1e-12, help="rank threshold factor")

    p = sub.add_parser("verify", help="check the Leibniz rule for d against sigma (and tau)")
    p.add_argument("--sigma", required=True)
    p.add_argument("--d", required=True)
    p.add_argument("--tau")
    common(p)

    p = sub.add_parser("solve", help="basis of all sigma-derivations")
    p.add_argument("--sigma", required=True)
    p.add_argument("--tau")
    p.add_argument("--star", action="store_true", default=None, help="require d(A*) = d(A)*")
    common(p)

    p = sub.add_parser("construct", help="run one of the projection constructions")
    p.add_argument("--method", required=True, choices=sorted(CONSTRUCTIONS))
    p.add_argument("--sigma", required=True)
    p.add_argument("--d", required=True)
    p.add_argument("--candidate", help="extra twist to test d against (thm32)")
    common(p)

    p = sub.add_parser("symmetrize", help="replace (sigma, tau) by their average")
    p.add_argument("--sigma", required=True)
    p.add_argument("--tau", required=True)
    p.add_argument("--d", required=True)
    common(p)

    p = sub.add_parser("example26", help="the grid instance with a wild twist")
    p.add_argument("--n", type=int, default=9)
    p.add_argument("--alpha", choices=["zero", "random"], default="zero")
    p.add_argument("--seed", type=int, default=0)
    common(p)

    p = sub.add_parser("semidirect", help="semidirect-product embedding and norm estimates")
    p.add_argument("--sigma", required=True)
    p.add_argument("--d", required=True)
    p.add_argument("--norm-budget", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    common(p)

    p = sub.add_parser("run", help="execute a JSON spec file")
    p.add_argument("spec")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        job = job_from_spec(args.spec) if args.command == "run" else job_from_args(args)
        report, status = execute(job)
        text = dumps(report)
    except PreconditionError as exc:
        print(f"sdlab: precondition failed: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (SdlabError, ValueError) as exc:
        print(f"sdlab: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
