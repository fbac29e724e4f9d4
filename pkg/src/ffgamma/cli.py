"""ffgamma command line.

Every command prints exactly one JSON document on stdout, also on failure,
and a readable message on stderr when something goes wrong.

Exit codes: 0 ok, 1 a ``verify`` check came out false, 2 domain or
precision error (including bad arguments), 3 resource guard or
non-convergence, 4 certification inconclusive.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from .bracket import (
    expected_gauss_sigma,
    gauss_vector,
    is_bracket_relation,
    parse_vector,
    reflection_vector,
    translation_vector,
)
from .cache import Cache, make_key
from .cm_analyzer import approx_equiv, classify, isogenous, moredenoms_check
from .errors import DomainError, FFGammaError, ResourceGuardError
from .ffpoly import GF, field, parse_poly
from .recog import DEFAULT_DMAX, certify_relation
from .special_values import RationalArg, carlitz_period, gamma

EXIT_OK, EXIT_FALSE, EXIT_DOMAIN, EXIT_GUARD, EXIT_INCONCLUSIVE = 0, 1, 2, 3, 4

DEFAULT_PREC = 64
COMMANDS = ("gamma", "pi", "bracket", "classify", "isogeny", "equiv", "certify", "verify", "moredenoms", "batch")


class UsageError(DomainError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--q", type=int, default=None, help="field size (default 2, or the manifest value)")
    common.add_argument("--field-modulus", default=None, help="modulus of F_q over F_p in g, e.g. 'g^2+g+1'")
    common.add_argument("--no-cache", action="store_true", help="neither read nor write the result cache")
    common.add_argument("--cache-dir", default=None, help="cache location (else $FFGAMMA_CACHE_DIR or ~/.cache/ffgamma)")
    common.add_argument("--explain", action="store_true", help="add cache status and timing to the output")

    parser = _Parser(prog="ffgamma", description="Thakur Gamma values, bracket relations and CM classification.")
    parser.add_argument("--version", action="version", version=f"ffgamma {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gamma", parents=[common], help="Gamma(a/f) as a Laurent series")
    p.add_argument("--arg", required=True, help="argument 'a/f' (or a polynomial)")
    p.add_argument("--prec", type=int, default=None)
    p.add_argument("--var", choices=("theta", "eta"), default="theta", help="uniformizer of the output series")

    p = sub.add_parser("pi", parents=[common], help="the Carlitz period in 1/eta")
    p.add_argument("--prec", type=int, default=None)

    p = sub.add_parser("bracket", parents=[common], help="decide a bracket relation")
    p.add_argument("--f", required=True)
    p.add_argument("--vec", required=True, help="exponent vector 'rep:exp,rep:exp'")

    p = sub.add_parser("classify", parents=[common], help="CM classification of E_f")
    p.add_argument("--f", required=True)

    p = sub.add_parser("isogeny", parents=[common], help="search Gamma(1/f) ~ Gamma(b/g)")
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)

    p = sub.add_parser("equiv", parents=[common], help="decide Gamma(a/f) ~ Gamma(b/g)")
    for name in ("a", "f", "b", "g"):
        p.add_argument(f"--{name}", required=True)

    p = sub.add_parser("certify", parents=[common], help="recognize a relation quotient in F_q(eta)")
    p.add_argument("--f", required=True)
    p.add_argument("--vec", required=True)
    p.add_argument("--prec", type=int, default=None)
    p.add_argument("--dmax", type=int, default=DEFAULT_DMAX)

    p = sub.add_parser("verify", parents=[common], help="check a functional equation as a bracket relation")
    p.add_argument("--rel", required=True, choices=("reflection", "gauss", "translation"))
    p.add_argument("--f", required=True)
    p.add_argument("--a", default="1")
    p.add_argument("--g", default=None, help="multiplier for --rel gauss")
    p.add_argument("--b", default=None, help="translation amount for --rel translation")

    p = sub.add_parser("moredenoms", parents=[common], help="sum of monic units against prod(1 - f_i)")
    p.add_argument("--f", required=True)

    p = sub.add_parser("batch", parents=[common], help="run a JSON manifest of tasks")
    p.add_argument("--manifest", required=True)
    p.add_argument("--jobs", type=int, default=1)
    return parser


def _field(ns) -> GF:
    q = ns.q if ns.q is not None else 2
    try:
        return field(q, ns.field_modulus)
    except KeyError as exc:
        raise DomainError(f"no built-in modulus for q={q}; pass --field-modulus") from exc


def _arg(text: str, fld: GF) -> RationalArg:
    num, sep, den = text.partition("/")
    if "/" in den:
        raise DomainError(f"argument {text!r} has more than one '/'")
    return RationalArg.of(parse_poly(num, fld), parse_poly(den, fld) if sep else None)


def _prec(ns) -> int:
    prec = DEFAULT_PREC if ns.prec is None else ns.prec
    if prec < 1:
        raise DomainError("--prec must be positive")
    return prec


def _canonical_params(ns, fld: GF) -> dict:
    """Parsed and re-printed parameters, so equivalent spellings share a cache key."""
    out = {}
    for k, v in sorted(vars(ns).items()):
        if k in ("q", "field_modulus", "no_cache", "cache_dir", "explain", "command", "manifest", "jobs"):
            continue
        if v is None:
            continue
        if k in ("f", "g", "a", "b"):
            v = str(parse_poly(v, fld))
        elif k == "arg":
            v = str(_arg(v, fld))
        elif k == "vec":
            v = parse_vector(v, parse_poly(ns.f, fld)).to_text()
        out[k] = v
    if "prec" in vars(ns):
        out["prec"] = _prec(ns)
    return out


def compute(ns, fld: GF) -> tuple[dict, int]:
    cmd = ns.command
    if cmd == "gamma":
        value = gamma(_arg(ns.arg, fld), _prec(ns))
        if ns.var == "eta":
            out = value.series.embed_theta_to_eta().to_json()
            out.update({"arg": str(value.arg), "cutoff": value.cutoff_degree, "stabilized_at": value.stabilized_at})
            return out, EXIT_OK
        return value.to_json(), EXIT_OK
    if cmd == "pi":
        return carlitz_period(fld, _prec(ns)).to_json(), EXIT_OK
    if cmd == "bracket":
        f = parse_poly(ns.f, fld)
        return is_bracket_relation(parse_vector(ns.vec, f)).to_json(), EXIT_OK
    if cmd == "classify":
        return classify(parse_poly(ns.f, fld)).to_json(), EXIT_OK
    if cmd == "isogeny":
        w = isogenous(parse_poly(ns.f, fld), parse_poly(ns.g, fld))
        return {"isogenous": w is not None, "witness": None if w is None else [str(w[0]), str(w[1])]}, EXIT_OK
    if cmd == "equiv":
        a, f, b, g = (parse_poly(getattr(ns, k), fld) for k in ("a", "f", "b", "g"))
        return {"equiv": approx_equiv(a, f, b, g)}, EXIT_OK
    if cmd == "certify":
        f = parse_poly(ns.f, fld)
        rep = certify_relation(parse_vector(ns.vec, f), _prec(ns), ns.dmax)
        return rep.to_json(), EXIT_OK if rep.status == "CERTIFIED" else EXIT_INCONCLUSIVE
    if cmd == "verify":
        return _verify(ns, fld)
    if cmd == "moredenoms":
        return moredenoms_check(parse_poly(ns.f, fld)).to_json(), EXIT_OK
    raise DomainError(f"unknown command {cmd}")


def _verify(ns, fld: GF) -> tuple[dict, int]:
    f, a = parse_poly(ns.f, fld), parse_poly(ns.a, fld)
    if ns.rel == "reflection":
        vec, expected = reflection_vector(a, f), 1
    elif ns.rel == "gauss":
        if ns.g is None:
            raise DomainError("--rel gauss needs --g")
        g = parse_poly(ns.g, fld)
        vec, expected = gauss_vector(a, f, g), expected_gauss_sigma(fld.q, g.degree)
    else:
        if ns.b is None:
            raise DomainError("--rel translation needs --b")
        vec, expected = translation_vector(a, parse_poly(ns.b, fld), f), 0
    rep = is_bracket_relation(vec)
    ok = rep.is_relation and rep.sigma_plus == expected and (ns.rel != "translation" or vec.is_zero())
    out = {"rel": ns.rel, "f": str(vec.modulus), "vector": vec.to_text()}
    out.update(rep.to_json())
    out.update({"expected_sigma_plus": expected, "ok": ok})
    return out, EXIT_OK if ok else EXIT_FALSE


def _error_payload(exc: Exception) -> tuple[dict, int]:
    code = EXIT_GUARD if isinstance(exc, ResourceGuardError) else EXIT_DOMAIN
    return {"error": {"type": type(exc).__name__, "message": str(exc)}}, code


def run_one(ns) -> tuple[dict, int]:
    """Run a parsed non-batch command, going through the cache."""
    try:
        start = time.perf_counter()
        fld = _field(ns)
        status = "disabled"
        cache = None if ns.no_cache else Cache(ns.cache_dir)
        key = make_key(ns.command, fld.q, fld.format_modulus(), _canonical_params(ns, fld))
        hit = cache.get(key) if cache else None
        if hit is not None:
            payload, code = hit["payload"], hit["exit"]
            status = "hit"
        else:
            payload, code = compute(ns, fld)
            if cache:
                status = "miss" if cache.put(key, {"payload": payload, "exit": code}) else "unwritable"
        if ns.explain:
            payload = dict(payload)
            payload["explain"] = {"cache": status, "key": key, "elapsed_s": round(time.perf_counter() - start, 6)}
        return payload, code
    except FFGammaError as exc:
        return _error_payload(exc)


# ---------------------------------------------------------------------------
# batch
# ---------------------------------------------------------------------------


def _task_argv(task, glob: dict) -> list[str]:
    if not isinstance(task, dict) or "command" not in task:
        raise UsageError("each task needs a 'command'")
    cmd = task["command"]
    if cmd not in COMMANDS or cmd == "batch":
        raise UsageError(f"unknown task command {cmd!r}")
    params = task.get("parameters", {})
    if not isinstance(params, dict):
        raise UsageError("task 'parameters' must be an object")
    argv = [cmd]
    merged = {k: v for k, v in glob.items() if v is not None}
    if cmd not in ("gamma", "pi", "certify"):
        merged.pop("prec", None)
    merged.update(params)
    for k, v in merged.items():
        flag = "--" + k.replace("_", "-")
        if isinstance(v, bool):
            if v:
                argv.append(flag)
        else:
            argv += [flag, str(v)]
    return argv


def _run_task(argv: list[str]) -> tuple[dict, int]:
    return run_one(build_parser().parse_args(argv))


def run_batch(ns) -> tuple[dict, int]:
    try:
        with open(ns.manifest) as fh:
            manifest = json.load(fh)
    except (OSError, ValueError) as exc:
        return _error_payload(DomainError(f"cannot read manifest: {exc}"))
    glob = dict(manifest.get("global", {})) if isinstance(manifest, dict) else {}
    tasks = manifest.get("tasks") if isinstance(manifest, dict) else None
    if not isinstance(tasks, list):
        return _error_payload(DomainError("manifest needs a 'tasks' list"))
    for k in ("q", "field_modulus", "cache_dir"):
        if glob.get(k) is None and getattr(ns, k) is not None:
            glob[k] = getattr(ns, k)
    if ns.no_cache:
        glob["no_cache"] = True
    parser = build_parser()
    argvs = []
    # validate everything before running anything
    for i, task in enumerate(tasks):
        try:
            argv = _task_argv(task, glob)
            tns = parser.parse_args(argv)
            # parses every polynomial, argument and vector the task mentions
            _canonical_params(tns, _field(tns))
        except FFGammaError as exc:
            payload, code = _error_payload(exc)
            payload["error"]["task"] = i
            return payload, code
        argvs.append(argv)
    if ns.jobs > 1 and len(argvs) > 1:
        with ProcessPoolExecutor(max_workers=ns.jobs) as pool:
            outcomes = list(pool.map(_run_task, argvs))
    else:
        outcomes = [_run_task(a) for a in argvs]
    results = [
        {"index": i, "command": argvs[i][0], "exit": code, "result": payload}
        for i, (payload, code) in enumerate(outcomes)
    ]
    return {"results": results}, max((c for _, c in outcomes), default=EXIT_OK)


def main(argv: list[str] | None = None) -> int:
    try:
        ns = build_parser().parse_args(argv)
    except UsageError as exc:
        payload, code = _error_payload(exc)
    else:
        payload, code = run_batch(ns) if ns.command == "batch" else run_one(ns)
    if "error" in payload:
        print(f"ffgamma: {payload['error']['message']}", file=sys.stderr)
    elif code == EXIT_INCONCLUSIVE:
        print("ffgamma: certification inconclusive", file=sys.stderr)
    sys.stdout.write(json.dumps(payload, separators=(",", ":")) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
