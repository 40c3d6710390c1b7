"""Command-line front end: ``lcomplete <command> [input.json] [options]``.

Every command produces a JSON report (or a short text summary) that records
the tool version, seed, options and input, so ``verify-report`` can re-run it.
Exit status: 0 success, 1 negative verdict, 2 malformed or unsupported input.
"""

from __future__ import annotations

import argparse
import itertools
import json
import random
import sys
from typing import Callable, Optional

from . import __version__
from .errors import ContractViolation, LCompleteError, MalformedInput, PreconditionError, UnsupportedInput
from .fpmod import (
    FpModule,
    FpMorphism,
    HomSpace,
    Ring,
    cokernel,
    complete_fg,
    hom_module,
    is_epic,
    kernel,
    simplify,
    tensor,
)
from .monoidal import COHERENCE_KINDS, CoherenceFailure, MonoidalContext, internal_hom_D, require_coherence, \
    tensor_D
from .reflection import (
    ModReduction,
    Reflector,
    adjunction_roundtrip,
    cokernel_in_D,
    criterion_check,
    derived_idempotence_check,
    eta_factorization_check,
    is_f_complete,
    is_l0_complete,
    kernel_in_D,
    l0,
    l0_unit,
    parse_reflector,
    projective_check,
)
from .report import (
    INPUT_SCHEMA,
    REPORT_SCHEMA,
    SCHEMA_VERSION,
    dumps,
    module_from_json,
    module_to_json,
    morphism_from_json,
    morphism_to_json,
    normal_form_to_json,
    validate,
    write_atomic,
)
from .samples import finite_modules, random_finite_module, random_morphism, random_p_group
from .towers import (
    ExpRule,
    GradedModule,
    idempotence_check_completion,
    l0_vs_completion_report,
    verify_certificate,
)

DEFAULTS = {"seed": 0, "samples": 0, "window": 10, "functor": "mod:2:2", "exhaustive_order": 16,
            "p": 2, "subcategory": "l0"}


def _need(doc: Optional[dict], key: str):
    if not doc or key not in doc:
        raise MalformedInput(f"input: missing required field '{key}'")
    return doc[key]


def _same_invariants(A: FpModule, B: FpModule) -> bool:
    a, b = A.normal_form, B.normal_form
    return a.free_rank == b.free_rank and a.invariant_factors == b.invariant_factors


def _d_objects(F: Reflector, bound: int) -> list[FpModule]:
    return [M for M in finite_modules(bound) if is_l0_complete(F, M)]


def _native_ring(F: Reflector) -> Optional[Ring]:
    return Ring.mod_prime_power(F.p, F.N) if isinstance(F, ModReduction) else None


# -- commands ---------------------------------------------------------------------
# each takes (input document, options) and returns (verdict, result, certificates)


def cmd_normalize(doc, opts):
    M = module_from_json(_need(doc, "module"))
    S = simplify(M)[0]
    return True, {"normal_form": normal_form_to_json(M), "simplified": module_to_json(S)}, []


def cmd_kernel(doc, opts):
    f = morphism_from_json(_need(doc, "morphism"))
    K, iota = kernel(f)
    return True, {"kernel": normal_form_to_json(K), "inclusion": morphism_to_json(iota)}, []


def cmd_cokernel(doc, opts):
    f = morphism_from_json(_need(doc, "morphism"))
    C, pi = cokernel(f)
    return True, {"cokernel": normal_form_to_json(C), "projection": morphism_to_json(pi)}, []


def _two_modules(doc):
    mods = _need(doc, "modules")
    if len(mods) != 2:
        raise MalformedInput("input: 'modules' must list exactly two modules")
    return module_from_json(mods[0]), module_from_json(mods[1])


def cmd_tensor(doc, opts):
    M, N = _two_modules(doc)
    T = tensor(M, N)
    return True, {"tensor": normal_form_to_json(T), "presentation": module_to_json(T)}, []


def cmd_hom(doc, opts):
    M, N = _two_modules(doc)
    H = hom_module(M, N)
    out = {"hom": normal_form_to_json(H)}
    if H.is_finite:
        out["count"] = H.order
    return True, out, []


def cmd_complete(doc, opts):
    M = module_from_json(_need(doc, "module"))
    return True, {"p": opts["p"], "completion": normal_form_to_json(complete_fg(M, opts["p"]))}, []


def cmd_l0(doc, opts):
    F = parse_reflector(opts["functor"])
    M = module_from_json(_need(doc, "module"))
    return True, {
        "functor": F.name,
        "l0": normal_form_to_json(l0(F, M)),
        "unit": morphism_to_json(l0_unit(F, M)),
        "l0_complete": is_l0_complete(F, M),
        "f_complete": is_f_complete(F, M),
        "eta_factors": eta_factorization_check(F, M),
    }, []


def cmd_check_criterion(doc, opts):
    F = parse_reflector(opts["functor"])
    use_l0 = opts["subcategory"] == "l0"
    native = _native_ring(F) if use_l0 else None
    if doc and "morphisms" in doc:
        morphisms = [morphism_from_json(m) for m in doc["morphisms"]]
        objects = []
    else:
        objects = _d_objects(F, opts["exhaustive_order"])
        morphisms = list(itertools.chain.from_iterable(HomSpace(X, Y).enumerate() for X in objects for Y in objects))
        if opts["samples"]:
            if not isinstance(F, ModReduction):
                raise UnsupportedInput("random larger samples are drawn for mod:p:N functors")
            rng = random.Random(opts["seed"])
            extra = []
            while len(extra) < opts["samples"]:
                X = random_p_group(rng, F.p, F.N, max_gens=4)
                Y = random_p_group(rng, F.p, F.N, max_gens=4)
                if max(X.order, Y.order) > opts["exhaustive_order"]:
                    extra.append(random_morphism(rng, X, Y))
            morphisms.extend(extra)
    non_monic, mismatches, failures = 0, 0, []
    for f in morphisms:
        verdict = criterion_check(F, f, use_l0=use_l0)
        if not verdict.is_monic:
            non_monic += 1
            if len(failures) < 5:
                failures.append({"morphism": morphism_to_json(f), "witness": list(verdict.witness)})
        if native is not None:
            fn = FpMorphism(f.source.over(native), f.target.over(native), f.matrix)
            ok = (_same_invariants(kernel_in_D(F, f)[0], kernel(fn)[0])
                  and _same_invariants(cokernel_in_D(F, f)[0], cokernel(fn)[0]))
            mismatches += not ok
    result = {
        "functor": F.name,
        "subcategory": opts["subcategory"],
        "objects": [normal_form_to_json(X)["text"] for X in objects],
        "morphisms_checked": len(morphisms),
        "non_monic": non_monic,
        "failures": failures,
        "all_monic": non_monic == 0,
    }
    if native is not None:
        result["native_mismatches"] = mismatches
    return non_monic == 0 and mismatches == 0, result, []


def cmd_check_monoidal(doc, opts):
    F = parse_reflector(opts["functor"])
    ctx = MonoidalContext(F)
    if doc and "modules" in doc:
        objects = [module_from_json(m) for m in doc["modules"]]
    else:
        objects = [FpModule.cyclic(F.p ** e) for e in range(opts["exhaustive_order"].bit_length())
                   if F.p ** e <= opts["exhaustive_order"]]
        objects = [M for M in objects if is_l0_complete(F, M)] + [ctx.unit_D]
    ctx.require(*objects)
    checked, counterexamples = 0, []
    for kind, arity in COHERENCE_KINDS.items():
        for objs in itertools.product(objects, repeat=arity):
            checked += 1
            try:
                require_coherence(ctx, kind, objs)
            except CoherenceFailure as exc:
                counterexamples.append(exc.counterexample)
    rng = random.Random(opts["seed"])
    random_checked = 0
    native = _native_ring(F)
    tensor_mismatches = 0
    hom_outside = 0
    for _ in range(opts["samples"]):
        if not isinstance(F, ModReduction):
            raise UnsupportedInput("random monoidal samples are drawn for mod:p:N functors")
        kind = sorted(COHERENCE_KINDS)[rng.randrange(len(COHERENCE_KINDS))]
        objs = [random_p_group(rng, F.p, F.N, max_gens=2) for _ in range(COHERENCE_KINDS[kind])]
        random_checked += 1
        try:
            require_coherence(ctx, kind, objs)
        except CoherenceFailure as exc:
            counterexamples.append(exc.counterexample)
        X, Y = objs[0], objs[1]
        if not _same_invariants(tensor_D(ctx, X, Y), tensor(X.over(native), Y.over(native))):
            tensor_mismatches += 1
        try:
            internal_hom_D(ctx, X, Y)
        except LCompleteError:
            hom_outside += 1
    for X, Y in itertools.product(objects, repeat=2):
        try:
            internal_hom_D(ctx, X, Y)
        except LCompleteError:
            hom_outside += 1
    ok = not counterexamples and tensor_mismatches == 0 and hom_outside == 0
    return ok, {
        "functor": F.name,
        "objects": [normal_form_to_json(X)["text"] for X in objects],
        "exhaustive_checks": checked,
        "random_checks": random_checked,
        "counterexamples": counterexamples,
        "tensor_mismatches": tensor_mismatches,
        "internal_hom_outside_D": hom_outside,
    }, []


def cmd_check_adjunction(doc, opts):
    F = parse_reflector(opts["functor"])
    bound = opts["exhaustive_order"]
    if doc and "pairs" in doc:
        pairs = [(module_from_json(a), module_from_json(b)) for a, b in doc["pairs"]]
    else:
        mods = finite_modules(bound)
        D = [M for M in mods if is_l0_complete(F, M)]
        pairs = [(X, Y) for X in mods for Y in D]
    failed = [(X, Y) for X, Y in pairs if not adjunction_roundtrip(F, X, Y)]
    rng = random.Random(opts["seed"])
    eta_bad = idem_bad = 0
    for _ in range(opts["samples"]):
        M = random_finite_module(rng) if rng.random() < 0.5 else _random_any(rng)
        eta_bad += not eta_factorization_check(F, M)
        idem_bad += not derived_idempotence_check(F, M)
    D_small = [Y for _, Y in pairs if Y.is_finite]
    epis = _sample_epis(D_small)
    proj_ok = projective_check(F, FpModule.free(1), epis) if epis else True
    ok = not failed and eta_bad == 0 and idem_bad == 0 and proj_ok
    return ok, {
        "functor": F.name,
        "pairs_checked": len(pairs),
        "roundtrip_failures": [[normal_form_to_json(X)["text"], normal_form_to_json(Y)["text"]] for X, Y in failed],
        "random_modules": opts["samples"],
        "eta_factorization_failures": eta_bad,
        "derived_idempotence_failures": idem_bad,
        "epis_checked": len(epis),
        "projective_ok": proj_ok,
    }, []


def _random_any(rng):
    from .samples import random_module

    return random_module(rng, max_gens=3, max_rels=3)


def _sample_epis(objects, per_pair: int = 2):
    seen, uniq = set(), []
    for X in objects:
        if X not in seen:
            seen.add(X)
            uniq.append(X)
    epis = []
    for X in uniq:
        for Y in uniq:
            if Y.order > X.order:
                continue
            found = 0
            for f in HomSpace(X, Y).enumerate():
                if is_epic(f):
                    epis.append(f)
                    found += 1
                    if found >= per_pair:
                        break
    return epis


def cmd_certify_noncomplete(doc, opts):
    bundle = l0_vs_completion_report(opts["p"], opts["window"])
    certs = bundle.pop("certificates")
    ok = len(certs) == 2 and all(verify_certificate(c) for c in certs)
    return ok, bundle, certs


def cmd_idempotence(doc, opts):
    if doc and "graded" in doc:
        M = GradedModule.from_json(doc["graded"])
    else:
        M = GradedModule.cyclic(opts["p"], ExpRule(1, 0))
    cert = idempotence_check_completion(M, opts["window"])
    return verify_certificate(cert), {"module": M.to_json(), "kind": cert.kind}, [cert.to_json()]


COMMANDS: dict[str, Callable] = {
    "normalize": cmd_normalize,
    "kernel": cmd_kernel,
    "cokernel": cmd_cokernel,
    "tensor": cmd_tensor,
    "hom": cmd_hom,
    "complete": cmd_complete,
    "l0": cmd_l0,
    "check-criterion": cmd_check_criterion,
    "check-monoidal": cmd_check_monoidal,
    "check-adjunction": cmd_check_adjunction,
    "certify-noncomplete": cmd_certify_noncomplete,
    "idempotence": cmd_idempotence,
}


def run(command: str, doc: Optional[dict], opts: dict) -> dict:
    """Execute one job and return its report."""
    if doc is not None:
        validate(doc, INPUT_SCHEMA)
    opts = {**DEFAULTS, **opts}
    verdict, result, certs = COMMANDS[command](doc, opts)
    return {
        "tool": "lcomplete",
        "version": __version__,
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "seed": opts["seed"],
        "options": opts,
        "input": doc,
        "verdict": bool(verdict),
        "result": result,
        "certificates": certs,
        "verifier": {"procedure": "rerun",
                     "note": "re-run command on input with options; certificates carry their own blocks"},
    }


def verify_report(report: dict) -> tuple[bool, dict]:
    validate(report, REPORT_SCHEMA, "report")
    cert_results = [verify_certificate(c) for c in report.get("certificates", [])]
    again = run(report["command"], report["input"], report["options"])
    # JSON round trip so tuples and lists compare alike
    same = json.loads(dumps(again)) == json.loads(dumps(report))
    ok = same and all(cert_results)
    return ok, {"reproduced": same, "certificates_verified": cert_results,
                "original_verdict": report["verdict"]}


def _summary(report: dict) -> str:
    lines = [f"{report['command']}: {'PASS' if report['verdict'] else 'FAIL'}"]
    for key, value in sorted(report["result"].items()):
        if isinstance(value, dict) and "text" in value:
            value = value["text"]
        elif isinstance(value, (dict, list)):
            value = json.dumps(value, sort_keys=True)
            if len(value) > 120:
                value = value[:117] + "..."
        lines.append(f"  {key}: {value}")
    for cert in report.get("certificates", []):
        lines.append(f"  certificate {cert['kind']}")
        lines.extend(f"    - {t}" for t in cert["trace"])
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lcomplete", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"lcomplete {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in [*COMMANDS, "verify-report"]:
        p = sub.add_parser(name)
        p.add_argument("input", nargs="?", help="JSON input document (a report for verify-report)")
        p.add_argument("--seed", type=int, default=DEFAULTS["seed"])
        p.add_argument("--samples", type=int, default=DEFAULTS["samples"])
        p.add_argument("--window", type=int, default=DEFAULTS["window"])
        p.add_argument("--functor", default=DEFAULTS["functor"], help="mod:p:N, tfq:p or complete:p")
        p.add_argument("--exhaustive-order", type=int, default=DEFAULTS["exhaustive_order"])
        p.add_argument("--p", type=int, default=DEFAULTS["p"])
        p.add_argument("--subcategory", choices=["l0", "f"], default=DEFAULTS["subcategory"],
                       help="criterion on L0F-complete (default) or F-complete objects")
        p.add_argument("--out", help="write the report here (atomically) instead of stdout")
        p.add_argument("--format", choices=["json", "text"], default="json")
    return parser


def _load(path: Optional[str]) -> Optional[dict]:
    if path is None:
        return None
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise MalformedInput(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    opts = {"seed": args.seed, "samples": args.samples, "window": args.window, "functor": args.functor,
            "exhaustive_order": args.exhaustive_order, "p": args.p, "subcategory": args.subcategory}
    try:
        doc = _load(args.input)
        if args.command == "verify-report":
            if doc is None:
                raise MalformedInput("verify-report needs a report file")
            ok, result = verify_report(doc)
            report = {"tool": "lcomplete", "version": __version__, "schema_version": SCHEMA_VERSION,
                      "command": "verify-report", "seed": args.seed, "options": {}, "input": None,
                      "verdict": ok, "result": result, "certificates": [],
                      "verifier": {"procedure": "none"}}
        else:
            report = run(args.command, doc, opts)
    except (MalformedInput, PreconditionError, UnsupportedInput, ContractViolation) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = dumps(report) if args.format == "json" else _summary(report)
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    return 0 if report["verdict"] else 1


if __name__ == "__main__":
    sys.exit(main())
