"""Command-line front end.

One subcommand per library operation, each a thin wrapper: load inputs,
call the library, serialize the result canonically.  Every report embeds
a manifest with the command line, input digests, parameter values, tool
version and wall time.  Exit codes: 0 success, 1 when a check verdict
fails (so verdicts are scriptable), 2 on validation or parameter errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time

import numpy as np

from . import __version__
from .action import GroupAction, orbit_metric, quotient_pseudometric, xg_metric
from .errors import CoarselabError, NotDecomposableError
from .invariants import (
    FAILS,
    WindowVerdict,
    coarsely_light_check,
    discontinuity_profile,
    identify_group_element,
    one_ended_check,
    separation_bound,
    weak_quotient_certificate,
)
from .lscore import (
    Family,
    FiniteSpace,
    ball_cover,
    metric_axiom_violations,
    tower_metrize,
)
from .propa import (
    FolnerSet,
    block_partition,
    exactness_witness_check,
    folner_average,
    folner_defect,
    hat_partition,
    variation,
)
from .roeops import (
    BandOperator,
    decompose,
    homomorphism_check,
    propagation,
    conjugate,
    translation_operator,
    uniqueness_defect,
)
from .serialization import (
    action_from_json,
    action_to_json,
    canonical_dumps,
    family_from_json,
    family_to_json,
    operator_from_json,
    operator_to_json,
    partition_from_json,
    partition_to_json,
    space_from_json,
    space_to_json,
)
from .spacegen import BoxSpec, ConeSpec, axes_space, box_space, cone_space, segment_space

WEIGHTS = {
    "linear": lambda t: t,
    "quadratic": lambda t: t * t,
    "sqrt": lambda t: t**0.5,
}


# -- input helpers -----------------------------------------------------------


def _read_json(path, digests):
    with open(path, "rb") as fh:
        raw = fh.read()
    digests[path] = hashlib.sha256(raw).hexdigest()
    return json.loads(raw.decode("utf-8"))


def _load_space(path, digests) -> FiniteSpace:
    return space_from_json(_read_json(path, digests))


def _load_family(spec: str, space, digests) -> Family:
    if spec == "singletons":
        return Family.singletons(space)
    if spec.startswith("ball:"):
        return ball_cover(space, float(spec.split(":", 1)[1]))
    return family_from_json(_read_json(spec, digests))


def _load_partition(spec: str, space, digests):
    if spec.startswith("hat:"):
        return hat_partition(space, int(spec.split(":", 1)[1]))
    if spec.startswith("blocks:"):
        return block_partition(space, int(spec.split(":", 1)[1]))
    return partition_from_json(_read_json(spec, digests), space)


def _load_map(path, digests) -> dict:
    obj = _read_json(path, digests)
    return {x: y for x, y in obj["pairs"]}


def _word(action: GroupAction, word: str):
    if word == "e":
        return action.identity()
    return action.element(word.split("*"))


def _words(action, csv_words: str):
    return [_word(action, w) for w in csv_words.split(",") if w]


def _floats(s: str):
    return [float(x) for x in s.split(",") if x]


def _verdict_json(v: WindowVerdict) -> dict:
    return {"status": v.status, "witness": _plain(v.witness)}


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(x) for x in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted((_plain(x) for x in obj), key=repr)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return obj


def _exit_from(verdicts) -> int:
    return 1 if any(v.status == FAILS for v in verdicts) else 0


# -- svg / csv emission -------------------------------------------------------


def render_text(value, indent=0) -> str:
    """Aligned-text rendering of a report value for human consumption."""
    pad = "  " * indent
    lines = []
    if isinstance(value, dict):
        width = max((len(str(k)) for k in value), default=0)
        for k in sorted(value, key=str):
            v = value[k]
            if isinstance(v, (dict, list)) and v and not _is_flat(v):
                lines.append(f"{pad}{k}:")
                lines.append(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{str(k):<{width}}  {_flat(v)}")
    elif isinstance(value, list):
        for item in value:
            if isinstance(item, (dict, list)) and item and not _is_flat(item):
                lines.append(render_text(item, indent))
            else:
                lines.append(f"{pad}- {_flat(item)}")
    else:
        lines.append(pad + _flat(value))
    return "\n".join(lines)


def _is_flat(v):
    if isinstance(v, list):
        return all(not isinstance(x, (dict, list)) for x in v) and len(v) <= 12
    return False


def _flat(v):
    if isinstance(v, float):
        return "%g" % v
    if isinstance(v, list):
        return "[" + ", ".join(_flat(x) for x in v) + "]"
    if v is None:
        return "inf/none"
    return str(v)


def write_profile_csv(rows, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("radius,min_displacement\n")
        for r, d in rows:
            fh.write(f"{r:g},{d:g}\n")


def write_profile_svg(rows, path, width=480, height=320):
    """A dependency-free line chart of profile rows."""
    pad = 40
    xs = [r for r, _ in rows]
    ys = [d for _, d in rows]
    if not rows:
        xs, ys = [0.0], [0.0]
    x0, x1 = min(xs), max(xs) or 1.0
    y0, y1 = 0.0, max(ys) or 1.0
    sx = lambda x: pad + (x - x0) / max(x1 - x0, 1e-12) * (width - 2 * pad)
    sy = lambda y: height - pad - (y - y0) / max(y1 - y0, 1e-12) * (height - 2 * pad)
    pts = " ".join(f"{sx(x):.1f},{sy(y):.1f}" for x, y in zip(xs, ys))
    body = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{pad}" y1="{height-pad}" x2="{width-pad}" y2="{height-pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height-pad}" stroke="black"/>',
        f'<polyline points="{pts}" fill="none" stroke="steelblue" stroke-width="2"/>',
        f'<text x="{width//2}" y="{height-8}" font-size="12" text-anchor="middle">radius</text>',
        f'<text x="12" y="{height//2}" font-size="12" transform="rotate(-90 12 {height//2})" '
        'text-anchor="middle">min displacement</text>',
        "</svg>",
    ]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(body))


# -- handlers ------------------------------------------------------------------


def _space_gen(args, digests):
    if args.kind == "segment":
        sp = segment_space(args.lo, args.hi)
        extra = {}
    elif args.kind == "axes":
        sp = axes_space(args.arms, args.length)
        extra = {}
    elif args.kind == "cone":
        if args.base:
            base = _load_space(args.base, digests)
        else:
            n = args.base_cycle
            idx = np.arange(n)
            diff = np.abs(idx[:, None] - idx[None, :])
            base = FiniteSpace(
                list(range(n)), np.minimum(diff, n - diff), 0, n // 2, validate=False
            )
        sp = cone_space(ConeSpec(base, tuple(_floats(args.levels)), WEIGHTS[args.weight]))
        extra = {}
    elif args.kind == "box":
        sp, action = box_space(BoxSpec(moduli=tuple(int(x) for x in args.moduli.split(","))))
        extra = {}
        if args.action_out:
            with open(args.action_out, "w", encoding="utf-8") as fh:
                fh.write(canonical_dumps(action_to_json(action)))
    else:
        raise CoarselabError(f"unknown space kind {args.kind!r}")
    return space_to_json(sp), 0


def _space_validate(args, digests):
    sp = _load_space(args.space, digests)
    problems = metric_axiom_violations(sp)
    return {"ok": not problems, "violations": problems}, 1 if problems else 0


def _action_validate(args, digests):
    sp = _load_space(args.space, digests)
    a = action_from_json(_read_json(args.action, digests), sp)
    return {
        "ok": True,
        "generators": a.sorted_generators(),
        "inverses": dict(a.inverses),
        "control_values": {s: _plain(c) for s, c in a.control_values.items()},
        "isometric": a.is_isometric(),
    }, 0


def _metric_xg(args, digests):
    sp = _load_space(args.space, digests)
    a = action_from_json(_read_json(args.action, digests), sp)
    return space_to_json(xg_metric(a, args.mode)), 0


def _metric_orbit(args, digests):
    sp = _load_space(args.space, digests)
    a = action_from_json(_read_json(args.action, digests), sp)
    space, labels = orbit_metric(a, args.kind)
    return {
        "space": space_to_json(space),
        "labels": [[p, labels[p]] for p in sp.points],
    }, 0


def _metric_quotient(args, digests):
    sp = _load_space(args.space, digests)
    if args.mod is not None:
        fibers = {p: p % args.mod for p in sp.points}
    else:
        fibers = _load_map(args.fibers, digests)
    return space_to_json(quotient_pseudometric(sp, fibers, args.variant)), 0


def _metric_tower(args, digests):
    sp = _load_space(args.space, digests)
    fams = [_load_family(f, sp, digests) for f in args.families.split(",")]
    tower, derived = tower_metrize(fams, args.depth, sp)
    return {
        "space": space_to_json(derived),
        "levels": [family_to_json(f) for f in tower.levels],
    }, 0


def _check_discont(args, digests):
    sp = _load_space(args.space, digests)
    a = action_from_json(_read_json(args.action, digests), sp)
    g = _word(a, args.g)
    profile, verdicts = discontinuity_profile(a, g, _floats(args.radii))
    if args.csv:
        write_profile_csv(profile.rows, args.csv)
    if args.svg:
        write_profile_svg(profile.rows, args.svg)
    return {
        "window_radius": sp.window_radius,
        "profile": [list(r) for r in profile.rows],
        "verdicts": {("%g" % r): _verdict_json(v) for r, v in verdicts.items()},
    }, _exit_from(verdicts.values())


def _check_separation(args, digests):
    sp = _load_space(args.space, digests)
    a = action_from_json(_read_json(args.action, digests), sp)
    els = _words(a, args.F)
    u = _load_family(args.u, sp, digests)
    v = _load_family(args.v, sp, digests)
    K, verdict = separation_bound(a, els, u, v)
    return {
        "window_radius": sp.window_radius,
        "K": _plain(K),
        "verdict": _verdict_json(verdict),
    }, _exit_from([verdict])


def _check_one_ended(args, digests):
    sp = _load_space(args.space, digests)
    u = _load_family(args.u, sp, digests)
    out = one_ended_check(sp, u, _floats(args.radii))
    return (
        {
            "window_radius": sp.window_radius,
            "verdicts": {("%g" % r): _verdict_json(v) for r, v in out.items()},
        },
        _exit_from(out.values()),
    )


def _check_light(args, digests):
    dom = _load_space(args.space, digests)
    cod = _load_space(args.codomain, digests)
    f = _load_map(args.map, digests)
    u = _load_family(args.u, dom, digests)
    v = _load_family(args.v, cod, digests)
    diam, verdict = coarsely_light_check(dom, cod, f, u, v)
    return {"max_component_diameter": diam, "verdict": _verdict_json(verdict)}, _exit_from(
        [verdict]
    )


def _check_weak_quotient(args, digests):
    dom = _load_space(args.space, digests)
    cod = _load_space(args.codomain, digests)
    f = _load_map(args.map, digests)
    res = weak_quotient_certificate(
        dom, cod, f, args.T, _floats(args.radii), args.n_budget, args.s_budget
    )
    return {
        "verdict": _verdict_json(res.verdict),
        "rows": [list(r) for r in res.rows],
        "chains": {("%g" % r): _plain(c) for r, c in res.chains.items()},
    }, _exit_from([res.verdict])


def _check_identify(args, digests):
    sp = _load_space(args.space, digests)
    a = action_from_json(_read_json(args.action, digests), sp)
    f = _load_map(args.map, digests)
    v = _load_family(args.v, sp, digests)
    u = _load_family(args.u, sp, digests)
    els = _words(a, args.F)
    res = identify_group_element(f, a, v, els, u)
    return {
        "window_radius": sp.window_radius,
        "status": res.status,
        "element": ("*".join(res.element.word) or "e") if res.element else None,
        "exceptional": _plain(res.exceptional),
        "K_size": len(res.K),
        "K_prime_size": len(res.K_prime),
        "one_ended": res.one_ended,
        "verdict": _verdict_json(res.verdict),
    }, _exit_from([res.verdict])


def _propa_variation(args, digests):
    sp = _load_space(args.space, digests)
    phi = _load_partition(args.phi, sp, digests)
    u = _load_family(args.u, sp, digests)
    return {"variation": variation(phi, u)}, 0


def _propa_defect(args, digests):
    sp = _load_space(args.space, digests)
    a = action_from_json(_read_json(args.action, digests), sp)
    E = FolnerSet(tuple(_words(a, args.E)))
    g = _word(a, args.g)
    d = folner_defect(E, g)
    return {
        "defect": {"numerator": d.numerator, "denominator": d.denominator, "value": float(d)}
    }, 0


def _propa_average(args, digests):
    sp = _load_space(args.space, digests)
    a = action_from_json(_read_json(args.action, digests), sp)
    phi = _load_partition(args.phi, sp, digests)
    E = FolnerSet(tuple(_words(a, args.E)))
    return partition_to_json(folner_average(phi, E, a)), 0


def _propa_witness(args, digests):
    sp = _load_space(args.space, digests)
    phi = _load_partition(args.phi, sp, digests)
    u = _load_family(args.u, sp, digests)
    verdicts = {eps: exactness_witness_check(phi, u, eps) for eps in _floats(args.epsilons)}
    return (
        {("%g" % e): _verdict_json(v) for e, v in verdicts.items()},
        _exit_from(verdicts.values()),
    )


def _roe_propagation(args, digests):
    sp = _load_space(args.space, digests)
    op = operator_from_json(_read_json(args.op, digests), sp)
    if args.metric == "xg":
        a = action_from_json(_read_json(args.action, digests), sp)
        metric = xg_metric(a, args.mode)
    else:
        metric = None
    return {"propagation": propagation(op, metric)}, 0


def _roe_translate(args, digests):
    sp = _load_space(args.space, digests)
    a = action_from_json(_read_json(args.action, digests), sp)
    return operator_to_json(translation_operator(a, _word(a, args.g))), 0


def _roe_conjugate(args, digests):
    sp = _load_space(args.space, digests)
    a = action_from_json(_read_json(args.action, digests), sp)
    op = operator_from_json(_read_json(args.op, digests), sp)
    return operator_to_json(conjugate(op, a, _word(a, args.g))), 0


def _roe_decompose(args, digests):
    sp = _load_space(args.space, digests)
    a = action_from_json(_read_json(args.action, digests), sp)
    op = operator_from_json(_read_json(args.op, digests), sp)
    els = _words(a, args.F)
    dec = decompose(op, a, args.R, els)
    return {
        "radius": dec.radius,
        "elements": ["*".join(g.word) or "e" for g in dec.elements],
        "terms": {
            ("*".join(g.word) or "e"): operator_to_json(t) for g, t in dec.terms.items()
        },
        "recombination_defect": dec.recombination_defect(),
    }, 0


def _roe_defect(args, digests):
    sp = _load_space(args.space, digests)
    a = action_from_json(_read_json(args.action, digests), sp)
    op = operator_from_json(_read_json(args.op, digests), sp)
    els = _words(a, args.F)
    d1 = decompose(op, a, args.R, els)
    d2 = decompose(op, a, args.R, els, order=list(reversed(d1.elements)))
    diffs, verdict = uniqueness_defect(d1, d2)
    return {
        "difference_supports": {
            ("*".join(g.word) or "e"): _plain(s) for g, s in diffs.items()
        },
        "verdict": _verdict_json(verdict),
    }, _exit_from([verdict])


def _roe_hom_check(args, digests):
    sp = _load_space(args.space, digests)
    a = action_from_json(_read_json(args.action, digests), sp)
    t = operator_from_json(_read_json(args.t, digests), sp)
    s = operator_from_json(_read_json(args.s, digests), sp)
    ok = homomorphism_check(t, s, a, _word(a, args.g), _word(a, args.h))
    return {"holds": ok}, 0 if ok else 1


# -- parser --------------------------------------------------------------------


def _build_parser():
    p = argparse.ArgumentParser(prog="coarselab")
    p.add_argument("--threads", type=int, default=0,
                   help="advisory worker count recorded in the manifest; numeric "
                        "kernels use the BLAS thread pool (0 = all cores)")
    top = p.add_subparsers(dest="group", required=True)

    def leaf(group, name, handler, **arguments):
        sub = group.add_parser(name)
        for flag, kw in arguments.items():
            sub.add_argument("--" + flag.replace("_", "-"), **kw)
        sub.add_argument("--out", help="write the report here instead of stdout")
        sub.add_argument("--format", choices=["json", "text"], default="json",
                         help="canonical JSON (machine) or aligned text (human)")
        sub.set_defaults(handler=handler)
        return sub

    space = top.add_parser("space").add_subparsers(dest="cmd", required=True)
    gen = leaf(
        space, "gen", _space_gen,
        kind={"required": True, "choices": ["segment", "axes", "cone", "box"]},
        lo={"type": int, "default": 0}, hi={"type": int, "default": 0},
        arms={"type": int, "default": 3}, length={"type": int, "default": 10},
        levels={"default": "0,1,2"}, weight={"choices": list(WEIGHTS), "default": "linear"},
        base={"default": None}, base_cycle={"type": int, "default": 6},
        moduli={"default": "3,9,27"}, action_out={"default": None},
    )
    leaf(space, "validate", _space_validate, space={"required": True})

    action = top.add_parser("action").add_subparsers(dest="cmd", required=True)
    leaf(action, "validate", _action_validate,
         space={"required": True}, action={"required": True})

    metric = top.add_parser("metric").add_subparsers(dest="cmd", required=True)
    leaf(metric, "xg", _metric_xg, space={"required": True}, action={"required": True},
         mode={"choices": ["isometric", "general"], "default": "isometric"})
    leaf(metric, "orbit", _metric_orbit, space={"required": True}, action={"required": True},
         kind={"choices": ["hausdorff", "hausdorff_classical", "min"], "default": "hausdorff"})
    leaf(metric, "quotient", _metric_quotient, space={"required": True},
         fibers={"default": None}, mod={"type": int, "default": None},
         variant={"choices": ["classical", "chain"], "default": "chain"})
    leaf(metric, "tower", _metric_tower, space={"required": True},
         families={"required": True}, depth={"type": int, "default": 4})

    check = top.add_parser("check").add_subparsers(dest="cmd", required=True)
    leaf(check, "discont", _check_discont, space={"required": True},
         action={"required": True}, g={"required": True}, radii={"required": True},
         svg={"default": None}, csv={"default": None})
    leaf(check, "separation", _check_separation, space={"required": True},
         action={"required": True}, F={"required": True},
         u={"default": "singletons"}, v={"default": "ball:1"})
    leaf(check, "one-ended", _check_one_ended, space={"required": True},
         u={"default": "ball:1"}, radii={"required": True})
    leaf(check, "light", _check_light, space={"required": True},
         codomain={"required": True}, map={"required": True},
         u={"default": "ball:1"}, v={"default": "ball:1"})
    leaf(check, "weak-quotient", _check_weak_quotient, space={"required": True},
         codomain={"required": True}, map={"required": True},
         T={"type": float, "default": 0.0}, radii={"required": True},
         n_budget={"type": int, "default": 8}, s_budget={"type": float, "default": 100.0})
    leaf(check, "identify", _check_identify, space={"required": True},
         action={"required": True}, map={"required": True},
         v={"default": "ball:1"}, F={"required": True}, u={"default": "ball:1"})

    propa = top.add_parser("propa").add_subparsers(dest="cmd", required=True)
    leaf(propa, "variation", _propa_variation, space={"required": True},
         phi={"required": True}, u={"default": "ball:1"})
    leaf(propa, "defect", _propa_defect, space={"required": True},
         action={"required": True}, E={"required": True}, g={"required": True})
    leaf(propa, "average", _propa_average, space={"required": True},
         action={"required": True}, phi={"required": True}, E={"required": True})
    leaf(propa, "witness", _propa_witness, space={"required": True},
         phi={"required": True}, u={"default": "ball:1"}, epsilons={"required": True})

    roe = top.add_parser("roe").add_subparsers(dest="cmd", required=True)
    leaf(roe, "propagation", _roe_propagation, space={"required": True},
         op={"required": True}, metric={"choices": ["space", "xg"], "default": "space"},
         action={"default": None}, mode={"choices": ["isometric", "general"],
                                         "default": "isometric"})
    leaf(roe, "translate", _roe_translate, space={"required": True},
         action={"required": True}, g={"required": True})
    leaf(roe, "conjugate", _roe_conjugate, space={"required": True},
         action={"required": True}, op={"required": True}, g={"required": True})
    leaf(roe, "decompose", _roe_decompose, space={"required": True},
         action={"required": True}, op={"required": True},
         R={"type": float, "required": True}, F={"required": True})
    leaf(roe, "defect", _roe_defect, space={"required": True},
         action={"required": True}, op={"required": True},
         R={"type": float, "required": True}, F={"required": True})
    leaf(roe, "hom-check", _roe_hom_check, space={"required": True},
         action={"required": True}, t={"required": True}, s={"required": True},
         g={"required": True}, h={"required": True})
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    args = parser.parse_args(argv)
    digests: dict[str, str] = {}
    started = time.time()
    try:
        value, code = args.handler(args, digests)
    except NotDecomposableError as exc:
        print(f"error: operator not decomposable: {exc}", file=sys.stderr)
        return 2
    except CoarselabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: bad input: {exc}", file=sys.stderr)
        return 2
    params = {
        k: v
        for k, v in vars(args).items()
        if k not in ("handler", "out") and not callable(v)
    }
    manifest = {
        "command": "coarselab " + " ".join(argv),
        "inputs": digests,
        "parameters": _plain(params),
        "version": __version__,
        "wall_time_s": round(time.time() - started, 6),
    }
    if getattr(args, "format", "json") == "text":
        report = render_text({"manifest": manifest, "value": value})
    else:
        report = canonical_dumps({"manifest": manifest, "value": value})
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(report + "\n")
    else:
        print(report)
    return code


if __name__ == "__main__":
    sys.exit(main())
