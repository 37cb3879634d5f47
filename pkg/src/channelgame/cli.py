"""Command-line front end.

Exit status: 0 success, 1 computational refusal, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import analytic
from .analytic import bounds_for, bounds_from_costs, figure1_csv, figure1_data, table1, table1_csv
from .closedform import CatalogueLimitError
from .cost import all_node_costs, breakdowns_to_csv, social_cost
from .equilibrium import (ExhaustiveLimitError, best_response_dynamics, check_nash_exhaustive,
                          check_nash_restricted, lemma_properties_scan)
from .feegame import bipartite_free_fee_verdict, lemma3_predicate, star_fee_equilibrium
from .model import (GameParams, Uniform, fees_from_json, format_decimal, format_rational,
                    homogeneous_scenario, parse_rational, profile_from_json, profile_to_json,
                    require_valid, scenario_from_json)
from .plot import band_svg
from .topology import Family, generate, parse_family


class UsageError(Exception):
    pass


def _rational(text):
    try:
        return parse_rational(text)
    except (ValueError, TypeError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _family(text):
    if text.strip().lower() == "bipartite":
        return Family("bipartite")
    try:
        return parse_family(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _emit(obj, fmt: str, table: str, csv_text: str | None = None) -> None:
    if fmt == "json":
        print(json.dumps(obj, indent=2))
    elif fmt == "csv":
        if csv_text is None:
            raise UsageError("csv output is not available for this command")
        sys.stdout.write(csv_text)
    else:
        print(table)


def _load_json(path):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc


def _load_game(args):
    params, profile, policy = profile_from_json(_load_json(args.profile))
    require_valid(profile, params)
    if getattr(args, "fee", None) is not None:
        policy = Uniform(args.fee)
    if policy is None:
        raise UsageError("no fee given: pass --fee or add fee_policy to the profile file")
    if getattr(args, "scenario", None):
        scenario = scenario_from_json(_load_json(args.scenario))
    else:
        scenario = homogeneous_scenario(params)
    return params, profile, policy, scenario


def detect_family(profile) -> Family | None:
    n = profile.n_nodes
    candidates = [Family(name) for name in ("path", "star", "two-star", "clique")]
    candidates += [Family("bipartite", c) for c in range(2, n // 2 + 1)]
    for fam in candidates:
        try:
            if generate(fam, n) == profile:
                return fam
        except ValueError:
            continue
    return None


# commands ------------------------------------------------------------------

def cmd_bounds(args):
    family = args.family
    if family.name == "bipartite" and args.centers is not None:
        family = Family("bipartite", args.centers)
    elif args.centers is not None and family.name != "bipartite":
        raise UsageError("--centers only applies to the bipartite family")
    if family.name == "bipartite" and family.c is None:
        raise UsageError("bipartite needs --centers")
    params = GameParams(args.nodes, args.blockchain_fee, args.k)
    params.require_analytic()
    if family.name == "path":
        v = analytic.path_verdict(params, args.fee if args.fee is not None else 0)
        _emit({"family": "path", "status": v.status}, args.format, f"path: {v.status}")
        return 0
    rep = bounds_from_costs(family, args.nodes) if args.derived else bounds_for(family, params)
    doc = rep.to_json(params)
    lines = [f"family {family}  N={args.nodes}  (values in F_B/k units; money = value * {format_rational(params.unit)})"]
    for c in rep.conditions:
        lines.append(f"  {c.label:<20} {c.direction:<5} {format_decimal(c.value):>14}  {format_rational(c.value)}")
    lo = rep.active_lower
    hi = rep.active_upper
    lines.append(f"lower {format_decimal(rep.lower)}" + (f"  [{lo.label}]" if lo else "  [none]")
                 + f"  money {format_decimal(rep.lower * params.unit)}")
    if hi:
        lines.append(f"upper {format_decimal(hi.value)}  [{hi.label}]  money {format_decimal(hi.value * params.unit)}")
    else:
        lines.append("upper none")
    lines.append("feasible " + ("empty" if rep.feasible is None else "nonempty"))
    csv_rows = ["condition_label,direction,value_exact,value_decimal"] + [
        f"{c.label},{c.direction},{format_rational(c.value)},{format_decimal(c.value)}" for c in rep.conditions]
    _emit(doc, args.format, "\n".join(lines), "\n".join(csv_rows) + "\n")
    return 0


def _parse_rows(text):
    rows = []
    for item in text.split(","):
        n, _, c = item.partition(":")
        try:
            rows.append((int(n), int(c)))
        except ValueError as exc:
            raise UsageError(f"bad row {item!r}; expected N:c") from exc
    return rows


def cmd_table1(args):
    rows = analytic.PUBLISHED_TABLE_ROWS if args.rows is None else _parse_rows(args.rows)
    try:
        result = table1(rows)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    lines = [f"{'N':>7} {'c':>6} {'lower':>14} {'upper':>14}  active lb / ub"]
    for r in result:
        lines.append(f"{r.n_nodes:>7} {r.c:>6} {r.lower_text:>14} {r.upper_text:>14}  "
                     f"{r.lower.label} / {r.upper.label}")
    _emit([r.to_json() for r in result], args.format, "\n".join(lines), table1_csv(result))
    return 0


def cmd_plot_bounds(args):
    if args.nodes <= 3:
        raise UsageError("--nodes must be > 3")
    reports = figure1_data(args.nodes)
    out = Path(args.output)
    out.write_text(band_svg(reports, f"Bipartite equilibrium band, N={args.nodes}"))
    if args.csv:
        Path(args.csv).write_text(figure1_csv(reports))
    empty = [r.family.c for r in reports if r.feasible is None]
    print(f"wrote {out} ({len(reports)} values of c); empty band at c = {empty or 'none'}")
    return 0


def cmd_cost(args):
    params, profile, policy, scenario = _load_game(args)
    costs = all_node_costs(profile, policy, scenario, params.blockchain_fee)
    sc = social_cost(profile, policy, scenario, params.blockchain_fee)
    doc = {"nodes": [{"node": c.node, "channel_cost": format_rational(c.channel_cost),
                      "onchain_cost": format_rational(c.onchain_cost),
                      "sending_fees": format_rational(c.sending_fees),
                      "revenue": format_rational(c.revenue), "total": format_rational(c.total)}
                     for c in costs],
           "social_cost": format_rational(sc.social_cost), "mu": sc.mu, "b": sc.b,
           "optimum": format_rational(sc.optimum), "is_social_optimum": sc.is_social_optimum}
    lines = [f"{'node':>4} {'channels':>12} {'on-chain':>12} {'fees paid':>12} {'revenue':>12} {'total':>12}"]
    d = args.digits
    for c in costs:
        lines.append(f"{c.node:>4} " + " ".join(f"{format_decimal(v, d):>12}" for v in (
            c.channel_cost, c.onchain_cost, c.sending_fees, c.revenue, c.total)))
    lines.append(f"social cost {format_rational(sc.social_cost)} (mu={sc.mu}, b={sc.b}); "
                 f"optimum {format_rational(sc.optimum)}")
    _emit(doc, args.format, "\n".join(lines), breakdowns_to_csv(costs, d))
    return 0


def cmd_nash(args):
    params, profile, policy, scenario = _load_game(args)
    fb = params.blockchain_fee
    if args.mode == "exhaustive":
        verdict = check_nash_exhaustive(profile, policy, scenario, fb, args.allow_duplicates)
    else:
        family = args.family or detect_family(profile)
        if family is None:
            raise UsageError("profile is not a named family; pass --family or use --mode exhaustive")
        verdict = check_nash_restricted(profile, policy, scenario, family, fb)
    doc = verdict.to_json()
    text = verdict.status
    if verdict.witness:
        w = verdict.witness
        text += (f"\nnode {w.node} deviates to {list(w.alternative)}: "
                 f"{format_rational(w.old_cost)} -> {format_rational(w.new_cost)}")
    elif verdict.ties:
        text += f" ({verdict.ties} cost-equal deviations)"
    _emit(doc, args.format, text)
    return 0


def cmd_dynamics(args):
    params, profile, policy, scenario = _load_game(args)
    trace = best_response_dynamics(profile, policy, scenario, params.blockchain_fee, args.max_rounds)
    final = trace.final
    sc = social_cost(final, policy, scenario, params.blockchain_fee)
    doc = {"converged": trace.converged, "rounds": trace.rounds,
           "moves": [{"round": r, "node": u, "strategy": list(s)} for r, u, s in trace.moves],
           "final": profile_to_json(params, final, policy),
           "social_cost": format_rational(sc.social_cost),
           "ratio_to_optimum": format_rational(sc.ratio_to_optimum)}
    lines = [f"{'converged' if trace.converged else 'not converged'} after {trace.rounds} round(s)"]
    lines += [f"  round {r}: node {u} -> {list(s)}" for r, u, s in trace.moves]
    lines.append(f"final channels {final.channels()}")
    lines.append(f"social cost {format_rational(sc.social_cost)} "
                 f"({format_decimal(sc.ratio_to_optimum)} x optimum)")
    _emit(doc, args.format, "\n".join(lines))
    return 0


def cmd_feegame(args):
    if args.fee_command == "lemma3":
        params, profile, _ = profile_from_json(_load_json(args.profile))
        k = args.k or params.k
        fees = fees_from_json(_load_json(args.fees))
        scenario = homogeneous_scenario(GameParams(params.n_nodes, params.blockchain_fee, k))
        res = lemma3_predicate(profile, fees, scenario, k)
        text = "holds" if res.holds else f"fails: {res.reason}"
        _emit(res.to_json(), args.format, text)
    elif args.fee_command == "bipartite":
        params = GameParams(args.nodes, args.blockchain_fee, args.k)
        fees = fees_from_json(_load_json(args.fees)) if args.fees else None
        v = bipartite_free_fee_verdict(params, args.centers, fees)
        text = f"{v.status}: {v.reason}"
        if v.active_lower is not None:
            text += f" ({v.active_lower.label} = {format_decimal(v.active_lower.value)} F_B/k)"
        _emit(v.to_json(), args.format, text)
    else:
        params = GameParams(args.nodes, args.blockchain_fee, args.k)
        res = star_fee_equilibrium(params, args.epsilon)
        text = (f"fee {format_rational(res.fee)}: {res.at_fee.status}; "
                f"bound + epsilon: {res.above_bound.status}; center revenue "
                f"{format_rational(res.center_revenue)} [{res.mode}]")
        _emit(res.to_json(), args.format, text)
    return 0


def cmd_lemma_scan(args):
    params = GameParams(args.nodes, args.blockchain_fee, args.k)
    rep = lemma_properties_scan(params, Uniform(args.fee), args.multiplicity)
    doc = rep.to_json()
    text = "\n".join(f"{k}: {v}" for k, v in doc.items() if k != "examples")
    _emit(doc, args.format, text)
    return 0


def cmd_generate(args):
    params = GameParams(args.nodes, args.blockchain_fee, args.k)
    profile = generate(args.family, args.nodes)
    policy = Uniform(args.fee) if args.fee is not None else None
    print(json.dumps(profile_to_json(params, profile, policy)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="channelgame", description="Payment-channel creation game analyzer")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, formats=("table", "json", "csv")):
        sp.add_argument("--format", choices=formats, default="table")

    def money(sp, k_default=1):
        sp.add_argument("--blockchain-fee", type=_rational, default=Fraction(1), metavar="F_B")
        sp.add_argument("-k", type=int, default=k_default, help="payments per ordered pair")

    sp = sub.add_parser("bounds", help="equilibrium fee bounds for a topology family")
    sp.add_argument("--family", type=_family, required=True, help="path|star|two-star|bipartite[:c]|clique")
    sp.add_argument("--nodes", type=int, required=True)
    sp.add_argument("--centers", type=int)
    sp.add_argument("--fee", type=_rational, help="fee for the path verdict")
    sp.add_argument("--derived", action="store_true", help="solve corners from the cost functions")
    money(sp)
    common(sp)
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("table1", help="bipartite bound table")
    sp.add_argument("--preset", choices=["paper"], default="paper")
    sp.add_argument("--rows", help="custom rows N:c,N:c,...")
    common(sp)
    sp.set_defaults(func=cmd_table1)

    sp = sub.add_parser("plot-bounds", help="SVG (and CSV) of the bipartite band over c")
    sp.add_argument("--nodes", type=int, required=True)
    sp.add_argument("--output", required=True)
    sp.add_argument("--csv")
    sp.set_defaults(func=cmd_plot_bounds)

    for name, func, help_ in (("cost", cmd_cost, "per-node costs"),
                              ("nash", cmd_nash, "equilibrium verdict"),
                              ("dynamics", cmd_dynamics, "round-robin best-response dynamics")):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--profile", required=True)
        sp.add_argument("--fee", type=_rational, help="uniform fee (overrides the profile file)")
        sp.add_argument("--scenario", help="payment scenario JSON (default: homogeneous)")
        common(sp, ("table", "json", "csv") if name == "cost" else ("table", "json"))
        sp.set_defaults(func=func)
        if name == "cost":
            sp.add_argument("--digits", type=int, default=7)
        if name == "nash":
            sp.add_argument("--mode", choices=["exhaustive", "restricted"], default="exhaustive")
            sp.add_argument("--family", type=_family)
            sp.add_argument("--allow-duplicates", action="store_true")
        if name == "dynamics":
            sp.add_argument("--max-rounds", type=int, default=20)

    sp = sub.add_parser("feegame", help="free-fee game analyses")
    fsub = sp.add_subparsers(dest="fee_command", required=True)
    f1 = fsub.add_parser("lemma3", help="zero-fee disjoint route predicate")
    f1.add_argument("--profile", required=True)
    f1.add_argument("--fees", required=True)
    f1.add_argument("-k", type=int)
    common(f1, ("table", "json"))
    f2 = fsub.add_parser("bipartite", help="complete bipartite graph under free fees")
    f2.add_argument("--nodes", type=int, required=True)
    f2.add_argument("--centers", type=int, required=True)
    f2.add_argument("--fees")
    money(f2, k_default=3)
    common(f2, ("table", "json"))
    f3 = fsub.add_parser("star-fee", help="star with fee just under its bound")
    f3.add_argument("--nodes", type=int, required=True)
    f3.add_argument("--epsilon", type=_rational, required=True)
    money(f3)
    common(f3, ("table", "json"))
    sp.set_defaults(func=cmd_feegame)

    sp = sub.add_parser("lemma-scan", help="classify every profile on a tiny network")
    sp.add_argument("--nodes", type=int, default=4)
    sp.add_argument("--fee", type=_rational, required=True)
    sp.add_argument("--multiplicity", type=int, default=2, choices=[1, 2])
    money(sp, k_default=2)
    common(sp, ("table", "json"))
    sp.set_defaults(func=cmd_lemma_scan)

    sp = sub.add_parser("generate", help="write a named profile as JSON")
    sp.add_argument("--family", type=_family, required=True)
    sp.add_argument("--nodes", type=int, required=True)
    sp.add_argument("--fee", type=_rational)
    money(sp)
    sp.set_defaults(func=cmd_generate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ExhaustiveLimitError, CatalogueLimitError) as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 1
    except (UsageError, ValueError) as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
