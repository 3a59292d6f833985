"""Command-line front end.

Every subcommand reads a game file and writes a JSON report (or, for
``bounds``, optionally CSV). Exit status: 0 success, 1 verification or
property failure (the report is still written), 2 input errors.
"""

import argparse
import csv
import io
import os
import sys
import time

import numpy as np

from . import bounds as B
from . import equilibrium as E
from . import solver as S
from .errors import GameFileError, NotFound, OLPError, OracleFailure
from .gamefile import digest, dumps, format_float, game_doc, matrix_doc, parse_game
from .numerics import check_simplex
from .perception import INF, Table, check_axioms, format_level, validate_table_family

#: Subcommands whose output depends on a random seed.
RANDOMIZED = {"maximin", "best-response", "check", "oracle"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _ci():
    return os.environ.get("OLP_CI", "") == "1"


def _vector(text, name):
    try:
        return np.array([float(t) for t in text.split(",")], dtype=np.float64)
    except ValueError:
        raise UsageError(f"--{name}: expected comma-separated numbers, got {text!r}") from None


def _strategy(text, dim, name):
    return check_simplex(_vector(text, name), dim, name)


def _level_arg(text):
    if text == "inf":
        return INF
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("level must be a positive integer or inf") from None
    if v < 1:
        raise argparse.ArgumentTypeError("level must be a positive integer or inf")
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--game", required=True, help="game file (JSON)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--seed", type=int, default=None)
    report_out = argparse.ArgumentParser(add_help=False)
    report_out.add_argument("--out", default="-", help="report path (default stdout)")

    p = _Parser(prog="olpgame", description="Limited-perception game toolkit.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("perceive", parents=[common, report_out], help="perceived matrices at a level")
    sp.add_argument("--level", type=_level_arg, required=True)

    sp = sub.add_parser("bounds", parents=[common, report_out], help="payoff bounds")
    sp.add_argument("--player", type=int, choices=(1, 2), default=1)
    sp.add_argument("--x", default=None, help="row strategy (not used with --sweep)")
    sp.add_argument("--y", required=True)
    sp.add_argument("--sweep", type=int, default=0, help="sweep x from e_1 to e_m over N+1 points")

    sp = sub.add_parser("maximin", parents=[common, report_out], help="solve the maximin problem")
    sp.add_argument("--tol", type=float, default=1e-6)
    sp.add_argument("--max-iters", type=int, default=2000)

    sp = sub.add_parser("best-response", parents=[common, report_out], help="opponent best response")
    sp.add_argument("--x", required=True)
    sp.add_argument("--perception-id", default=None)

    sp = sub.add_parser("check", parents=[common, report_out], help="property certificates")
    sp.add_argument("--property", required=True, choices=("axioms", "constant-gap", "narrowly-reversible", "stackelberg-gap"))
    sp.add_argument("--trials", type=int, default=200)
    sp.add_argument("--tol", type=float, default=None)

    sp = sub.add_parser("equilibrium", parents=[common, report_out], help="equilibrium search")
    sp.add_argument("--grid", type=int, default=64)
    sp.add_argument("--eps", type=float, default=1e-4)

    sp = sub.add_parser("compact-repr", parents=[common, report_out], help="compact equilibrium representation")
    sp.add_argument("--grid", type=int, default=64)
    sp.add_argument("--eps", type=float, default=1e-4)
    sp.add_argument("--eps-prime", type=float, default=None)
    sp.add_argument("--eval-perception", default=None)

    sp = sub.add_parser("reduce", parents=[common], help="general-sum to zero-sum reduction")
    sp.add_argument("--out", dest="game_out", required=True, help="path for the reduced game file")
    sp.add_argument("--report", default="-", help="report path (default stdout)")

    sp = sub.add_parser("oracle", parents=[common, report_out], help="sampled bounds against the closed form")
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--x", required=True)
    sp.add_argument("--y", required=True)
    sp.add_argument("--player", type=int, choices=(1, 2), default=1)
    return p


# ------------------------------------------------------------ helpers


def _seed(args):
    return 0 if args.seed is None else args.seed


def _player_view(game, player):
    """Perceived matrix and level whose concretization a player reasons over."""
    if player == 1:
        return game.perceived_row, game.c1
    if game.true_col is not None:
        return game.family.perceive(game.true_col, game.c2), game.c2
    return game.opponent_base, game.c2


def _perception(game, ident, seed):
    """Look up a narrow-set element by table id or by index into the narrow set."""
    if ident is None:
        return game.opponent_base if not game.zero_sum else game.perceived_row
    if isinstance(game.family, Table):
        tf = game.family.table
        if ident not in tf.universe:
            raise UsageError(f"--perception-id: unknown id {ident!r}")
        return tf.universe[ident]
    elements, _ = game.narrow_elements(200, seed)
    try:
        return elements[int(ident)]
    except (ValueError, IndexError):
        raise UsageError(f"--perception-id: expected an index below {len(elements)}") from None


def _label(game, u):
    if isinstance(game.family, Table):
        return game.family.table.id_of(u)
    return matrix_doc(u)


# ------------------------------------------------------------ commands


def cmd_perceive(game, args):
    fam = game.family
    row = game.true_row if game.true_row is not None else game.perceived_row
    out = {"level": format_level(args.level), "source": "true" if game.true_row is not None else "perceived"}
    out["perceived_row"] = matrix_doc(fam.perceive(row, args.level))
    if not game.zero_sum:
        col = game.true_col if game.true_col is not None else game.perceived_col
        out["perceived_col"] = matrix_doc(fam.perceive(col, args.level))
    return out, 0


def cmd_bounds(game, args):
    v, c = _player_view(game, args.player)
    y = _strategy(args.y, game.n, "y")
    if args.sweep:
        rows = []
        for i in range(args.sweep + 1):
            t = i / args.sweep
            x = np.zeros(game.m)
            x[0] += 1.0 - t
            x[-1] += t
            b = B.payoff_bounds(game.family, v, c, x, y)
            rows.append({"t": t, "x": x.tolist(), "lower": b.lower, "upper": b.upper})
        return {"player": args.player, "y": y.tolist(), "sweep": rows}, 0
    if args.x is None:
        raise UsageError("bounds needs --x or --sweep")
    x = _strategy(args.x, game.m, "x")
    b = B.payoff_bounds(game.family, v, c, x, y)
    return {"player": args.player, "x": x.tolist(), "y": y.tolist(), "lower": b.lower, "upper": b.upper}, 0


def cmd_maximin(game, args):
    res = S.solve_maximin(game, tol=args.tol, max_iters=args.max_iters, seed=_seed(args))
    return {
        "x_star": res.x_star.tolist(),
        "value": res.value,
        "convergence": res.report(),
        "swapped": game.swapped,
    }, 0


def cmd_best_response(game, args):
    x = _strategy(args.x, game.m, "x")
    v2 = _perception(game, args.perception_id, _seed(args))
    if game.zero_sum:
        y = S.best_response_upper(game, v2, game.c2, x, seed=_seed(args))
        b = B.payoff_bounds(game.family, v2, game.c2, x, y)
        achieved, which = b.upper, "upper"
    else:
        y = S.best_response_lower(game, v2, game.c2, x, seed=_seed(args))
        b = B.payoff_bounds(game.family, v2, game.c2, x, y)
        achieved, which = b.lower, "lower"
    return {"perception": _label(game, v2), "x": x.tolist(), "y": y.tolist(), "achieved": achieved, "bound": which}, 0


def _axioms(game, args):
    fam = game.family
    if isinstance(fam, Table):
        rep = validate_table_family(fam.table, check_odd=game.zero_sum)
        verdict = "holds" if rep.valid else "fails"
        return {"property": "axioms", "verdict": verdict, "witnesses": [list(v) for v in rep.violations], "details": {"universe": len(fam.table.universe)}, "notes": []}
    mats = [game.perceived_row] + ([] if game.zero_sum else [game.perceived_col])
    mats += [m for m in (game.true_row, game.true_col) if m is not None]
    viol, checked, skipped = check_axioms(fam, game.shape, args.trials, _seed(args), matrices=mats)
    fixed = [fam.same(fam.perceive(m, game.c1), m) for m in mats[: 1 if game.zero_sum else 2]]
    witnesses = [list(v) for v in viol] + [["fixed_point", i] for i, ok in enumerate(fixed) if not ok]
    return {
        "property": "axioms",
        "verdict": "fails" if witnesses else "holds",
        "witnesses": witnesses,
        "details": {"checked": checked, "skipped_ties": skipped, "seed": _seed(args)},
        "notes": [],
    }


def cmd_check(game, args):
    seed = _seed(args)
    if args.property == "axioms":
        rep = _axioms(game, args)
    elif args.property == "constant-gap":
        kw = {} if args.tol is None else {"tol": args.tol}
        rep = S.check_constant_gap(game.family, game.c1, n_trials=args.trials, seed=seed, **kw).as_dict()
    elif args.property == "narrowly-reversible":
        tol = 1e-6 if args.tol is None else args.tol
        rep = S.check_narrowly_reversible(game, n_x_samples=min(args.trials, 50), seed=seed, tol=tol).as_dict()
    else:
        tol = 1e-4 if args.tol is None else args.tol
        res = S.solve_maximin(game, seed=seed)
        probe = S.stackelberg_gap_probe(game, res.x_star, n_samples=args.trials, seed=seed)
        gap = probe.g_lower_est - probe.h1
        basis = S.attainability_basis(game)
        holds = "holds" if basis else "holds-up-to-sampling"
        rep = {
            "property": "stackelberg-gap",
            "verdict": holds if gap <= tol else "fails",
            "witnesses": [] if gap <= tol else [{"x": res.x_star.tolist(), "gap": gap, "seed": seed}],
            "details": {"x_star": res.x_star.tolist(), "h1": probe.h1, "g_upper": probe.g_upper, "g_lower_est": probe.g_lower_est, "gap": gap, "tol": tol},
            "notes": [f"analytic basis: {basis}"] if basis else ["no analytic criterion applies; the verdict rests on sampled perceptions"],
        }
    ok = rep["verdict"].startswith("holds") or rep["verdict"] == "not-applicable"
    return rep, 0 if ok else 1


def _equilibrium(game, args):
    return E.search_nash_table(game, x_grid_resolution=args.grid, eps=args.eps)


def _responses_doc(game, Ry):
    return [{"perception": _label(game, e), "response": y.tolist()} for e, y in Ry.as_list()]


def cmd_equilibrium(game, args):
    try:
        res = _equilibrium(game, args)
    except NotFound as exc:
        return {"found": False, "reason": str(exc)}, 1
    out = {"found": True, "x_star": res.x_star.tolist(), "responses": _responses_doc(game, res.responses), "verification": res.report.as_dict(), "candidates_tried": res.candidates_tried}
    if game.zero_sum:
        vh, vn, vs = E.value_ordering(game, res.x_star, res.responses)
        out["values"] = {"V_h": vh, "V_n": vn, "V_s": vs}
    return out, 0


def cmd_compact_repr(game, args):
    try:
        res = _equilibrium(game, args)
    except NotFound as exc:
        return {"found": False, "reason": str(exc)}, 1
    rep = E.build_compact_repr(game, res.x_star, res.responses, args.eps, args.eps_prime)
    doc = rep.as_dict()
    doc["anchors"] = [{"perception": _label(game, a), "response": y.tolist()} for a, y in rep.anchors]
    out = {"repr": doc}
    if args.eval_perception is not None:
        u = _perception(game, args.eval_perception, _seed(args))
        try:
            y = E.eval_compact_repr(game, rep, u)
        except OracleFailure as exc:
            out["eval"] = {"perception": _label(game, u), "error": str(exc)}
            return out, 1
        out["eval"] = {"perception": _label(game, u), "response": y.tolist()}
    return out, 0


def cmd_reduce(game, args):
    reduced, mapping = E.reduce_general_to_zero_sum(game)
    text = dumps(game_doc(reduced))
    with open(args.game_out, "w", encoding="utf-8") as fh:
        fh.write(text)
    return {"mapping": mapping.as_dict(), "reduced_game": os.path.basename(args.game_out), "reduced_narrow_set": len(reduced.narrow), "reduced_digest": digest(text)}, 0


def cmd_oracle(game, args):
    v, c = _player_view(game, args.player)
    x = _strategy(args.x, game.m, "x")
    y = _strategy(args.y, game.n, "y")
    exact = B.payoff_bounds(game.family, v, c, x, y)
    est = B.bounds_sampling_oracle(game.family, v, c, x, y, args.samples, _seed(args))
    slack = 1e-9
    inside = est.lower >= exact.lower - slack and est.upper <= exact.upper + slack
    return {
        "closed_form": exact.as_dict(),
        "sampled": est.as_dict(),
        "samples": args.samples,
        "inside": inside,
        "lower_gap": est.lower - exact.lower,
        "upper_gap": exact.upper - est.upper,
    }, 0 if inside else 1


COMMANDS = {
    "perceive": cmd_perceive,
    "bounds": cmd_bounds,
    "maximin": cmd_maximin,
    "best-response": cmd_best_response,
    "check": cmd_check,
    "equilibrium": cmd_equilibrium,
    "compact-repr": cmd_compact_repr,
    "reduce": cmd_reduce,
    "oracle": cmd_oracle,
}


def _bounds_csv(payload, m):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t"] + [f"x{i + 1}" for i in range(m)] + ["lower", "upper"])
    rows = payload.get("sweep") or [{"t": 0.0, **payload}]
    for r in rows:
        w.writerow([format_float(float(v)) for v in [r["t"], *r["x"], r["lower"], r["upper"]]])
    return buf.getvalue()


def _write(path, text, stdout):
    if path in (None, "-"):
        stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def run(argv=None, stdout=None, stderr=None):
    """Run one command; returns the exit status."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        stderr.write(f"olpgame: error: {exc}\n")
        return 2
    if _ci() and args.command in RANDOMIZED and args.seed is None:
        stderr.write(f"olpgame: error: {args.command} needs --seed when OLP_CI=1\n")
        return 2
    if args.format == "csv" and args.command != "bounds":
        stderr.write("olpgame: error: --format csv is only available for bounds\n")
        return 2
    start = time.perf_counter()
    try:
        with open(args.game, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        stderr.write(f"olpgame: error: cannot read {args.game}: {exc.strerror}\n")
        return 2
    try:
        game = parse_game(text)
        payload, code = COMMANDS[args.command](game, args)
    except GameFileError as exc:
        stderr.write(f"olpgame: error: {args.game}: {exc}\n")
        return 2
    except UsageError as exc:
        stderr.write(f"olpgame: error: {exc}\n")
        return 2
    except (OLPError, ValueError, KeyError) as exc:
        stderr.write(f"olpgame: error: {type(exc).__name__}: {exc}\n")
        return 2
    elapsed = 0 if _ci() else int(round((time.perf_counter() - start) * 1000))
    out_path = args.report if args.command == "reduce" else args.out
    if args.format == "csv":
        _write(out_path, _bounds_csv(payload, game.m), stdout)
        return code
    flags = {k: v for k, v in sorted(vars(args).items()) if k not in ("game", "out", "report", "game_out")}
    report = {
        "command": args.command,
        "inputs_digest": digest(text, dumps({k: str(v) for k, v in flags.items()})),
        "seed": args.seed,
        "game": game.describe(),
    }
    report.update(payload)
    report["elapsed_ms"] = elapsed
    _write(out_path, dumps(report), stdout)
    return code


def main():
    sys.exit(run())
