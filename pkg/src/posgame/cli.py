"""Command-line front end.

    posgame simulate   --variant weak-kconn --k 3 --n 60 --adversary random --reps 50
    posgame verify-gk  graph.txt --k 3 [--parts "0 1 2 3 4; 5 6 7 8 9"]
    posgame play       --variant weak-mindeg --n 8
    posgame solve      --game conn --n 4

Exit codes: 0 success, 1 a property or bound violation was detected,
2 usage or parse error.  POSGAME_PROFILE selects the default constants
profile for the k-connectivity variants.
"""

from __future__ import annotations

import argparse
import json
import statistics
import sys
from dataclasses import replace
from pathlib import Path
from typing import Iterable, Optional, TextIO

from .adversaries import KINDS, Adversary, GameContext
from .board import Board, Edge, Owner
from .engine import STRONG_VARIANTS, VARIANTS, GameSpec, Referee, Transcript, build, make_header, run_many
from .errors import BoardTooLarge, ScriptExhausted
from .gk import Partition, verify_membership
from .graphs import SimpleGraph, vertex_connectivity
from .solver import solve

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class ParseError(UsageError):
    pass


# -- config ---------------------------------------------------------------------------


def parse_overrides(items: Iterable[str]) -> dict:
    out = {}
    for item in items or ():
        if "=" not in item:
            raise UsageError(f"--set expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def spec_from_args(args: argparse.Namespace, seed: Optional[int] = None) -> GameSpec:
    spec = GameSpec(
        variant=args.variant,
        n=args.n,
        k=args.k,
        m=args.m,
        seed=args.seed if seed is None else seed,
        adversary=getattr(args, "adversary", "random"),
        maker=args.maker,
        profile=args.profile,
        overrides=parse_overrides(args.set),
        d=args.d,
        eps=args.eps,
        move_cap=args.move_cap,
    )
    try:
        spec.validate()
        spec.constants()  # type-checks the overrides
    except (KeyError, TypeError, ValueError) as e:
        raise UsageError(e.args[0] if e.args else str(e))
    return spec


# -- simulate -------------------------------------------------------------------------


def summarize(transcripts: list[dict]) -> dict:
    """Summary statistics computed from transcript JSON alone."""
    if not transcripts:
        return {"runs": 0}
    mover = "R" if transcripts[0]["header"]["variant"] in STRONG_VARIANTS else "M"
    bound = transcripts[0]["header"].get("bound")
    wins = [t for t in transcripts if t["result"]["winner"] == mover]
    moves = [t["result"]["mover_moves"] for t in wins]
    over = [t["header"]["seed"] for t in wins if bound is not None and t["result"]["mover_moves"] > bound]
    return {
        "runs": len(transcripts),
        "wins": len(wins),
        "win_rate": len(wins) / len(transcripts),
        "forfeits": sum(1 for t in transcripts if t["result"]["outcome"] == "forfeit"),
        "caps": sum(1 for t in transcripts if t["result"]["outcome"] == "cap"),
        "draws": sum(1 for t in transcripts if t["result"]["outcome"] == "draw"),
        "moves_min": min(moves) if moves else None,
        "moves_mean": round(statistics.fmean(moves), 2) if moves else None,
        "moves_max": max(moves) if moves else None,
        "bound": bound,
        "over_bound": over,
    }


def print_summary(s: dict, out: TextIO) -> None:
    rows = [
        ("runs", s["runs"]),
        ("wins", f"{s['wins']} ({100 * s['win_rate']:.1f}%)"),
        ("forfeits / caps / draws", f"{s['forfeits']} / {s['caps']} / {s['draws']}"),
        ("mover moves min/mean/max", f"{s['moves_min']} / {s['moves_mean']} / {s['moves_max']}"),
        ("bound", s["bound"]),
        ("runs over bound", len(s["over_bound"])),
    ]
    width = max(len(r[0]) for r in rows)
    for name, value in rows:
        print(f"{name:<{width}}  {value}", file=out)


def cmd_simulate(args: argparse.Namespace, out: Optional[TextIO] = None) -> int:
    out = out or sys.stdout
    specs = [spec_from_args(args, args.seed + r) for r in range(args.reps)]
    transcripts = run_many(specs, jobs=args.jobs)
    data = [t.to_json() for t in transcripts]
    if args.out:
        folder = Path(args.out)
        folder.mkdir(parents=True, exist_ok=True)
        for t in transcripts:
            name = f"{t.header['variant']}_n{t.header['n']}_k{t.header['k']}_m{t.header['m']}_seed{t.header['seed']}.json"
            (folder / name).write_text(t.dumps(indent=1))
    s = summarize(data)
    print(f"{args.variant}  n={args.n} k={args.k} m={args.m} adversary={args.adversary}", file=out)
    print_summary(s, out)
    if s["over_bound"]:
        return EXIT_VIOLATION
    if args.strict and s["wins"] < s["runs"]:
        return EXIT_VIOLATION
    return EXIT_OK


# -- verify-gk ------------------------------------------------------------------------


def parse_edge_list(text: str) -> SimpleGraph:
    """First line n, then one "u v" per line; lines starting with '#' are skipped."""
    lines = text.splitlines()
    body = [(i + 1, ln.strip()) for i, ln in enumerate(lines) if not ln.lstrip().startswith("#")]
    body = [(i, ln) for i, ln in body if ln]
    if not body:
        raise ParseError("empty graph file")
    first, head = body[0]
    try:
        n = int(head)
    except ValueError:
        raise ParseError(f"line {first}: expected the vertex count, got {head!r}")
    if n < 1:
        raise ParseError(f"line {first}: vertex count must be positive")
    g = SimpleGraph(n)
    for i, ln in body[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise ParseError(f"line {i}: expected 'u v', got {ln!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"line {i}: non-integer vertex in {ln!r}")
        if not (0 <= u < n and 0 <= v < n):
            raise ParseError(f"line {i}: vertex out of range [0, {n})")
        if u == v:
            raise ParseError(f"line {i}: self-loop at {u}")
        if g.has_edge(u, v):
            raise ParseError(f"line {i}: duplicate edge {u} {v}")
        g.add_edge(u, v)
    return g


def parse_parts(text: Optional[str], n: int, k: int) -> Partition:
    if not text:
        return Partition.blocks(n, k - 1)
    groups = []
    for chunk in text.split(";"):
        chunk = chunk.replace(",", " ").split()
        if chunk:
            try:
                groups.append(tuple(int(x) for x in chunk))
            except ValueError:
                raise ParseError(f"bad partition block {' '.join(chunk)!r}")
    p = Partition(tuple(groups))
    try:
        p.validate(n)
    except ValueError as e:
        raise ParseError(f"partition: {e}")
    return p


def cmd_verify_gk(args: argparse.Namespace, out: Optional[TextIO] = None) -> int:
    out = out or sys.stdout
    try:
        text = Path(args.graph).read_text()
    except OSError as e:
        raise UsageError(str(e))
    g = parse_edge_list(text)
    if args.k < 3:
        raise UsageError("G_k is defined for k >= 3")
    partition = parse_parts(args.parts, g.n, args.k)
    if len(partition) != args.k - 1:
        raise UsageError(f"expected {args.k - 1} parts, got {len(partition)}")
    # each block is read in cycle order and is its own witness for property (iii)
    cycles = [list(part) for part in partition.parts]
    cert = verify_membership(g, partition, args.k, cycles)
    for name, res in cert.results.items():
        extra = "" if res.passed else f"  witnesses: {res.witnesses[:8]}"
        print(f"({name:>3}) {'pass' if res.passed else 'FAIL'}{extra}", file=out)
    kappa = vertex_connectivity(g).connectivity
    cross = kappa >= args.k
    print(f"vertex connectivity {kappa} ({'>=' if cross else '<'} k = {args.k})", file=out)
    if cert.all_pass and not cross:
        print("certificate passes but connectivity is below k: checker disagreement", file=out)
    if args.json:
        print(json.dumps({"certificate": cert.to_json(), "connectivity": kappa}), file=out)
    return EXIT_OK if cert.all_pass and cross else EXIT_VIOLATION


# -- play -----------------------------------------------------------------------------


class SessionEnded(ScriptExhausted):
    pass


class HumanAdversary(Adversary):
    """Reads Breaker / Blue edges from a text stream, re-prompting on bad input."""

    name = "human"

    def __init__(self, stream: TextIO, out: TextIO, allowed=None):
        self.stream = stream
        self.out = out
        self.allowed = allowed
        self.entered: list[list[int]] = []

    def describe(self) -> dict:
        return {"kind": "scripted", "moves": self.entered}

    def move(self, board: Board, ctx: GameContext) -> Edge:
        while True:
            self.out.write("your edge (u v, q to quit)> ")
            self.out.flush()
            line = self.stream.readline()
            if not line or line.strip().lower() in ("q", "quit", "exit"):
                raise SessionEnded("session ended by the player")
            problem, e = check_input(line, board, self.allowed)
            if problem:
                print(f"rejected: {problem}", file=self.out)
                continue
            self.entered.append(list(e))
            return e


def check_input(line: str, board: Board, allowed=None) -> tuple[Optional[str], Optional[Edge]]:
    parts = line.replace(",", " ").split()
    if len(parts) != 2:
        return "enter two vertex numbers", None
    try:
        u, v = int(parts[0]), int(parts[1])
    except ValueError:
        return "vertices must be integers", None
    if not (0 <= u < board.n and 0 <= v < board.n):
        return f"vertices must lie in [0, {board.n})", None
    if u == v:
        return "self-loops are not edges", None
    if not board.is_free(u, v):
        who = "you" if board.owner(u, v) == Owner.TWO else "the strategy"
        return f"edge {u} {v} is already claimed by {who}", None
    if allowed is not None and not allowed[u] >> v & 1:
        return f"edge {u} {v} is not on this board", None
    return None, (min(u, v), max(u, v))


def describe_position(ref: Referee, out: TextIO) -> None:
    """What the engine prints after each strategy move."""
    mv = ref.moves[-1]
    board = ref.board
    me = Owner.ONE
    print(f"{mv['player']} claims {mv['edge'][0]} {mv['edge'][1]}  [stage {mv['stage']}]", file=out)
    degs = board.degrees(me)
    low = [v for v in range(board.n) if degs[v] == min(degs)]
    print(f"  min degree {min(degs)} at {low[:12]}{' ...' if len(low) > 12 else ''}; "
          f"opponent max degree {board.max_degree(Owner.TWO)}", file=out)
    if ref.spec.variant in ("weak-mindeg", "strong-mindeg"):
        print(f"  V0 = {[v for v in range(board.n) if degs[v] == 0]}", file=out)


class EchoReferee(Referee):
    def __init__(self, *a, out: TextIO, **kw):
        super().__init__(*a, **kw)
        self.out = out

    def play(self, who: Owner, e):
        super().play(who, e)
        if who == Owner.ONE and e is not None:
            describe_position(self, self.out)


def interactive(spec: GameSpec, stream: TextIO, out: TextIO) -> Transcript:
    setup = build(spec)
    human = HumanAdversary(stream, out, setup.allowed)
    ref = EchoReferee(spec, setup, human, out=out)
    result = ref.run()
    # recorded as a scripted game, so a finished session replays move for move
    played = replace(spec, adversary="scripted", script=human.entered)
    return Transcript(
        header=make_header(played, setup, human),
        moves=ref.moves,
        result=result,
        certificates=setup.certify(ref.board),
        audit=ref.audit,
        log=list(getattr(setup.strategy, "log", [])),
    )


def cmd_play(args: argparse.Namespace, stream: Optional[TextIO] = None, out: Optional[TextIO] = None) -> int:
    stream, out = stream or sys.stdin, out or sys.stdout
    spec = spec_from_args(args)
    role = "Blue" if spec.strong else "Breaker"
    print(f"{spec.variant} on K_{spec.n}: you are {role}; "
          f"{'Red moves first' if spec.strong else 'you move first'}", file=out)
    t = interactive(spec, stream, out)
    r = t.result
    print(f"result: {r['outcome']}, winner {r['winner']}"
          + (f" ({r['forfeit']['reason']})" if r["forfeit"] else ""), file=out)
    path = Path(args.out or "session.json")
    path.write_text(t.dumps(indent=1))
    print(f"transcript saved to {path}", file=out)
    return EXIT_OK


# -- solve ----------------------------------------------------------------------------


def cmd_solve(args: argparse.Namespace, out: Optional[TextIO] = None) -> int:
    out = out or sys.stdout
    rep = solve(args.game, args.n, args.k, args.strong)
    kind = "strong" if rep.strong else "weak"
    print(f"{kind} {args.game} game on K_{rep.n} (k={rep.k}): {rep.detail}", file=out)
    if rep.maker_wins:
        who = "first player" if rep.strong else "Maker"
        print(f"{who} wins; optimal number of moves: {rep.optimal_moves}", file=out)
    else:
        print("no forced win for " + ("the first player" if rep.strong else "Maker"), file=out)
    return EXIT_OK


# -- argument parsing -------------------------------------------------------------------


def _game_args(p: argparse.ArgumentParser, adversary: bool = True) -> None:
    p.add_argument("--variant", choices=VARIANTS, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--m", type=int, default=1, help="degree deficiency of the min-degree board graph")
    p.add_argument("--seed", type=int, default=0)
    if adversary:
        p.add_argument("--adversary", choices=sorted(KINDS), default="random")
    p.add_argument("--maker", choices=("default", "minimax"), default="default")
    p.add_argument("--profile", choices=("paper", "desk"), default=None,
                   help="constants profile (default: $POSGAME_PROFILE or desk)")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one strategy constant")
    p.add_argument("--d", type=int, default=80, help="matching subgame danger threshold")
    p.add_argument("--eps", type=float, default=0.1, help="matching subgame epsilon")
    p.add_argument("--move-cap", type=int, default=None)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="posgame", description="Positional games on the edges of K_n.")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run seeded games and summarise them")
    _game_args(sim)
    sim.add_argument("--reps", type=int, default=1)
    sim.add_argument("--out", help="directory for transcript files")
    sim.add_argument("--jobs", type=int, default=1)
    sim.add_argument("--strict", action="store_true", help="exit 1 unless every run is won")
    sim.set_defaults(func=cmd_simulate)

    ver = sub.add_parser("verify-gk", help="check the G_k properties of an edge-list file")
    ver.add_argument("graph")
    ver.add_argument("--k", type=int, required=True)
    ver.add_argument("--parts", help="blocks separated by ';', each listed in cycle order (default: k-1 contiguous blocks)")
    ver.add_argument("--json", action="store_true")
    ver.set_defaults(func=cmd_verify_gk)

    play = sub.add_parser("play", help="play Breaker or Blue against a strategy")
    _game_args(play, adversary=False)
    play.add_argument("--out", help="transcript path (default session.json)")
    play.set_defaults(func=cmd_play)

    sol = sub.add_parser("solve", help="exhaustive value of a game on K_n, n <= 5")
    sol.add_argument("--game", choices=("conn", "mindeg", "chord"), required=True)
    sol.add_argument("--n", type=int, required=True)
    sol.add_argument("--k", type=int, default=1)
    sol.add_argument("--strong", action="store_true")
    sol.set_defaults(func=cmd_solve)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, BoardTooLarge) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
