"""The ``splitgame`` command."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ..core import ClockOrdinal, Vocabulary
from ..errors import NoDistinguisher, SplitGameError
from ..games import DG, EFC, GameKind, spoiler_rank, spoiler_witness
from ..logic import subformula_closure
from ..semantics import ADAPTED, STRICT, evaluate, skolem_closure
from ..synth import distinguishing_sentence
from ..textio import SourceText, parse_corpus, parse_formula, parse_formulas, parse_structure, render, render_structure
from .corpus import CorpusSpec, Family, classify, generate_corpus
from .suites import SUITES, SuiteConfig, run_suite

EXIT_ERROR = 2
EXIT_EQUIVALENT = 3


def _structure(path: str):
    return parse_structure(SourceText.from_path(path))


def _mode(name: str):
    return STRICT if name == "strict" else ADAPTED


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_check(args) -> int:
    M = _structure(args.structure)
    phi = parse_formula(SourceText.from_path(args.formula), M.vocab)
    result = evaluate(M, phi, mode=_mode(args.mode))
    print("true" if result else "false")
    return 0 if result else 1


def _game(args) -> GameKind:
    if args.game == "dgvv":
        return GameKind.dgvv(args.alpha)
    return DG if args.game == "dg" else EFC


def cmd_solve(args) -> int:
    M, N = _structure(args.left), _structure(args.right)
    kind = _game(args)
    rank = spoiler_rank(kind, M, N, args.theta)
    clock = ClockOrdinal.parse(args.clock)
    who = "spoiler" if rank.spoiler_wins(clock) else "duplicator"
    print(f"winner: {who} (clock {clock})")
    print(f"rank: {rank}")
    if not rank.is_infinite:
        move = spoiler_witness(kind, M, N, args.theta)
        if move is not None:
            print(f"spoiler opens: {move}")
    return 0


def cmd_distinguish(args) -> int:
    M, N = _structure(args.left), _structure(args.right)
    try:
        phi = distinguishing_sentence(M, N, args.theta)
    except NoDistinguisher:
        print(f"equivalent: Duplicator wins with theta={args.theta} and no clock")
        return EXIT_EQUIVALENT
    _write(render(phi, indent=2) + "\n", args.out)
    return 0


def _load_corpus(directory: str):
    out = []
    for path in sorted(Path(directory).glob("*.str")):
        for name, S in parse_corpus(SourceText.from_path(path)):
            out.append((name or path.stem, S))
    if not out:
        raise SplitGameError(f"no structures found in {directory}")
    return out


def cmd_classify(args) -> int:
    named = _load_corpus(args.corpus)
    index = {id(S): name for name, S in named}
    classes = classify([S for _, S in named], args.theta, ClockOrdinal.parse(args.clock))
    for i, cls in enumerate(classes):
        print(f"class {i}: {' '.join(index[id(S)] for S in cls)}")
    return 0


def cmd_gen(args) -> int:
    vocab = Vocabulary.of({r: 2 for r in args.relations.split(",")}) if args.relations else None
    spec = CorpusSpec(
        Family(args.family),
        n_max=args.nmax,
        n_min=args.nmin,
        p_count=args.pcount,
        branch=args.branch,
        depth=args.depth,
        vocab=vocab,
        count=args.count,
        seed=args.seed,
    )
    corpus = generate_corpus(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    width = len(str(len(corpus)))
    for i, S in enumerate(corpus):
        name = f"{args.family}{i:0{width}d}"
        (out / f"{name}.str").write_text(render_structure(S, name), encoding="utf-8")
    print(f"wrote {len(corpus)} structures to {out}")
    return 0


def cmd_verify(args) -> int:
    names = list(SUITES) if args.all else [args.suite]
    cfg = SuiteConfig(seed=args.seed, nmax=args.nmax, samples=args.samples)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    failed = False
    with open(out / "report.jsonl", "w", encoding="utf-8") as jf:
        for name in names:
            report = run_suite(name, cfg)
            print(report.to_text(), flush=True)
            jf.write(report.to_json_lines())
            for f in report.failures:
                for fname, text in f.artifacts.items():
                    (out / fname).write_text(text, encoding="utf-8")
            failed |= not report.passed
    print(f"report: {out / 'report.jsonl'}")
    return 1 if failed else 0


def cmd_skolem(args) -> int:
    M = _structure(args.structure)
    T = subformula_closure(parse_formulas(SourceText.from_path(args.fragment), M.vocab))
    seed = [int(x) for x in args.seed_elems.split(",") if x.strip()]
    M0 = skolem_closure(M, T, seed, _mode(args.mode))
    _write(render_structure(M0, "hull"), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="splitgame", description="Split-quantifier logic, its games and verification suites.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check", help="evaluate a sentence in a structure")
    s.add_argument("--structure", required=True)
    s.add_argument("--formula", required=True)
    s.add_argument("--mode", choices=("adapted", "strict"), default="adapted")
    s.set_defaults(fn=cmd_check)

    s = sub.add_parser("solve", help="winner and Spoiler rank of a game")
    s.add_argument("--game", choices=("efc", "dg", "dgvv"), default="efc")
    s.add_argument("--left", required=True)
    s.add_argument("--right", required=True)
    s.add_argument("--theta", type=int, required=True)
    s.add_argument("--clock", default="inf")
    s.add_argument("--alpha", type=int, default=1, help="DGVV parameter")
    s.set_defaults(fn=cmd_solve)

    s = sub.add_parser("distinguish", help="separating sentence for a Spoiler-won pair")
    s.add_argument("--left", required=True)
    s.add_argument("--right", required=True)
    s.add_argument("--theta", type=int, required=True)
    s.add_argument("--out", help="write the sentence here instead of stdout")
    s.set_defaults(fn=cmd_distinguish)

    s = sub.add_parser("classify", help="EFC equivalence classes of a corpus directory")
    s.add_argument("--corpus", required=True)
    s.add_argument("--theta", type=int, required=True)
    s.add_argument("--clock", required=True)
    s.set_defaults(fn=cmd_classify)

    s = sub.add_parser("gen", help="write a corpus as .str files")
    s.add_argument("--family", choices=[f.value for f in Family], required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--nmax", type=int, default=3)
    s.add_argument("--nmin", type=int, default=1)
    s.add_argument("--pcount", type=int, default=1)
    s.add_argument("--branch", type=int, default=2)
    s.add_argument("--depth", type=int, default=2)
    s.add_argument("--count", type=int, default=20)
    s.add_argument("--relations", help="comma-separated binary relations for the random family")
    s.set_defaults(fn=cmd_gen)

    s = sub.add_parser("verify", help="run verification suites")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--suite", choices=list(SUITES))
    g.add_argument("--all", action="store_true")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--nmax", type=int)
    s.add_argument("--samples", type=int)
    s.add_argument("--out", default="splitgame-report", help="directory for the JSON-lines report and counterexamples")
    s.set_defaults(fn=cmd_verify)

    s = sub.add_parser("skolem", help="Skolem hull of a seed set")
    s.add_argument("--structure", required=True)
    s.add_argument("--fragment", required=True)
    s.add_argument("--seed-elems", required=True)
    s.add_argument("--mode", choices=("adapted", "strict"), default="adapted")
    s.add_argument("--out")
    s.set_defaults(fn=cmd_skolem)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (SplitGameError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
