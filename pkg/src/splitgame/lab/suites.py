"""Verification suites. Each checks one property over generated corpora and
records every counterexample as replayable text files."""

from __future__ import annotations

import itertools
import json
import random
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable

from ..core import ClockOrdinal, Structure, Vocabulary, canonical_key
from ..errors import UnknownSuite
from ..games import (
    DG,
    DUPLICATOR,
    EFC,
    SPOILER,
    cross_check_bounded,
    spoiler_rank,
    winner,
)
from ..logic import (
    Exists,
    Forall,
    Formula,
    SplitForall,
    dualize,
    quantifier_rank,
    subformula_closure,
)
from ..randgen import FormulaGenerator, random_structure
from ..semantics import (
    ADAPTED,
    STRICT,
    Evaluator,
    check_chain_union,
    covering_class_oracle,
    elementarity_failure,
    evaluate,
    skolem_closure,
)
from ..synth import (
    build_theta_mu,
    card_lt,
    distinguishing_sentence,
    encode_quantifier,
    no_branch,
    no_clique,
    no_desc_chain,
)
from ..textio import render, render_structure
from .corpus import CorpusSpec, Family, all_structures, generate_corpus


@dataclass
class Failure:
    case: str
    message: str
    artifacts: dict[str, str] = field(default_factory=dict)
    command: str | None = None


@dataclass
class SuiteReport:
    name: str
    cases: int = 0
    failures: list[Failure] = field(default_factory=list)
    wall_time: float = 0.0
    table: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_text(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        lines = [f"{self.name}: {status} ({self.cases} cases, {len(self.failures)} failures, {self.wall_time:.1f}s)"]
        for key, value in sorted(self.table.items()):
            lines.append(f"  {key}: {value}")
        lines.extend(f"  note: {n}" for n in self.notes)
        for f in self.failures[:20]:
            lines.append(f"  counterexample {f.case}: {f.message}")
            if f.command:
                lines.append(f"    reproduce: {f.command}")
        if len(self.failures) > 20:
            lines.append(f"  ... {len(self.failures) - 20} more")
        return "\n".join(lines)

    def to_json_lines(self) -> str:
        """Machine-readable report; wall time is left out so the output is
        byte-stable for a fixed seed."""
        head = {
            "suite": self.name,
            "passed": self.passed,
            "cases": self.cases,
            "failures": len(self.failures),
            "table": {k: self.table[k] for k in sorted(self.table)},
            "notes": self.notes,
        }
        lines = [json.dumps(head, sort_keys=True)]
        for f in self.failures:
            lines.append(
                json.dumps(
                    {"suite": self.name, "case": f.case, "message": f.message, "files": sorted(f.artifacts), "command": f.command},
                    sort_keys=True,
                )
            )
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SuiteConfig:
    """``nmax`` and ``samples`` override each suite's default corpus size and
    sample count."""

    seed: int = 0
    nmax: int | None = None
    samples: int | None = None

    def n(self, default: int) -> int:
        return default if self.nmax is None else self.nmax

    def k(self, default: int) -> int:
        return default if self.samples is None else self.samples


class _Recorder:
    def __init__(self, name: str):
        self.report = SuiteReport(name)

    def case(self, ok: bool, key: str, message: str = "", structures=(), formulas=(), command=None):
        self.report.cases += 1
        if ok:
            return
        artifacts = {}
        for label, S in structures:
            artifacts[f"{key}-{label}.str"] = render_structure(S, label)
        for label, phi in formulas:
            artifacts[f"{key}-{label}.fml"] = render(phi, indent=2) + "\n"
        if command:
            command = command.format(key=key)
        self.report.failures.append(Failure(key, message, artifacts, command))


def _solve_cmd(game: str, theta: int, clock) -> str:
    return f"splitgame solve --game {game} --left {{key}}-M.str --right {{key}}-N.str --theta {theta} --clock {clock}"


def _check_cmd(label: str) -> str:
    return f"splitgame check --structure {{key}}-{label}.str --formula {{key}}-phi.fml"


def _small_corpora(n: int) -> dict[str, list[Structure]]:
    return {
        "unary": generate_corpus(CorpusSpec(Family.UNARY, n_max=n)),
        "graphs": generate_corpus(CorpusSpec(Family.GRAPHS, n_max=n)),
        "posets": generate_corpus(CorpusSpec(Family.POSETS, n_max=n)),
    }


# -- suites -----------------------------------------------------------------


def suite_rank_collapse(cfg: SuiteConfig, rec: _Recorder):
    """Rank solver against the literal bounded game on every pair."""
    clocks = [ClockOrdinal.parse(c) for c in ("0", "1", "2", "3", "w", "w+1", "w*2")]
    n = cfg.n(3)
    grids = {
        "P": all_structures(Vocabulary.of({"P": 1}), n),
        "R": all_structures(Vocabulary.of({"R": 2}), n),
    }
    for vname, grid in grids.items():
        rec.report.table[f"structures[{vname}]"] = len(grid)
        for (i, M), (j, N) in itertools.product(enumerate(grid), repeat=2):
            for theta in (1, 2):
                for clock in clocks:
                    a = winner(EFC, M, N, theta, clock)
                    b = cross_check_bounded(EFC, M, N, theta, clock)
                    rec.case(
                        a == b,
                        f"{vname}{i}-{j}-t{theta}-c{clock}",
                        f"winner {a.value} but literal game gives {b.value}",
                        [("M", M), ("N", N)],
                        command=_solve_cmd("efc", theta, clock),
                    )


def suite_transitivity(cfg: SuiteConfig, rec: _Recorder):
    n = cfg.n(4)
    corpora = {
        "graphs": generate_corpus(CorpusSpec(Family.GRAPHS, n_max=n)),
        "unary": generate_corpus(CorpusSpec(Family.UNARY, n_max=n)),
    }
    for cname, corpus in corpora.items():
        for theta in (1, 2):
            ranks = [[spoiler_rank(EFC, A, B, theta) for B in corpus] for A in corpus]
            for beta in range(4):
                dup = [[not r.spoiler_wins(beta) for r in row] for row in ranks]
                m = len(corpus)
                for i, j, k in itertools.product(range(m), repeat=3):
                    if not (dup[i][j] and dup[j][k]):
                        continue
                    rec.case(
                        dup[i][k],
                        f"{cname}{i}-{j}-{k}-t{theta}-c{beta}",
                        "Duplicator wins M~N and N~P but not M~P",
                        [("M", corpus[i]), ("N", corpus[j]), ("P", corpus[k])],
                    )


def _sentence_bank(seed: int, vocab: Vocabulary, theta: int, beta: int, count: int) -> list[Formula]:
    rng = random.Random(f"{seed}-{vocab.relations}-{theta}-{beta}")
    gen = FormulaGenerator(rng, vocab, theta, leaf_prob=0.15)
    return [gen.sentence(beta) for _ in range(count)]


def suite_game_logic_sound(cfg: SuiteConfig, rec: _Recorder):
    """Duplicator-won pairs agree on random sentences of bounded rank and width."""
    count = cfg.k(500)
    for cname, corpus in _small_corpora(cfg.n(4)).items():
        vocab = corpus[0].vocab
        for theta in (1, 2):
            ranks = {(i, j): spoiler_rank(EFC, A, B, theta) for (i, A), (j, B) in itertools.combinations(enumerate(corpus), 2)}
            for beta in (1, 2, 3):
                bank = _sentence_bank(cfg.seed, vocab, theta, beta, count)
                truth = [[Evaluator(S).holds(phi) for phi in bank] for S in corpus]
                separated = 0
                for (i, j), r in ranks.items():
                    if r.spoiler_wins(beta):
                        separated += truth[i] != truth[j]
                        continue
                    diff = [s for s in range(count) if truth[i][s] != truth[j][s]]
                    rec.report.cases += count - 1
                    rec.case(
                        not diff,
                        f"{cname}{i}-{j}-t{theta}-b{beta}",
                        f"{len(diff)} sentences separate a Duplicator-won pair",
                        [("M", corpus[i]), ("N", corpus[j])],
                        [("phi", bank[diff[0]])] if diff else (),
                        command=_check_cmd("M"),
                    )
                won = sum(1 for r in ranks.values() if r.spoiler_wins(beta))
                rec.report.table[f"{cname} t{theta} b{beta} spoiler pairs separated by bank"] = f"{separated}/{won}"


def suite_distinguisher_complete(cfg: SuiteConfig, rec: _Recorder):
    for cname, corpus in _small_corpora(cfg.n(4)).items():
        for theta in (1, 2):
            for (i, M), (j, N) in itertools.product(enumerate(corpus), repeat=2):
                if i == j:
                    continue
                r = spoiler_rank(EFC, M, N, theta)
                if r.is_infinite:
                    continue
                phi = distinguishing_sentence(M, N, theta)
                ok = quantifier_rank(phi) <= r.natural and evaluate(M, phi) and not evaluate(N, phi)
                rec.case(
                    ok,
                    f"{cname}{i}-{j}-t{theta}",
                    f"extracted sentence (rank {quantifier_rank(phi)}, Spoiler rank {r}) does not separate",
                    [("M", M), ("N", N)],
                    [("phi", phi)],
                    command=f"splitgame distinguish --left {{key}}-M.str --right {{key}}-N.str --theta {theta}",
                )


def suite_covering(cfg: SuiteConfig, rec: _Recorder):
    grid = all_structures(Vocabulary.of({"R": 2}), cfg.n(3))
    for mu in (1, 2):
        phi = build_theta_mu(mu, "R")
        truth = []
        for i, S in enumerate(grid):
            got, want = evaluate(S, phi), covering_class_oracle(S, "R", mu)
            truth.append(want)
            rec.case(got == want, f"mu{mu}-s{i}", f"sentence says {got}, oracle says {want}", [("M", S)], [("phi", phi)], _check_cmd("M"))
        closure_pairs = 0
        for (i, M), (j, N) in itertools.combinations(enumerate(grid), 2):
            if truth[i] == truth[j]:
                continue
            # the class is closed under rank-2 equivalence at width mu+1
            dup = winner(EFC, M, N, mu + 1, 2) is DUPLICATOR
            closure_pairs += 1
            rec.case(
                not dup,
                f"closure-mu{mu}-{i}-{j}",
                "rank-2 equivalent structures disagree on class membership",
                [("M", M), ("N", N)],
                command=_solve_cmd("efc", mu + 1, 2),
            )
        rec.report.table[f"mu{mu} members"] = f"{sum(truth)}/{len(grid)}"
        rec.report.table[f"mu{mu} cross-class pairs checked"] = closure_pairs


def _tuples(S: Structure, theta: int, pred: Callable) -> bool:
    return any(pred(t) for t in itertools.product(S.universe, repeat=theta))


def suite_examples(cfg: SuiteConfig, rec: _Recorder):
    n = cfg.n(4)
    unary = generate_corpus(CorpusSpec(Family.UNARY, n_max=n))
    graphs = generate_corpus(CorpusSpec(Family.GRAPHS, n_max=n))
    posets = generate_corpus(CorpusSpec(Family.POSETS, n_max=n))
    trees = generate_corpus(CorpusSpec(Family.TREES, branch=2, depth=3, n_max=n))

    def strictly(S, rel, up):
        r = S.rel(rel)
        return lambda t: all(((t[i], t[i + 1]) if up else (t[i + 1], t[i])) in r for i in range(len(t) - 1))

    cases = []
    for theta in (2, 3):
        cases.append(("card_lt", theta, card_lt(theta, "P"), unary, lambda S, th: len(S.rel("P")) < th))
        cases.append((
            "no_clique", theta, no_clique(theta, "E"), graphs,
            lambda S, th: not any(
                all((a, b) in S.rel("E") for a, b in itertools.permutations(c, 2))
                for c in itertools.combinations(S.universe, th)
            ),
        ))
        cases.append(("no_desc_chain", theta, no_desc_chain(theta, "lt"), posets, lambda S, th: not _tuples(S, th, strictly(S, "lt", False))))
        cases.append((
            "aronszajn", theta, no_desc_chain(theta, "lt"), posets,
            lambda S, th: not any(
                all((a, b) in S.rel("lt") or (b, a) in S.rel("lt") for a, b in itertools.combinations(c, 2))
                for c in itertools.combinations(S.universe, th)
            ),
        ))
        cases.append(("no_branch", theta, no_branch(theta, "lt"), trees + posets, lambda S, th: not _tuples(S, th, strictly(S, "lt", True))))
    for name, theta, phi, corpus, oracle in cases:
        for i, S in enumerate(corpus):
            got, want = evaluate(S, phi), oracle(S, theta)
            rec.case(got == want, f"{name}-t{theta}-s{i}", f"sentence says {got}, oracle says {want}", [("M", S)], [("phi", phi)], _check_cmd("M"))


def suite_encoding(cfg: SuiteConfig, rec: _Recorder):
    rng = random.Random(cfg.seed)
    n = cfg.n(3)
    corpora = [generate_corpus(CorpusSpec(Family.UNARY, n_max=n)), generate_corpus(CorpusSpec(Family.GRAPHS, n_max=n))]
    for corpus in corpora:
        gen = FormulaGenerator(rng, corpus[0].vocab, 2)
        for s in range(cfg.k(40)):
            psi = gen.formula(rng.randint(0, 2), ("x", "y"))
            for theta in (1, 2, 3):
                xi = rng.randrange(theta)
                enc_e = encode_quantifier(psi, xi, theta, "x")
                enc_a = encode_quantifier(psi, xi, theta, "x", universal=True)
                plain_e, plain_a = Exists("x", psi), Forall("x", psi)
                for i, S in enumerate(corpus):
                    ev = Evaluator(S)
                    for y in S.universe:
                        env = {"y": y}
                        ok = ev.holds(enc_e, env) == ev.holds(plain_e, env) and ev.holds(enc_a, env) == ev.holds(plain_a, env)
                        rec.case(ok, f"enc{s}-t{theta}-s{i}-y{y}", "split encoding disagrees with the plain quantifier", [("M", S)], [("phi", enc_e)])


def suite_duality(cfg: SuiteConfig, rec: _Recorder):
    rng = random.Random(cfg.seed)
    vocabs = [
        Vocabulary.of({"E": 2}),
        Vocabulary.of({"P": 1, "Q": 1}),
        Vocabulary.of({"R": 2, "P": 1}, ["c"]),
    ]
    for s in range(cfg.k(1000)):
        vocab = rng.choice(vocabs)
        S = random_structure(rng, vocab, rng.randint(1, 4))
        gen = FormulaGenerator(rng, vocab, rng.randint(1, 3))
        phi = gen.formula(rng.randint(0, 3), ("x", "y"))
        env = {"x": rng.choice(S.universe), "y": rng.choice(S.universe)}
        neg = dualize(phi)
        for mode in (ADAPTED, STRICT):
            a, b = evaluate(S, phi, env, mode), evaluate(S, neg, env, mode)
            rec.case(a != b, f"dual{s}-{mode.value}", f"phi and its dual both evaluate to {a} at {env}", [("M", S)], [("phi", phi)])


def _random_split_sentence(rng, vocab, rank, width) -> Formula:
    gen = FormulaGenerator(rng, vocab, width, leaf_prob=0.2, split_prob=1.0)
    while True:
        phi = gen.sentence(rank)
        if isinstance(phi, SplitForall):
            return phi


def suite_union_chain(cfg: SuiteConfig, rec: _Recorder):
    rng = random.Random(cfg.seed)
    vocab = Vocabulary.of({"E": 2})
    all_links = 0
    for s in range(cfg.k(200)):
        top = random_structure(rng, vocab, rng.randint(3, cfg.n(6)), density=rng.choice((0.3, 0.5, 0.7)))
        T = list(subformula_closure(_random_split_sentence(rng, vocab, rng.randint(1, 2), 2)))
        if s % 2 == 0:
            order = list(top.universe)
            rng.shuffle(order)
            cuts = sorted(rng.sample(range(1, len(order)), 2)) if len(order) > 2 else [1, 1]
            sets = [order[:1], order[: cuts[0]], order[: cuts[1]], order]
            chain = [top.induced(x) for x in sets]
        else:
            # Skolem hulls of growing seeds give elementary links by design
            seeds = sorted(rng.sample(top.universe, 3))
            chain = [skolem_closure(top, T, seeds[: k + 1]) for k in range(3)] + [top]
            chain = [c for k, c in enumerate(chain) if k == 0 or set(chain[k - 1].universe) <= set(c.universe)]
        report = check_chain_union(chain, T)
        all_links += report.all_adjacent
        rec.case(
            report.consistent_with_union_lemma,
            f"chain{s}",
            "every link is elementary but the ends are not",
            [(f"M{k}", c) for k, c in enumerate(chain)],
        )
    rec.report.table["chains with every link elementary"] = all_links


def suite_skolem_lst(cfg: SuiteConfig, rec: _Recorder):
    rng = random.Random(cfg.seed)
    vocabs = [Vocabulary.of({"E": 2}), Vocabulary.of({"lt": 2}), Vocabulary.of({"P": 1, "R": 2}, ["c"])]
    sizes = Counter()
    for s in range(cfg.k(100)):
        vocab = rng.choice(vocabs)
        M = random_structure(rng, vocab, rng.randint(2, cfg.n(6)))
        gen = FormulaGenerator(rng, vocab, 2, leaf_prob=0.2)
        roots = [gen.formula(rng.randint(1, 2), ("x",)[: rng.randint(0, 1)]) for _ in range(2)]
        T = list(subformula_closure(roots))
        seed = rng.sample(M.universe, rng.randint(1, max(1, M.size // 2)))
        mode = ADAPTED if s % 4 else STRICT
        M0 = skolem_closure(M, T, seed, mode)
        sizes[f"{M0.size}/{M.size}"] += 1
        bad = elementarity_failure(M0, M, T, mode)
        rec.case(
            bad is None,
            f"lst{s}",
            "Skolem hull is not elementary" + ("" if bad is None else f" at {render(bad[0])} {bad[1]}"),
            [("M", M), ("M0", M0)],
            [("phi", bad[0])] if bad else (),
        )
    rec.report.table["hull sizes"] = dict(sorted(sizes.items()))


def suite_dg_implies_ef(cfg: SuiteConfig, rec: _Recorder):
    table = Counter()
    beta1 = 0
    for cname, corpus in _small_corpora(cfg.n(4)).items():
        for theta in (1, 2):
            for (i, M), (j, N) in itertools.product(enumerate(corpus), repeat=2):
                rd, re_ = spoiler_rank(DG, M, N, theta), spoiler_rank(EFC, M, N, theta)
                table[f"t{theta} DG={rd} EFC={re_}"] += 1
                rec.case(
                    not (rd.is_infinite and not re_.is_infinite),
                    f"{cname}{i}-{j}-t{theta}",
                    f"DG rank {rd} but EFC rank {re_}",
                    [("M", M), ("N", N)],
                    command=f"splitgame solve --game dg --left {{key}}-M.str --right {{key}}-N.str --theta {theta}",
                )
                for beta in (1, 2, 3):
                    dg_dup = not rd.spoiler_wins(ClockOrdinal(beta, 0))
                    ef_spoiler = re_.spoiler_wins(beta)
                    if beta == 1:
                        beta1 += dg_dup and ef_spoiler
                        continue
                    rec.case(
                        not (dg_dup and ef_spoiler),
                        f"{cname}{i}-{j}-t{theta}-b{beta}",
                        f"Duplicator wins DG at w*{beta} but loses EFC at {beta}",
                        [("M", M), ("N", N)],
                    )
    rec.report.table.update(table)
    rec.report.notes.append(
        f"clock w*1 vs 1: {beta1} pairs where Duplicator survives DG but loses EFC "
        "(with clock w Spoiler must name a finite clock first, and every label can exceed it)"
    )


SUITES: dict[str, Callable[[SuiteConfig, _Recorder], None]] = {
    "duality": suite_duality,
    "encoding": suite_encoding,
    "examples": suite_examples,
    "covering": suite_covering,
    "transitivity": suite_transitivity,
    "game-logic-sound": suite_game_logic_sound,
    "distinguisher-complete": suite_distinguisher_complete,
    "dg-implies-ef": suite_dg_implies_ef,
    "rank-collapse": suite_rank_collapse,
    "union-chain": suite_union_chain,
    "skolem-lst": suite_skolem_lst,
}


def run_suite(name: str, config: SuiteConfig | None = None) -> SuiteReport:
    try:
        fn = SUITES[name]
    except KeyError:
        raise UnknownSuite(f"unknown suite {name!r}; choose from {', '.join(SUITES)}") from None
    rec = _Recorder(name)
    start = time.perf_counter()
    fn(config or SuiteConfig(), rec)
    rec.report.wall_time = time.perf_counter() - start
    rec.report.failures.sort(key=lambda f: f.case)
    return rec.report
