import pytest
from hypothesis import given

from conftest import E, LT, P, R, formulas, sentences, structures
from splitgame.errors import ParseError, SemanticError, SourceSyntaxError
from splitgame.logic import TOP, Exists, SplitForall, rel
from splitgame.synth import build_theta_mu, card_lt, encode_quantifier, no_branch, no_clique, no_desc_chain
from splitgame.textio import (
    SourceText,
    parse_corpus,
    parse_formula,
    parse_formulas,
    parse_structure,
    render,
    render_corpus,
    render_structure,
)


class TestStructures:
    def test_unary(self):
        M = parse_structure("structure { universe 2; rel P/1 { (0) } }")
        assert M.size == 2 and M.rel("P") == {(0,)}

    def test_binary(self):
        M = parse_structure("structure { universe 3; rel R/2 { (0,1)(0,2) } }")
        assert M.rel("R") == {(0, 1), (0, 2)}

    def test_out_of_range(self):
        with pytest.raises(SemanticError):
            parse_structure("structure { universe 2; rel P/1 { (5) } }")

    def test_arity_mismatch(self):
        with pytest.raises(SemanticError):
            parse_structure("structure { universe 2; rel R/2 { (0) } }")

    def test_comments_and_constants(self):
        M = parse_structure("# a comment\nstructure s { universe 3; rel R/2 { } const c = 2; }")
        assert M.const("c") == 2

    def test_syntax_error_located(self):
        with pytest.raises(SourceSyntaxError) as info:
            parse_structure(SourceText("structure {\n  universe ;\n}", "bad.str"))
        assert info.value.origin == "bad.str" and info.value.line == 2

    @given(structures(max_size=4))
    def test_round_trip(self, M):
        assert parse_structure(render_structure(M, "m")) == M

    def test_corpus(self):
        named = [("a", parse_structure("structure { universe 1; rel P/1 { } }"))] * 2
        assert parse_corpus(render_corpus(named)) == named


class TestFormulas:
    def test_exists(self):
        assert parse_formula("exists x . P(x)") == Exists("x", rel("P", "x"))

    def test_convention_violation(self):
        with pytest.raises(SemanticError):
            parse_formula("splitall (x0 x1) { {} -> top; else -> P(x0) }")

    def test_else_fills_table(self):
        assert parse_formula("splitall (x0 x1) { else -> top }") == SplitForall(["x0", "x1"], [TOP] * 4)

    def test_render_compresses_to_else(self):
        text = render(SplitForall(["x0", "x1"], [TOP] * 4))
        assert "else" in text and "{0}" not in text

    def test_unknown_relation_against_vocab(self):
        with pytest.raises(SemanticError):
            parse_formula("exists x . Q(x)", P)

    def test_sequence(self):
        got = parse_formulas("exists x . P(x)  all y . not P(y)")
        assert len(got) == 2

    @pytest.mark.parametrize(
        "bad",
        ["exists . P(x)", "and { P(x)", "splitall () { else -> top }", "P(x", "x = ", "splitex (x) { {3} -> top }"],
    )
    def test_errors_are_located(self, bad):
        with pytest.raises(ParseError) as info:
            parse_formula(bad)
        assert info.value.line >= 1

    @pytest.mark.parametrize(
        "phi",
        [
            card_lt(3, "P"),
            no_clique(2, "E"),
            no_desc_chain(3, "lt"),
            no_branch(2, "lt"),
            build_theta_mu(2, "R"),
            encode_quantifier(rel("P", "x"), 1, 3),
        ],
    )
    def test_builders_round_trip(self, phi):
        assert parse_formula(render(phi)) == phi
        assert parse_formula(render(phi, indent=2)) == phi

    @given(formulas(vocab=R, width=3))
    def test_round_trip_random(self, phi):
        assert parse_formula(render(phi)) == phi

    @given(sentences(vocab=E))
    def test_round_trip_indented(self, phi):
        assert parse_formula(render(phi, indent=4)) == phi
