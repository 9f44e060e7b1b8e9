"""Law catalog, symbolic certification, and numerical evaluation."""

import numpy as np
import pytest

from qcorr import (
    CertificationError,
    CorrelationTerm,
    InvalidPartitionError,
    LawSpec,
    OptimizerConfig,
    certify,
    catalog,
    default_tolerance,
    evaluate,
    evaluate_term,
    gen_discord_law,
    gen_even_cycle_law,
    gen_odd_cycle_law,
    gen_one_measured_law,
    ghz,
    haar_random,
    law_by_name,
    laws_equivalent,
    product_random,
    relabel,
    relabel_law,
    resolve_laws,
    w_state,
)

FAST = OptimizerConfig(restarts=4, max_iterations=4000)


class TestTerms:
    def test_sides_are_sorted_and_disjoint(self):
        t = CorrelationTerm("EF", (2, 0), (1,))
        assert t.target == (0, 2)
        with pytest.raises(ValueError):
            CorrelationTerm("EF", (0,), (0,))

    def test_entropy_takes_no_second_set(self):
        assert CorrelationTerm("Entropy", (1,)).other == ()
        with pytest.raises(ValueError):
            CorrelationTerm("Entropy", (0,), (1,))

    def test_directed_kinds_need_second_set(self):
        for kind in ("EF", "Discord", "ClassicalCorr", "CondEntropy"):
            with pytest.raises(ValueError):
                CorrelationTerm(kind, (0,))

    def test_rejects_unknown_kind_and_zero_weight(self):
        with pytest.raises(ValueError):
            CorrelationTerm("Entanglement", (0,), (1,))
        with pytest.raises(ValueError):
            CorrelationTerm("EF", (0,), (1,), coefficient=0)

    def test_text_rendering(self):
        assert CorrelationTerm("EF", (0,), (1, 2)).text() == "E(0|1,2)"
        assert CorrelationTerm("Discord", (0,), (1,), -1).text() == "-D(0|1)"
        assert CorrelationTerm("Entropy", (0, 1), coefficient=2).text() == "2*S(0,1)"
        assert CorrelationTerm("ClassicalCorr", (1,), (0,)).text() == "J(1|0)"


class TestCatalog:
    def test_catalog_size_and_unique_names(self):
        laws = catalog()
        assert len(laws) == 20
        assert len({law.name for law in laws}) == 20

    def test_law_by_name_round_trip(self):
        for law in catalog():
            assert law_by_name(law.name) is law

    def test_unknown_name_rejected(self):
        with pytest.raises(ValueError):
            law_by_name("no_such_law")

    def test_three_party_conservation_text(self):
        law = law_by_name("tri_conservation")
        assert law.text() == "E(0|1) + E(0|2) = D(0|1) + D(0|2)"

    def test_law_spec_validates_indices_and_sides(self):
        term = CorrelationTerm("Entropy", (3,))
        with pytest.raises(ValueError):
            LawSpec("bad", 3, "Eq", (term,), (term,))
        ok = CorrelationTerm("Entropy", (0,))
        with pytest.raises(ValueError):
            LawSpec("bad", 3, "Eq", (), (ok,))
        with pytest.raises(ValueError):
            LawSpec("bad", 3, "Almost", (ok,), (ok,))


class TestCertification:
    def test_every_equality_telescopes_to_zero(self):
        for law in catalog():
            cert = certify(law)
            if law.relation == "Eq":
                assert cert.is_zero, law.name
                assert cert.residue_text() == "0"
            else:
                assert not cert.is_zero, law.name

    def test_instance_count_matches_measured_terms(self):
        for law in catalog():
            n_measured = sum(
                1 for t in law.terms() if t.kind in ("Discord", "ClassicalCorr")
            )
            assert len(certify(law).kw_instances) == n_measured, law.name

    def test_central_inequality_residue(self):
        cert = certify(law_by_name("four_central_ge"))
        assert cert.residue_text() == "S(0,1) + S(0,3) - S(0,1,2) - S(0,2,3)"

    def test_cycle_inequality_residue(self):
        cert = certify(law_by_name("four_cycle_ge"))
        assert cert.residue_text() == (
            "-S(0) + 2*S(0,1) + 2*S(0,3) - S(0,1,2) - S(0,1,3) - S(0,2,3)"
        )

    def test_paired_inequalities_share_residue_magnitude(self):
        ge = certify(law_by_name("four_central_ge"))
        le = certify(law_by_name("four_central_le"))
        assert {abs(c) for c, _ in ge.residue} == {abs(c) for c, _ in le.residue}
        assert [s for _, s in ge.residue] == [s for _, s in le.residue]

    def test_unbalanced_law_fails_certification(self):
        bad = LawSpec(
            "unbalanced",
            3,
            "Eq",
            (CorrelationTerm("EF", (0,), (1,)),),
            (CorrelationTerm("Discord", (0,), (2,)), CorrelationTerm("Discord", (1,), (2,))),
        )
        with pytest.raises(CertificationError):
            certify(bad)

    def test_all_party_measured_term_fails(self):
        bad = LawSpec(
            "no_remainder",
            2,
            "Eq",
            (CorrelationTerm("Discord", (0,), (1,)),),
            (CorrelationTerm("Entropy", (0,)),),
        )
        with pytest.raises(CertificationError):
            certify(bad)


class TestGenerators:
    @pytest.mark.parametrize(
        "gen,n,name",
        [
            (gen_odd_cycle_law, 3, "tri_cycle"),
            (gen_odd_cycle_law, 5, "five_cycle"),
            (gen_even_cycle_law, 4, "four_mixed_conservation"),
            (gen_discord_law, 3, "tri_discord_cycle"),
            (gen_discord_law, 4, "four_discord"),
            (gen_discord_law, 5, "five_discord"),
            (gen_one_measured_law, 4, "four_one_measured"),
        ],
    )
    def test_generators_reproduce_catalog(self, gen, n, name):
        assert laws_equivalent(gen(n), law_by_name(name))

    @pytest.mark.parametrize(
        "gen,bad_n",
        [
            (gen_odd_cycle_law, 4),
            (gen_odd_cycle_law, 1),
            (gen_even_cycle_law, 5),
            (gen_even_cycle_law, 2),
            (gen_discord_law, 2),
            (gen_one_measured_law, 2),
        ],
    )
    def test_generator_arity_errors(self, gen, bad_n):
        with pytest.raises(ValueError):
            gen(bad_n)

    def test_generated_families_certify(self):
        for n in (3, 5, 7, 9):
            assert certify(gen_odd_cycle_law(n)).is_zero
        for n in (4, 6, 8, 10):
            assert certify(gen_even_cycle_law(n)).is_zero
        for n in range(3, 11):
            assert certify(gen_discord_law(n)).is_zero
        for n in range(4, 11):
            assert certify(gen_one_measured_law(n)).is_zero

    def test_laws_equivalent_detects_differences(self):
        tri = law_by_name("tri_cycle")
        assert laws_equivalent(tri, tri)
        assert not laws_equivalent(tri, law_by_name("tri_conservation"))
        assert not laws_equivalent(tri, gen_odd_cycle_law(5))


class TestResolve:
    def test_all_is_the_catalog(self):
        assert resolve_laws("all") == catalog()

    def test_triplet_group_alias(self):
        names = [law.name for law in resolve_laws("five_central_triplet")]
        assert names == [
            "five_central_triplet_1",
            "five_central_triplet_2",
            "five_central_triplet_3",
            "five_central_triplet_sum",
        ]

    def test_generated_identifiers(self):
        (law,) = resolve_laws("gen:odd:7")
        assert law.n_parties == 7
        (law,) = resolve_laws("gen:discord:6")
        assert law.n_parties == 6

    @pytest.mark.parametrize(
        "ident", ["nope", "gen:odd", "gen:odd:x", "gen:weird:3", "gen:odd:3:4"]
    )
    def test_malformed_identifiers(self, ident):
        with pytest.raises(ValueError):
            resolve_laws(ident)


class TestTolerances:
    def test_tolerance_tiers(self):
        assert default_tolerance(law_by_name("tri_cycle")) == pytest.approx(1e-2)
        assert default_tolerance(law_by_name("tri_conservation")) == pytest.approx(1e-2)
        assert default_tolerance(law_by_name("four_central_ge")) == pytest.approx(5e-3)
        assert default_tolerance(law_by_name("four_cycle_le")) == pytest.approx(5e-3)
        assert default_tolerance(law_by_name("five_cycle")) == pytest.approx(2e-2)
        assert default_tolerance(law_by_name("four_discord")) == pytest.approx(2e-2)


class TestEvaluate:
    def test_ghz_conservation_is_exact(self):
        rep = evaluate(law_by_name("tri_conservation"), ghz(3))
        assert rep.status == "pass"
        assert rep.slack == pytest.approx(0.0, abs=1e-9)
        assert rep.converged

    def test_product_state_zeroes_every_term(self):
        rep = evaluate(law_by_name("tri_cycle"), product_random((2, 2, 2), seed=71), FAST)
        for tv in rep.lhs_terms + rep.rhs_terms:
            assert abs(tv.value) <= 1e-8
        assert rep.status == "pass"

    def test_w_state_entanglement_terms(self):
        rep = evaluate(law_by_name("tri_conservation"), w_state(3))
        for tv in rep.lhs_terms:
            assert tv.term.kind == "EF"
            assert tv.value == pytest.approx(0.5500477595827576, abs=1e-9)

    def test_tiny_tolerance_fails_cleanly(self):
        rep = evaluate(law_by_name("four_discord"), haar_random((2,) * 4, seed=72), FAST, tol=1e-12)
        assert rep.status == "fail"
        assert abs(rep.slack) > 1e-12

    def test_arity_mismatch_raises(self):
        with pytest.raises(InvalidPartitionError):
            evaluate(law_by_name("tri_cycle"), ghz(4))

    def test_report_dict_schema(self):
        rep = evaluate(law_by_name("tri_conservation"), ghz(3), state_id="ghz:3#0")
        doc = rep.to_dict()
        assert doc["law"] == "tri_conservation"
        assert doc["state"] == "ghz:3#0"
        assert doc["relation"] == "Eq"
        assert doc["status"] == "pass"
        assert doc["lhs_sum"] - doc["rhs_sum"] == pytest.approx(doc["slack"])
        assert len(doc["lhs_terms"]) == 2
        assert set(doc["lhs_terms"][0]) == {"term", "value", "converged"}

    def test_evaluation_is_deterministic(self):
        psi = haar_random((2, 2, 2), seed=73)
        a = evaluate(law_by_name("tri_cycle"), psi, FAST)
        b = evaluate(law_by_name("tri_cycle"), psi, FAST)
        assert a.slack == b.slack
        assert [tv.value for tv in a.lhs_terms] == [tv.value for tv in b.lhs_terms]

    def test_slack_sign_convention(self):
        # lhs minus rhs, so a Ge law passes iff slack >= -tol
        rep = evaluate(law_by_name("four_central_ge"), haar_random((2,) * 4, seed=74), FAST)
        assert rep.slack == rep.lhs_sum - rep.rhs_sum
        assert rep.status == ("pass" if rep.slack >= -rep.tolerance else "fail")


class TestSymmetries:
    @pytest.mark.parametrize("seed", [81, 82])
    def test_ef_term_swap_two_qubit_route(self, seed):
        psi = haar_random((2, 2, 2), seed=seed)
        fwd = evaluate_term(CorrelationTerm("EF", (0,), (1,)), psi, FAST)
        rev = evaluate_term(CorrelationTerm("EF", (1,), (0,)), psi, FAST)
        assert abs(fwd.value - rev.value) <= 1e-9

    def test_ef_term_swap_roof_route(self):
        psi = haar_random((2, 3, 2), seed=83)
        fwd = evaluate_term(CorrelationTerm("EF", (0,), (1,)), psi, FAST)
        rev = evaluate_term(CorrelationTerm("EF", (1,), (0,)), psi, FAST)
        assert abs(fwd.value - rev.value) <= 1e-9

    @pytest.mark.parametrize("perm", [(1, 2, 0), (2, 0, 1)])
    def test_relabeling_invariance_on_w_state(self, perm):
        law = law_by_name("tri_conservation")
        base = evaluate(law, w_state(3))
        moved = evaluate(relabel_law(law, perm), relabel(w_state(3), perm))
        assert abs(base.slack - moved.slack) <= 1e-9

    def test_relabeling_invariance_on_random_state(self):
        psi = haar_random((2, 2, 2), seed=84)
        perm = (1, 2, 0)
        law = law_by_name("tri_cycle")
        base = evaluate(law, psi, FAST)
        moved = evaluate(relabel_law(law, perm), relabel(psi, perm), FAST)
        assert abs(base.slack - moved.slack) <= 1e-9

    def test_relabel_law_rejects_bad_perm(self):
        with pytest.raises(InvalidPartitionError):
            relabel_law(law_by_name("tri_cycle"), (0, 0, 1))
