"""Acceptance suite: one test per criterion, pinned seeds, frozen tolerances.

Each test prints a single [PASS]/[FAIL] line (visible with ``pytest -s``).
Criterion 10 replays the numerical criteria from stored values, so this module
is meant to run as a whole and in order.
"""

import itertools
import time

import numpy as np
import pytest

from qcorr import (
    DensityMatrix,
    OptimizerConfig,
    certify,
    discord,
    discord_via_kw,
    ef_convex_roof,
    ef_two_qubit,
    evaluate,
    gen_discord_law,
    gen_even_cycle_law,
    gen_odd_cycle_law,
    gen_one_measured_law,
    ghz,
    kw_residual,
    law_by_name,
    parse_state_spec,
    realize,
    reduced_state,
    resolve_laws,
    w_state,
)
from qcorr._optim import derive_rng, haar_unitary
from qcorr.states import derive_seed

# pinned stream seeds; changing any of these changes every stored value
SEED_KW = 4202  # criteria 2 and 3 share one 3-qubit state stream
SEED_CROSS = 4204
SEED_FOUR = 4205
SEED_FIVE = 4206
SEED_DISCORD4 = 4207
SEED_ONE_MEASURED = 4208
SEED_ROOF = 4209

FOUR_PARTITE_INEQUALITIES = (
    "four_central_ge",
    "four_central_le",
    "four_all_ge",
    "four_all_le",
    "four_cycle_ge",
    "four_cycle_le",
)

# values stored by criteria 2-9 and replayed bit-for-bit by criterion 10
RESULTS: dict[str, object] = {}


def report(num: int, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {detail}")
    assert ok, f"criterion {num}: {detail}"


def kw_residuals(n_states: int) -> np.ndarray:
    spec = parse_state_spec("haar:2,2,2", seed=SEED_KW)
    out = np.empty((n_states, 6))
    for i in range(n_states):
        psi = realize(spec, i)
        for j, (a, b, c) in enumerate(itertools.permutations((0, 1, 2))):
            cfg = OptimizerConfig(seed=int(derive_seed(SEED_KW, 77, i, j)))
            out[i, j] = kw_residual(psi, (a,), (b,), (c,), cfg)
    return out


def tri_conservation_values(n_states: int):
    law = law_by_name("tri_conservation")
    spec = parse_state_spec("haar:2,2,2", seed=SEED_KW)
    slacks = np.empty(n_states)
    for i in range(n_states):
        cfg = OptimizerConfig(seed=int(derive_seed(SEED_KW, 88, i)))
        slacks[i] = evaluate(law, realize(spec, i), cfg).slack
    named = {}
    for name, psi in (("ghz3", ghz(3)), ("w3", w_state(3))):
        rep = evaluate(law, psi, OptimizerConfig(seed=SEED_KW))
        efs = [tv.value for tv in rep.lhs_terms + rep.rhs_terms if tv.term.kind == "EF"]
        named[name] = (rep.slack, tuple(efs))
    return slacks, named


def discord_route_gaps(n_states: int) -> np.ndarray:
    spec = parse_state_spec("haar:2,2,2", seed=SEED_CROSS)
    out = np.empty((n_states, 6))
    for i in range(n_states):
        psi = realize(spec, i)
        for j, (a, c) in enumerate(itertools.permutations((0, 1, 2), 2)):
            cfg = OptimizerConfig(seed=int(derive_seed(SEED_CROSS, 77, i, j)))
            rho = reduced_state(psi, (a, c))
            a_loc = 0 if a < c else 1
            direct = discord(rho, (a_loc,), (1 - a_loc,), cfg)
            out[i, j] = direct - discord_via_kw(psi, (a,), (c,), cfg)
    return out


def four_partite_slacks(indices) -> np.ndarray:
    cfg = OptimizerConfig()
    laws = [law_by_name(n) for n in FOUR_PARTITE_INEQUALITIES]
    spec = parse_state_spec("haar:2,2,2,2", seed=SEED_FOUR)
    out = np.empty((len(indices), len(laws)))
    for row, i in enumerate(indices):
        psi = realize(spec, i)
        for col, law in enumerate(laws):
            out[row, col] = evaluate(law, psi, cfg).slack
    return out


def five_cycle_reports(indices):
    cfg = OptimizerConfig()
    law = law_by_name("five_cycle")
    spec = parse_state_spec("haar:2,2,2,2,2", seed=SEED_FIVE)
    slacks, converged = [], []
    for i in indices:
        rep = evaluate(law, realize(spec, i), cfg)
        slacks.append(rep.slack)
        converged.append(all(tv.converged for tv in rep.lhs_terms + rep.rhs_terms))
    return np.array(slacks), converged


def law_slacks(law, base_seed: int, indices) -> np.ndarray:
    cfg = OptimizerConfig()
    spec = parse_state_spec("haar:2,2,2,2", seed=base_seed)
    return np.array([evaluate(law, realize(spec, i), cfg).slack for i in indices])


def roof_vs_closed_form(indices) -> np.ndarray:
    out = np.empty(len(indices))
    for row, i in enumerate(indices):
        rng = derive_rng(SEED_ROOF, i)
        rank = 1 + i % 4
        lam = rng.exponential(size=rank)
        lam = lam / lam.sum()
        v = haar_unitary(4, rng)[:, :rank]
        rho = DensityMatrix((2, 2), (v * lam) @ v.conj().T)
        cfg = OptimizerConfig(seed=int(derive_seed(SEED_ROOF, 77, i)))
        numeric, _ = ef_convex_roof(rho, (0,), cfg)
        out[row] = numeric - ef_two_qubit(rho)
    return out


class TestAcceptance:
    def test_criterion_01_symbolic_certification(self):
        certify.cache_clear()
        laws = [
            law_by_name(n)
            for n in (
                "tri_conservation",
                "tri_cycle",
                "tri_discord_cycle",
                "five_cycle",
                "four_alternating",
                "four_mixed_conservation",
                "four_mixed_symmetric",
                "four_discord",
                "five_discord",
                "four_one_measured",
            )
        ]
        laws += list(resolve_laws("five_central_triplet"))
        laws += [gen_odd_cycle_law(n) for n in (3, 5, 7, 9)]
        laws += [gen_even_cycle_law(n) for n in (4, 6, 8)]
        laws += [gen_discord_law(n) for n in range(3, 9)]
        laws += [gen_one_measured_law(n) for n in range(3, 9)]
        t0 = time.perf_counter()
        bad = [law.name for law in laws if not certify(law).is_zero]
        dt = time.perf_counter() - t0
        report(
            1,
            not bad and dt < 1.0,
            f"{len(laws)} equality laws certified with zero residue in {dt:.3f}s"
            + (f"; nonzero residue on {bad}" if bad else ""),
        )

    def test_criterion_02_purification_identity(self):
        t0 = time.perf_counter()
        residuals = kw_residuals(200)
        dt = time.perf_counter() - t0
        RESULTS["c2"] = residuals
        worst = float(np.abs(residuals).max())
        report(
            2,
            worst <= 5e-3 and dt < 120.0,
            f"max |E + J - S| = {worst:.3e} over {residuals.size} role "
            f"assignments (tol 5e-3) in {dt:.0f}s",
        )

    def test_criterion_03_three_party_conservation(self):
        slacks, named = tri_conservation_values(200)
        RESULTS["c3"] = (slacks, named)
        worst = float(np.abs(slacks).max())
        ghz_slack = named["ghz3"][0]
        w_slack, w_efs = named["w3"]
        ef_dev = max(abs(v - 0.550048) for v in w_efs)
        ok = (
            worst <= 1e-2
            and abs(ghz_slack) <= 1e-2
            and abs(w_slack) <= 1e-2
            and ef_dev <= 1e-6
        )
        report(
            3,
            ok,
            f"max |slack| = {worst:.3e} on 200 states (tol 1e-2); "
            f"ghz {ghz_slack:+.1e}, w {w_slack:+.1e}, "
            f"w EF terms within {ef_dev:.1e} of 0.550048",
        )

    def test_criterion_04_discord_route_agreement(self):
        t0 = time.perf_counter()
        gaps = discord_route_gaps(100)
        dt = time.perf_counter() - t0
        RESULTS["c4"] = gaps
        worst = float(np.abs(gaps).max())
        report(
            4,
            worst <= 5e-3 and dt < 120.0,
            f"max |direct - purification| = {worst:.3e} over {gaps.size} "
            f"ordered pairs (tol 5e-3) in {dt:.0f}s",
        )

    def test_criterion_05_four_partite_inequalities(self):
        t0 = time.perf_counter()
        slacks = four_partite_slacks(range(100))
        dt = time.perf_counter() - t0
        RESULTS["c5"] = slacks
        worst = 0.0
        ok = True
        for col, name in enumerate(FOUR_PARTITE_INEQUALITIES):
            column = slacks[:, col]
            if law_by_name(name).relation == "Ge":
                ok &= bool(column.min() >= -5e-3)
                worst = max(worst, float(max(0.0, -column.min())))
            else:
                ok &= bool(column.max() <= 5e-3)
                worst = max(worst, float(max(0.0, column.max())))
        report(
            5,
            ok and dt < 900.0,
            f"worst wrong-side slack = {worst:.3e} over 6 laws x 100 states "
            f"(tol 5e-3) in {dt:.0f}s",
        )

    def test_criterion_06_five_party_cycle(self):
        t0 = time.perf_counter()
        slacks, converged = five_cycle_reports(range(20))
        ghz_rep = evaluate(law_by_name("five_cycle"), ghz(5), OptimizerConfig())
        dt = time.perf_counter() - t0
        RESULTS["c6"] = (slacks, converged, ghz_rep.slack)
        worst = float(np.abs(slacks).max())
        ok = (
            worst <= 2e-2
            and all(converged)
            and abs(ghz_rep.slack) <= 1e-3
            and dt < 1800.0
        )
        report(
            6,
            ok,
            f"max |slack| = {worst:.3e} on 20 states (tol 2e-2), "
            f"converged {sum(converged)}/20, ghz slack {ghz_rep.slack:+.1e} "
            f"(tol 1e-3) in {dt:.0f}s",
        )

    def test_criterion_07_four_party_discord_law(self):
        t0 = time.perf_counter()
        slacks = law_slacks(gen_discord_law(4), SEED_DISCORD4, range(50))
        dt = time.perf_counter() - t0
        RESULTS["c7"] = slacks
        worst = float(np.abs(slacks).max())
        report(
            7,
            worst <= 2e-2 and dt < 1200.0,
            f"max |slack| = {worst:.3e} on 50 states (tol 2e-2) in {dt:.0f}s",
        )

    def test_criterion_08_one_measured_law(self):
        t0 = time.perf_counter()
        slacks = law_slacks(law_by_name("four_one_measured"), SEED_ONE_MEASURED, range(50))
        dt = time.perf_counter() - t0
        RESULTS["c8"] = slacks
        worst = float(np.abs(slacks).max())
        report(
            8,
            worst <= 2e-2 and dt < 1200.0,
            f"max |slack| = {worst:.3e} on 50 states (tol 2e-2) in {dt:.0f}s",
        )

    def test_criterion_09_roof_matches_closed_form(self):
        t0 = time.perf_counter()
        diffs = roof_vs_closed_form(range(200))
        dt = time.perf_counter() - t0
        RESULTS["c9"] = diffs
        lo, hi = float(diffs.min()), float(diffs.max())
        # the roof is one-sided up to the library's stated 1e-9 rounding floor
        report(
            9,
            lo >= -1e-9 and hi <= 5e-3 and dt < 300.0,
            f"roof - closed form in [{lo:.3e}, {hi:.3e}] on 200 states "
            f"(window [-1e-9, 5e-3]) in {dt:.0f}s",
        )

    def test_criterion_10_bitwise_determinism(self):
        missing = [k for k in ("c2", "c3", "c4", "c5", "c6", "c7", "c8", "c9") if k not in RESULTS]
        if missing:
            pytest.fail(f"criterion 10 needs stored values from {missing}")

        checks = []

        def same_array(tag, fresh, stored):
            checks.append((tag, np.array_equal(fresh, stored)))

        same_array("kw residuals", kw_residuals(200), RESULTS["c2"])

        slacks, named = tri_conservation_values(200)
        old_slacks, old_named = RESULTS["c3"]
        same_array("conservation slacks", slacks, old_slacks)
        checks.append(("conservation named states", named == old_named))

        same_array("discord route gaps", discord_route_gaps(100), RESULTS["c4"])

        subset5 = range(0, 100, 10)
        same_array(
            "four-partite slacks (10-state subset)",
            four_partite_slacks(subset5),
            RESULTS["c5"][list(subset5), :],
        )

        subset6 = range(0, 20, 4)
        fresh_slacks, fresh_conv = five_cycle_reports(subset6)
        old6_slacks, old6_conv, _ = RESULTS["c6"]
        same_array(
            "five-cycle slacks (5-state subset)", fresh_slacks, old6_slacks[list(subset6)]
        )
        checks.append(
            ("five-cycle convergence flags", fresh_conv == [old6_conv[i] for i in subset6])
        )

        subset7 = range(0, 50, 7)
        same_array(
            "discord-law slacks (8-state subset)",
            law_slacks(gen_discord_law(4), SEED_DISCORD4, subset7),
            RESULTS["c7"][list(subset7)],
        )

        same_array(
            "one-measured slacks",
            law_slacks(law_by_name("four_one_measured"), SEED_ONE_MEASURED, range(50)),
            RESULTS["c8"],
        )

        same_array("roof differences", roof_vs_closed_form(range(200)), RESULTS["c9"])

        bad = [tag for tag, ok in checks if not ok]
        n_ok = sum(ok for _, ok in checks)
        report(
            10,
            not bad,
            f"{n_ok}/{len(checks)} replayed value sets bit-for-bit identical"
            + (f"; mismatches in {bad}" if bad else ""),
        )
