"""Rounding, repair, coverage-fix and tail-bound tests.

Frozen constants: 1 - exp(-2.5) computed with the math library at double
precision; the 99.9% two-sided normal quantile 3.290526731491894 from
standard tables.
"""

import math

import numpy as np
import pytest

from linksched.centralized import (
    RoundingOutcome,
    app_schedule,
    coverage_fix,
    pre_repair_average,
    randomized_round,
    repair,
    rounding_tail_bound,
)
from linksched.feasibility import check_schedule, throughput
from linksched.lp import FractionalSolution, build_lp, solve_lp
from linksched.radio import Link, NetworkInstance, Node, RadioParams

from util import random_instance

Z_999 = 3.290526731491894


def make_instance(nodes, links, alpha=4.0, beta=10.0, noise=0.0, tx_power=1.0):
    return NetworkInstance(
        nodes=tuple(Node(*n) for n in nodes),
        links=tuple(Link(*l) for l in links),
        radio=RadioParams(alpha=alpha, beta=beta, noise=noise, tx_power=tx_power),
    )


def crossfire(beta=10.0):
    return make_instance(
        nodes=[(0, 0.0, 0.0), (1, 1.0, 0.0), (2, 2.0, 0.0), (3, 3.0, 0.0)],
        links=[(0, 0, 1), (1, 3, 2)],
        beta=beta,
    )


def synthetic_fractional(instance, frame_length, values_by_column):
    """FractionalSolution with prescribed x-hat values (no solve)."""
    model = build_lp(instance, frame_length)
    values = np.zeros(model.n_vars)
    for (lid, t), v in values_by_column.items():
        values[model.column(lid, t)] = v
    return FractionalSolution(
        model=model, values=values, objective=float(model.objective @ values)
    )


class TestRounding:
    def test_reproducible(self):
        sol = solve_lp(build_lp(crossfire(20.0), 2))
        a = randomized_round(sol, 7)
        b = randomized_round(sol, 7)
        assert (a == b).all()

    def test_seed_changes_outcome(self):
        sol = solve_lp(build_lp(crossfire(20.0), 2))
        draws = {randomized_round(sol, s).tobytes() for s in range(64)}
        assert len(draws) > 1

    def test_negative_seed_rejected(self):
        sol = solve_lp(build_lp(crossfire(10.0), 1))
        with pytest.raises(ValueError):
            randomized_round(sol, -1)

    def test_degenerate_probabilities(self):
        inst = crossfire(10.0)
        sol = synthetic_fractional(inst, 2, {(0, 0): 1.0, (1, 1): 0.0})
        for seed in range(50):
            raw = randomized_round(sol, seed)
            assert raw[sol.model.column(0, 0)] == 1
            assert raw[sol.model.column(1, 1)] == 0

    def test_marginals_match_xhat(self):
        # every variable at 0.7; mean over 3000 seeds must sit inside the
        # 99.9% binomial band around 0.7 (aggregate over the 4 columns)
        inst = crossfire(10.0)
        sol = synthetic_fractional(
            inst, 2, {(l, t): 0.7 for l in (0, 1) for t in (0, 1)}
        )
        n_seeds = 3000
        total = np.zeros(sol.model.n_vars)
        for seed in range(n_seeds):
            total += randomized_round(sol, seed)
        mean = total.sum() / (n_seeds * sol.model.n_vars)
        band = Z_999 * math.sqrt(0.7 * 0.3 / (n_seeds * sol.model.n_vars))
        assert abs(mean - 0.7) <= band

    def test_streams_independent_across_columns(self):
        inst = crossfire(10.0)
        sol = synthetic_fractional(
            inst, 2, {(l, t): 0.5 for l in (0, 1) for t in (0, 1)}
        )
        n_seeds = 3000
        draws = np.zeros((n_seeds, sol.model.n_vars))
        for seed in range(n_seeds):
            draws[seed] = randomized_round(sol, seed)
        corr = np.corrcoef(draws, rowvar=False)
        off_diag = corr[~np.eye(corr.shape[0], dtype=bool)]
        assert np.abs(off_diag).max() < 4.0 / math.sqrt(n_seeds)

    def test_pre_repair_average(self):
        inst = crossfire(10.0)
        sol = synthetic_fractional(inst, 2, {})
        raw = np.array([1, 0, 1, 1], dtype=np.uint8)
        # three transmissions at unit rate over two slots
        assert pre_repair_average(sol, raw) == pytest.approx(1.5, rel=1e-12)


class TestRepair:
    def test_higher_xhat_wins_shared_receiver(self):
        # two senders into one receiver with x-hat 0.3 vs 0.7: the 0.7 link
        # survives the single-transmission repair
        inst = make_instance(
            nodes=[(0, 1.0, 0.0), (1, 0.0, 1.0), (2, 0.0, 0.0)],
            links=[(0, 0, 2), (1, 1, 2)],
        )
        sol = synthetic_fractional(inst, 1, {(0, 0): 0.3, (1, 0): 0.7})
        raw = np.array([1, 1], dtype=np.uint8)
        assert repair(inst, sol, raw) == [{1}]

    def test_tie_prefers_smaller_id(self):
        inst = make_instance(
            nodes=[(0, 1.0, 0.0), (1, 0.0, 1.0), (2, 0.0, 0.0)],
            links=[(0, 0, 2), (1, 1, 2)],
        )
        sol = synthetic_fractional(inst, 1, {(0, 0): 0.5, (1, 0): 0.5})
        raw = np.array([1, 1], dtype=np.uint8)
        assert repair(inst, sol, raw) == [{0}]

    def test_sinr_sweep_higher_xhat_wins(self):
        # crossfire at beta=20: the two links cannot share a slot (SINR 16);
        # the higher x-hat link is admitted first and the other would break
        # the slot, so it is dropped
        inst = crossfire(20.0)
        sol = synthetic_fractional(inst, 1, {(0, 0): 0.8, (1, 0): 0.9})
        raw = np.array([1, 1], dtype=np.uint8)
        assert repair(inst, sol, raw) == [{1}]

    def test_sinr_sweep_equal_xhat_tie(self):
        inst = crossfire(20.0)
        sol = synthetic_fractional(inst, 1, {(0, 0): 0.5, (1, 0): 0.5})
        raw = np.array([1, 1], dtype=np.uint8)
        # tie goes to the smaller id: link 0 admitted, link 1 dropped
        assert repair(inst, sol, raw) == [{0}]

    def test_conflicting_pair_resolves_across_slots(self):
        # both conflicting links rounded into slot 0 with equal x-hat: the
        # higher id loses the slot and the coverage fix re-places it into
        # the empty second slot
        inst = crossfire(20.0)
        sol = synthetic_fractional(
            inst, 2, {(0, 0): 0.6, (1, 0): 0.6, (0, 1): 0.2, (1, 1): 0.2}
        )
        raw = np.zeros(4, dtype=np.uint8)
        raw[sol.model.column(0, 0)] = 1
        raw[sol.model.column(1, 0)] = 1
        slots = repair(inst, sol, raw)
        assert slots == [{0}, set()]
        outcome = coverage_fix(inst, sol, slots)
        assert outcome.schedule.slots == (frozenset({0}), frozenset({1}))
        assert outcome.uncovered == ()

    def test_feasible_slot_untouched(self):
        inst = crossfire(10.0)
        sol = synthetic_fractional(inst, 2, {(0, 0): 0.6, (1, 0): 0.6})
        raw = np.zeros(4, dtype=np.uint8)
        raw[sol.model.column(0, 0)] = 1
        raw[sol.model.column(1, 0)] = 1
        assert repair(inst, sol, raw) == [{0, 1}, set()]

    def test_empty_assignment(self):
        inst = crossfire(10.0)
        sol = synthetic_fractional(inst, 2, {})
        raw = np.zeros(4, dtype=np.uint8)
        assert repair(inst, sol, raw) == [set(), set()]

    def test_repaired_slots_always_pass_checkers(self):
        for seed in range(25):
            inst = random_instance(seed, n_links=5, area=3.0)
            sol = solve_lp(build_lp(inst, 4))
            raw = randomized_round(sol, seed)
            slots = repair(inst, sol, raw)
            from linksched.feasibility import Schedule

            report = check_schedule(inst, Schedule.from_lists(4, slots))
            assert not report.rx_conflicts
            assert not report.tx_conflicts
            assert not report.half_duplex
            assert not report.sinr_violations


class TestCoverageFix:
    def test_place_into_empty_slot(self):
        inst = crossfire(20.0)
        sol = synthetic_fractional(
            inst, 2, {(0, 0): 0.9, (0, 1): 0.1, (1, 0): 0.2, (1, 1): 0.8}
        )
        outcome = coverage_fix(inst, sol, [{1}, set()], a_rand=0.5, rng_seed=3)
        # link 0 takes slot 0 (x-hat 0.9), evicting link 1 (0.2 < 0.9);
        # link 1 then lands in slot 1
        assert outcome.schedule.slots == (frozenset({0}), frozenset({1}))
        assert outcome.uncovered == ()
        assert outcome.a_rand == 0.5
        assert outcome.delta_a == pytest.approx(1.0 - 0.5, rel=1e-12)
        assert outcome.rng_seed == 3

    def test_unplaceable_link_reported(self):
        # single slot, beta=20: the two links cannot coexist and link 1 is
        # already there with equal x-hat, so link 0 cannot evict it
        inst = crossfire(20.0)
        sol = synthetic_fractional(inst, 1, {(0, 0): 0.5, (1, 0): 0.5})
        outcome = coverage_fix(inst, sol, [{1}])
        assert outcome.schedule.slots == (frozenset({1}),)
        assert outcome.uncovered == (0,)

    def test_forced_links_never_evicted(self):
        # link 0 evicts link 1 from the only slot; link 1 then finds the
        # slot held by a forced link with no eviction allowed
        inst = crossfire(20.0)
        sol = synthetic_fractional(inst, 1, {(0, 0): 0.9, (1, 0): 0.2})
        outcome = coverage_fix(inst, sol, [{1}])
        assert outcome.schedule.slots == (frozenset({0}),)
        assert outcome.uncovered == (1,)

    def test_weak_link_fails_everywhere(self):
        # second link too long to decode even alone (SNR 3.9 < 10)
        inst = make_instance(
            nodes=[(0, 0.0, 0.0), (1, 1.0, 0.0), (2, 10.0, 0.0), (3, 14.0, 0.0)],
            links=[(0, 0, 1), (1, 2, 3)],
            noise=1e-3,
        )
        sol = synthetic_fractional(inst, 2, {(0, 0): 1.0})
        outcome = coverage_fix(inst, sol, [{0}, set()])
        assert outcome.uncovered == (1,)
        assert outcome.schedule.slots == (frozenset({0}), frozenset())

    def test_radio_evictions_respect_priority(self):
        # shared receiver: entering link 0 (x-hat 0.6) may evict resident
        # link 1 (0.4) but not resident link 1 at 0.6 (not strictly less)
        inst = make_instance(
            nodes=[(0, 1.0, 0.0), (1, 0.0, 1.0), (2, 0.0, 0.0)],
            links=[(0, 0, 2), (1, 1, 2)],
        )
        sol = synthetic_fractional(inst, 1, {(0, 0): 0.6, (1, 0): 0.4})
        outcome = coverage_fix(inst, sol, [{1}])
        assert outcome.schedule.slots == (frozenset({0}),)
        assert outcome.uncovered == (1,)

        sol_tie = synthetic_fractional(inst, 1, {(0, 0): 0.6, (1, 0): 0.6})
        outcome_tie = coverage_fix(inst, sol_tie, [{1}])
        assert outcome_tie.schedule.slots == (frozenset({1}),)
        assert outcome_tie.uncovered == (0,)

    def test_bad_slot_count_rejected(self):
        inst = crossfire(10.0)
        sol = synthetic_fractional(inst, 2, {})
        with pytest.raises(ValueError):
            coverage_fix(inst, sol, [set()])


class TestAppSchedule:
    def test_easy_instance_full_coverage(self):
        outcome = app_schedule(crossfire(10.0), 1, seed=0)
        assert isinstance(outcome, RoundingOutcome)
        assert outcome.uncovered == ()
        assert outcome.schedule.slots == (frozenset({0, 1}),)
        assert outcome.lp_objective == pytest.approx(2.0, rel=1e-9)
        assert outcome.a_rand + outcome.delta_a == pytest.approx(2.0, rel=1e-9)

    def test_invariants_on_random_instances(self):
        inst_count = 0
        for seed in range(30):
            inst = random_instance(seed, n_links=4, area=3.0)
            outcome = app_schedule(inst, 3, seed=seed)
            inst_count += 1
            report = check_schedule(inst, outcome.schedule)
            assert not report.rx_conflicts
            assert not report.tx_conflicts
            assert not report.half_duplex
            assert not report.sinr_violations
            assert tuple(report.uncovered) == outcome.uncovered
            assert outcome.a_rand + outcome.delta_a == pytest.approx(
                throughput(inst, outcome.schedule), rel=1e-9, abs=1e-12
            )
        assert inst_count == 30

    def test_deterministic_given_seed(self):
        inst = random_instance(5, n_links=5, area=3.0)
        a = app_schedule(inst, 3, seed=11)
        b = app_schedule(inst, 3, seed=11)
        assert a == b


class TestRoundingTailBound:
    def test_frozen_value(self):
        # 1 - exp(-(0.5 + 0)^2 * 20 / 2) = 1 - exp(-2.5)
        assert rounding_tail_bound(0.5, 0.0, 20.0) == pytest.approx(
            0.9179150013761012, rel=1e-12
        )

    def test_monotone_in_a_hat(self):
        assert rounding_tail_bound(0.3, 0.0, 50.0) > rounding_tail_bound(0.3, 0.0, 5.0)

    def test_monotone_in_theta(self):
        assert rounding_tail_bound(0.6, 0.0, 10.0) > rounding_tail_bound(0.2, 0.0, 10.0)

    def test_bound_in_unit_interval(self):
        # upper end inclusive: 1 - exp(-x) rounds to 1.0 for large x
        for theta in (0.1, 0.5, 0.9):
            for ratio in (-theta / 2, 0.0, (1 - theta) / 2):
                for a_hat in (0.5, 5.0, 500.0):
                    assert 0.0 <= rounding_tail_bound(theta, ratio, a_hat) <= 1.0

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            rounding_tail_bound(0.0, 0.0, 10.0)
        with pytest.raises(ValueError):
            rounding_tail_bound(1.0, 0.0, 10.0)
        with pytest.raises(ValueError):
            rounding_tail_bound(0.5, -0.6, 10.0)
        with pytest.raises(ValueError):
            rounding_tail_bound(0.5, 0.5, 10.0)
        with pytest.raises(ValueError):
            rounding_tail_bound(0.5, 0.0, 0.0)
