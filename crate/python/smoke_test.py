"""Smoke test for the pcmcts_py extension module.

Build and install first, e.g. `maturin develop -m crates/python/Cargo.toml`
(or `pip install ./crates/python`), then run `python python/smoke_test.py`.
"""

import math

import pcmcts_py as m


def main():
    assert m.preset_names() == ["merge-2a-easy", "merge-3a-tight", "narrow-5pct", "toy-parabola"]
    assert "root_vote" in m.strategy_names()
    assert m.CSV_HEADER == "scenario,strategy,workers,budget,rep,seed,success,steps,wall_ms"

    # UCT: 0.5 + 1.0 * sqrt(2 ln 10 / 2)
    assert abs(m.uct_value(0.5, 2, 10, 1.0) - (0.5 + math.sqrt(math.log(10.0)))) < 1e-12
    assert m.widening_bound(100, 1.0, 0.5, 1) == 10
    assert abs(m.similarity([0.0], [1.0], [(0.0, 2.0)], 4.0) - math.exp(-1.0)) < 1e-12

    cfg = m.SearchConfig.for_preset("toy-parabola")
    cfg.iteration_budget = 2000
    cfg.validate()
    (a,), = m.plan("toy-parabola", budget=2000, seed=7)
    assert abs(a - 0.7) < 0.05, a

    # same seed, same plan
    assert m.plan("narrow-5pct", "leaf_max", 4, 200, 3) == m.plan("narrow-5pct", "leaf_max", 4, 200, 3)

    ok, steps, trace = m.run_episode("toy-parabola", "root_vote", 2, 500, 1)
    assert steps == 1 and len(trace) == 1 and isinstance(ok, bool)

    csv = m.run_plan(
        """
        scenarios = ["toy-parabola"]
        strategies = ["single", "leaf_mean"]
        iteration_budgets = [100]
        worker_counts = [2]
        repetitions = 3
        base_seed = 5
        """
    )
    lines = csv.strip().splitlines()
    assert lines[0] == m.CSV_HEADER and len(lines) == 1 + 2 * 3
    summary = m.aggregate(csv).strip().splitlines()
    assert len(summary) == 1 + 2

    try:
        m.plan("no-such-scenario")
    except ValueError:
        pass
    else:
        raise AssertionError("unknown preset accepted")

    print("pcmcts_py smoke test passed")


if __name__ == "__main__":
    main()
