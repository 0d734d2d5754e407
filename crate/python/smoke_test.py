"""Smoke test for the ranksel extension module."""

import math

import ranksel


def close(a, b, tol=1e-9):
    return abs(a - b) <= tol


def main():
    pool = ranksel.CandidatePool([1.0, 0.5, 0.0], [0.1, 0.3, 0.5], [2.0, 2.0, 2.0])
    assert len(pool) == 3
    pl = ranksel.RankingModel(pool, "plackett_luce", 1.0)
    e, h = math.e, math.exp(0.5)
    assert close(pl.perm_prob([0, 1, 2]), e / (e + h + 1) * h / (h + 1))

    star = ranksel.CandidatePool.superstar(5, 1.0, 0.0, 0.1, 0.4, 2.0)
    model = ranksel.RankingModel(star, "plackett_luce", 1.0)
    probs = model.superstar_index_probs()
    assert close(sum(probs), 1.0)
    assert close(probs[0], ranksel.superstar_index_probs(1.0, 0.0, 5, 1.0)[0])

    window = model.superstar_window()
    assert window["direction"] in ("first_free", "first_busy")
    assert 1 <= window["window_jstar"] <= 5

    report = model.posterior([0, 1, 1, 0, 1])
    assert 0 <= report["best_index"] < 5

    oracle = model.expected_utility("oracle")
    algo = model.expected_utility("superstar_algo")
    assert close(oracle, algo)
    assert model.expected_utility("follow_ranking") <= oracle + 1e-12
    metrics = model.metrics("kfree_2")
    assert 0.0 <= metrics["p_picked_busy"] <= 1.0

    sim = ranksel.run_sim(star, 3.0, 0.4, "kfree_5", ["follow_ranking", "kbusy_2"], 300, 4, 7)
    assert len(sim["steady_free_prob"]) == 5
    again = ranksel.run_sim(star, 3.0, 0.4, "kfree_5", ["follow_ranking", "kbusy_2"], 300, 4, 7)
    assert sim == again

    summary, rows = ranksel.run_experiment(
        'experiment = "strategy_map"\n'
        "[pool]\nn = 4\nv1 = 1.0\nv2 = 0.0\np1 = 0.2\np2 = 0.5\n"
        "[model]\nbeta_grid = [2.0, 1.0]\n"
    )
    assert summary["rows"] == 2
    assert rows.splitlines()[0].startswith("gamma,model,param")

    try:
        ranksel.CandidatePool([0.0, 1.0], [0.5, 0.5], [1.0, 1.0])
    except ValueError:
        pass
    else:
        raise AssertionError("increasing values should be rejected")

    print("ranksel smoke test passed")


if __name__ == "__main__":
    main()
