"""Smoke test for the lcsnav extension module.

    pip install --no-build-isolation -e crates/python
    python python/smoke_test.py
"""

import lcsnav

CORRIDOR = "6 3\n######\nS....G\n######\n"

def main():
    d = lcsnav.Domain.parse("6 1\nS....G\n")
    assert (d.width, d.height) == (6, 1)
    assert d.start == (0, 0) and d.goal == (5, 0)
    # start faces South: one turn, then five steps East
    assert d.optimal_length() == 6
    reached, cost, commands = d.naive_episode()
    assert reached and cost == 1.0, (reached, cost)
    assert commands[0] == "TurnLeft"
    assert lcsnav.Domain.parse(d.to_text()).to_text() == d.to_text()

    suite = lcsnav.office_suite(count=3, width=24, height=24, seed=3)
    naive = lcsnav.naive_cost(suite)
    assert naive.failures == 0 and naive.mean >= 1.0
    assert len(naive.per_domain) == 3

    policy = lcsnav.Policy.naive()
    assert len(policy) == 3
    assert abs(policy.evaluate(suite).mean - naive.mean) < 1e-12

    t = lcsnav.Trainer("retrospective", seed=1, config="[lcs]\ncapacity = 20\nactive_size = 8\n")
    first = t.run_generation(suite)
    t.run_generation(suite)
    assert t.generation == 2 and t.hold == 4
    text = t.policy().to_text()
    assert lcsnav.Policy.parse(text).to_text() == text
    assert t.evaluate(suite).mean >= 1.0

    try:
        lcsnav.Trainer("telepathic")
    except ValueError:
        pass
    else:
        raise AssertionError("unknown variant accepted")

    print(f"naive {naive.mean:.3f}; first generation {first.mean:.3f}; ok")

if __name__ == "__main__":
    main()
