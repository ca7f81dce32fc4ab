"""Smoke test for the `extremal` extension module.

Build first, either with maturin:

    pip install maturin
    maturin develop -m crates/python/Cargo.toml --release

or with cargo, copying the library next to this script:

    cargo build -p extremal-py --release --features extension-module
    cp target/release/libextremal.so python/extremal.so
"""

import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import extremal  # noqa: E402


def main():
    assert extremal.binom(5, 2) == 10
    assert extremal.binom(3, 5) == 0
    assert extremal.binom(200, 100) > 2**190

    assert extremal.matching_formula_value(3, 9, 3) == (56, 3)
    assert extremal.erdos_value(3, 9, 3) == 56
    assert extremal.intersect_value(2, 8, 4, 2) == (17, 1)

    fam = extremal.build_intersect_extremal(2, 8, 4, 2, 1)
    assert len(fam) == 17
    assert fam.swise_violation(2, 2) is None
    assert fam.is_left_compressed()
    again = extremal.SetFamily.from_text(str(fam))
    assert again == fam

    star = extremal.build_matching_extremal(2, 6, 3, 1)
    assert len(star) == 10 and star.find_matching(2) is None
    everything = extremal.SetFamily(4, 2, [[1, 2], [3, 4], [1, 3]])
    assert everything.find_matching(2) == [[1, 2], [3, 4]]

    res = extremal.max_no_matching(6, 3, 2)
    assert res["max_size"] == 10 and res["optimal"]
    res = extremal.max_swise_t_intersecting(5, 3, 3, 1)
    assert res["max_size"] == 6

    try:
        extremal.max_no_matching(10, 4, 2)
    except RuntimeError as e:
        assert "envelope" in str(e)
    else:
        raise AssertionError("expected a capacity error")
    try:
        extremal.matching_formula_value(1, 4, 2)
    except ValueError:
        pass
    else:
        raise AssertionError("expected a domain error")

    assert abs(extremal.gaussian_cdf(-1.959964) - 0.025) < 1e-6
    assert abs(extremal.smoothed_count([1.0, 0.0, 0.0, 0.0], 0.5, 1e-3, 4, 2) - 3.0) < 1e-9
    proj = extremal.project_monotone_simplex([0.2, 0.9, -0.4])
    assert abs(sum(proj) - 1.0) < 1e-12 and proj[0] >= proj[1] >= proj[2] >= 0
    assert extremal.admissible_count(3, 2, 6, 3) == 10
    assert len(extremal.grad_smoothed_count([0.5, 0.3, 0.2], 0.3, 0.1, 6, 3, 3)) == 2

    out = extremal.smooth_matching(2, 6, 3, support=1, max_iter=2000)
    assert out["family_size"] == 10 and out["witness_excluded"]

    print("python smoke test: ok")


if __name__ == "__main__":
    main()
