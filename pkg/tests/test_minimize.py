import math

import pytest

from hadprox.minimize import golden_section, minimize_on_line, polish


def test_golden_section_quadratic():
    r = golden_section(lambda s: (s - 0.3) ** 2, -1.0, 2.0)
    assert r.s == pytest.approx(0.3, abs=1e-7) and r.ok


def test_golden_section_boundary_minimizer():
    r = golden_section(lambda s: s, 0.0, 1.0)
    assert r.s == 0.0 and r.value == 0.0


def test_golden_section_extended_values():
    # +inf outside [0.5, 0.7]; minimizer at the left end of the domain
    phi = lambda s: s if 0.5 <= s <= 0.7 else math.inf
    r = golden_section(phi, 0.0, 1.0, ref=0.6)
    assert r.s == pytest.approx(0.5, abs=1e-9)


def test_minimize_on_line_grows_bracket():
    r = minimize_on_line(lambda s: abs(s - 1234.5), scale=1.0)
    assert r.s == pytest.approx(1234.5, abs=1e-8) and r.ok


def test_minimize_on_line_kink_is_exact_on_grid():
    r = minimize_on_line(lambda s: abs(s), scale=1.0)
    assert r.s == 0.0


def test_minimize_on_line_empty_domain():
    r = minimize_on_line(lambda s: math.inf, max_scale=1e3)
    assert not r.ok and r.value == math.inf


def test_polish_beats_value_resolution():
    """Chord roots locate a smooth minimizer well below sqrt(eps)."""
    c = 0.123456789012345
    phi = lambda s: 1.0 + (s - c) ** 2 + 0.3 * (s - c) ** 3
    coarse = golden_section(phi, 0.0, 1.0, tol=1e-5)
    s = polish(phi, coarse.s, coarse.value, 0.0, 1.0, 1e-4)
    assert s is not None and abs(s - c) < 1e-12
    assert abs(coarse.s - c) > abs(s - c)


def test_polish_lands_on_kink():
    # chord roots sit at -h^2/4, -h^2, -4h^2 from the kink; extrapolation removes them
    phi = lambda s: abs(s - 0.25) + 0.5 * (s - 0.25) ** 2 * (s > 0.25)
    s = polish(phi, 0.2500001, phi(0.2500001), 0.0, 1.0, 1e-4)
    assert s is not None and abs(s - 0.25) < 1e-11


def test_polish_declines_without_interior_minimizer():
    assert polish(lambda s: s, 0.5, 0.5, 0.0, 1.0, 1e-4) is None


def test_smoothed_line_search():
    c = 1.0 / 3.0
    r = minimize_on_line(lambda s: 7.0 + 2.0 * (s - c) ** 2, smooth_h=1e-4)
    assert r.polished and abs(r.s - c) < 1e-12
