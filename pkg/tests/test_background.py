import math

import numpy as np
import pytest

import frwdirac as fd
from frwdirac.background import log_scale_factor, log_scale_factor_derivative
from frwdirac.errors import DomainError


def test_constant_background_values():
    bg = fd.constant_background(alpha=0.7, mass=2.0, domain=(0.0, 3.0))
    assert bg.alpha(1.234) == 0.7
    assert bg.alpha_prime(1.234) == 0.0
    assert bg.mu(0.5) == pytest.approx(2.0 * math.exp(0.7), rel=1e-15)


def test_power_law_background_matches_closed_form():
    bg = fd.power_law_background(exponent=2.0, offset=0.3, mass=1.5, domain=(0.5, 4.0))
    eta = 1.7
    assert bg.alpha(eta) == pytest.approx(0.3 + 2.0 * math.log(eta), rel=1e-14)
    assert bg.alpha_prime(eta) == pytest.approx(2.0 / eta, rel=1e-12)
    assert bg.mu(eta) == pytest.approx(1.5 * math.exp(0.3) * eta**2, rel=1e-12)


def test_power_law_background_rejects_nonpositive_domain():
    with pytest.raises((ValueError, DomainError)):
        fd.power_law_background(exponent=1.0, domain=(-1.0, 2.0))


def test_tabulated_background_interpolates_quadratic():
    etas = np.linspace(0.0, 2.0, 201)
    bg = fd.tabulated_background(etas, 0.1 * etas**2, mass=1.0)
    # natural spline end conditions perturb the boundary; interior is clean
    for eta in (0.4, 1.0, 1.618):
        assert bg.alpha(eta) == pytest.approx(0.1 * eta**2, abs=1e-8)
        assert bg.alpha_prime(eta) == pytest.approx(0.2 * eta, abs=1e-6)
    # at the knots the spline passes through the samples exactly
    assert bg.alpha(etas[57]) == pytest.approx(0.1 * etas[57] ** 2, abs=1e-14)


def test_domain_enforced():
    bg = fd.constant_background(domain=(0.0, 2.0))
    with pytest.raises(DomainError):
        bg.alpha(2.5)
    with pytest.raises(DomainError):
        bg.mu(-0.1)
    # endpoints (with tiny slack) are legal
    bg.alpha(0.0)
    bg.alpha(2.0)


def test_negative_mass_rejected():
    with pytest.raises(ValueError):
        fd.constant_background(mass=-1.0)


def test_module_level_helpers_agree_with_methods():
    bg = fd.power_law_background(exponent=1.5, offset=0.0, domain=(1.0, 2.0))
    assert log_scale_factor(bg, 1.3) == bg.alpha(1.3)
    assert log_scale_factor_derivative(bg, 1.3) == bg.alpha_prime(1.3)
