import dataclasses

import pytest

from csllab.constants import PaperConstants, constants
from csllab.errors import NumericalIntegrityError


def test_central_values():
    c = constants()
    assert c.lambda_csl_central == 2e-9
    assert c.r_c_standard == 1e-7          # 10^-5 cm
    assert c.lambda_cantilever == pytest.approx(10 ** -7.7)
    assert c.gamma_ray_cutoff == 2e19
    assert c.bulk_heating_bound == 1e-11
    assert c.v_sound_default == 4000.0
    assert c.v_solar_cmb == 4e5
    assert c.c == 299_792_458.0
    assert c.cantilever_frequency == 8174.0
    assert c.lambda_csl_log10_uncertainty == 1.0


def test_phonon_cutoff_self_consistency():
    c = constants()
    implied = c.v_sound_default / c.r_c_standard
    assert implied == pytest.approx(4e10)
    assert abs(implied - c.phonon_cutoff_estimate) <= 0.01 * c.phonon_cutoff_estimate


def test_cmb_speed_subluminal():
    c = constants()
    assert c.v_solar_cmb < c.c


def test_constants_immutable():
    with pytest.raises(dataclasses.FrozenInstanceError):
        constants().c = 1.0


def test_inconsistent_cutoff_rejected():
    with pytest.raises(NumericalIntegrityError):
        PaperConstants(phonon_cutoff_estimate=1e9)


def test_negative_rate_rejected():
    with pytest.raises(NumericalIntegrityError):
        PaperConstants(lambda_csl_central=-1.0)
