"""Quoted physical constants and experimental bounds, SI units throughout.

Single source of truth: every other module pulls numbers from here instead of
hard-coding them.  Central values only; the order-of-magnitude uncertainty on
the collapse rate is kept as metadata and never propagated.
"""

from dataclasses import dataclass

from .errors import NumericalIntegrityError


@dataclass(frozen=True)
class PaperConstants:
    """Collapse-model constants and the experimental bounds they are checked against.

    All rates are s^-1, lengths m, speeds m/s, angular frequencies s^-1.
    """

    lambda_csl_central: float = 2e-9        # collapse rate, enhanced by latent-image argument
    lambda_csl_log10_uncertainty: float = 1.0
    r_c_standard: float = 1e-7              # noise correlation length (10^-5 cm)
    lambda_cantilever: float = 10.0 ** -7.7  # residual-noise coupling seen in the cantilever run
    gamma_ray_cutoff: float = 2e19          # no gamma emission above this angular frequency
    bulk_heating_bound: float = 1e-11       # max effective coupling allowed by bulk heating
    phonon_cutoff_estimate: float = 0.4e11  # v_sound / r_c order-of-magnitude estimate
    v_sound_default: float = 4000.0
    v_solar_cmb: float = 4e5                # solar-system speed relative to the CMB frame
    c: float = 299_792_458.0
    cantilever_frequency: float = 8174.0

    def __post_init__(self):
        positive = (
            self.lambda_csl_central, self.r_c_standard, self.lambda_cantilever,
            self.gamma_ray_cutoff, self.bulk_heating_bound, self.phonon_cutoff_estimate,
            self.v_sound_default, self.v_solar_cmb, self.c, self.cantilever_frequency,
        )
        if not all(x > 0 for x in positive):
            raise NumericalIntegrityError("all stored rates, lengths and speeds must be positive")
        if not self.v_solar_cmb < self.c:
            raise NumericalIntegrityError("CMB-frame speed must be subluminal")
        # self-consistency of the phonon cutoff estimate: v_s / r_c within 1%
        implied = self.v_sound_default / self.r_c_standard
        if abs(implied - self.phonon_cutoff_estimate) > 0.01 * self.phonon_cutoff_estimate:
            raise NumericalIntegrityError(
                f"phonon cutoff {self.phonon_cutoff_estimate} inconsistent with "
                f"v_sound/r_c = {implied}"
            )


_CONSTANTS = PaperConstants()


def constants() -> PaperConstants:
    """The immutable constant set."""
    return _CONSTANTS
