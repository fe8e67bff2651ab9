"""Two-dimensional smoke sweep above the critical exponent."""

import pytest

from src.lattice import Grid
from src.minimize import continue_family, excitation_threshold, j_curve
from src.spectra import SpectrumMethod, Verdict, stability_verdict

pytestmark = pytest.mark.slow


@pytest.fixture(scope="module")
def planar_curve():
    return continue_family(Grid(2, 25), 1.4, (0.5, 2.5), 0.05, provenance="planar")


class TestPlanarSweep:
    def test_mass_is_not_monotone(self, planar_curve):
        assert len(planar_curve.samples) > 30
        threshold = excitation_threshold(planar_curve)
        assert threshold.interior
        assert threshold.increasing_beyond

    @pytest.mark.parametrize("omega", [0.75, 2.0])
    def test_criteria_agree_with_spectrum(self, planar_curve, omega):
        sample = planar_curve.sample_at(omega)
        report = stability_verdict(
            sample.wave, planar_curve, j_curve(planar_curve), "planar", SpectrumMethod.REDUCED
        )
        assert not report.disagreement
        assert report.verdict in {Verdict.STABLE, Verdict.UNSTABLE}
