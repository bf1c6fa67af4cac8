import math
import warnings

import numpy as np
import pytest

from oamsense import beams, swg
from oracles import lg_radial, radial_fidelity

N, PITCH, LAM, W0 = 512, 100e-9, 840e-9, 5e-6


@pytest.fixture(scope="module")
def gauss():
    return beams.make_gaussian(N, PITCH, LAM, W0)


class TestModeSynthesis:
    def test_gaussian_unit_power(self, gauss):
        assert gauss.total_power() == pytest.approx(1.0, abs=1e-6)

    def test_lg00_is_gaussian(self, gauss):
        lg00 = beams.make_lg(N, PITCH, LAM, beams.LGIndex(0, 0, W0))
        assert beams.fidelity(gauss, lg00) == pytest.approx(1.0, abs=1e-6)

    def test_sampling_guard(self):
        with pytest.raises(ValueError, match="w0 >= 4"):
            beams.make_gaussian(N, PITCH, LAM, 3.0 * PITCH)

    def test_vortex_null_on_axis(self):
        for l in (1, 3, -2):
            lg = beams.make_lg(N, PITCH, LAM, beams.LGIndex(0, l, W0))
            assert abs(lg.amps[N // 2, N // 2]) == 0.0

    def test_azimuthal_orthogonality(self):
        lg01 = beams.make_lg(N, PITCH, LAM, beams.LGIndex(0, 1, W0))
        lg02 = beams.make_lg(N, PITCH, LAM, beams.LGIndex(0, 2, W0))
        assert beams.fidelity(lg01, lg02) < 1e-6

    def test_radial_orthogonality(self):
        lg01 = beams.make_lg(N, PITCH, LAM, beams.LGIndex(0, 1, W0))
        lg11 = beams.make_lg(N, PITCH, LAM, beams.LGIndex(1, 1, W0))
        assert beams.fidelity(lg11, lg01) < 1e-6

    def test_family_orthonormal(self):
        family = {
            (p, l): beams.make_lg(N, PITCH, LAM, beams.LGIndex(p, l, W0))
            for p in range(3) for l in range(-3, 4)
        }
        keys = list(family)
        for i, ka in enumerate(keys):
            assert family[ka].total_power() == pytest.approx(1.0, abs=1e-6)
            for kb in keys[i + 1:]:
                assert beams.fidelity(family[ka], family[kb]) < 1e-4

    def test_power_of_two_grid_enforced(self):
        with pytest.raises(ValueError, match="power of two"):
            beams.ScalarField(n=48, pitch=PITCH, lam=LAM,
                              amps=np.zeros((48, 48), dtype=complex))


class TestMasks:
    def test_identity_mask(self, gauss):
        out = beams.apply_mask(gauss, beams.vortex_mask(N, PITCH, 0))
        assert np.allclose(out.amps, gauss.amps)

    def test_unit_modulus_preserves_power(self, gauss):
        out = beams.apply_mask(gauss, beams.vortex_mask(N, PITCH, 3))
        assert out.total_power() == pytest.approx(gauss.total_power(), rel=1e-12)

    def test_winding_number(self):
        for dl in (1, 2, -3):
            mask = beams.vortex_mask(N, PITCH, dl)
            idx = N // 4
            angles = np.angle(
                [mask[N // 2 + int(round(idx * math.sin(t))),
                      N // 2 + int(round(idx * math.cos(t)))]
                 for t in np.linspace(0.0, 2.0 * math.pi, 721)]
            )
            winding = np.sum(np.diff(np.unwrap(angles))) / (2.0 * math.pi)
            assert winding == pytest.approx(dl, abs=0.01)

    def test_mask_exponent_additivity(self):
        one = beams.vortex_mask(N, PITCH, 1)
        two = beams.vortex_mask(N, PITCH, 2)
        assert np.allclose(one * one, two, atol=1e-12)

    def test_binary_aperture_power_fraction(self, gauss):
        xx, yy = np.meshgrid(gauss.axis(), gauss.axis(), indexing="xy")
        aperture = (xx**2 + yy**2 <= (1.5 * W0) ** 2).astype(complex)
        out = beams.apply_mask(gauss, aperture)
        # direct pixel-sum oracle for the enclosed fraction
        enclosed = float(np.sum(np.abs(gauss.amps[aperture.real > 0]) ** 2)
                         / np.sum(np.abs(gauss.amps) ** 2))
        assert out.total_power() / gauss.total_power() == pytest.approx(enclosed, rel=1e-12)

    def test_grid_mismatch(self, gauss):
        with pytest.raises(ValueError, match="does not match"):
            beams.apply_mask(gauss, np.ones((N // 2, N // 2)))


class TestPropagation:
    def test_zero_distance_identity(self, gauss):
        out = beams.propagate(gauss, 0.0)
        assert np.max(np.abs(out.amps - gauss.amps)) < 1e-12

    def test_power_conservation(self, gauss):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            out = beams.propagate(gauss, 40e-6)
        assert out.total_power() == pytest.approx(gauss.total_power(), rel=1e-10)

    def test_round_trip(self, gauss):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            back = beams.propagate(beams.propagate(gauss, 25e-6), -25e-6)
        scale = float(np.max(np.abs(gauss.amps)))
        assert np.max(np.abs(back.amps - gauss.amps)) / scale < 1e-8

    def test_gaussian_expansion_at_rayleigh_range(self):
        n, pitch, w0 = 512, 0.8e-6, 20e-6
        g = beams.make_gaussian(n, pitch, LAM, w0)
        z_r = math.pi * w0**2 / LAM
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            out = beams.propagate(g, z_r)
        xx, yy = np.meshgrid(out.axis(), out.axis(), indexing="xy")
        intensity = np.abs(out.amps) ** 2
        r2_mean = float(np.sum(intensity * (xx**2 + yy**2)) / np.sum(intensity))
        w_measured = math.sqrt(2.0 * r2_mean)
        assert w_measured == pytest.approx(w0 * math.sqrt(2.0), rel=0.01)

    def test_band_limit_warning_fires(self, gauss):
        xx, yy = np.meshgrid(gauss.axis(), gauss.axis(), indexing="xy")
        hard = gauss.with_amps(np.where(xx**2 + yy**2 < (2e-6) ** 2, 1.0 + 0j, 0.0))
        with pytest.warns(beams.BandLimitWarning):
            beams.propagate(hard, 5e-3)

    def test_infinite_distance_rejected(self, gauss):
        with pytest.raises(ValueError):
            beams.propagate(gauss, math.inf)


class TestFidelity:
    def test_self_fidelity(self, gauss):
        assert beams.fidelity(gauss, gauss) == pytest.approx(1.0, rel=1e-12)

    def test_symmetry_and_global_phase(self, gauss):
        lg = beams.make_lg(N, PITCH, LAM, beams.LGIndex(1, 2, 0.8 * W0))
        f_ab = beams.fidelity(gauss, lg)
        f_ba = beams.fidelity(lg, gauss)
        assert f_ab == pytest.approx(f_ba, rel=1e-12)
        rotated = lg.with_amps(lg.amps * np.exp(1j * 1.234))
        assert beams.fidelity(gauss, rotated) == pytest.approx(f_ab, rel=1e-12)

    def test_zero_power_rejected(self, gauss):
        empty = gauss.with_amps(np.zeros_like(gauss.amps))
        with pytest.raises(ValueError, match="zero-power"):
            beams.fidelity(gauss, empty)

    def test_vortex_to_lg01_quarter_pi(self, gauss):
        masked = beams.apply_mask(gauss, beams.vortex_mask(N, PITCH, 1))
        lg01 = beams.make_lg(N, PITCH, LAM, beams.LGIndex(0, 1, W0))
        f_grid = beams.fidelity(masked, lg01)
        # 1-D radial quadrature oracle, independent of the 2-D grid path
        f_oracle = radial_fidelity(
            lambda r: np.exp(-(r**2) / W0**2), 1, lg_radial(0, 1, W0), 1, 8.0 * W0)
        assert f_oracle == pytest.approx(math.pi / 4.0, abs=1e-4)
        assert f_grid == pytest.approx(math.pi / 4.0, abs=0.01)
        assert f_grid == pytest.approx(f_oracle, rel=0.01)


class TestAzimuthalSpectrum:
    def test_pure_lg_eigenmode(self):
        lg = beams.make_lg(N, PITCH, LAM, beams.LGIndex(0, 3, W0))
        frac = beams.azimuthal_spectrum(lg, [3])
        assert frac[0] >= 0.999

    def test_vortex_masked_gaussian(self, gauss):
        out = beams.apply_mask(gauss, beams.vortex_mask(N, PITCH, 1))
        frac = beams.azimuthal_spectrum(out, [1])
        assert frac[0] >= 0.999

    def test_real_field_symmetric(self):
        rng = np.random.default_rng(5)
        smooth = rng.standard_normal((N, N))
        # low-pass so the polar resampling is faithful
        spec = np.fft.fft2(smooth)
        kx = np.fft.fftfreq(N)
        kk = np.hypot(*np.meshgrid(kx, kx, indexing="xy"))
        field = beams.ScalarField(
            n=N, pitch=PITCH, lam=LAM,
            amps=np.fft.ifft2(spec * (kk < 0.05)).real.astype(complex),
        )
        ls = [1, 2, 5]
        plus = beams.azimuthal_spectrum(field, ls)
        minus = beams.azimuthal_spectrum(field, [-l for l in ls])
        assert np.allclose(plus, minus, atol=1e-6)

    def test_mask_shifts_azimuthal_order(self):
        lg = beams.make_lg(N, PITCH, LAM, beams.LGIndex(0, 2, W0))
        out = beams.apply_mask(lg, beams.vortex_mask(N, PITCH, 3))
        frac = beams.azimuthal_spectrum(out, [2, 3, 5])
        assert frac[2] >= 0.999  # concentrated at l = 2 + 3
        assert frac[0] < 1e-4 and frac[1] < 1e-4

    def test_fractions_sum_below_one(self, gauss):
        out = beams.apply_mask(gauss, beams.vortex_mask(N, PITCH, 1))
        fracs = beams.azimuthal_spectrum(out, range(-5, 6))
        assert fracs.sum() <= 1.0 + 1e-9


class TestConversionMetrics:
    def test_lossless_vortex(self, gauss):
        mask = beams.vortex_mask(N, PITCH, 1)
        m = beams.conversion_metrics(gauss, mask, beams.LGIndex(0, 1, W0))
        assert m.t_swg == pytest.approx(1.0, rel=1e-12)
        assert m.eta == pytest.approx(m.fidelity, rel=1e-12)
        assert m.fidelity_fixed_waist == pytest.approx(math.pi / 4.0, abs=0.01)
        # waist optimization gains over the fixed-waist overlap
        assert m.fidelity > m.fidelity_fixed_waist
        assert m.w0_opt == pytest.approx(W0 / math.sqrt(2.0), rel=0.02)

    def test_higher_order_is_harder(self, gauss):
        f1 = beams.fidelity(
            beams.apply_mask(gauss, beams.vortex_mask(N, PITCH, 1)),
            beams.make_lg(N, PITCH, LAM, beams.LGIndex(0, 1, W0)))
        f10 = beams.fidelity(
            beams.apply_mask(gauss, beams.vortex_mask(N, PITCH, 10)),
            beams.make_lg(N, PITCH, LAM, beams.LGIndex(0, 10, W0)))
        assert f10 < f1
        # radial quadrature oracle agrees on the higher-order overlap
        f10_oracle = radial_fidelity(
            lambda r: np.exp(-(r**2) / W0**2), 10, lg_radial(0, 10, W0), 10, 8.0 * W0)
        assert f10 == pytest.approx(f10_oracle, rel=0.01)


class TestWavelengthScan:
    def test_single_wavelength_matches_metrics(self):
        design = swg.SWGDesign()
        scan = beams.fidelity_vs_wavelength(design, [840e-9], n=256, pitch=80e-9, w0=2.5e-6)
        assert len(scan) == 1
        layout = swg.generate_layout(design)
        mask = swg.layout_to_mask(layout, 256, 80e-9, 840e-9)
        direct = beams.conversion_metrics(
            beams.make_gaussian(256, 80e-9, 840e-9, 2.5e-6), mask,
            beams.LGIndex(0, 1, 2.5e-6))
        assert scan[0][1].fidelity == pytest.approx(direct.fidelity, rel=1e-12)

    def test_dispersionless_lookup_constant(self):
        flat_row_p = tuple(np.linspace(0.0, 2.0 * math.pi * 10.0 / 11.0, 11))
        flat_row_a = (math.sqrt(0.92),) * 11
        lookup = swg.SWGLookup(
            wavelengths=(700e-9, 1000e-9),
            phases=(flat_row_p, flat_row_p),
            amplitudes=(flat_row_a, flat_row_a),
        )
        design = swg.SWGDesign(lookup=lookup)
        scan = beams.fidelity_vs_wavelength(
            design, [780e-9, 840e-9, 900e-9], n=256, pitch=80e-9, w0=2.5e-6)
        fs = [m.fidelity for _, m in scan]
        assert max(fs) - min(fs) < 1e-6

    def test_dispersion_peaks_at_design_wavelength(self):
        design = swg.SWGDesign()
        lams = [740e-9, 790e-9, 840e-9, 890e-9, 940e-9]
        scan = beams.fidelity_vs_wavelength(design, lams, n=256, pitch=80e-9, w0=2.5e-6)
        fs = [m.fidelity for _, m in scan]
        assert lams[int(np.argmax(fs))] == 840e-9
        # broadband: smooth, modest variation across the scan
        assert min(fs) > 0.8 * max(fs)

    def test_wavelength_order_enforced(self):
        with pytest.raises(ValueError):
            beams.fidelity_vs_wavelength(swg.SWGDesign(), [900e-9, 800e-9], n=256,
                                         pitch=80e-9, w0=2.5e-6)


class TestFieldIO:
    def test_save_load_round_trip(self, tmp_path):
        field = beams.make_lg(32, 200e-9, LAM, beams.LGIndex(0, 1, 1.6e-6))
        path = tmp_path / "field.csv"
        beams.save_field(field, path)
        again = beams.load_field(path)
        assert again.n == field.n
        assert again.pitch == field.pitch
        assert again.lam == field.lam
        assert np.array_equal(again.amps, field.amps)

    def test_raster_export(self, tmp_path):
        field = beams.make_gaussian(32, 200e-9, LAM, 1.6e-6)
        path = tmp_path / "intensity.csv"
        beams.save_raster(np.abs(field.amps) ** 2, path)
        rows = path.read_text().splitlines()
        assert len(rows) == 32
        assert len(rows[0].split(",")) == 32
