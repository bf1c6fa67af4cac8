import math

import numpy as np
import pytest

from oamsense import beams, swg

TWO_PI = 2.0 * math.pi


class TestLookup:
    def test_default_ramp_endpoints(self):
        lookup = swg.default_lookup(840e-9)
        phases, amps = lookup.phase_amp_at(840e-9)
        assert phases[0] == 0.0
        assert phases[-1] == pytest.approx(TWO_PI * 10.0 / 11.0, rel=1e-12)
        assert np.allclose(amps, math.sqrt(0.92))

    def test_out_of_range_wavelength(self):
        lookup = swg.default_lookup(840e-9)
        with pytest.raises(ValueError, match="outside lookup range"):
            lookup.phase_amp_at(650e-9)
        with pytest.raises(ValueError, match="design wavelength"):
            swg.default_lookup(1200e-9)

    def test_dispersion_direction(self):
        lookup = swg.default_lookup(840e-9)
        span_short = np.ptp(lookup.phase_amp_at(720e-9)[0])
        span_long = np.ptp(lookup.phase_amp_at(960e-9)[0])
        assert span_short > TWO_PI * 10.0 / 11.0 > span_long


class TestDesign:
    def test_defaults_valid(self):
        design = swg.SWGDesign()
        assert design.aperture_d == 20e-6
        assert design.lattice_a == 360e-9
        assert len(design.diameters) == 11

    def test_diameter_constraints(self):
        with pytest.raises(ValueError, match="increasing"):
            swg.SWGDesign(diameters=(110.0, 110.0, 130.0))
        with pytest.raises(ValueError, match="lattice"):
            swg.SWGDesign(diameters=(110.0, 400.0))

    def test_insufficient_phase_span_rejected(self):
        bad = swg.SWGLookup(
            wavelengths=(700e-9, 1000e-9),
            phases=(tuple(np.linspace(0.0, 2.0, 11)),) * 2,
            amplitudes=((1.0,) * 11,) * 2,
        )
        with pytest.raises(ValueError, match="span"):
            swg.SWGDesign(lookup=bad)


class TestLayout:
    def test_site_count_matches_area_density(self):
        design = swg.SWGDesign()
        layout = swg.generate_layout(design)
        estimate = math.pi * (design.aperture_d / 2.0) ** 2 / (
            (math.sqrt(3.0) / 2.0) * design.lattice_a**2
        )
        assert abs(len(layout) - estimate) / estimate < 0.02

    def test_zero_shift_single_diameter(self):
        layout = swg.generate_layout(swg.SWGDesign(delta_l=0))
        assert {s.diameter for s in layout} == {110.0}

    def test_ring_walk_visits_all_diameters_in_order(self):
        design = swg.SWGDesign(delta_l=1)
        layout = swg.generate_layout(design)
        ring = [s for s in layout if 4.8e-6 <= math.hypot(s.x, s.y) <= 5.2e-6]
        ring.sort(key=lambda s: math.atan2(s.y, s.x))
        seq = [s.diameter for s in ring]
        dedup = [seq[0]]
        for d in seq[1:]:
            if d != dedup[-1]:
                dedup.append(d)
        if dedup[0] == dedup[-1]:
            dedup.pop()
        assert len(dedup) == 11
        diams = sorted(set(s.diameter for s in layout))
        idx = [diams.index(d) for d in dedup]
        start = idx.index(0)
        assert idx[start:] + idx[:start] == list(range(11))

    def test_quantized_phase_error_bounded(self):
        for delta_l in (1, 3, 10):
            layout = swg.generate_layout(swg.SWGDesign(delta_l=delta_l))
            worst = 0.0
            for s in layout:
                target = (delta_l * math.atan2(s.y, s.x)) % TWO_PI
                err = abs(s.phase - target) % TWO_PI
                worst = max(worst, min(err, TWO_PI - err))
            assert worst <= math.pi / 11.0 + 1e-9

    def test_sixfold_symmetry_of_lattice(self):
        layout = swg.generate_layout(swg.SWGDesign(delta_l=0))
        pos = np.array([(s.x, s.y) for s in layout])
        c, s60 = math.cos(math.pi / 3.0), math.sin(math.pi / 3.0)
        rotated = pos @ np.array([[c, s60], [-s60, c]])
        key = lambda arr: {(round(x * 1e12), round(y * 1e12)) for x, y in arr}
        assert key(pos) == key(rotated)

    def test_raster_order(self):
        layout = swg.generate_layout(swg.SWGDesign())
        keys = [(s.y, s.x) for s in layout]
        assert keys == sorted(keys)

    def test_phase_sign_flips_target(self):
        plus = swg.generate_layout(swg.SWGDesign(delta_l=1, phase_sign=1))
        minus = swg.generate_layout(swg.SWGDesign(delta_l=1, phase_sign=-1))
        site_p = max(plus, key=lambda s: s.y)
        site_m = next(s for s in minus if s.x == site_p.x and s.y == site_p.y)
        expected = (-math.atan2(site_p.y, site_p.x)) % TWO_PI
        err = abs(site_m.phase - expected) % TWO_PI
        assert min(err, TWO_PI - err) <= math.pi / 11.0 + 1e-9


class TestMask:
    def test_constant_phase_disk_for_zero_shift(self):
        layout = swg.generate_layout(swg.SWGDesign(delta_l=0))
        mask = swg.layout_to_mask(layout, 512, 80e-9, 840e-9)
        inside = np.abs(mask) > 0.0
        assert np.allclose(np.angle(mask[inside]), 0.0, atol=1e-12)
        field_in = beams.make_gaussian(512, 80e-9, 840e-9, 2.5e-6)
        metrics = beams.conversion_metrics(field_in, mask, beams.LGIndex(0, 0, 2.5e-6))
        assert metrics.fidelity >= 0.99

    def test_resolution_guard(self):
        layout = swg.generate_layout(swg.SWGDesign())
        with pytest.raises(ValueError, match="lattice/4"):
            swg.layout_to_mask(layout, 128, 120e-9, 840e-9)

    def test_masked_gaussian_azimuthal_purity(self):
        layout = swg.generate_layout(swg.SWGDesign(delta_l=1))
        mask = swg.layout_to_mask(layout, 512, 80e-9, 840e-9)
        field_in = beams.make_gaussian(512, 80e-9, 840e-9, 5e-6)
        out = beams.apply_mask(field_in, mask)
        frac_layout = beams.azimuthal_spectrum(out, [1])[0]
        assert frac_layout >= 0.95
        # agreement with the ideal 11-level staircase within 2 percent
        stair = beams.apply_mask(
            beams.apply_mask(field_in, np.abs(mask)),  # same aperture/amplitude
            beams.staircase_vortex_mask(512, 80e-9, 1, 11),
        )
        frac_stair = beams.azimuthal_spectrum(stair, [1])[0]
        assert frac_layout == pytest.approx(frac_stair, rel=0.02)

    def test_uniform_amplitude_transmission(self):
        layout = swg.generate_layout(swg.SWGDesign(delta_l=1))
        mask = swg.layout_to_mask(layout, 512, 80e-9, 840e-9)
        field_in = beams.make_gaussian(512, 80e-9, 840e-9, 5e-6)
        out = beams.apply_mask(field_in, mask)
        # pixel-sum oracle for the aperture clip factor
        covered = np.abs(mask) > 0.0
        clip = float(np.sum(np.abs(field_in.amps[covered]) ** 2)
                     / np.sum(np.abs(field_in.amps) ** 2))
        assert out.total_power() / field_in.total_power() == pytest.approx(
            0.92 * clip, rel=1e-9)

    def test_lookup_seam(self):
        # swapping the lookup re-labels phases but not geometry
        design = swg.SWGDesign()
        layout = swg.generate_layout(design)
        retuned = swg.retune_layout(design, layout, 760e-9)
        assert [(s.x, s.y, s.diameter) for s in retuned] == [
            (s.x, s.y, s.diameter) for s in layout]
        phases_760, _ = design.lookup.phase_amp_at(760e-9)
        diams = list(design.diameters)
        for s in retuned[:50]:
            assert s.phase == pytest.approx(phases_760[diams.index(s.diameter)])


class TestExport:
    def test_round_trip_identical(self, tmp_path):
        layout = swg.generate_layout(swg.SWGDesign())
        path = tmp_path / "layout.csv"
        swg.export_layout(layout, path)
        again = swg.load_layout(path)
        assert again == layout

    def test_row_count_and_order(self, tmp_path):
        layout = swg.generate_layout(swg.SWGDesign())
        path = tmp_path / "layout.csv"
        swg.export_layout(layout, path)
        lines = path.read_text().splitlines()
        assert lines[0] == swg.LAYOUT_HEADER
        assert len(lines) == len(layout) + 1
        ys = [float(line.split(",")[1]) for line in lines[1:]]
        assert ys == sorted(ys)

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("nope\n")
        with pytest.raises(ValueError, match="bad layout header"):
            swg.load_layout(path)
