import io
import json

import numpy as np
import pytest

from bottlemode.fields import (
    AccuracyError,
    caustic_enhancement,
    caustic_feature_width,
    field_grid,
    intensity,
    mode_volume,
    peak,
    radial_peak,
    rho_cutoff,
)
from bottlemode.geometry import radius


def test_intensity_even_in_z(design_mode):
    rho = np.linspace(5.0, 10.0, 23)
    for z in (3.7, 41.0, 69.0, 95.0):
        np.testing.assert_allclose(intensity(design_mode, rho, z),
                                   intensity(design_mode, rho, -z), rtol=1e-10)


def test_intensity_normalized_bounded(design_mode):
    rho = np.linspace(0.0, 12.0, 121)
    vals = intensity(design_mode, rho, design_mode.caustic.z_intensity_max, normalize=True)
    assert np.all(vals >= 0) and np.all(vals <= 1.0 + 1e-12)


def test_caustic_enhancement(design_mode):
    assert caustic_enhancement(design_mode) == pytest.approx(4.0, abs=0.5)


def test_exterior_decay(design_mode):
    m = design_mode
    zc = m.caustic.z_intensity_max
    R = float(radius(m.profile, zc))
    rho = np.linspace(R, m.R_c + 3 * m.wavelength, 200)
    vals = intensity(m, rho, zc, normalize=True)
    assert vals[-1] < 1e-3
    assert np.all(np.diff(vals) < 0)


def test_peak_location(design_mode):
    pk = peak(design_mode)
    assert abs(pk.z) == pytest.approx(design_mode.caustic.z_intensity_max, abs=1.0)
    assert pk.rho < float(radius(design_mode.profile, pk.z))
    assert pk.value >= intensity(design_mode, pk.rho, pk.z) * (1 - 1e-14)
    r, _ = radial_peak(design_mode, pk.z)
    assert intensity(design_mode, r, pk.z) <= pk.value * (1 + 1e-9)


def test_rho_cutoff_beyond_surface(design_mode):
    m = design_mode
    for z in (0.0, 30.0, m.caustic.z_intensity_max):
        assert rho_cutoff(m, z) > float(radius(m.profile, z))


def test_rho_cutoff_design_value(design_mode):
    # oracle: 60-digit exterior zero at the turning point (where R = R_c),
    # from tools/bigfloat_oracle.py
    m = design_mode
    zc = m.caustic.z_turning
    assert rho_cutoff(m, zc) - m.R_c == pytest.approx(3.16998093, abs=1e-5)
    # rho_0 / R(z) does not depend on z under the adiabatic scaling
    assert rho_cutoff(m, 0.0) / float(radius(m.profile, 0.0)) == pytest.approx(
        rho_cutoff(m, zc) / m.R_c, rel=1e-9)


def test_rho_cutoff_smooth(design_mode):
    m = design_mode
    zs = np.arange(0.0, 80.0, 1.0)
    r = np.array([rho_cutoff(m, z) for z in zs])
    assert np.max(np.abs(np.diff(r)) / r[:-1]) < 0.01


def test_mode_volume_bounds(design_mode, design_volume):
    v = design_volume
    assert v.volume > 0
    assert 0 < v.interior_fraction < 1
    assert v.quadrature_error_estimate / v.volume < 1e-3
    unweighted = mode_volume(design_mode, eps_weighted=False)
    assert unweighted.volume < v.volume
    assert not unweighted.eps_weighted


def test_mode_volume_refinement(design_mode, design_volume):
    finer = mode_volume(design_mode, rtol=1e-10, max_level=5)
    assert finer.volume == pytest.approx(design_volume.volume, rel=1e-3)


def test_mode_volume_accuracy_error(design_mode):
    with pytest.raises(AccuracyError) as info:
        mode_volume(design_mode, rtol=0.0, max_level=1)
    assert info.value.partial > 0


def test_mode_volume_q0():
    from bottlemode.modes import solve_bottle_mode
    mode = solve_bottle_mode(0.852, 3.0, 0.01, 0)
    v = mode_volume(mode)
    assert v.volume > 0
    assert caustic_feature_width(mode) > 0


def test_feature_width(design_mode):
    assert caustic_feature_width(design_mode) == pytest.approx(3.2, abs=0.1)


def test_field_grid_normalization_and_symmetry(design_mode):
    g = field_grid(design_mode, (4.0, 10.0), (-90.0, 90.0), (61, 181))
    assert g.values.shape == (181, 61)
    assert g.values.max() == 1.0
    assert np.all(g.values >= 0)
    assert g.normalization == "grid"
    np.testing.assert_allclose(g.values, g.values[::-1], rtol=1e-10, atol=1e-300)
    iz, ir = np.unravel_index(np.argmax(g.values), g.values.shape)
    pk = peak(design_mode)
    assert abs(abs(g.z_axis[iz]) - abs(pk.z)) <= g.z_axis[1] - g.z_axis[0] + 1e-9
    assert abs(g.rho_axis[ir] - pk.rho) <= g.rho_axis[1] - g.rho_axis[0] + 1e-9
    assert not g.under_resolved


def test_field_grid_two_lobes(design_mode):
    g = field_grid(design_mode, (6.0, 9.0), (-100.0, 100.0), (31, 401))
    marginal = g.values.max(axis=1)
    top = marginal > 0.9 * marginal.max()
    # contiguous runs of near-maximal rows
    runs = np.count_nonzero(np.diff(top.astype(int)) == 1) + int(top[0])
    assert runs == 2
    zs = g.z_axis[top]
    assert np.all(np.abs(np.abs(zs) - design_mode.caustic.z_intensity_max) < 3.0)


def test_field_grid_jobs_deterministic(design_mode):
    a = field_grid(design_mode, (5.0, 9.0), (-80.0, 80.0), (17, 41), jobs=1)
    b = field_grid(design_mode, (5.0, 9.0), (-80.0, 80.0), (17, 41), jobs=4, rows_per_chunk=3)
    assert np.array_equal(a.values, b.values)


def test_field_grid_off_peak_and_coarse(design_mode):
    g = field_grid(design_mode, (5.0, 9.0), (-20.0, 20.0), (9, 5))
    assert g.normalization == "peak"
    assert g.values.max() < 1.0
    assert g.under_resolved


def test_field_grid_invalid(design_mode):
    with pytest.raises(ValueError):
        field_grid(design_mode, (5.0, 5.0), (0.0, 1.0), (3, 3))
    with pytest.raises(ValueError):
        field_grid(design_mode, (5.0, 6.0), (0.0, 1.0), (0, 3))


def test_field_grid_serialization(design_mode):
    g = field_grid(design_mode, (6.0, 9.0), (60.0, 75.0), (4, 3))
    buf = io.StringIO()
    g.write_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "rho_um,z_um,intensity"
    assert len(lines) == 1 + 12
    first = lines[1].split(",")
    assert len(first[2].split("e")[0].replace("-", "").replace(".", "")) == 9
    doc = json.loads(json.dumps(g.to_json_dict(), default=lambda a: list(map(float, a))))
    assert doc["shape"] == [3, 4]
    buf = io.StringIO()
    g.write_json(buf)
    parsed = json.loads(buf.getvalue())
    assert np.allclose(np.array(parsed["intensity"]), g.values, rtol=1e-8)


def test_scale_free_intensity(design_mode, monkeypatch):
    import bottlemode.fields as fields
    from bottlemode.modes import radial_function

    rho = np.linspace(6.0, 9.0, 13)
    zc = design_mode.caustic.z_intensity_max
    before = intensity(design_mode, rho, zc, normalize=True)
    enh = caustic_enhancement(design_mode)
    grid = field_grid(design_mode, (6.0, 9.0), (60.0, 75.0), (5, 4)).values
    peak.cache_clear()
    monkeypatch.setattr(fields, "radial_function",
                        lambda *a, **k: (3.0 - 4.0j) * np.asarray(radial_function(*a, **k)))
    try:
        np.testing.assert_allclose(intensity(design_mode, rho, zc, normalize=True), before, rtol=1e-9)
        assert caustic_enhancement(design_mode) == pytest.approx(enh, rel=1e-12)
        np.testing.assert_allclose(
            field_grid(design_mode, (6.0, 9.0), (60.0, 75.0), (5, 4)).values, grid, rtol=1e-9)
    finally:
        peak.cache_clear()
