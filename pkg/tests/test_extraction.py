import json

import numpy as np
import pytest

from spinres.extraction import (
    MultipletDataset,
    MultipletEntry,
    QuadrupoleContext,
    a_from_width,
    extract_parameters,
    fit_bohr_magneton,
    g_from_line,
    mean_values,
    quadrupole_from_multiplet,
    quadrupole_from_r3,
    r3_from_quadrupole,
)
from spinres.units import CODATA, joule_to_inv_cm

HC = CODATA.hc_per_cm
BETA = CODATA.bohr_magneton_beta
H = CODATA.planck_h

# per-multiplet (g, width) observations and the hyperfine constants they imply
OBSERVED = [
    {"mi": 1.5, "g": 2.526, "width": 13.2e-3, "a_cm4": -155.7},
    {"mi": 0.5, "g": 2.375, "width": 14.7e-3, "a_cm4": -163.0},
    {"mi": -0.5, "g": 2.246, "width": 17.0e-3, "a_cm4": -178.3},
    {"mi": -1.5, "g": 2.142, "width": 21.1e-3, "a_cm4": -211.1},
]


def test_g_from_line_values():
    np.testing.assert_allclose(g_from_line(9.121e9, 0.3043), 2.141553701821923, rtol=1e-12)
    assert abs(g_from_line(9.121e9, 0.3043) - 2.142) < 1e-3
    np.testing.assert_allclose(g_from_line(9.072e9, 0.2566), 2.5260087780458576, rtol=1e-12)
    assert abs(g_from_line(9.072e9, 0.2566) - 2.526) < 1e-4


def test_g_from_line_identity():
    f = 9.072e9
    assert g_from_line(f, H * f / BETA) == 1.0
    rng = np.random.default_rng(3)
    for _ in range(50):
        g = float(rng.uniform(0.5, 6.0))
        np.testing.assert_allclose(g_from_line(f, H * f / (g * BETA)), g, rtol=1e-12)


def test_a_from_width_values():
    got = a_from_width(2.526, 13.2e-3, sign=-1.0)
    np.testing.assert_allclose(got, -3.0922517284277253e-25, rtol=1e-12)
    np.testing.assert_allclose(joule_to_inv_cm(got) * 1e4, -155.7, rtol=5e-3)
    got = a_from_width(2.142, 21.1e-3, sign=-1.0)
    np.testing.assert_allclose(joule_to_inv_cm(got) * 1e4, -211.1, rtol=5e-3)
    assert a_from_width(2.0, 0.0) == 0.0


def test_a_from_width_round_trip():
    from spinres.perturbation import multiplet_width

    rng = np.random.default_rng(5)
    for _ in range(50):
        a = float(rng.uniform(1e-26, 1e-24)) * (-1) ** int(rng.integers(2))
        g = float(rng.uniform(1.5, 3.0))
        np.testing.assert_allclose(
            a_from_width(g, multiplet_width(a, g), sign=1.0), abs(a), rtol=1e-12
        )


def test_fit_bohr_magneton_published_tuples():
    rows = [
        {"a_joule": row["a_cm4"] * 1e-4 * HC, "g": row["g"], "width": row["width"]}
        for row in OBSERVED
    ]
    beta_fit, residuals = fit_bohr_magneton(rows)
    np.testing.assert_allclose(beta_fit, 9.276455595786717e-24, rtol=1e-10)
    assert abs(beta_fit - 9.23e-24) / 9.23e-24 < 0.01
    assert len(residuals) == 4


def test_fit_bohr_magneton_noiseless():
    rng = np.random.default_rng(9)
    rows = []
    for _ in range(6):
        g = float(rng.uniform(1.8, 2.8))
        width = float(rng.uniform(5e-3, 30e-3))
        rows.append({"a_joule": g * BETA * width, "g": g, "width": width})
    beta_fit, residuals = fit_bohr_magneton(rows)
    np.testing.assert_allclose(beta_fit, BETA, rtol=1e-12)
    np.testing.assert_allclose(residuals, 0.0, atol=1e-36)
    shuffled = rows[::-1]
    np.testing.assert_allclose(fit_bohr_magneton(shuffled)[0], beta_fit, rtol=1e-12)


def test_fit_bohr_magneton_two_points():
    rows = [
        {"a_joule": 2.0e-25, "g": 2.0, "width": 10e-3},
        {"a_joule": 4.0e-25, "g": 2.0, "width": 20e-3},
    ]
    beta_fit, _ = fit_bohr_magneton(rows)
    np.testing.assert_allclose(beta_fit, 2.0e-25 / 0.02, rtol=1e-12)


def test_fit_bohr_magneton_errors():
    with pytest.raises(ValueError):
        fit_bohr_magneton([{"a_joule": 1e-25, "g": 2.0, "width": 1e-2}])
    with pytest.raises(ValueError, match="degenerate"):
        fit_bohr_magneton(
            [{"a_joule": 0.0, "g": 2.0, "width": 0.0}, {"a_joule": 0.0, "g": 2.0, "width": 0.0}]
        )


def test_quadrupole_from_multiplet_published():
    a_values = [row["a_cm4"] * 1e-4 * HC for row in OBSERVED]
    p_par = quadrupole_from_multiplet(a_values)
    np.testing.assert_allclose(joule_to_inv_cm(p_par) * 1e4, 12.75, rtol=1e-10)


def test_quadrupole_zero_for_arithmetic_progression():
    # exact dyadic inputs keep float differences exact
    for start, step in ((-160.0, -16.0), (4.0, 2.5), (-100.0, 0.25)):
        values = [start + k * step for k in range(4)]
        assert quadrupole_from_multiplet(values) == 0.0


def test_quadrupole_zero_for_symmetric_values():
    assert quadrupole_from_multiplet([-10.0, -4.0, -16.0, -10.0]) == 0.0


def test_quadrupole_wrong_count():
    with pytest.raises(ValueError):
        quadrupole_from_multiplet([1.0, 2.0, 3.0])


def test_r3_from_quadrupole_published():
    ctx = QuadrupoleContext(q_barn=-0.211, i=1.5, screening=0.15)
    r3, r3_unscreened = r3_from_quadrupole(12.3e-4 * HC, ctx)
    np.testing.assert_allclose(r3, 5.206413217923504, rtol=1e-10)
    assert 5.15 <= r3 <= 5.30
    np.testing.assert_allclose(r3_unscreened, r3 / 0.85, rtol=1e-12)


def test_r3_forward_value():
    ctx = QuadrupoleContext(q_barn=-0.211, i=1.5)
    p = quadrupole_from_r3(5.23, ctx)
    np.testing.assert_allclose(joule_to_inv_cm(p) * 1e4, 12.355723087545599, rtol=1e-10)
    assert 12.2 <= joule_to_inv_cm(p) * 1e4 <= 12.5


def test_r3_round_trip():
    ctx = QuadrupoleContext(q_barn=-0.211, i=1.5, screening=0.12)
    rng = np.random.default_rng(17)
    for _ in range(30):
        p = float(rng.uniform(-5e-26, 5e-26))
        r3, _ = r3_from_quadrupole(p, ctx)
        np.testing.assert_allclose(quadrupole_from_r3(r3, ctx), p, rtol=1e-12, atol=1e-60)
    assert r3_from_quadrupole(0.0, ctx) == (0.0, 0.0)


def test_r3_zero_moment():
    with pytest.raises(ValueError):
        QuadrupoleContext(q_barn=-0.2, i=0.5)  # I(2I-1) = 0
    with pytest.raises(ZeroDivisionError):
        r3_from_quadrupole(1e-26, QuadrupoleContext(q_barn=0.0, i=1.5))


def test_mean_values():
    mean_g, mean_a = mean_values(2.322, 2.053, -174.6, 13.4)
    np.testing.assert_allclose(mean_g, 2.1426666666666665, rtol=1e-12)
    np.testing.assert_allclose(mean_a, -49.26666666666666, rtol=1e-12)
    assert abs(mean_g - 2.1426) < 1e-3
    assert abs(mean_a - (-49.26)) < 0.01
    assert mean_values(2.1, 2.1, 0.0, 0.0)[0] == 2.1


def _demo_dataset() -> MultipletDataset:
    entries = [
        MultipletEntry(mi=row["mi"], b_line=H * 9.072e9 / (row["g"] * BETA), width=row["width"])
        for row in OBSERVED
    ]
    return MultipletDataset(mode_freq=9.072e9, entries=entries)


def test_dataset_sorting_and_completeness():
    ds = _demo_dataset()
    assert [e.mi for e in ds.entries] == [1.5, 0.5, -0.5, -1.5]
    assert ds.is_complete
    partial = MultipletDataset(
        mode_freq=9.072e9, entries=[MultipletEntry(1.5, 0.25, 0.013), MultipletEntry(-1.5, 0.3, 0.02)]
    )
    assert not partial.is_complete


def test_dataset_validation():
    with pytest.raises(ValueError):
        MultipletDataset(mode_freq=9e9, entries=[])
    with pytest.raises(ValueError):
        MultipletDataset(
            mode_freq=9e9,
            entries=[MultipletEntry(0.5, 0.2, 0.01), MultipletEntry(0.5, 0.3, 0.01)],
        )
    with pytest.raises(ValueError):
        MultipletEntry(0.5, -0.2, 0.01)


def test_dataset_json_round_trip(tmp_path):
    ds = _demo_dataset()
    path = tmp_path / "multiplet.json"
    path.write_text(json.dumps(ds.to_json_dict()))
    back = MultipletDataset.from_json(str(path))
    assert back.mode_freq == ds.mode_freq
    for a, b in zip(back.entries, ds.entries):
        assert (a.mi, a.b_line, a.width) == (b.mi, b.b_line, b.width)
    # also from a JSON string
    again = MultipletDataset.from_json(json.dumps(ds.to_json_dict()))
    assert again.entries[0].mi == 1.5


def test_extract_parameters_pipeline():
    ds = _demo_dataset()
    result = extract_parameters(
        ds,
        quad=QuadrupoleContext(q_barn=-0.211, i=1.5),
        axial=(2.322, 2.053, -174.6e-4 * HC, 13.4e-4 * HC),
    )
    np.testing.assert_allclose([r["g"] for r in result.per_mi], [2.526, 2.375, 2.246, 2.142], rtol=1e-12)
    # widths were chosen so A reproduces the published set to 0.5 percent
    for row, ref in zip(result.per_mi, OBSERVED):
        np.testing.assert_allclose(joule_to_inv_cm(row["a_joule"]) * 1e4, ref["a_cm4"], rtol=5e-3)
    np.testing.assert_allclose(result.beta_fit, BETA, rtol=1e-12)
    assert abs(result.beta_rel_err) < 1e-12
    assert result.p_par is not None and result.r3_q is not None
    np.testing.assert_allclose(result.mean_g, 2.1426666666666665, rtol=1e-12)
    assert result.is_complete
    doc = result.to_json_dict()
    assert doc["per_mi"][0]["mi"] == 1.5
    assert "p_par convention" in " ".join(doc["notes"])
    assert "beta_fit" in result.table()


def test_extract_parameters_incomplete_dataset():
    ds = MultipletDataset(
        mode_freq=9.072e9,
        entries=[MultipletEntry(1.5, 0.2566, 0.0132), MultipletEntry(0.5, 0.2729, 0.0147)],
    )
    result = extract_parameters(ds)
    assert result.p_par is None
    assert not result.is_complete
    assert any("incomplete" in n for n in result.notes)
