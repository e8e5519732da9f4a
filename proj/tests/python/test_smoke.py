import math

import numpy as np
import pytest

import dimerlab as dl


def test_version_and_presets():
    assert dl.__version__
    assert dl.preset_names() == ["fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8"]
    echo = dl.resolve_config({"experiment": "fig5"})
    assert echo["drive"]["rabi"] == 0.05
    assert dl.resolve_config(echo) == echo


def test_validation_error_is_raised():
    with pytest.raises(dl.ValidationError, match="drive.phase"):
        dl.resolve_config({"experiment": "fig5", "drive": {"phase": 1}})
    with pytest.raises(dl.Error):
        dl.Lattice.square(3, 3, 0.0)


def test_coverings_match_oracle():
    lat = dl.Lattice.square(4, 4, 1.0)
    assert len(dl.coverings(lat)) == 36 == dl.count_matchings(lat)
    assert len(dl.coverings(dl.Lattice.square(2, 5, 1.0))) == 8


def test_pair_rates_dicke_limit():
    dimer, triplet = dl.pair_rates(dl.GreensModel("waveguide1d"), math.pi)
    assert dimer == pytest.approx(2.0, abs=1e-12)
    assert triplet == pytest.approx(0.0, abs=1e-12)


def test_least_radiant_plaquette_is_rvb_like():
    lat = dl.Lattice.square(2, 2, 0.1 * math.pi)
    r = dl.least_radiant(lat, dl.GreensModel("waveguide2d"))
    assert r["fidelity"] > 0.99
    amps = r["state"].amplitudes
    assert amps.shape == (6,)
    assert np.linalg.norm(amps) == pytest.approx(1.0)
    assert dl.fidelity(r["state"], r["rvb"]) == pytest.approx(r["fidelity"])


def test_entropy_and_concurrence():
    rvb = dl.rvb_state(dl.Lattice.square(2, 2, 1.0))
    assert dl.entanglement_entropy(rvb, [0, 1]) == pytest.approx(dl.entanglement_entropy(rvb, [2, 3]))
    singlet = np.zeros((4, 4), complex)
    singlet[1, 1] = singlet[2, 2] = 0.5
    singlet[1, 2] = singlet[2, 1] = -0.5
    assert dl.concurrence(singlet) == pytest.approx(1.0, abs=1e-12)


def test_steady_state_of_a_driven_pair():
    lat = dl.Lattice.chain(2, 0.3 * math.pi)
    liou = dl.Liouvillian(lat, dl.GreensModel("waveguide1d"), rabi=0.3, detuning=0.2)
    r = dl.steady_state(liou)
    rho = r["rho"]
    assert rho.shape == (4, 4)
    assert np.trace(rho).real == pytest.approx(1.0)
    assert np.allclose(rho, rho.conj().T)
    assert r["relative_residual"] <= 1e-10
    assert np.linalg.norm(liou.apply(rho)) < 1e-9


def test_run_experiment_writes_artifacts(tmp_path):
    files, eig, _ = dl.run_experiment({
        "experiment": "fig6",
        "output": str(tmp_path),
        "series": [{"label": "fs", "model": "freespace2d", "spacings": [0.42], "lattices": [[2, 2]]}],
    })
    assert [p.endswith("fig6_fs.csv") for p in files] == [True]
    assert (tmp_path / "fig6_fs.json").exists()
    assert eig < 1e-8
