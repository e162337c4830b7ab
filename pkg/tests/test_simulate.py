import numpy as np
import pytest

from squidcircuit.bundle import validate_bundle
from squidcircuit.config import RunConfig
from squidcircuit.errors import ConfigError, DataQualityError
from squidcircuit.simulate import SCENARIOS, simulate

NOISY = RunConfig.from_dict({"simulation": {"noise_snr": 100.0}})


@pytest.mark.parametrize("name", ["resonance", "two-tone", "calibration"])
def test_same_seed_same_data(name):
    a = simulate(NOISY, name, seed=9)
    b = simulate(NOISY, name, seed=9)
    assert len(a.traces) == len(b.traces)
    for (na, ta, _), (nb, tb, _) in zip(a.traces, b.traces):
        assert na == nb
        assert np.array_equal(ta.s21, tb.s21)
    assert a.truth == b.truth


def test_different_seed_different_noise():
    a = simulate(NOISY, "resonance", seed=1).traces[0][1]
    b = simulate(NOISY, "resonance", seed=2).traces[0][1]
    assert not np.array_equal(a.s21, b.s21)


def test_noiseless_ignores_seed():
    cfg = RunConfig.from_dict({})
    a = simulate(cfg, "resonance", seed=1).traces[0][1]
    b = simulate(cfg, "resonance", seed=2).traces[0][1]
    assert np.array_equal(a.s21, b.s21)


def test_scenario_names():
    assert set(SCENARIOS) == {"resonance", "flux-sweep", "temperature-sweep", "two-tone", "calibration"}
    with pytest.raises(ConfigError):
        simulate(RunConfig.from_dict({}), "nonsense")


def test_two_tone_truth_sidecar():
    sc = simulate(RunConfig.from_dict({}), "two-tone", seed=0)
    pts = sc.truth["flux_points"]
    assert [p["phi_ext"] for p in pts] == [0.0, 0.2]
    for p in pts:
        # softening Kerr constant and the configured 20 pump powers per flux point
        assert p["K_hz"] < 0
        assert len(p["powers"]) == 20
    assert sc.truth["extra_loss_db"] == 11.0


def test_bundle_schema_rejects_garbage():
    with pytest.raises(DataQualityError, match="schema"):
        validate_bundle({"format": "nope"})
