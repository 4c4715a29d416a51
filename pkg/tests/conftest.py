import pytest

from crosstaxis.config import config_from_dict
from crosstaxis.grid import Grid
from crosstaxis.model import Parameters

KINETICS = dict(lambda1=1.0, lambda2=1.0, mu1=1.0, mu2=1.0, a1=1.0, a2=0.5)


def make_parameters(**overrides) -> Parameters:
    values = dict(D1=1.0, D2=1.0, chi1=1.0, chi2=1.0, **KINETICS)
    values.update(overrides)
    return Parameters(**values)


@pytest.fixture
def coexistence() -> Parameters:
    return make_parameters()


@pytest.fixture
def degenerate() -> Parameters:
    return make_parameters(lambda2=0.5)


@pytest.fixture
def strict_exclusion() -> Parameters:
    return make_parameters(lambda2=0.2)


@pytest.fixture
def h1() -> Parameters:
    return Parameters(D1=1.0, D2=1.0, chi1=1.0, chi2=1.0, m1=1.0, m2=1.0)


@pytest.fixture
def line() -> Grid:
    return Grid((32,), (1.0,))


@pytest.fixture
def small_config(tmp_path):
    """Factory of fast coexistence experiments writing under tmp_path."""

    def factory(**blocks):
        data = {
            "name": "test",
            "parameters": dict(KINETICS),
            "grid": {"points": [16], "lengths": [1.0]},
            "perturbation": {"epsilon": 0.01, "modes": [{"indices": [1]}]},
            "stepping": {"dt": 0.01, "t_end": 1.0, "sample_every": 0.05},
            "outputs": {"directory": str(tmp_path / "run")},
            "inequalities": {"count": 3, "max_mode": 3, "points": [16]},
        }
        for name, values in blocks.items():
            data.setdefault(name, {}).update(values)
        return config_from_dict(data)

    return factory
