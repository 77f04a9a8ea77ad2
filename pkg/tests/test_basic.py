"""
Basic tests for the Reinforced Walk Lab.
"""
import numpy as np
import pytest

from app.config import APP_NAME, get_default_seed, get_default_session_state
from app.errors import ParameterError, ReinforceError, SimulationError
from app.utils.export_utils import get_output_path
from app.utils.replicas import chunk_size, iter_chunks, replica_rng, run_replicas


def test_app_name():
    """Test that the app name is set correctly."""
    assert APP_NAME == "Reinforced Walk Lab"


def test_output_path_creates_folder(tmp_path):
    """Test that the output folder is created on demand."""
    path = get_output_path("walk.csv", folder=tmp_path / "out")
    assert path.parent.exists()
    assert path.parent.is_dir()
    assert path.name == "walk.csv"


def test_default_seed_from_env(monkeypatch):
    """The seed fallback follows the environment."""
    monkeypatch.setenv("REINFORCE_WALK_SEED", "123")
    assert get_default_seed() == 123
    monkeypatch.setenv("REINFORCE_WALK_SEED", "not-a-number")
    assert isinstance(get_default_seed(), int)


def test_default_session_state_is_fresh():
    """Each call returns an independent dict."""
    a = get_default_session_state()
    a["reports"]["x"] = 1
    assert get_default_session_state()["reports"] == {}


def test_error_hierarchy():
    """Parameter errors are value errors, simulation errors are runtime errors."""
    assert issubclass(ParameterError, ValueError)
    assert issubclass(ParameterError, ReinforceError)
    assert issubclass(SimulationError, RuntimeError)


def _first_uniform(rng):
    return rng.random()


def test_replica_streams_are_reproducible():
    """Replica results depend on the seed and index only."""
    a = run_replicas(_first_uniform, 5, seed=11)
    b = run_replicas(_first_uniform, 5, seed=11)
    assert a == b
    assert len(set(a)) == 5
    assert replica_rng(11, 3).random() == a[3]


def test_run_replicas_rejects_zero():
    """At least one replica is required."""
    with pytest.raises(ParameterError):
        run_replicas(_first_uniform, 0, seed=1)


def test_chunks_cover_range():
    """Chunks partition the replica range in order."""
    size = chunk_size(1000, 10, budget=3000)
    assert size == 3
    bounds = list(iter_chunks(10, size))
    assert bounds[0] == (0, 3)
    assert bounds[-1] == (9, 10)
    covered = np.concatenate([np.arange(a, b) for a, b in bounds])
    assert np.array_equal(covered, np.arange(10))
