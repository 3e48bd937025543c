import shutil
from dataclasses import replace

import pytest

from antwatch import pipeline
from antwatch.config import FrameOptions, PipelineConfig, TrackingOptions
from antwatch.sim import run_scenario, scenario_preset


def small_config(output_dir) -> PipelineConfig:
    """A fast 60-frame colony with three larva clusters and four tracks."""
    return PipelineConfig(
        scenario=scenario_preset("larval-local", rng_seed=7, n_frames=60),
        frames=FrameOptions(skip=False),
        tracking=TrackingOptions(n_tracks=4),
        output_dir=output_dir,
    )


@pytest.fixture(scope="session")
def small_run():
    return run_scenario(scenario_preset("larval-local", rng_seed=7, n_frames=60))


@pytest.fixture(scope="session")
def artifact_dir(tmp_path_factory):
    """Artifacts of one full pipeline run, shared read-only across tests."""
    out = tmp_path_factory.mktemp("artifacts")
    config = small_config(out)
    pipeline.run_simulate(config)
    pipeline.run_extrude(config)
    pipeline.run_detect(config)
    pipeline.run_track(config)
    pipeline.run_train(config)
    pipeline.run_predict(config)
    pipeline.run_eval(config)
    return out


@pytest.fixture
def fresh_artifacts(artifact_dir, tmp_path):
    """A private copy for tests that mutate artifacts (persist, re-train)."""
    dest = tmp_path / "artifacts"
    shutil.copytree(artifact_dir, dest)
    return dest
