"""Build the observation database, train the classifier, score fresh states.

Every real tracked step becomes an observation labelled by the influence
at its cell (entity when a larva zone is close, ant when another ant is,
other otherwise).  A state's feature is its Laplace-smoothed category
triple over similar observations; the 3x3 softmax layer learns to map
triples back to categories and generalizes to states never seen.
"""

import json
import tempfile
from pathlib import Path

from antwatch import pipeline
from antwatch.classifier import classify
from antwatch.config import FrameOptions, PipelineConfig, TrackingOptions
from antwatch.modelfile import load_model
from antwatch.sim import scenario_preset
from antwatch.states import estimate_probabilities, sample_random_states


def main():
    out = Path(tempfile.mkdtemp(prefix="antwatch_demo_"))
    config = PipelineConfig(
        scenario=scenario_preset("larval-local", rng_seed=7, n_frames=60),
        frames=FrameOptions(skip=False),
        tracking=TrackingOptions(n_tracks=4),
        output_dir=out,
    )
    for stage in (pipeline.run_simulate, pipeline.run_extrude,
                  pipeline.run_detect, pipeline.run_track):
        stage(config)
    summary = pipeline.run_train(config)
    print(f"training finished: {summary}")

    report = json.loads((out / "train_report.json").read_text())
    print(f"epochs {report['epochs']}, stop {report['stop_reason']}, "
          f"loss {report['final_loss']:.4f}, "
          f"training accuracy {report['training_accuracy']:.2f}")

    model = load_model(out / "model.json")
    print(f"{len(model.observations)} observations, "
          f"{len([z for z in model.zones if z.label == 'larva'])} larva zones")
    print()
    print("classifying five random states:")
    for state in sample_random_states(48, 48, 5, rng_seed=1):
        triple = estimate_probabilities(state, model.observations, model.similarity_radius)
        category, _ = classify(triple, model.table)
        print(f"  {tuple(state)}: p=({triple.p_ant:.2f}, {triple.p_entity:.2f}, "
              f"{triple.p_other:.2f}) -> {category}")
    print(f"artifacts left in {out}")


if __name__ == "__main__":
    main()
