"""Expand a probable-future tree for one ant and steer it with corrections.

A walk tree grows breadth-first from the ant's best-matching observed
state; branches die when their cumulative probability falls below the
threshold.  An operator can prune a branch for good or boost one, and
both feed straight back into the transition model, so the next expansion
reflects the correction.
"""

import tempfile
from pathlib import Path

from antwatch import pipeline
from antwatch.config import FrameOptions, PipelineConfig, TrackingOptions
from antwatch.modelfile import load_model, model_digest
from antwatch.prediction import apply_correction, expand_walk, node_path
from antwatch.sim import scenario_preset


def main():
    out = Path(tempfile.mkdtemp(prefix="antwatch_demo_"))
    config = PipelineConfig(
        scenario=scenario_preset("larval-local", rng_seed=7, n_frames=60),
        frames=FrameOptions(skip=False),
        tracking=TrackingOptions(n_tracks=4),
        output_dir=out,
    )
    for stage in (pipeline.run_simulate, pipeline.run_extrude,
                  pipeline.run_detect, pipeline.run_track, pipeline.run_train):
        stage(config)
    model = load_model(out / "model.json")

    start = model.observations[0].state
    tree = expand_walk(start, model, depth_limit=4, threshold=1e-3)
    nodes = tree.nodes()
    print(f"walk from {tuple(start)}: {len(nodes)} nodes to depth 4 at threshold 1e-3")
    tags = {}
    for node in nodes:
        tags[node.category] = tags.get(node.category, 0) + 1
    print(f"node tags: {tags}")

    victim = tree.root.children[0]
    path = node_path(tree, 1)  # node 1 is the first depth-1 child
    print(f"\npruning the branch to {tuple(victim.state)}")
    before = model_digest(model)
    apply_correction(model, tree, "prune", path)
    print(f"model digest changed: {model_digest(model) != before}")

    regrown = expand_walk(start, model, depth_limit=4, threshold=1e-3)
    depth1 = [tuple(n.state) for n in regrown.nodes() if n.depth == 1]
    print(f"depth-1 branches after prune: {depth1}")
    print(f"pruned branch gone: {tuple(victim.state) not in depth1}")

    survivor = regrown.root.children[0]
    p_before = survivor.path_probability
    before = model_digest(model)
    apply_correction(model, regrown, "boost", node_path(regrown, 1), factor=1.0)
    print(f"\nboost with factor 1 is a bit-exact no-op: {model_digest(model) == before}")
    apply_correction(model, regrown, "boost", node_path(regrown, 1), factor=3.0)
    boosted = expand_walk(start, model, depth_limit=1, threshold=1e-3)
    p_after = next(n.path_probability for n in boosted.nodes()
                   if n.state == survivor.state and n.depth == 1)
    print(f"boost factor 3 on {tuple(survivor.state)}: "
          f"P {p_before:.3f} -> {p_after:.3f}")


if __name__ == "__main__":
    main()
