"""Drive the whole pipeline the way an operator would: one config, seven stages.

Each CLI stage reads the previous stage's artifacts from the output
directory and prints a one-line JSON summary, so `antwatch simulate
--config colony.yaml` and friends compose into a shell script.  This
demo calls the same entry point in-process and then walks the artifact
tree the run leaves behind.
"""

import json
import tempfile
from pathlib import Path

from antwatch.cli import main

CONFIG = """\
scenario:
  preset: larval-local
  rng_seed: 7
  n_frames: 60
frames:
  skip: false
tracking:
  n_tracks: 4
prediction:
  depth_limit: 3
  refine_rounds: 3
output_dir: {out}
"""

STAGES = ("simulate", "extrude", "detect", "track", "train", "predict", "eval")


def tree(root: Path, prefix: str = "  "):
    for path in sorted(root.iterdir()):
        if path.is_dir():
            n = sum(1 for _ in path.iterdir())
            print(f"{prefix}{path.name}/  ({n} files)")
        else:
            print(f"{prefix}{path.name}  ({path.stat().st_size} bytes)")


def run():
    base = Path(tempfile.mkdtemp(prefix="antwatch_demo_"))
    out = base / "colony"
    config = base / "colony.yaml"
    config.write_text(CONFIG.format(out=out))

    for stage in STAGES:
        print(f"$ antwatch {stage} --config {config.name}")
        code = main([stage, "--config", str(config)])
        if code != 0:
            raise SystemExit(f"stage {stage} exited with {code}")

    print("\nartifacts:")
    tree(out)

    report = json.loads((out / "eval_report.json").read_text())
    print(
        f"\ntop-{report['k']} hit rate {report['hit_rate']:.3f} over "
        f"{report['n_evaluated']} moves; a uniform guesser scores "
        f"{report['baseline']:.3f}, so the model is "
        f"{report['skill_ratio']:.1f}x better than chance"
    )
    print("rerunning with the same config and seed reproduces every file byte for byte")


if __name__ == "__main__":
    run()
