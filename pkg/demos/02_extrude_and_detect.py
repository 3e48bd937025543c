"""Turn flat frames into height fields, then find the stationary zones.

The background estimate is a per-pixel lower median over time.  Anything
present in most frames (the floor, but also a larva that never moves)
becomes background, so the extruded heights show moving ants and hide
parked larvae.  Detection therefore runs twice: once on extruded heights
and once on raw intensities, and merges the two summatively.
"""

from antwatch.detection import detect_zones, merge_zones
from antwatch.extrusion import ExtrudedFrame, estimate_background, extrude_sequence
from antwatch.sim import run_scenario, scenario_preset


def main():
    config = scenario_preset("larval-local", rng_seed=7, n_frames=60)
    run = run_scenario(config)

    background = estimate_background(run.frames)
    extruded = extrude_sequence(run.frames, background)
    print(f"background range: {background.min():.0f}..{background.max():.0f}")
    print(f"peak extruded height: {max(f.heights.max() for f in extruded):.0f}")

    from_heights = detect_zones(extruded, min_height=50.0, source="extruded")
    pseudo = [
        ExtrudedFrame(f.width, f.height, f.pixels.astype(float), f.index)
        for f in run.frames
    ]
    from_raw = detect_zones(pseudo, min_height=120.0, source="regular")

    print(f"zones from extruded heights: {len(from_heights)} "
          "(larvae vanished into the background)")
    print(f"zones from raw intensities:  {len(from_raw)}")

    merged = merge_zones(from_heights, from_raw)
    print(f"after summative merge: {len(merged)} zones")
    for zone in merged:
        print(f"  zone {zone.zone_id}: centroid {zone.centroid}, "
              f"{len(zone.cells)} cells, source {zone.source}")

    centers = run.larva_cluster_centers
    print(f"true cluster centers for comparison: {centers}")


if __name__ == "__main__":
    main()
