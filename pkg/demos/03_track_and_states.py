"""Follow ants through the frames and discretize their motion into states.

Tracking is greedy nearest-neighbor association against per-frame blob
centroids; a track with no admissible blob coasts in place.  Each tracked
step becomes a movement state (cell + compass move), and consecutive
states feed the smoothed transition model.
"""

from antwatch.detection import detect_zones, merge_zones
from antwatch.extrusion import ExtrudedFrame, estimate_background, extrude_sequence
from antwatch.sim import run_scenario, scenario_preset
from antwatch.states import build_transition_model, discretize
from antwatch.tracking import frame_blobs, stationary_segments, track_entities


def main():
    config = scenario_preset("larval-local", rng_seed=7, n_frames=60)
    run = run_scenario(config)
    background = estimate_background(run.frames)
    extruded = extrude_sequence(run.frames, background)

    pseudo = [
        ExtrudedFrame(f.width, f.height, f.pixels.astype(float), f.index)
        for f in run.frames
    ]
    zones = merge_zones(detect_zones(extruded, min_height=50.0),
                        detect_zones(pseudo, min_height=120.0, source="regular"))
    exclude = {cell for zone in zones for cell in zone.cells}

    blob_frames = [frame_blobs(f, 50.0, exclude=exclude) for f in extruded]
    tracks = track_entities(blob_frames, n_tracks=4)

    for track in tracks:
        coasted = sum(p.interpolated for p in track.points)
        print(f"track {track.track_id}: {len(track.points)} points, "
              f"{coasted} coasted, starts at {track.points[0].cell}")
        for seg in stationary_segments(track, eps=1, min_len=10):
            print(f"  paused at {seg.anchor_cell} frames {seg.start_frame}-{seg.end_frame}")

    states = discretize(tracks[0])
    print()
    print(f"track 0 as states (first 8): {[tuple(s) for s in states[:8]]}")

    model = build_transition_model(
        [discretize(t) for t in tracks], smoothing_alpha=0.5,
        width=config.arena_width, height=config.arena_height,
    )
    origin = states[0]
    row = model.row(origin)
    top = sorted(row.items(), key=lambda kv: -kv[1])[:3]
    print(f"most likely successors of {tuple(origin)}:")
    for successor, p in top:
        print(f"  {tuple(successor)}: {p:.3f}")


if __name__ == "__main__":
    main()
