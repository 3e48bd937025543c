"""Run a seeded colony scenario and look at what the simulator records.

Six ants wander a 48x48 nursery with six larvae parked in three clusters.
Attraction pulls ants toward nearby agents, so trails bend around the
clusters.  Everything is reproducible from the seed.
"""

from antwatch.sim import run_scenario, scenario_preset


def ascii_frame(frame, step=1):
    chars = []
    for y in range(0, frame.height, step):
        row = ""
        for x in range(0, frame.width, step):
            v = frame.pixels[y, x]
            row += "#" if v > 120 else "."
        chars.append(row)
    return "\n".join(chars)


def main():
    config = scenario_preset("larval-local", rng_seed=7, n_frames=60)
    run = run_scenario(config)

    print(f"scenario: {config.scenario_kind}, arena {config.arena_width}x{config.arena_height}")
    print(f"agents: {config.n_ants} ants, {config.n_larvae} larvae in "
          f"{config.n_larva_clusters} clusters")
    print(f"larva cluster centers: {run.larva_cluster_centers}")
    print()
    print("frame 0 (\"#\" = bright blob):")
    print(ascii_frame(run.frames[0]))
    print()

    larvae = {(x, y) for f, _, kind, x, y in run.positions if kind == "larva"}
    print(f"{len(larvae)} distinct larva cells over the whole run "
          "(larvae never move)")

    by_category = {}
    for event in run.events:
        by_category[event.category] = by_category.get(event.category, 0) + 1
    print(f"influence events: {by_category}")
    print("re-running with the same seed reproduces every byte of this output")


if __name__ == "__main__":
    main()
