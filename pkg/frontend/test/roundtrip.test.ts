// End-to-end correction round trip against the real service over a
// seeded pipeline fixture.  Needs python3 with the antwatch package
// importable; everything else in the suite runs without it.

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { rm } from "node:fs/promises";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ServiceClient } from "../src/api.js";
import { waitUntilReady } from "../src/poll.js";
import { ViewState } from "../src/state.js";
import { buildTreeView, hasEdge } from "../src/tree.js";
import type { TreeNode } from "../src/types.js";

const FIXTURE_SCRIPT = `
import tempfile
from pathlib import Path
from antwatch import pipeline
from antwatch.config import FrameOptions, PipelineConfig, TrackingOptions
from antwatch.sim import scenario_preset

out = Path(tempfile.mkdtemp(prefix="antwatch_fixture_"))
config = PipelineConfig(
    scenario=scenario_preset("larval-local", rng_seed=7, n_frames=60),
    frames=FrameOptions(skip=False),
    tracking=TrackingOptions(n_tracks=4),
    output_dir=out,
)
for stage in (pipeline.run_simulate, pipeline.run_extrude, pipeline.run_detect,
              pipeline.run_track, pipeline.run_train):
    stage(config)
print(out)
`;

// Binds port 0 itself and reports the chosen port on stdout, so
// parallel test runs never collide.
const SERVER_SCRIPT = `
import socket, sys
import uvicorn
from antwatch.service import create_app

sock = socket.socket()
sock.bind(("127.0.0.1", 0))
print(sock.getsockname()[1], flush=True)
server = uvicorn.Server(uvicorn.Config(create_app(sys.argv[1]), log_level="warning"))
server.run(sockets=[sock])
`;

let fixtureDir = "";
let server: ChildProcess | null = null;
let baseUrl = "";
let state: ViewState;

function firstLine(child: ChildProcess): Promise<string> {
  return new Promise((resolve, reject) => {
    let buffer = "";
    child.stdout!.on("data", (chunk: Buffer) => {
      buffer += chunk.toString();
      const newline = buffer.indexOf("\n");
      if (newline >= 0) resolve(buffer.slice(0, newline).trim());
    });
    child.on("error", reject);
    child.on("exit", (code) => reject(new Error(`server exited early with ${code}`)));
  });
}

beforeAll(async () => {
  const build = spawnSync("python3", ["-c", FIXTURE_SCRIPT], { encoding: "utf8" });
  if (build.status !== 0) {
    throw new Error(`fixture build failed:\n${build.stderr}`);
  }
  const lines = build.stdout.trim().split("\n");
  fixtureDir = lines[lines.length - 1].trim();

  server = spawn("python3", ["-c", SERVER_SCRIPT, fixtureDir], {
    stdio: ["ignore", "pipe", "inherit"],
  });
  const port = await firstLine(server);
  baseUrl = `http://127.0.0.1:${port}`;
  await waitUntilReady(async () => {
    const response = await fetch(`${baseUrl}/openapi.json`);
    if (!response.ok) throw new Error(`not ready: ${response.status}`);
  });

  state = new ViewState(new ServiceClient(baseUrl));
  state.walkMode = "user";
  state.walkDepth = 3;
  state.walkThreshold = 1e-3;
  await state.open(fixtureDir);
}, 120_000);

afterAll(async () => {
  if (server) server.kill();
  if (fixtureDir) await rm(fixtureDir, { recursive: true, force: true });
});

async function walkFromFirstTrack(): Promise<{ root: TreeNode; child: TreeNode }> {
  const layers = await state.overlays();
  expect(layers.tracks.length).toBeGreaterThan(0);
  const point = layers.tracks[0];
  const tree = await state.requestWalk(point.x, point.y);
  const root = tree.nodes.find((n) => n.parent === null)!;
  const child = tree.nodes.find((n) => n.depth === 1);
  expect(child).toBeDefined();
  return { root, child: child! };
}

describe("correction round trip", () => {
  it("opens a trained session over the fixture", () => {
    expect(state.trained).toBe(true);
    expect(state.frames).toBe(60);
    expect(state.digest).toMatch(/^[0-9a-f]{64}$/);
  });

  it("prunes a branch: the re-fetched tree excludes it and the digest changes", async () => {
    const { root, child } = await walkFromFirstTrack();
    const digestBefore = state.digest;
    expect(hasEdge(buildTreeView(state.tree!), root, child)).toBe(true);

    const result = await state.applyCorrection(child.id, "prune");
    expect(result).not.toBeNull();
    expect(result!.noop).toBe(false);
    expect(state.digest).not.toBe(digestBefore);

    // applyCorrection re-fetched the walk; the pruned transition is gone
    const refreshed = buildTreeView(state.tree!);
    expect(hasEdge(refreshed, root, child)).toBe(false);
    expect(state.corrections.at(-1)).toMatchObject({ action: "prune", noop: false });
  }, 30_000);

  it("boost factor 1 leaves the digest unchanged and logs a no-op", async () => {
    const { child } = await walkFromFirstTrack();
    const digestBefore = state.digest;
    const nodesBefore = state.tree!.nodes.length;

    const result = await state.applyCorrection(child.id, "boost", 1.0);
    expect(result).not.toBeNull();
    expect(result!.noop).toBe(true);
    expect(state.digest).toBe(digestBefore);
    expect(state.tree!.nodes.length).toBe(nodesBefore); // no re-fetch needed
    expect(state.corrections.at(-1)).toMatchObject({ action: "boost", factor: 1, noop: true });

    // the tree stayed fresh server-side: a real boost still goes through
    const followUp = await state.applyCorrection(child.id, "boost", 3.0);
    expect(followUp!.noop).toBe(false);
    expect(state.digest).not.toBe(digestBefore);
  }, 30_000);

  it("depth 0 walks come back as a single node", async () => {
    const layers = await state.overlays();
    const point = layers.tracks[0];
    state.walkDepth = 0;
    const tree = await state.requestWalk(point.x, point.y);
    expect(tree.nodes).toHaveLength(1);
    expect(tree.nodes[0].parent).toBeNull();
    state.walkDepth = 3;
  }, 30_000);
});
