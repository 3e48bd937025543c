import { describe, expect, it } from "vitest";

import type { PgmImage } from "../src/pgm.js";
import {
  countPixels,
  drawPrediction,
  drawTracks,
  outlineZones,
  rasterFromFrame,
} from "../src/render.js";
import type { PredictedState, Zone } from "../src/types.js";

const RED = [255, 0, 0] as const;
const GREEN = [0, 255, 0] as const;
const BLUE = [0, 0, 255] as const;
const WHITE = [255, 255, 255] as const;
const BLACK = [0, 0, 0] as const;

function grayFrame(width: number, height: number, value = 40): PgmImage {
  return { width, height, maxval: 255, pixels: new Uint8Array(width * height).fill(value) };
}

function larvaZone(): Zone {
  return {
    zone_id: 0,
    cells: [[3, 3], [4, 3], [3, 4], [4, 4]],
    centroid: [4, 4],
    label: "larva",
    source: "merged",
  };
}

describe("rasterFromFrame", () => {
  it("scales each cell to a block and replicates gray", () => {
    const raster = rasterFromFrame(grayFrame(3, 2, 77), 4);
    expect(raster.width).toBe(12);
    expect(raster.height).toBe(8);
    expect(raster.data.length).toBe(12 * 8 * 4);
    expect(countPixels(raster, [77, 77, 77])).toBe(12 * 8);
    expect(raster.data[3]).toBe(255); // opaque
  });

  it("rejects zero scale", () => {
    expect(() => rasterFromFrame(grayFrame(2, 2), 0)).toThrow(/scale/);
  });
});

describe("outlineZones", () => {
  it("draws one larva zone as a green-outlined region", () => {
    const raster = rasterFromFrame(grayFrame(10, 10), 4);
    outlineZones(raster, [larvaZone()]);
    expect(countPixels(raster, GREEN)).toBeGreaterThan(0);
    expect(countPixels(raster, RED)).toBe(0);
    expect(countPixels(raster, BLUE)).toBe(0);
    // the 2x2-cell interior stays frame gray: only outward edges paint
    const s = 4;
    const interiorAt = ((3 * s + s - 1) * raster.width + (3 * s + s - 1)) * 4;
    expect(raster.data[interiorAt]).toBe(40);
  });

  it("colors zones by their label", () => {
    const raster = rasterFromFrame(grayFrame(10, 10), 4);
    const antZone: Zone = { ...larvaZone(), label: "ant", cells: [[7, 7]], centroid: [7, 7] };
    const unknownZone: Zone = { ...larvaZone(), label: "unknown", cells: [[1, 7]], centroid: [1, 7] };
    outlineZones(raster, [larvaZone(), antZone, unknownZone]);
    expect(countPixels(raster, GREEN)).toBeGreaterThan(0);
    expect(countPixels(raster, RED)).toBeGreaterThan(0);
    expect(countPixels(raster, BLUE)).toBeGreaterThan(0);
  });
});

describe("drawTracks", () => {
  it("fills real points and outlines coasted ones in ant red", () => {
    const raster = rasterFromFrame(grayFrame(8, 8), 4);
    drawTracks(raster, [
      { track: 0, x: 1, y: 1, interpolated: false },
      { track: 1, x: 5, y: 5, interpolated: true },
    ]);
    // filled block: 16 pixels; hollow ring: 12 pixels at scale 4
    expect(countPixels(raster, RED)).toBe(16 + 12);
  });
});

describe("drawPrediction", () => {
  it("renders only white markers when nothing is entity induced", () => {
    const raster = rasterFromFrame(grayFrame(8, 8), 4);
    const states: PredictedState[] = [
      { x: 1, y: 1, p: 1.0, tag: "other" },
      { x: 2, y: 1, p: 0.4, tag: "ant" },
      { x: 2, y: 2, p: 0.2, tag: "other" },
    ];
    drawPrediction(raster, states);
    expect(countPixels(raster, WHITE)).toBeGreaterThan(0);
    expect(countPixels(raster, BLACK)).toBe(0);
  });

  it("renders entity-induced states black", () => {
    const raster = rasterFromFrame(grayFrame(8, 8), 4);
    drawPrediction(raster, [{ x: 3, y: 3, p: 0.6, tag: "entity" }]);
    expect(countPixels(raster, BLACK)).toBe(4); // 2x2 after inset at scale 4
    expect(countPixels(raster, WHITE)).toBe(0);
  });
});
