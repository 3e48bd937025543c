// Overlay painting into a plain RGBA buffer.  The browser layer blits
// the buffer into a canvas via ImageData; tests inspect it directly.

import { inductionColor, tagColor, zoneTag, type Rgb } from "./legend.js";
import type { PgmImage } from "./pgm.js";
import type { PredictedState, TrackPoint, Zone } from "./types.js";

export interface Raster {
  cellsWide: number;
  cellsHigh: number;
  scale: number; // pixels per grid cell
  width: number; // cellsWide * scale
  height: number;
  data: Uint8ClampedArray<ArrayBuffer>; // RGBA, row-major
}

export function rasterFromFrame(frame: PgmImage, scale = 4): Raster {
  if (scale < 1) throw new Error("scale must be >= 1");
  const width = frame.width * scale;
  const height = frame.height * scale;
  const data = new Uint8ClampedArray(width * height * 4);
  for (let py = 0; py < height; py++) {
    const cy = Math.floor(py / scale);
    for (let px = 0; px < width; px++) {
      const gray = frame.pixels[cy * frame.width + Math.floor(px / scale)];
      const at = (py * width + px) * 4;
      data[at] = gray;
      data[at + 1] = gray;
      data[at + 2] = gray;
      data[at + 3] = 255;
    }
  }
  return { cellsWide: frame.width, cellsHigh: frame.height, scale, width, height, data };
}

function putPixel(raster: Raster, px: number, py: number, color: Rgb): void {
  if (px < 0 || py < 0 || px >= raster.width || py >= raster.height) return;
  const at = (py * raster.width + px) * 4;
  raster.data[at] = color[0];
  raster.data[at + 1] = color[1];
  raster.data[at + 2] = color[2];
  raster.data[at + 3] = 255;
}

// Paint one edge of a cell's pixel block.  dx/dy name the outward
// direction of the edge being drawn.
function cellEdge(raster: Raster, x: number, y: number, dx: number, dy: number, color: Rgb): void {
  const s = raster.scale;
  const left = x * s;
  const top = y * s;
  if (dy === -1) for (let i = 0; i < s; i++) putPixel(raster, left + i, top, color);
  if (dy === 1) for (let i = 0; i < s; i++) putPixel(raster, left + i, top + s - 1, color);
  if (dx === -1) for (let i = 0; i < s; i++) putPixel(raster, left, top + i, color);
  if (dx === 1) for (let i = 0; i < s; i++) putPixel(raster, left + s - 1, top + i, color);
}

function fillBlock(raster: Raster, x: number, y: number, color: Rgb, inset = 0): void {
  const s = raster.scale;
  for (let j = inset; j < s - inset; j++) {
    for (let i = inset; i < s - inset; i++) {
      putPixel(raster, x * s + i, y * s + j, color);
    }
  }
  if (inset >= s) putPixel(raster, x * s, y * s, color); // tiny scale fallback
}

// Outline every zone in its legend color: only edges facing cells
// outside the zone are drawn, so a region gets one closed ring.
export function outlineZones(raster: Raster, zones: Zone[]): void {
  for (const zone of zones) {
    const color = tagColor(zoneTag(zone.label));
    const member = new Set(zone.cells.map(([x, y]) => `${x},${y}`));
    for (const [x, y] of zone.cells) {
      for (const [dx, dy] of [[1, 0], [-1, 0], [0, 1], [0, -1]] as const) {
        if (!member.has(`${x + dx},${y + dy}`)) cellEdge(raster, x, y, dx, dy, color);
      }
    }
  }
}

// Track points are ants; interpolated (coasted) points render hollow.
export function drawTracks(raster: Raster, points: TrackPoint[]): void {
  const color = tagColor("ant");
  for (const point of points) {
    if (point.interpolated) {
      for (const [dx, dy] of [[1, 0], [-1, 0], [0, 1], [0, -1]] as const) {
        cellEdge(raster, point.x, point.y, dx, dy, color);
      }
    } else {
      fillBlock(raster, point.x, point.y, color);
    }
  }
}

// Predicted states use the induction palette: black when entity
// induced, white otherwise.  An inset keeps the frame visible around
// dense prediction clouds.
export function drawPrediction(raster: Raster, states: PredictedState[]): void {
  const inset = raster.scale >= 4 ? 1 : 0;
  for (const state of states) {
    fillBlock(raster, state.x, state.y, inductionColor(state.tag), inset);
  }
}

// Count exact-color pixels; the rendering tests assert the legend this
// way instead of snapshotting images.
export function countPixels(raster: Raster, color: Rgb): number {
  let n = 0;
  for (let at = 0; at < raster.data.length; at += 4) {
    if (
      raster.data[at] === color[0] &&
      raster.data[at + 1] === color[1] &&
      raster.data[at + 2] === color[2]
    ) {
      n++;
    }
  }
  return n;
}
