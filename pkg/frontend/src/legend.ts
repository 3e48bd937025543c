// Color legend shared by every overlay layer.
//
// Influence tags: ant red, entity green, other blue.  Predicted states
// render by induction instead: entity-induced black, everything else
// white.

import type { Tag, ZoneLabel } from "./types.js";

export type Rgb = readonly [number, number, number];

export const TAG_COLORS: Record<Tag, Rgb> = {
  ant: [255, 0, 0],
  entity: [0, 255, 0],
  other: [0, 0, 255],
};

export const INDUCTION_COLORS = {
  entity: [0, 0, 0] as Rgb,
  nonEntity: [255, 255, 255] as Rgb,
};

export function tagColor(tag: Tag): Rgb {
  const color = TAG_COLORS[tag];
  if (!color) throw new Error(`unknown influence tag ${tag}`);
  return color;
}

// Inverse of tagColor; exists so tests can assert the mapping is
// one-to-one and so hit-testing can name what a pixel means.
export function tagForColor(color: Rgb): Tag {
  for (const [tag, rgb] of Object.entries(TAG_COLORS) as [Tag, Rgb][]) {
    if (rgb[0] === color[0] && rgb[1] === color[1] && rgb[2] === color[2]) return tag;
  }
  throw new Error(`no tag renders as rgb(${color.join(",")})`);
}

export function inductionColor(tag: Tag): Rgb {
  return tag === "entity" ? INDUCTION_COLORS.entity : INDUCTION_COLORS.nonEntity;
}

// Zones carry detection labels, not influence tags; a larva zone is an
// entity for legend purposes.
export function zoneTag(label: ZoneLabel): Tag {
  if (label === "larva") return "entity";
  if (label === "ant") return "ant";
  return "other";
}

export function cssColor(color: Rgb): string {
  return `rgb(${color[0]},${color[1]},${color[2]})`;
}
