import { describe, expect, it } from "vitest";

import { ScribbleLayer } from "./scribbles.js";

describe("ScribbleLayer painting", () => {
  it("a single click with radius 1 paints exactly one pixel", () => {
    const layer = new ScribbleLayer(16, 16);
    layer.paintStroke([{ x: 5, y: 7 }], { cls: "foreground", radius: 1 });
    expect(layer.size).toBe(1);
    expect(layer.classAt(5, 7)).toBe("foreground");
  });

  it("strokes across the border are clipped to the image", () => {
    const layer = new ScribbleLayer(10, 10);
    layer.paintStroke(
      [
        { x: 8, y: 5 },
        { x: 15, y: 5 },
      ],
      { cls: "background", radius: 2 },
    );
    for (const p of layer.toPoints()) {
      expect(p.x).toBeGreaterThanOrEqual(0);
      expect(p.x).toBeLessThan(10);
      expect(p.y).toBeGreaterThanOrEqual(0);
      expect(p.y).toBeLessThan(10);
    }
    expect(layer.size).toBeGreaterThan(0);
  });

  it("repainting the same pixels with the other class replaces them", () => {
    const layer = new ScribbleLayer(8, 8);
    layer.paintStroke([{ x: 3, y: 3 }], { cls: "background", radius: 2 });
    const before = layer.toPoints().map((p) => [p.x, p.y]);
    layer.paintStroke([{ x: 3, y: 3 }], { cls: "foreground", radius: 2 });
    for (const [x, y] of before) {
      expect(layer.classAt(x!, y!)).toBe("foreground");
    }
    expect(layer.hasClass("background")).toBe(false);
  });

  it("a diagonal stroke is contiguous (no gaps between segment points)", () => {
    const layer = new ScribbleLayer(32, 32);
    layer.paintStroke(
      [
        { x: 2, y: 2 },
        { x: 20, y: 13 },
      ],
      { cls: "foreground", radius: 1 },
    );
    const points = layer.toPoints();
    // every painted pixel (after the first) touches another painted pixel
    const key = (x: number, y: number) => y * 32 + x;
    const set = new Set(points.map((p) => key(p.x, p.y)));
    for (const p of points) {
      let touching = 0;
      for (let dy = -1; dy <= 1; dy++) {
        for (let dx = -1; dx <= 1; dx++) {
          if (dx === 0 && dy === 0) continue;
          if (set.has(key(p.x + dx, p.y + dy))) touching++;
        }
      }
      expect(touching).toBeGreaterThan(0);
    }
  });

  it("erase removes pixels under the eraser only", () => {
    const layer = new ScribbleLayer(10, 10);
    layer.paintStroke(
      [
        { x: 1, y: 1 },
        { x: 8, y: 1 },
      ],
      { cls: "foreground", radius: 1 },
    );
    const before = layer.size;
    layer.erase(4, 1, 1);
    expect(layer.size).toBe(before - 1);
    expect(layer.classAt(4, 1)).toBeUndefined();
    expect(layer.classAt(3, 1)).toBe("foreground");
  });
});

describe("run precondition", () => {
  it("requires at least one pixel of each class", () => {
    const layer = new ScribbleLayer(8, 8);
    expect(layer.runnable).toBe(false);
    layer.paintStroke([{ x: 1, y: 1 }], { cls: "foreground", radius: 1 });
    expect(layer.runnable).toBe(false);
    layer.paintStroke([{ x: 6, y: 6 }], { cls: "background", radius: 1 });
    expect(layer.runnable).toBe(true);
  });
});

describe("encodings", () => {
  it("row spans merge consecutive same-class pixels", () => {
    const layer = new ScribbleLayer(12, 4);
    layer.paintStroke(
      [
        { x: 2, y: 1 },
        { x: 6, y: 1 },
      ],
      { cls: "background", radius: 1 },
    );
    layer.paintStroke([{ x: 8, y: 1 }], { cls: "foreground", radius: 1 });
    expect(layer.toSpans()).toEqual([
      { y: 1, x0: 2, x1: 6, cls: "background" },
      { y: 1, x0: 8, x1: 8, cls: "foreground" },
    ]);
  });

  it("point export matches the span expansion", () => {
    const layer = new ScribbleLayer(20, 20);
    layer.paintStroke(
      [
        { x: 3, y: 3 },
        { x: 15, y: 9 },
      ],
      { cls: "foreground", radius: 3 },
    );
    const fromSpans: Array<[number, number]> = [];
    for (const span of layer.toSpans()) {
      for (let x = span.x0; x <= span.x1; x++) fromSpans.push([x, span.y]);
    }
    expect(layer.toPoints().map((p) => [p.x, p.y])).toEqual(fromSpans);
  });
});
