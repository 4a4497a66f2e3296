import type { Brush, CanvasPoint, RowSpan, ScribbleClass, ScribblePoint } from "./types.js";

/**
 * Sparse per-pixel scribble layer.
 *
 * Pixels are stored flat (y * width + x) with last-write-wins semantics,
 * so repainting with the other class simply replaces the entry. Strokes
 * are rasterized as stamped discs along the segment between successive
 * input points; everything outside the image is clipped, which also
 * guarantees the server never sees an out-of-bounds scribble.
 */
export class ScribbleLayer {
  private pixels = new Map<number, ScribbleClass>();

  constructor(readonly width: number, readonly height: number) {
    if (width < 1 || height < 1) {
      throw new Error("scribble layer needs a positive image geometry");
    }
  }

  get size(): number {
    return this.pixels.size;
  }

  classAt(x: number, y: number): ScribbleClass | undefined {
    return this.pixels.get(y * this.width + x);
  }

  hasClass(cls: ScribbleClass): boolean {
    for (const c of this.pixels.values()) {
      if (c === cls) return true;
    }
    return false;
  }

  /** Both classes present: the precondition the server enforces with 422. */
  get runnable(): boolean {
    return this.hasClass("background") && this.hasClass("foreground");
  }

  clear(): void {
    this.pixels.clear();
  }

  erase(x: number, y: number, radius: number): void {
    for (const p of discPixels({ x, y }, radius, this.width, this.height)) {
      this.pixels.delete(p);
    }
  }

  paintPoint(point: CanvasPoint, brush: Brush): void {
    for (const p of discPixels(point, brush.radius, this.width, this.height)) {
      this.pixels.set(p, brush.cls);
    }
  }

  /** Rasterize a polyline stroke: discs stamped along each segment. */
  paintStroke(path: CanvasPoint[], brush: Brush): void {
    if (path.length === 0) return;
    this.paintPoint(path[0]!, brush);
    for (let i = 1; i < path.length; i++) {
      for (const q of segmentPixels(path[i - 1]!, path[i]!)) {
        this.paintPoint(q, brush);
      }
    }
  }

  /** Scribbles as the {x, y, class} point batch the API accepts. */
  toPoints(): ScribblePoint[] {
    const out: ScribblePoint[] = [];
    for (const [flat, cls] of this.pixels) {
      out.push({ x: flat % this.width, y: Math.floor(flat / this.width), class: cls });
    }
    out.sort((a, b) => a.y - b.y || a.x - b.x);
    return out;
  }

  /**
   * Row-wise run-length encoding of the layer. Strokes are spatially
   * coherent, so spans bound the in-memory and redraw cost; the API
   * payload itself is the expanded point form from toPoints().
   */
  toSpans(): RowSpan[] {
    const points = this.toPoints();
    const spans: RowSpan[] = [];
    for (const p of points) {
      const last = spans[spans.length - 1];
      if (last && last.y === p.y && last.cls === p.class && p.x === last.x1 + 1) {
        last.x1 = p.x;
      } else {
        spans.push({ y: p.y, x0: p.x, x1: p.x, cls: p.class });
      }
    }
    return spans;
  }
}

/** Flat indices of the in-bounds pixels within `radius` of the center. */
function* discPixels(center: CanvasPoint, radius: number, width: number, height: number): Generator<number> {
  const r = Math.max(1, Math.floor(radius));
  const cx = Math.round(center.x);
  const cy = Math.round(center.y);
  const rr = (r - 0.5) * (r - 0.5);
  for (let dy = -r + 1; dy <= r - 1; dy++) {
    const y = cy + dy;
    if (y < 0 || y >= height) continue;
    for (let dx = -r + 1; dx <= r - 1; dx++) {
      const x = cx + dx;
      if (x < 0 || x >= width) continue;
      if (dx * dx + dy * dy <= rr || (dx === 0 && dy === 0)) {
        yield y * width + x;
      }
    }
  }
}

/** Integer points along a segment (Bresenham), endpoints included. */
function* segmentPixels(a: CanvasPoint, b: CanvasPoint): Generator<CanvasPoint> {
  let x0 = Math.round(a.x);
  let y0 = Math.round(a.y);
  const x1 = Math.round(b.x);
  const y1 = Math.round(b.y);
  const dx = Math.abs(x1 - x0);
  const dy = -Math.abs(y1 - y0);
  const sx = x0 < x1 ? 1 : -1;
  const sy = y0 < y1 ? 1 : -1;
  let err = dx + dy;
  for (;;) {
    yield { x: x0, y: y0 };
    if (x0 === x1 && y0 === y1) break;
    const e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}
