/**
 * Pure pixel compositing for the mask overlay, kept DOM-free so the
 * blending math is unit-testable; main.ts feeds it ImageData buffers.
 */

export interface OverlayStyle {
  opacity: number; // 0..1 applied to foreground mask pixels
  color: [number, number, number]; // overlay tint for foreground
}

/**
 * Blend a 0/255 grayscale mask over an RGBA image buffer in place.
 * Foreground pixels are tinted; background pixels are left untouched.
 */
export function compositeOverlay(
  rgba: Uint8ClampedArray,
  mask: Uint8Array,
  style: OverlayStyle,
): void {
  if (rgba.length !== mask.length * 4) {
    throw new Error("mask and image geometry differ");
  }
  const a = Math.min(1, Math.max(0, style.opacity));
  const [tr, tg, tb] = style.color;
  for (let i = 0; i < mask.length; i++) {
    if (mask[i] === 0) continue;
    const o = i * 4;
    rgba[o] = Math.round(rgba[o]! * (1 - a) + tr * a);
    rgba[o + 1] = Math.round(rgba[o + 1]! * (1 - a) + tg * a);
    rgba[o + 2] = Math.round(rgba[o + 2]! * (1 - a) + tb * a);
  }
}

/** Pixels where two 0/255 masks disagree; the refinement-loop readout. */
export function maskDisagreement(a: Uint8Array, b: Uint8Array): number {
  if (a.length !== b.length) throw new Error("mask geometry differs");
  let n = 0;
  for (let i = 0; i < a.length; i++) {
    if (a[i] !== b[i]) n++;
  }
  return n;
}
