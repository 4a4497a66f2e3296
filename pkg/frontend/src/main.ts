import { ApiClient, bytesToBlob } from "./api.js";
import { compositeOverlay } from "./overlay.js";
import { UiController } from "./state.js";
import type { Brush, CanvasPoint, ScribbleClass, SegmentOptions } from "./types.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

const controller = new UiController(new ApiClient(""));

const canvas = $<HTMLCanvasElement>("canvas");
const ctx = canvas.getContext("2d")!;
const spark = $<HTMLCanvasElement>("sparkline");
const sparkCtx = spark.getContext("2d")!;
const statusEl = $<HTMLDivElement>("status");
const runButton = $<HTMLButtonElement>("run");
const historyEl = $<HTMLUListElement>("history");

let imageBitmap: ImageBitmap | null = null;
let maskGray: Uint8Array | null = null;
let stroke: CanvasPoint[] = [];

const brush = (): Brush => ({
  cls: ($<HTMLInputElement>("cls-fg").checked ? "foreground" : "background") as ScribbleClass,
  radius: Number($<HTMLInputElement>("radius").value) || 1,
});

const options = (): SegmentOptions => ({
  k: Number($<HTMLInputElement>("opt-k").value) || 100,
  seed: Number($<HTMLInputElement>("opt-seed").value) || 0,
  lambda_mode: $<HTMLSelectElement>("opt-lambda").value as SegmentOptions["lambda_mode"],
});

function canvasPoint(event: PointerEvent): CanvasPoint {
  const rect = canvas.getBoundingClientRect();
  return {
    x: ((event.clientX - rect.left) / rect.width) * canvas.width,
    y: ((event.clientY - rect.top) / rect.height) * canvas.height,
  };
}

function redraw(): void {
  if (!imageBitmap || !controller.layer) return;
  ctx.drawImage(imageBitmap, 0, 0);
  if (maskGray) {
    const frame = ctx.getImageData(0, 0, canvas.width, canvas.height);
    compositeOverlay(frame.data, maskGray, {
      opacity: Number($<HTMLInputElement>("opacity").value) / 100,
      color: [255, 64, 64],
    });
    ctx.putImageData(frame, 0, 0);
  }
  for (const span of controller.layer.toSpans()) {
    ctx.fillStyle = span.cls === "foreground" ? "#e33" : "#36f";
    ctx.fillRect(span.x0, span.y, span.x1 - span.x0 + 1, 1);
  }
}

function drawSparkline(): void {
  const series = controller.progressSeries;
  sparkCtx.clearRect(0, 0, spark.width, spark.height);
  if (series.length < 2) return;
  sparkCtx.beginPath();
  sparkCtx.strokeStyle = "#383";
  series.forEach((v, i) => {
    const x = (i / (series.length - 1)) * (spark.width - 2) + 1;
    const y = spark.height - 1 - v * (spark.height - 2);
    i === 0 ? sparkCtx.moveTo(x, y) : sparkCtx.lineTo(x, y);
  });
  sparkCtx.stroke();
}

async function decodeMask(png: Uint8Array): Promise<Uint8Array> {
  const bitmap = await createImageBitmap(bytesToBlob(png, "image/png"));
  const scratch = document.createElement("canvas");
  scratch.width = bitmap.width;
  scratch.height = bitmap.height;
  const sctx = scratch.getContext("2d")!;
  sctx.drawImage(bitmap, 0, 0);
  const data = sctx.getImageData(0, 0, bitmap.width, bitmap.height).data;
  const gray = new Uint8Array(bitmap.width * bitmap.height);
  for (let i = 0; i < gray.length; i++) gray[i] = data[i * 4]!;
  return gray;
}

controller.onChange = () => {
  statusEl.textContent = controller.statusText;
  runButton.disabled = !controller.canRun;
  runButton.title = controller.runDisabledReason ?? "start segmentation";
  drawSparkline();
};

$<HTMLInputElement>("file").addEventListener("change", async (event) => {
  const file = (event.target as HTMLInputElement).files?.[0];
  if (!file) return;
  const bytes = new Uint8Array(await file.arrayBuffer());
  const session = await controller.upload(bytes);
  imageBitmap = await createImageBitmap(bytesToBlob(bytes));
  canvas.width = session.width;
  canvas.height = session.height;
  maskGray = null;
  redraw();
});

canvas.addEventListener("pointerdown", (event) => {
  if (!controller.layer) return;
  canvas.setPointerCapture(event.pointerId);
  stroke = [canvasPoint(event)];
  controller.layer.paintStroke(stroke, brush());
  redraw();
  controller.onChange();
});

canvas.addEventListener("pointermove", (event) => {
  if (!controller.layer || stroke.length === 0) return;
  const point = canvasPoint(event);
  controller.layer.paintStroke([stroke[stroke.length - 1]!, point], brush());
  stroke.push(point);
  redraw();
});

canvas.addEventListener("pointerup", () => {
  stroke = [];
  controller.onChange();
});

$<HTMLInputElement>("opacity").addEventListener("input", redraw);

runButton.addEventListener("click", async () => {
  const record = await controller.runAndPoll(options());
  if (record) {
    maskGray = await decodeMask(record.maskPng);
    const item = document.createElement("li");
    item.textContent =
      `run ${controller.history.length}: alpha=${record.result.alpha.toFixed(4)}, ` +
      `rounds=${record.result.rounds}, k=${record.result.k}, seed=${record.result.seed}`;
    historyEl.appendChild(item);
    redraw();
  }
});

$<HTMLButtonElement>("clear").addEventListener("click", () => {
  controller.layer?.clear();
  redraw();
  controller.onChange();
});

controller.onChange();
