/** Canvas renderer: 2 px per cell, integer-perfect, with section overlays. */

import { ViewState } from "./viewstate.js";

export const CELL_PX = 2;

export function canvasSize(state: ViewState): { width: number; height: number } {
  return { width: state.gridWidth * CELL_PX, height: state.gridHeight * CELL_PX };
}

export function render(ctx: CanvasRenderingContext2D, state: ViewState): void {
  const { gridWidth: w, gridHeight: h, frame } = state;
  if (!frame || w === 0) return;
  ctx.fillStyle = "#0d1117";
  ctx.fillRect(0, 0, w * CELL_PX, h * CELL_PX);

  // section overlays: left half primary, right half backup
  const half = Math.floor(w / 2) * CELL_PX;
  ctx.fillStyle = "rgba(63, 185, 80, 0.06)";
  ctx.fillRect(0, 0, half, h * CELL_PX);
  ctx.fillStyle = "rgba(88, 166, 255, 0.06)";
  ctx.fillRect(half, 0, w * CELL_PX - half, h * CELL_PX);
  ctx.strokeStyle = "rgba(139, 148, 158, 0.4)";
  ctx.beginPath();
  ctx.moveTo(half + 0.5, 0);
  ctx.lineTo(half + 0.5, h * CELL_PX);
  ctx.stroke();

  ctx.fillStyle = "#e6edf3";
  for (const [x, y] of frame.cells) {
    ctx.fillRect(x * CELL_PX, y * CELL_PX, CELL_PX, CELL_PX);
  }
}
