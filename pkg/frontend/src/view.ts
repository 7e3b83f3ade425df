/** DOM rendering: binds the controller state to the page and draws the
 * head-flow curve on a canvas. No math beyond pixel mapping happens here. */

import { formatFlow, formatHead, formatNumber, stripHeights } from "./format.js";
import { PanelState } from "./state.js";
import { ConsoleDisplay } from "./controller.js";
import { CurveResponse } from "./types.js";

function element<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

export class DomDisplay implements ConsoleDisplay {
  private readonly banner = element<HTMLDivElement>("error-banner");
  private readonly result = element<HTMLDivElement>("operating-point");
  private readonly calibrated = element<HTMLSpanElement>("calibrated-head");
  private readonly statMin = element<HTMLSpanElement>("stat-min");
  private readonly statMax = element<HTMLSpanElement>("stat-max");
  private readonly statMean = element<HTMLSpanElement>("stat-mean");
  private readonly extrapolated = element<HTMLSpanElement>("extrapolated-badge");
  private readonly strip = element<HTMLDivElement>("field-strip");
  private readonly curveCanvas = element<HTMLCanvasElement>("curve-canvas");
  private readonly curveLabel = element<HTMLDivElement>("curve-label");

  renderState(state: PanelState): void {
    this.banner.textContent = state.errorBanner ?? "";
    this.banner.classList.toggle("visible", state.errorBanner !== null);

    document.body.dataset.activePanel = String(state.activePanel);
    const point = state.operatingPoint;
    this.result.textContent = point
      ? `flow ${formatFlow(point.flow)} at ${point.speed.toFixed(0)} rpm, head ${formatHead(point.head)}`
      : "no operating point yet";
    this.calibrated.textContent =
      state.panel2.calibratedHead === null ? "-" : formatHead(state.panel2.calibratedHead);

    const view = state.fieldView;
    if (view) {
      this.statMin.textContent = formatNumber(view.stats.min);
      this.statMax.textContent = formatNumber(view.stats.max);
      this.statMean.textContent = formatNumber(view.stats.mean);
      this.extrapolated.hidden = !view.extrapolated;
      this.renderStrip(view.values ?? []);
    }
  }

  private renderStrip(values: number[]): void {
    const heights = stripHeights(values);
    this.strip.replaceChildren(
      ...heights.map((h) => {
        const bar = document.createElement("div");
        bar.className = "bar";
        bar.style.height = `${Math.round(6 + 54 * h)}px`;
        return bar;
      }),
    );
  }

  renderCurve(curve: CurveResponse): void {
    const canvas = this.curveCanvas;
    const context = canvas.getContext("2d");
    if (!context) {
      return;
    }
    const { width, height } = canvas;
    const pad = 34;
    context.clearRect(0, 0, width, height);

    const flows = curve.points.map((p) => p.flow);
    const heads = curve.points.map((p) => p.head);
    const fLow = Math.min(...flows);
    const fHigh = Math.max(...flows);
    const hLow = Math.min(...heads);
    const hHigh = Math.max(...heads);
    const x = (f: number) =>
      pad + ((f - fLow) / (fHigh - fLow || 1)) * (width - 2 * pad);
    const y = (h: number) =>
      height - pad - ((h - hLow) / (hHigh - hLow || 1)) * (height - 2 * pad);

    context.strokeStyle = "#8899aa";
    context.lineWidth = 1;
    context.strokeRect(pad, pad, width - 2 * pad, height - 2 * pad);

    context.strokeStyle = "#0a6ebd";
    context.lineWidth = 2;
    context.beginPath();
    curve.points.forEach((p, i) => {
      if (i === 0) {
        context.moveTo(x(p.flow), y(p.head));
      } else {
        context.lineTo(x(p.flow), y(p.head));
      }
    });
    context.stroke();

    context.fillStyle = "#334";
    context.font = "12px sans-serif";
    context.fillText(`${fLow.toFixed(1)}`, pad - 8, height - pad + 16);
    context.fillText(`${fHigh.toFixed(1)} l/min`, width - pad - 24, height - pad + 16);
    context.fillText(`${hHigh.toFixed(0)} mmHg`, 2, pad + 4);
    context.fillText(`${hLow.toFixed(0)}`, 2, height - pad);

    this.curveLabel.textContent = `head-flow curve at ${curve.omega.toFixed(0)} rpm`;
  }
}
