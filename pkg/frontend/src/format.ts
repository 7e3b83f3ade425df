/** Display formatting and strip geometry; pure functions only. */

export function formatNumber(value: number, digits = 3): string {
  if (!Number.isFinite(value)) {
    return String(value);
  }
  const magnitude = Math.abs(value);
  if (magnitude !== 0 && (magnitude >= 1e5 || magnitude < 1e-3)) {
    return value.toExponential(digits);
  }
  let text = value.toFixed(digits);
  if (text.includes(".")) {
    text = text.replace(/0+$/, "").replace(/\.$/, "");
  }
  return text;
}

export function formatFlow(flow: number): string {
  return `${flow.toFixed(3)} l/min`;
}

export function formatHead(head: number): string {
  return `${head.toFixed(2)} mmHg`;
}

/** Normalized [0, 1] bar heights for the strided field preview. A constant
 * field renders at half height. */
export function stripHeights(values: number[]): number[] {
  if (values.length === 0) {
    return [];
  }
  const low = Math.min(...values);
  const high = Math.max(...values);
  if (high === low) {
    return values.map(() => 0.5);
  }
  return values.map((v) => (v - low) / (high - low));
}
