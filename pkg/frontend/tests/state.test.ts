import { describe, expect, it } from "vitest";

import {
  errorMessage,
  initialState,
  withError,
  withFieldView,
  withOperatingPoint,
} from "../src/state.js";
import { ApiError, FieldResponse } from "../src/types.js";
import { formatNumber, stripHeights } from "../src/format.js";

const view: FieldResponse = {
  field: "p",
  parameter: [4],
  stats: { min: -1, max: 2, mean: 0.25 },
  values: [0, 1, 2],
  extrapolated: false,
};

describe("state transitions", () => {
  it("keeps the previous field view and inputs on error", () => {
    let state = initialState();
    state = withFieldView(state, view);
    state = withError(state, "boom");
    expect(state.fieldView).toEqual(view);
    expect(state.panel1).toEqual(initialState().panel1);
    expect(state.errorBanner).toBe("boom");
  });

  it("clears the banner on a successful operating point", () => {
    let state = withError(initialState(), "old problem");
    state = withOperatingPoint(state, { speed: 5000, flow: 4, head: 61.87 });
    expect(state.errorBanner).toBeNull();
    expect(state.operatingPoint?.flow).toBe(4);
  });
});

describe("errorMessage", () => {
  it("names the admissible range and the computed flow", () => {
    const error = new ApiError(422, {
      reason: "flow_out_of_range",
      detail: "x",
      computed_flow: 5.4321,
      pf_min: 3,
      pf_max: 5,
    });
    const message = errorMessage(error);
    expect(message).toContain("[3, 5]");
    expect(message).toContain("5.432");
  });

  it("covers the no-real-root case", () => {
    const error = new ApiError(422, { reason: "no_real_root", detail: "x" });
    expect(errorMessage(error)).toContain("No pump flow");
  });

  it("treats unknown failures as connectivity problems", () => {
    expect(errorMessage(new TypeError("fetch failed"))).toContain("inputs kept");
  });
});

describe("format helpers", () => {
  it("renders compact numbers", () => {
    expect(formatNumber(61.87)).toBe("61.87");
    expect(formatNumber(0.000012)).toBe("1.200e-5");
    expect(formatNumber(4)).toBe("4");
  });

  it("normalizes strip heights", () => {
    expect(stripHeights([1, 3, 2])).toEqual([0, 1, 0.5]);
    expect(stripHeights([7, 7])).toEqual([0.5, 0.5]);
    expect(stripHeights([])).toEqual([]);
  });
});
