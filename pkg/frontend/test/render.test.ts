import { join } from "path";
import { describe, expect, it } from "vitest";

import { loadCsv } from "../src/csv";
import {
  EmptyDataError,
  renderOutageVsPower,
  renderRegionMap,
  renderThroughputVsElements,
  renderThroughputVsPower,
  renderTrajectory,
  SCHEME_COLORS,
} from "../src/render";

const FIX = join(__dirname, "fixtures");

const load = (rel: string, kind: "metrics" | "trajectory" | "regionmap") =>
  loadCsv(join(FIX, rel), kind);

function expectCleanSvg(svg: string): void {
  expect(svg.startsWith("<svg")).toBe(true);
  expect(svg).toContain("</svg>");
  expect(svg).not.toContain("NaN");
  expect(svg).not.toContain("Infinity");
}

describe("throughput vs power", () => {
  it("overlays both fig2 variants with every scheme in the legend", () => {
    const svg = renderThroughputVsPower([
      load("fig2/metrics.csv", "metrics"),
      load("fig2/metrics_impaired.csv", "metrics"),
    ]);
    expectCleanSvg(svg);
    for (const scheme of Object.keys(SCHEME_COLORS)) {
      if (scheme === "UnblockedRef") continue;
      expect(svg).toContain(`>${scheme}<`);
      expect(svg).toContain(`>${scheme} (impaired)<`);
    }
    expect(svg).toContain("transmit power (dBm)");
    expect(svg).toContain("throughput (Mbit/s)");
    // 7 schemes x 2 variants drawn as one polyline each.
    expect(svg.match(/<polyline /g)?.length).toBe(14);
  });
});

describe("outage vs power", () => {
  it("renders fig3 on a log axis with decade labels", () => {
    const svg = renderOutageVsPower([load("fig3/metrics.csv", "metrics")]);
    expectCleanSvg(svg);
    expect(svg).toContain("outage probability");
    expect(svg).toMatch(/>1e-\d+</);
    expect(svg.match(/<polyline /g)?.length).toBe(7);
  });
});

describe("throughput vs elements", () => {
  it("overlays the four fig6 variants", () => {
    const svg = renderThroughputVsElements([
      load("fig6/metrics.csv", "metrics"),
      load("fig6/metrics_impaired.csv", "metrics"),
      load("fig6/metrics_sub6.csv", "metrics"),
      load("fig6/metrics_sub6_impaired.csv", "metrics"),
    ]);
    expectCleanSvg(svg);
    expect(svg).toContain("RIS elements per panel");
    // 2 schemes x 4 variants.
    expect(svg.match(/<polyline /g)?.length).toBe(8);
    expect(svg).toContain(">LSRPA (sub6 impaired)<");
  });
});

describe("trajectory", () => {
  it("draws the fig4 timeline with blocked shading and the clear-road trace", () => {
    const svg = renderTrajectory([load("fig4/trajectory.csv", "trajectory")]);
    expectCleanSvg(svg);
    expect(svg).toContain(">UnblockedRef<");
    expect(svg).toContain(">LSRPA<");
    expect(svg).toContain(">NoRisMmw<");
    expect(svg).toContain('opacity="0.15"');
    expect(svg.match(/<polyline /g)?.length).toBe(3);
  });
});

describe("region map", () => {
  it("draws one strip per truck position with a candidate legend", () => {
    const svg = renderRegionMap([load("fig5/regionmap.csv", "regionmap")]);
    expectCleanSvg(svg);
    expect(svg.match(/truck at /g)?.length).toBe(3);
    for (const candidate of ["Direct", "ViaRis1", "ViaRis2"]) {
      expect(svg).toContain(`>${candidate}<`);
    }
    expect(svg).toContain("UE position (m)");
  });
});

describe("empty input", () => {
  it("raises a dedicated error instead of an empty figure", () => {
    expect(() => renderThroughputVsPower([{ file: "x", label: "", rows: [] }]))
      .toThrowError(EmptyDataError);
    expect(() => renderTrajectory([{ file: "x", label: "", rows: [] }]))
      .toThrowError(EmptyDataError);
    expect(() => renderRegionMap([{ file: "x", label: "", rows: [] }]))
      .toThrowError(EmptyDataError);
  });
});
