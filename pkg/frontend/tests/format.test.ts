import { describe, expect, it } from "vitest";

import { jsonDownload, sig4, tableToCsv } from "../src/format.js";

describe("sig4", () => {
  it("shows four significant figures", () => {
    expect(sig4(0.035694136)).toBe("0.03569");
    expect(sig4(0.9865)).toBe("0.9865");
    expect(sig4(1016565.4)).toBe("1017000");
    expect(sig4(0.48)).toBe("0.48");
  });

  it("keeps integer counts exact", () => {
    expect(sig4(1301)).toBe("1301");
    expect(sig4(50000)).toBe("50000");
  });

  it("handles edge values", () => {
    expect(sig4(0)).toBe("0");
    expect(sig4(null)).toBe("–");
    expect(sig4(Number.NaN)).toBe("–");
  });
});

describe("tableToCsv", () => {
  it("emits exactly the server rows with a header", () => {
    const rows = [
      { multiplier: 0.5, efficiency: 0.98437, allocation: 0.39 },
      { multiplier: 1.0, efficiency: 1.0, allocation: 0.48 },
    ];
    expect(tableToCsv(rows)).toBe(
      "multiplier,efficiency,allocation\n0.5,0.98437,0.39\n1,1,0.48");
  });

  it("escapes cells containing separators", () => {
    expect(tableToCsv([{ a: 'x,"y"', b: 1 }])).toBe('a,b\n"x,""y""",1');
  });

  it("handles empty input", () => {
    expect(tableToCsv([])).toBe("");
  });
});

describe("jsonDownload", () => {
  it("round-trips the payload", () => {
    const payload = { result: { achieved_se: 0.123456789 } };
    expect(JSON.parse(jsonDownload(payload))).toEqual(payload);
  });
});
