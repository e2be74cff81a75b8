import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";

function fakeFetch(status: number, body: unknown) {
  const calls: Array<{ url: string; init?: RequestInit }> = [];
  const fetchFn = async (url: string, init?: RequestInit) => {
    calls.push({ url, init });
    return new Response(JSON.stringify(body), {
      status,
      headers: { "content-type": "application/json" },
    });
  };
  return { fetchFn, calls };
}

const DESIGN_REQ = {
  group1: { sigma2_eps: 0.551, r_delta: 0.43, r_phi: 1.78 },
  group2: { sigma2_eps: 0.705, r_delta: 0.34, r_phi: 1.4 },
  costs: { c_q: 125, c_b: 250, c_total: 50000 },
};

describe("ApiClient", () => {
  it("posts JSON to the design endpoint and unwraps the envelope", async () => {
    const envelope = { schema_version: "1", echo: {}, warnings: [], result: { groups: [] } };
    const { fetchFn, calls } = fakeFetch(200, envelope);
    const client = new ApiClient("http://api.test", fetchFn);
    const got = await client.design(DESIGN_REQ);
    expect(got).toEqual(envelope);
    expect(calls[0].url).toBe("http://api.test/v1/design");
    expect(JSON.parse(String(calls[0].init?.body))).toEqual(DESIGN_REQ);
  });

  it("maps 400 validation bodies to field errors", async () => {
    const { fetchFn } = fakeFetch(400, {
      errors: [{ path: "group1.sigma2_eps", message: "Field required" }],
    });
    const client = new ApiClient("", fetchFn);
    try {
      await client.design(DESIGN_REQ);
      expect.unreachable();
    } catch (err) {
      expect(err).toBeInstanceOf(ApiError);
      const apiErr = err as ApiError;
      expect(apiErr.status).toBe(400);
      expect(apiErr.fieldErrors[0].path).toBe("group1.sigma2_eps");
    }
  });

  it("surfaces the minimal-feasible-budget hint on 422", async () => {
    const { fetchFn } = fakeFetch(422, {
      error: "budget 1000 infeasible", min_feasible_budget: 3000,
    });
    const client = new ApiClient("", fetchFn);
    await expect(client.design(DESIGN_REQ)).rejects.toMatchObject({
      status: 422,
      minFeasibleBudget: 3000,
    });
  });

  it("wraps network failures as unreachable", async () => {
    const client = new ApiClient("", async () => {
      throw new TypeError("connect ECONNREFUSED");
    });
    await expect(client.design(DESIGN_REQ)).rejects.toMatchObject({ status: 0 });
  });

  it("sends the pilot CSV inline", async () => {
    const { fetchFn, calls } = fakeFetch(200, {
      schema_version: "1", echo: {}, warnings: [], result: { groups: [] },
    });
    const client = new ApiClient("", fetchFn);
    await client.estimate("subject_id,group,q,m1\na,1,1.0,2.0\n");
    expect(calls[0].url).toBe("/v1/estimate");
    expect(JSON.parse(String(calls[0].init?.body)).csv).toContain("subject_id");
  });
});
