// Thin typed client over the planner API. Every computed number shown in
// the UI comes from these responses; the client never re-derives designs.

import type {
  ApiFieldError,
  BudgetRequest,
  BudgetResult,
  DesignRequest,
  DesignResult,
  Envelope,
  EstimateResult,
  SensitivityRequest,
  SensitivityRow,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
    public fieldErrors: ApiFieldError[] = [],
    public minFeasibleBudget?: number,
  ) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchFn: FetchLike = (...args) => fetch(...args),
  ) {}

  private async post<T>(path: string, body: unknown): Promise<Envelope<T>> {
    let response: Response;
    try {
      response = await this.fetchFn(this.baseUrl + path, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(body),
      });
    } catch (err) {
      throw new ApiError(0, `API unreachable: ${String(err)}`);
    }
    const payload = await response.json().catch(() => ({}));
    if (!response.ok) {
      const errors: ApiFieldError[] = Array.isArray(payload.errors) ? payload.errors : [];
      const message =
        typeof payload.error === "string"
          ? payload.error
          : errors.map((e) => `${e.path}: ${e.message}`).join("; ") ||
            `request failed with status ${response.status}`;
      throw new ApiError(response.status, message, errors, payload.min_feasible_budget);
    }
    return payload as Envelope<T>;
  }

  health(): Promise<{ status: string; version: string }> {
    return this.fetchFn(this.baseUrl + "/v1/health")
      .then((r) => {
        if (!r.ok) throw new ApiError(r.status, "health check failed");
        return r.json();
      })
      .catch((err) => {
        throw err instanceof ApiError ? err : new ApiError(0, `API unreachable: ${String(err)}`);
      });
  }

  design(req: DesignRequest): Promise<Envelope<DesignResult>> {
    return this.post("/v1/design", req);
  }

  budget(req: BudgetRequest): Promise<Envelope<BudgetResult>> {
    return this.post("/v1/budget", req);
  }

  estimate(csvText: string): Promise<Envelope<EstimateResult>> {
    return this.post("/v1/estimate", { csv: csvText });
  }

  sensitivity(req: SensitivityRequest): Promise<Envelope<{ rows: SensitivityRow[] }>> {
    return this.post("/v1/sensitivity", req);
  }
}
