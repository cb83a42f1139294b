/** Typed client for the recourse service. Every method maps to one
 * endpoint; non-2xx responses become ApiError with the server's
 * {code, message} body attached verbatim. */

export interface NoiseDescription {
  family: string;
  params: Record<string, number>;
}

export interface VariableDescription {
  name: string;
  parents: Record<string, number>;
  intercept: number;
  noise: NoiseDescription;
  actionability: "actionable" | "mutable" | "non_actionable";
  proper_sigma: number;
  marginal_sigma: number;
}

export interface EdgeDescription {
  from: string;
  to: string;
  beta: number;
  tau: number;
}

export interface ScmDescription {
  variables: VariableDescription[];
  edges: EdgeDescription[];
  target: { coefficients: Record<string, number>; threshold: number };
}

export interface CostSpecWire {
  p?: number;
  normalization?: "proper_sigma" | "marginal_sigma" | "none";
  lambda?: number;
  time_variant?: "longest_path" | "weighted_average_raw" | "weighted_average_abs";
  time_budget?: number | null;
}

export interface RecourseRequest {
  instance: Record<string, number>;
  cost_spec?: CostSpecWire;
  k?: number;
  time_budget?: number | null;
  bounds?: Record<string, [number, number]>;
}

export interface CostBreakdown {
  c_s: number;
  c_t: number;
  total: number;
}

export interface Solution {
  action: Record<string, number>;
  cost: CostBreakdown | null;
  counterfactual: Record<string, number>;
  probability: number;
  feasible: boolean;
  diagnostics: Record<string, unknown>;
}

export interface FrontierRequest extends RecourseRequest {
  lambdas: number[];
}

export interface FrontierPoint {
  lambda: number;
  solution: Solution;
}

export interface SwitchMarker {
  from_lambda: number;
  to_lambda: number;
  from_support: string[];
  to_support: string[];
}

export interface FrontierResponse {
  points: FrontierPoint[];
  switches: SwitchMarker[];
}

export interface Prediction {
  score: number;
  probability: number;
  label: number;
}

export interface CounterfactualResponse {
  counterfactual: Record<string, number>;
  probability: number;
}

export interface SampleResponse extends Prediction {
  instance: Record<string, number>;
}

export interface ApiErrorBody {
  code: "bad_request" | "infeasible" | "internal";
  message: string;
}

export class ApiError extends Error {
  readonly status: number;
  readonly body: ApiErrorBody;

  constructor(status: number, body: ApiErrorBody) {
    super(body.message);
    this.name = "ApiError";
    this.status = status;
    this.body = body;
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private readonly base: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.base = baseUrl.replace(/\/+$/, "");
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(
    path: string,
    init: RequestInit,
    signal?: AbortSignal,
  ): Promise<T> {
    const response = await this.fetchImpl(`${this.base}${path}`, {
      ...init,
      signal,
      headers: { "content-type": "application/json" },
    });
    if (!response.ok) {
      let body: ApiErrorBody;
      try {
        body = (await response.json()) as ApiErrorBody;
      } catch {
        body = { code: "internal", message: `HTTP ${response.status}` };
      }
      throw new ApiError(response.status, body);
    }
    return (await response.json()) as T;
  }

  private post<T>(path: string, body: unknown, signal?: AbortSignal): Promise<T> {
    return this.request<T>(
      path,
      { method: "POST", body: JSON.stringify(body) },
      signal,
    );
  }

  health(signal?: AbortSignal): Promise<{ status: string }> {
    return this.request("/api/health", { method: "GET" }, signal);
  }

  scm(signal?: AbortSignal): Promise<ScmDescription> {
    return this.request("/api/scm", { method: "GET" }, signal);
  }

  predict(
    instance: Record<string, number>,
    signal?: AbortSignal,
  ): Promise<Prediction> {
    return this.post("/api/predict", { instance }, signal);
  }

  counterfactual(
    instance: Record<string, number>,
    action: Record<string, number>,
    signal?: AbortSignal,
  ): Promise<CounterfactualResponse> {
    return this.post("/api/counterfactual", { instance, action }, signal);
  }

  recourse(body: RecourseRequest, signal?: AbortSignal): Promise<Solution> {
    return this.post("/api/recourse", body, signal);
  }

  frontier(body: FrontierRequest, signal?: AbortSignal): Promise<FrontierResponse> {
    return this.post("/api/frontier", body, signal);
  }

  sample(seed: number, signal?: AbortSignal): Promise<SampleResponse> {
    return this.post("/api/sample", { seed, unfavorable: true }, signal);
  }
}
