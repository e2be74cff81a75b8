// Wire types mirroring the calibdesign HTTP API (schema_version 1).

export interface GroupParams {
  sigma2_eps: number;
  r_delta: number;
  r_phi: number;
}

export interface Costs {
  c_q: number;
  c_b: number;
  c_total?: number;
}

export interface PowerSettings {
  alpha: number;
  power: number;
  delta: number;
}

export interface DesignRequest {
  group1: GroupParams;
  group2: GroupParams;
  costs: Costs;
}

export interface BudgetRequest {
  group1: GroupParams;
  group2: GroupParams;
  costs: Costs;
  power: PowerSettings;
}

export interface SensitivityRequest {
  group1: GroupParams;
  group2: GroupParams;
  costs: Costs;
  axis: "sigma2_eps" | "r_delta" | "r_phi";
  multipliers: number[];
}

export interface GroupDesignResult {
  n_total: number;
  n_direct: number;
  k_reps: number;
  variance: number;
  se: number;
  sampling_fraction: number;
  sampling_fraction_reported: number;
}

export interface DesignResult {
  groups: GroupDesignResult[];
  achieved_variance: number;
  achieved_se: number;
  spent_budget: number;
  slack_budget: number;
  allocation?: number;
}

export interface BudgetIteration {
  index: number;
  phase: "correction" | "bisect";
  budget: number;
  se: number | null;
}

export interface BudgetResult {
  budget: number;
  se_target: number;
  corrections: number;
  converged_by: string;
  iterations: BudgetIteration[];
  report: DesignResult;
}

export interface EstimateGroup {
  group: number;
  alpha0: number;
  alpha1: number;
  sigma2_eps: number;
  sigma2_phi: number;
  sigma2_delta: number;
  r_delta: number;
  r_phi: number;
  mu_hat: number;
  nu_hat: number;
  beta0_hat: number;
  beta1_hat: number;
  n_total: number;
  n_direct: number;
  k_reps: number;
  se_mu: number | null;
  notes: string[];
}

export interface EstimateResult {
  groups: EstimateGroup[];
}

export interface SensitivityRow {
  axis: string;
  multiplier: number;
  efficiency: number;
  allocation: number;
  n1: number;
  n_total1: number;
  k1: number;
  n2: number;
  n_total2: number;
  k2: number;
}

export interface Envelope<T> {
  schema_version: string;
  echo: unknown;
  warnings: string[];
  result: T;
}

export interface ApiFieldError {
  path: string;
  message: string;
}
