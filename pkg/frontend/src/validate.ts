// Form-level validation mirroring the server's rules, so obviously bad
// input never produces a round trip. Field paths match the API's.

import type { Costs, GroupParams, PowerSettings } from "./types.js";

export interface FieldError {
  path: string;
  message: string;
}

export function parseNumber(raw: string): number | null {
  const trimmed = raw.trim();
  if (trimmed === "") return null;
  const value = Number(trimmed);
  return Number.isFinite(value) ? value : null;
}

export function parseNumberList(raw: string): number[] | null {
  const parts = raw.split(",").map((p) => p.trim()).filter((p) => p !== "");
  if (parts.length === 0) return null;
  const values = parts.map(Number);
  return values.every((v) => Number.isFinite(v)) ? values : null;
}

type Raw<T> = { [K in keyof T]: number | null };

export function validateGroup(values: Raw<GroupParams>, prefix: string): FieldError[] {
  const errors: FieldError[] = [];
  const { sigma2_eps, r_delta, r_phi } = values;
  if (sigma2_eps === null) errors.push({ path: `${prefix}.sigma2_eps`, message: "required" });
  else if (sigma2_eps <= 0) errors.push({ path: `${prefix}.sigma2_eps`, message: "must be > 0" });
  if (r_delta === null) errors.push({ path: `${prefix}.r_delta`, message: "required" });
  else if (r_delta < 0) errors.push({ path: `${prefix}.r_delta`, message: "must be >= 0" });
  if (r_phi === null) errors.push({ path: `${prefix}.r_phi`, message: "required" });
  else if (r_phi < 0) errors.push({ path: `${prefix}.r_phi`, message: "must be >= 0" });
  return errors;
}

export function validateCosts(values: Raw<Costs>, needTotal: boolean): FieldError[] {
  const errors: FieldError[] = [];
  const { c_q, c_b } = values;
  if (c_q === null) errors.push({ path: "costs.c_q", message: "required" });
  else if (c_q <= 0) errors.push({ path: "costs.c_q", message: "must be > 0" });
  if (c_b === null) errors.push({ path: "costs.c_b", message: "required" });
  else if (c_b <= 0) errors.push({ path: "costs.c_b", message: "must be > 0" });
  if (needTotal) {
    const total = values.c_total ?? null;
    if (total === null) errors.push({ path: "costs.c_total", message: "required" });
    else if (total <= 0) errors.push({ path: "costs.c_total", message: "must be > 0" });
    else if (values.c_q !== null && values.c_q > 0 && total < values.c_q)
      errors.push({ path: "costs.c_total", message: "must cover at least one participant" });
  }
  return errors;
}

export function validatePower(values: Raw<PowerSettings>): FieldError[] {
  const errors: FieldError[] = [];
  const { alpha, power, delta } = values;
  if (alpha === null) errors.push({ path: "power.alpha", message: "required" });
  else if (alpha <= 0 || alpha >= 1) errors.push({ path: "power.alpha", message: "must be in (0, 1)" });
  if (power === null) errors.push({ path: "power.power", message: "required" });
  else if (power <= 0 || power >= 1) errors.push({ path: "power.power", message: "must be in (0, 1)" });
  if (delta === null) errors.push({ path: "power.delta", message: "required" });
  else if (delta <= 0) errors.push({ path: "power.delta", message: "must be > 0" });
  return errors;
}

export function validateMultipliers(values: number[] | null): FieldError[] {
  if (values === null || values.length === 0)
    return [{ path: "multipliers", message: "comma-separated positive numbers required" }];
  if (values.some((v) => v <= 0))
    return [{ path: "multipliers", message: "must all be > 0" }];
  return [];
}
