// Case-study presets: reconstructions of three published trials. The
// measurement-error ratios come from published pilot analyses; the unit
// costs are a derived calibration, not reported values.

import type { Costs, GroupParams, PowerSettings } from "./types.js";

export interface Preset {
  name: string;
  label: string;
  group1: GroupParams;
  group2: GroupParams;
  costs: Required<Costs>;
  power: PowerSettings;
}

export const PRESETS: Preset[] = [
  {
    name: "hovell",
    label: "Hovell smoke-exposure study (reconstruction)",
    group1: { sigma2_eps: 0.551, r_delta: 0.43, r_phi: 1.78 },
    group2: { sigma2_eps: 0.705, r_delta: 0.34, r_phi: 1.4 },
    costs: { c_q: 125, c_b: 250, c_total: 50000 },
    power: { alpha: 0.05, power: 0.8, delta: 0.1 },
  },
  {
    name: "wilson",
    label: "Wilson smoke-exposure study (reconstruction)",
    group1: { sigma2_eps: 0.778, r_delta: 3.95, r_phi: 64.48 },
    group2: { sigma2_eps: 0.486, r_delta: 6.32, r_phi: 96.37 },
    costs: { c_q: 125, c_b: 250, c_total: 50000 },
    power: { alpha: 0.05, power: 0.8, delta: 0.1 },
  },
  {
    name: "tone",
    label: "TONE sodium-intake trial (reconstruction)",
    group1: { sigma2_eps: 0.113, r_delta: 1.99, r_phi: 3.26 },
    group2: { sigma2_eps: 0.21, r_delta: 1.07, r_phi: 6.89 },
    costs: { c_q: 125, c_b: 250, c_total: 50000 },
    power: { alpha: 0.05, power: 0.8, delta: 0.1 },
  },
];

export function presetByName(name: string): Preset | undefined {
  return PRESETS.find((p) => p.name === name);
}

/** The exact request body the Design view sends for a preset. */
export function requestFromPreset(preset: Preset): {
  group1: GroupParams;
  group2: GroupParams;
  costs: Required<Costs>;
} {
  return {
    group1: { ...preset.group1 },
    group2: { ...preset.group2 },
    costs: { ...preset.costs },
  };
}
