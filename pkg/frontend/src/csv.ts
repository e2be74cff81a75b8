// Client-side pilot-CSV checks: same schema the server enforces
// (subject_id,group,q,m1..mK header; group 1/2; numeric cells), reported
// with line numbers so problems are fixable before upload.

export interface CsvGroupSummary {
  group: number;
  nTotal: number;
  nDirect: number;
  kMax: number;
}

export interface CsvCheck {
  ok: boolean;
  errors: string[];
  groups: CsvGroupSummary[];
  rows: number;
}

export function checkPilotCsv(text: string): CsvCheck {
  const errors: string[] = [];
  const lines = text.split(/\r?\n/).filter((line, i, all) =>
    !(line.trim() === "" && i === all.length - 1));
  if (lines.length === 0 || lines[0].trim() === "") {
    return { ok: false, errors: ["empty file (header row is mandatory)"], groups: [], rows: 0 };
  }
  const header = lines[0].split(",").map((h) => h.trim());
  if (header[0] !== "subject_id" || header[1] !== "group" || header[2] !== "q") {
    errors.push(`header must start with subject_id,group,q (got ${header.slice(0, 3).join(",")})`);
  }
  const mKeys = header.slice(3);
  mKeys.forEach((k, i) => {
    if (k !== `m${i + 1}`) errors.push(`replicate column ${i + 4} must be m${i + 1}, got ${k}`);
  });
  if (errors.length) return { ok: false, errors, groups: [], rows: 0 };

  const seen = new Set<string>();
  const tally = new Map<number, { nTotal: number; nDirect: number; kMax: number }>();
  let rows = 0;
  for (let i = 1; i < lines.length; i++) {
    const line = lines[i];
    if (line.trim() === "") continue;
    const cells = line.split(",");
    const lineNo = i + 1;
    rows += 1;
    const sid = (cells[0] ?? "").trim();
    if (!sid) errors.push(`line ${lineNo}: missing subject_id`);
    else if (seen.has(sid)) errors.push(`line ${lineNo}: duplicate subject_id ${sid}`);
    else seen.add(sid);
    const group = Number((cells[1] ?? "").trim());
    if (group !== 1 && group !== 2) {
      errors.push(`line ${lineNo}: group must be 1 or 2`);
      continue;
    }
    const q = Number((cells[2] ?? "").trim());
    if (!Number.isFinite(q) || (cells[2] ?? "").trim() === "") {
      errors.push(`line ${lineNo}: bad or missing q`);
    }
    let reps = 0;
    for (let k = 0; k < mKeys.length; k++) {
      const cell = (cells[3 + k] ?? "").trim();
      if (cell === "") continue;
      if (!Number.isFinite(Number(cell))) {
        errors.push(`line ${lineNo}: bad replicate value in m${k + 1}`);
      } else {
        reps += 1;
      }
    }
    const entry = tally.get(group) ?? { nTotal: 0, nDirect: 0, kMax: 0 };
    entry.nTotal += 1;
    if (reps > 0) {
      entry.nDirect += 1;
      entry.kMax = Math.max(entry.kMax, reps);
    }
    tally.set(group, entry);
  }
  if (rows === 0) errors.push("no data rows");
  for (const [group, entry] of tally) {
    if (entry.nDirect > 0 && entry.nDirect < 4) {
      errors.push(`group ${group}: only ${entry.nDirect} calibration subjects (need at least 4)`);
    }
  }
  const groups = [...tally.entries()]
    .sort((a, b) => a[0] - b[0])
    .map(([group, e]) => ({ group, nTotal: e.nTotal, nDirect: e.nDirect, kMax: e.kMax }));
  return { ok: errors.length === 0, errors, groups, rows };
}
