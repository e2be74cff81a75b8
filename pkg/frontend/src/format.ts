// Display formatting. Server numbers are shown at 4 significant figures;
// integers (counts, budgets in whole currency) keep their exact value.
// Downloads always emit the raw server payload, never the display strings.

export function sig4(value: number | null | undefined): string {
  if (value === null || value === undefined || !Number.isFinite(value)) return "–";
  if (value === 0) return "0";
  if (Number.isInteger(value) && Math.abs(value) < 1e15) return String(value);
  return Number(value.toPrecision(4)).toString();
}

export function money(value: number): string {
  return value.toLocaleString("en-US", { maximumFractionDigits: 2 });
}

/** CSV text for a download action: exactly the rows the server returned. */
export function tableToCsv(rows: Array<Record<string, unknown>>): string {
  if (rows.length === 0) return "";
  const fields = Object.keys(rows[0]);
  const escape = (v: unknown) => {
    const s = v === null || v === undefined ? "" : String(v);
    return /[",\n]/.test(s) ? `"${s.replace(/"/g, '""')}"` : s;
  };
  const lines = [fields.join(",")];
  for (const row of rows) lines.push(fields.map((f) => escape(row[f])).join(","));
  return lines.join("\n");
}

export function jsonDownload(payload: unknown): string {
  return JSON.stringify(payload, null, 2);
}
