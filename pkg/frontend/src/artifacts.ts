/**
 * Readers for the harness artifacts: per-replicate CSVs and the aggregate
 * summary JSON. Rendering never recomputes science — these types carry the
 * harness numbers verbatim.
 */

import * as fs from "node:fs";
import * as path from "node:path";

export const SUPPORTED_SCHEMA_VERSION = 1;

export interface MethodMetrics {
  bias_overall: number;
  ubrmse_overall: number;
  cycle_times: number[];
  cycle_bias: number[];
  cycle_ubrmse: number[];
  bias_per_dim?: number[];
  ubrmse_per_dim?: number[];
}

export interface Summary {
  schema_version: number;
  config: { name: string; dynamics: { kind: string } };
  replicates_completed: number;
  methods: Record<string, MethodMetrics>;
}

export interface StateRow {
  time: number;
  dim: number;
  truth: number;
  obs: number;
  method: string;
  analysis_mean: number;
  spread: number;
}

export interface MemberRow {
  time: number;
  method: string;
  member: number;
  dim: number;
  value: number;
}

export function parseCsv(text: string): Record<string, string>[] {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) return [];
  const header = lines[0].split(",");
  return lines.slice(1).map((line) => {
    const cells = line.split(",");
    const row: Record<string, string> = {};
    header.forEach((name, i) => {
      row[name] = cells[i] ?? "";
    });
    return row;
  });
}

export function readCsv(file: string): Record<string, string>[] {
  return parseCsv(fs.readFileSync(file, "utf-8"));
}

export function readSummary(runDir: string): Summary {
  const file = path.join(runDir, "summary.json");
  const summary = JSON.parse(fs.readFileSync(file, "utf-8")) as Summary;
  if (summary.schema_version !== SUPPORTED_SCHEMA_VERSION) {
    throw new Error(
      `unsupported artifact schema version ${summary.schema_version}; ` +
        `expected ${SUPPORTED_SCHEMA_VERSION}`,
    );
  }
  return summary;
}

export function readStates(runDir: string, replicate = 0): StateRow[] {
  const file = path.join(runDir, `states_r${String(replicate).padStart(4, "0")}.csv`);
  return readCsv(file).map((row) => ({
    time: Number(row.time),
    dim: Number(row.dim),
    truth: Number(row.truth),
    obs: Number(row.obs),
    method: row.method,
    analysis_mean: Number(row.analysis_mean),
    spread: Number(row.spread),
  }));
}

export function readMembers(runDir: string, replicate = 0): MemberRow[] {
  const file = path.join(runDir, `members_r${String(replicate).padStart(4, "0")}.csv`);
  if (!fs.existsSync(file)) return [];
  return readCsv(file).map((row) => ({
    time: Number(row.time),
    method: row.method,
    member: Number(row.member),
    dim: Number(row.dim),
    value: Number(row.value),
  }));
}
