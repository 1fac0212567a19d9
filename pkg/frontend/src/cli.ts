#!/usr/bin/env node
/**
 * Render a figure from harness artifacts:
 *
 *   node dist/cli.js --kind lorenz-trajectory --input out/lorenz63 --out fig.svg
 *   node dist/cli.js --kind metrics-table --input out/lorenz63 --out table.svg
 *   node dist/cli.js --kind ot-interp --input out/demo --out interp.svg
 *
 * Options: --replicate N (default 0), --time T (ad-snapshot panel pick).
 */

import { FIGURE_KINDS, FigureKind, RenderJob, render } from "./render.js";

function parseArgs(argv: string[]): RenderJob {
  const options = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    if (!flag.startsWith("--") || i + 1 >= argv.length) {
      throw new Error(`malformed arguments near ${flag}`);
    }
    options.set(flag.slice(2), argv[i + 1]);
  }
  const kind = options.get("kind");
  if (!kind || !(FIGURE_KINDS as readonly string[]).includes(kind)) {
    throw new Error(`--kind must be one of: ${FIGURE_KINDS.join(", ")}`);
  }
  const input = options.get("input");
  const output = options.get("out");
  if (!input || !output) throw new Error("--input and --out are required");
  const job: RenderJob = { kind: kind as FigureKind, input, output };
  if (options.has("replicate")) job.replicate = Number(options.get("replicate"));
  if (options.has("time")) job.time = Number(options.get("time"));
  return job;
}

try {
  const job = parseArgs(process.argv.slice(2));
  render(job);
  console.log(`wrote ${job.output}`);
} catch (error) {
  console.error(String(error instanceof Error ? error.message : error));
  process.exit(1);
}
