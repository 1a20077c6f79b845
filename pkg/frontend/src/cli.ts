#!/usr/bin/env node
/**
 * Usage:
 *   node dist/cli.js --figure fig1 --csv out/fig1.csv --out fig1.svg \
 *       [--manifest out/manifest.json]
 *
 * Reads a simulator CSV (and optionally the run manifest carrying the
 * design-point markers) and writes an SVG. Exits nonzero on any problem,
 * naming the offending file or column.
 */
import { readFileSync, writeFileSync } from "fs";
import { basename } from "path";
import { FIGURE_IDS, Manifest } from "./figures";
import { isFigureId, renderFigure } from "./render";

interface Args {
  figure: string;
  csv: string;
  out: string;
  manifest?: string;
}

function parseArgs(argv: string[]): Args {
  const values: Record<string, string> = {};
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (!flag.startsWith("--") || value === undefined) {
      throw new Error(`bad argument list near '${flag}'`);
    }
    values[flag.slice(2)] = value;
  }
  for (const required of ["figure", "csv", "out"]) {
    if (!(required in values)) {
      throw new Error(`missing --${required}`);
    }
  }
  return values as unknown as Args;
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
    if (!isFigureId(args.figure)) {
      throw new Error(
        `unknown figure '${args.figure}'; expected one of ${FIGURE_IDS.join(", ")}`,
      );
    }
    let manifest: Manifest | undefined;
    if (args.manifest) {
      manifest = JSON.parse(readFileSync(args.manifest, "utf-8")) as Manifest;
    }
    const csvText = readFileSync(args.csv, "utf-8");
    const svg = renderFigure(args.figure, csvText, basename(args.csv), manifest);
    writeFileSync(args.out, svg);
    console.log(`SVG -> ${args.out}`);
    return 0;
  } catch (err) {
    console.error(`render failed: ${(err as Error).message}`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
