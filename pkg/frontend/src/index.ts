#!/usr/bin/env node
/**
 * CLI: render simulator CSV files to an SVG figure.
 *
 *   risim-plots --kind throughput_power --in out/fig2/metrics.csv \
 *       --in out/fig2/metrics_impaired.csv --out fig2.svg
 *
 * Exit codes: 0 success, 1 usage, 2 invalid or empty data.
 */

import { writeFileSync } from "fs";
import yargs from "yargs";

import { Dataset, loadCsv } from "./csv";
import { DataError } from "./schemas";
import { csvKindFor, EmptyDataError, FIGURE_KINDS, FigureKind, renderFigure } from "./render";

export function runCli(argv: string[]): number {
  let usageError: string | null = null;
  const parser = yargs(argv)
    .exitProcess(false)
    .fail((msg) => {
      usageError = msg ?? "usage error";
    })
    .option("kind", {
      choices: FIGURE_KINDS,
      demandOption: true,
      describe: "figure kind to render",
    })
    .option("in", {
      type: "string",
      array: true,
      demandOption: true,
      describe: "input CSV file(s); variants overlay into one figure",
    })
    .option("out", {
      type: "string",
      demandOption: true,
      describe: "output SVG path",
    })
    .strict()
    .version(false)
    .help();

  const args = parser.parseSync();
  if (usageError !== null) {
    process.stderr.write(`risim-plots: ${usageError}\n`);
    return 1;
  }

  const kind = args.kind as FigureKind;
  const files = args.in as string[];
  try {
    const datasets: Dataset[] = files.map((f) => loadCsv(f, csvKindFor(kind)));
    const svg = renderFigure(kind, datasets);
    writeFileSync(args.out as string, svg, "utf-8");
    process.stdout.write(`wrote ${args.out}\n`);
    return 0;
  } catch (err) {
    if (err instanceof DataError) {
      process.stderr.write(err.report() + "\n");
      return 2;
    }
    if (err instanceof EmptyDataError) {
      process.stderr.write(`risim-plots: ${err.message}\n`);
      return 2;
    }
    if (err instanceof Error && "code" in err) {
      process.stderr.write(`risim-plots: ${err.message}\n`);
      return 2;
    }
    throw err;
  }
}

if (require.main === module) {
  process.exit(runCli(process.argv.slice(2)));
}
