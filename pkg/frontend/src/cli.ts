/** Command-line entry: uniqpt-figures <fig1|fig2|fig3> csv... --out file.svg */
import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { FigureJob, render } from "./render.js";
import { FigureKind } from "./schema.js";

export async function main(argv: string[]): Promise<number> {
  const args = await yargs(argv)
    .command("$0 <kind> <inputs...>", "render a figure from experiment CSVs")
    .positional("kind", { choices: ["fig1", "fig2", "fig3"] as const, demandOption: true })
    .positional("inputs", { type: "string", array: true, demandOption: true })
    .option("out", { type: "string", demandOption: true, describe: "output SVG path" })
    .option("columns", { type: "number", default: 2, describe: "panel grid columns" })
    .strict()
    .fail((msg, err) => {
      throw err ?? new Error(msg);
    })
    .parse();

  const job: FigureJob = {
    kind: args.kind as FigureKind,
    inputs: args.inputs as string[],
    output: args.out,
    columns: args.columns,
  };
  try {
    const figure = render(job);
    console.log(`${job.output}: ${figure.panels.length} panel(s)`);
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 2;
  }
}

if (import.meta.url === `file://${process.argv[1]}`) {
  main(hideBin(process.argv)).then((code) => process.exit(code));
}
