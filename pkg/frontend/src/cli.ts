#!/usr/bin/env node
/** csllab-plot render --spec <path> */

import { render } from "./render";
import { loadSpec } from "./spec";

function main(argv: string[]): number {
  const [command, ...rest] = argv;
  if (command !== "render") {
    process.stderr.write("usage: csllab-plot render --spec <path>\n");
    return 2;
  }
  const flagIndex = rest.indexOf("--spec");
  if (flagIndex < 0 || flagIndex + 1 >= rest.length) {
    process.stderr.write("error: render requires --spec <path>\n");
    return 2;
  }
  try {
    const outputPath = render(loadSpec(rest[flagIndex + 1]));
    process.stdout.write(`wrote ${outputPath}\n`);
    return 0;
  } catch (error) {
    process.stderr.write(`error: ${(error as Error).message}\n`);
    return 1;
  }
}

process.exit(main(process.argv.slice(2)));
