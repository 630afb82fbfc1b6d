/**
 * Mine excerpts for generated claims.
 *
 * Input: claims JSONL with {"passage_id", "claim"} per line. Output: the same
 * records with an "excerpts" array added, ready for the augmentation matcher.
 * Claims the parser cannot handle get an empty list and a warning.
 *
 *   node dist/mine.js --input claims.jsonl --out claims_with_excerpts.jsonl
 */

import { readFileSync, writeFileSync } from "node:fs";
import { parseArgs } from "node:util";

import { mineExcerpts } from "./parse.js";

function main(): void {
  const { values } = parseArgs({
    options: {
      input: { type: "string" },
      out: { type: "string" },
    },
  });
  if (!values.input || !values.out) {
    console.error("usage: mine --input CLAIMS_JSONL --out JSONL");
    process.exit(2);
  }
  const lines = readFileSync(values.input, "utf-8").split("\n");
  const output: string[] = [];
  let mined = 0;
  let empty = 0;
  for (const line of lines) {
    if (!line.trim()) continue;
    const record = JSON.parse(line) as { passage_id: string; claim: string };
    let excerpts: string[] = [];
    try {
      excerpts = mineExcerpts(record.claim ?? "");
    } catch (err) {
      console.error(`warning: failed to parse claim in ${record.passage_id}: ${err}`);
    }
    if (excerpts.length === 0) {
      empty += 1;
      console.error(
        `warning: no excerpts for claim in ${record.passage_id}: ${JSON.stringify(record.claim)}`,
      );
    }
    mined += excerpts.length;
    output.push(
      JSON.stringify({
        passage_id: record.passage_id,
        claim: record.claim,
        excerpts,
      }),
    );
  }
  writeFileSync(values.out, output.map((l) => `${l}\n`).join(""), "utf-8");
  console.log(
    JSON.stringify({ command: "mine", claims: output.length, excerpts: mined, empty, out: values.out }),
  );
}

main();
