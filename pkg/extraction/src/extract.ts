/**
 * Extract embeddings for a list of texts into the COIREMB1 format.
 *
 * Input: UTF-8 text file, one record per line. A line containing a tab is
 * "id<TAB>text"; otherwise the whole line is both the id and the text (the
 * right shape for concept names, synonyms and excerpts, which downstream
 * consumers look up by their literal text). Row order equals input order.
 *
 *   node dist/extract.js --input names.txt --out names.bin --ids-out names.ids \
 *       [--model hash-mean-v1/256] [--batch-size 64]
 */

import { readFileSync } from "node:fs";
import { pathToFileURL } from "node:url";
import { parseArgs } from "node:util";

import { DEFAULT_MODEL, HashEncoder } from "./encoder.js";
import { writeEmbeddings } from "./format.js";

interface Item {
  id: string;
  text: string;
}

export function parseInputLines(raw: string): Item[] {
  const items: Item[] = [];
  const seen = new Set<string>();
  for (const line of raw.split("\n")) {
    if (!line.trim()) continue;
    const tab = line.indexOf("\t");
    const item =
      tab >= 0
        ? { id: line.slice(0, tab), text: line.slice(tab + 1) }
        : { id: line, text: line };
    if (seen.has(item.id)) {
      if (tab >= 0) {
        throw new Error(`duplicate row id ${JSON.stringify(item.id)}`);
      }
      continue; // plain mode: an exact duplicate line maps to the same row
    }
    seen.add(item.id);
    items.push(item);
  }
  return items;
}

export function extractEmbeddings(
  items: Item[],
  model: string,
  batchSize: number,
): { ids: string[]; rows: Float32Array[]; truncatedIds: string[] } {
  const encoder = new HashEncoder(model);
  const ids: string[] = [];
  const rows: Float32Array[] = [];
  const truncatedIds: string[] = [];
  for (let start = 0; start < items.length; start += batchSize) {
    for (const item of items.slice(start, start + batchSize)) {
      const result = encoder.encode(item.text);
      ids.push(item.id);
      rows.push(result.vector);
      if (result.truncated) truncatedIds.push(item.id);
    }
  }
  return { ids, rows, truncatedIds };
}

function main(): void {
  const { values } = parseArgs({
    options: {
      input: { type: "string" },
      out: { type: "string" },
      "ids-out": { type: "string" },
      model: { type: "string", default: DEFAULT_MODEL },
      "batch-size": { type: "string", default: "64" },
    },
  });
  if (!values.input || !values.out || !values["ids-out"]) {
    console.error("usage: extract --input FILE --out VEC --ids-out IDS [--model M] [--batch-size N]");
    process.exit(2);
  }
  const batchSize = Number(values["batch-size"]);
  if (!Number.isInteger(batchSize) || batchSize < 1) {
    console.error(`invalid --batch-size ${values["batch-size"]}`);
    process.exit(2);
  }
  const items = parseInputLines(readFileSync(values.input, "utf-8"));
  const { ids, rows, truncatedIds } = extractEmbeddings(items, values.model!, batchSize);
  writeEmbeddings(ids, rows, values.out, values["ids-out"]);
  if (truncatedIds.length > 0) {
    console.error(
      `warning: truncated ${truncatedIds.length} over-long input(s): ${truncatedIds.join(", ")}`,
    );
  }
  console.log(
    JSON.stringify({
      command: "extract",
      rows: ids.length,
      dim: rows[0]?.length ?? 0,
      model: values.model,
      out: values.out,
    }),
  );
}

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  main();
}
