/**
 * Excerpt mining over claims: noun-phrase spans plus spans that join a noun
 * phrase with a nearby verb.
 *
 * POS tags come from wink-nlp's English lite model. Noun phrases are maximal
 * runs of adjectives/nouns/proper nouns/numerals containing at least one
 * noun, with hyphenated compounds bridged so "NF-κB" stays one span. Each
 * noun phrase is then linked to its nearest verb on the left and on the
 * right (within the sentence and a small gap), emitting the contiguous text
 * between phrase and verb. Spans are deduplicated in first-occurrence order.
 */

import winkNLP from "wink-nlp";
import model from "wink-eng-lite-web-model";

const nlp = winkNLP(model);
const its = nlp.its;

const NOMINAL = new Set(["NOUN", "PROPN", "NUM", "ADJ"]);
const HEAD = new Set(["NOUN", "PROPN"]);
const VERB = new Set(["VERB", "AUX"]);
const MAX_VERB_GAP = 4;

interface Tok {
  text: string;
  pos: string;
  preceding: string;
}

function sentenceTokens(sentence: any): Tok[] {
  const tokens: Tok[] = [];
  sentence.tokens().each((t: any) => {
    tokens.push({
      text: t.out(),
      pos: t.out(its.pos),
      preceding: t.out(its.precedingSpaces),
    });
  });
  return tokens;
}

function sliceText(tokens: Tok[], start: number, end: number): string {
  let out = "";
  for (let i = start; i <= end; i += 1) {
    out += (i === start ? "" : tokens[i]!.preceding) + tokens[i]!.text;
  }
  return out;
}

function isHyphen(tok: Tok): boolean {
  return tok.pos === "PUNCT" && /^[-–]$/.test(tok.text);
}

interface Chunk {
  start: number;
  end: number;
  hasHead: boolean;
}

function nounChunks(tokens: Tok[]): Chunk[] {
  const chunks: Chunk[] = [];
  let i = 0;
  while (i < tokens.length) {
    if (!NOMINAL.has(tokens[i]!.pos)) {
      i += 1;
      continue;
    }
    const start = i;
    let end = i;
    let hasHead = HEAD.has(tokens[i]!.pos);
    let j = i + 1;
    while (j < tokens.length) {
      const tok = tokens[j]!;
      if (NOMINAL.has(tok.pos)) {
        end = j;
        hasHead = hasHead || HEAD.has(tok.pos);
        j += 1;
      } else if (
        isHyphen(tok) &&
        j + 1 < tokens.length &&
        (NOMINAL.has(tokens[j + 1]!.pos) || tokens[j + 1]!.pos === "X")
      ) {
        // hyphenated compound: keep "NF-κB" together
        end = j + 1;
        hasHead = hasHead || HEAD.has(tokens[j + 1]!.pos);
        j += 2;
      } else {
        break;
      }
    }
    if (hasHead) chunks.push({ start, end, hasHead });
    i = Math.max(j, i + 1);
  }
  return chunks;
}

export function mineExcerpts(text: string): string[] {
  const doc = nlp.readDoc(text);
  const seen = new Set<string>();
  const ordered: string[] = [];
  const add = (span: string) => {
    const trimmed = span.trim();
    if (trimmed && !seen.has(trimmed)) {
      seen.add(trimmed);
      ordered.push(trimmed);
    }
  };

  doc.sentences().each((sentence: any) => {
    const tokens = sentenceTokens(sentence);
    const chunks = nounChunks(tokens);
    const verbIdx = tokens
      .map((t, i) => (VERB.has(t.pos) ? i : -1))
      .filter((i) => i >= 0);
    const spans: Array<[number, number]> = [];
    for (const chunk of chunks) {
      spans.push([chunk.start, chunk.end]);
      const left = verbIdx
        .filter((i) => i < chunk.start && chunk.start - i <= MAX_VERB_GAP)
        .pop();
      if (left !== undefined) spans.push([left, chunk.end]);
      const right = verbIdx.find(
        (i) => i > chunk.end && i - chunk.end <= MAX_VERB_GAP,
      );
      if (right !== undefined) spans.push([chunk.start, right]);
    }
    spans.sort((a, b) => a[0] - b[0] || a[1] - b[1]);
    for (const [start, end] of spans) add(sliceText(tokens, start, end));
  });
  return ordered;
}
