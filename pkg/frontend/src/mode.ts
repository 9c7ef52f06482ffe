/** Schema-side mode transform: replace every stochastic function table by its
 * deterministic argmax, breaking ties toward the lowest codomain index —
 * the same rule the evaluator applies. Operates purely on the JSON schema. */

import type { FunctionSpec, InterpretationDoc, JsonValue } from "./types.js";

/** Canonical value key: JSON with object keys sorted, no whitespace
 * (matches the CLI's table-row encoding). */
export function canonicalKey(v: JsonValue): string {
  return JSON.stringify(sortDeep(v));
}

function sortDeep(v: JsonValue): JsonValue {
  if (v !== null && typeof v === "object" && !Array.isArray(v)) {
    const out: { [k: string]: JsonValue } = {};
    for (const k of Object.keys(v).sort()) {
      out[k] = sortDeep((v as Record<string, JsonValue>)[k]);
    }
    return out;
  }
  return v;
}

function probToNumber(p: number | string): number {
  if (typeof p === "number") {
    return p;
  }
  const m = /^(-?\d+)\s*\/\s*(\d+)$/.exec(p);
  if (m) {
    return Number(m[1]) / Number(m[2]);
  }
  const n = Number(p);
  if (Number.isNaN(n)) {
    throw new Error(`bad probability ${p}`);
  }
  return n;
}

function codomainElements(doc: InterpretationDoc, name: string): JsonValue[] {
  if (name === "bool" && !(doc.domains && name in doc.domains) && !(doc.datasets && name in doc.datasets)) {
    return [false, true];
  }
  const fromDomains = doc.domains?.[name];
  if (fromDomains) {
    return fromDomains;
  }
  const fromDatasets = doc.datasets?.[name];
  if (fromDatasets) {
    return fromDatasets;
  }
  throw new Error(`unknown codomain ${name}`);
}

function argmaxTable(dist: Record<string, number | string>, order: Map<string, number>): string {
  let bestKey: string | null = null;
  let bestP = -Infinity;
  let bestIndex = Infinity;
  for (const [key, raw] of Object.entries(dist)) {
    const p = probToNumber(raw);
    const index = order.get(canonicalKey(JSON.parse(key) as JsonValue)) ?? Infinity;
    if (p > bestP || (p === bestP && index < bestIndex)) {
      bestKey = key;
      bestP = p;
      bestIndex = index;
    }
  }
  if (bestKey === null) {
    throw new Error("empty distribution row");
  }
  return bestKey;
}

function modeFunction(doc: InterpretationDoc, spec: FunctionSpec): FunctionSpec {
  if (spec.kind === "deterministic_table") {
    return spec;
  }
  const elements = codomainElements(doc, spec.codomain);
  const order = new Map(elements.map((v, i) => [canonicalKey(v), i] as const));
  const rows: Record<string, JsonValue> = {};
  if (spec.kind === "table") {
    for (const [argsKey, dist] of Object.entries(spec.rows)) {
      const winner = argmaxTable(dist as Record<string, number | string>, order);
      rows[argsKey] = JSON.parse(winner) as JsonValue;
    }
  } else {
    for (const [argsKey, logits] of Object.entries(spec.rows)) {
      const xs = logits as number[];
      let best = 0;
      for (let i = 1; i < xs.length; i++) {
        if (xs[i] > xs[best]) {
          best = i;
        }
      }
      rows[argsKey] = elements[best];
    }
  }
  return { args: spec.args, codomain: spec.codomain, kind: "deterministic_table", rows };
}

export function modeInterpretation(doc: InterpretationDoc): InterpretationDoc {
  const functions: Record<string, FunctionSpec> = {};
  for (const [name, spec] of Object.entries(doc.functions ?? {})) {
    functions[name] = modeFunction(doc, spec);
  }
  return { ...doc, functions };
}
