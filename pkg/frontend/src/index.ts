/** Node bindings for the uller constraint language.
 *
 * Everything funnels through the CLI's --json interface, so numbers are
 * identical to direct command-line invocations on the same inputs.
 */

import { readFileSync } from "node:fs";

import { coreVersion, runCli, stage, UllerError, UllerEvalError, UllerParseError, UllerSchemaError } from "./runner.js";
import { modeInterpretation } from "./mode.js";
import type {
  AstNode,
  EpochRecord,
  EvaluateOptions,
  GradientOptions,
  InterpretationDoc,
  JsonValue,
  Semantics,
  TrainOptions,
  TrainResult,
} from "./types.js";

export { modeInterpretation } from "./mode.js";
export { UllerError, UllerEvalError, UllerParseError, UllerSchemaError } from "./runner.js";
export type {
  AstNode,
  AstTerm,
  EpochRecord,
  EvaluateOptions,
  FunctionSpec,
  GradientOptions,
  InterpretationDoc,
  JsonValue,
  Semantics,
  TNorm,
  TrainOptions,
  TrainResult,
} from "./types.js";

/** Immutable handle to a parsed program; evaluation never mutates it. */
export class BoundProgram {
  readonly source: string;
  readonly ast: AstNode;

  constructor(source: string, ast: AstNode) {
    this.source = source;
    this.ast = ast;
  }

  evaluate(interp: InterpretationDoc, semantics: Semantics = "prob", options: EvaluateOptions = {}): number {
    return evaluate(this, interp, semantics, options);
  }

  gradient(interp: InterpretationDoc, options: GradientOptions = {}): number[] {
    return gradient(this, interp, options);
  }

  train(interp: InterpretationDoc, options: TrainOptions): TrainResult {
    return train(this, interp, options);
  }
}

export function parse(source: string): BoundProgram {
  const ws = stage(source);
  try {
    const out = runCli(["parse", "--json", "--program", ws.programPath]);
    return new BoundProgram(source, JSON.parse(out) as AstNode);
  } finally {
    ws.dispose();
  }
}

function sourceOf(program: BoundProgram | string): string {
  return typeof program === "string" ? program : program.source;
}

export function evaluate(
  program: BoundProgram | string,
  interp: InterpretationDoc,
  semantics: Semantics = "prob",
  options: EvaluateOptions = {}
): number {
  const ws = stage(sourceOf(program), interp, options.data);
  try {
    const args = [
      "eval", "--json",
      "--program", ws.programPath,
      "--interp", ws.interpPath as string,
      "--semantics", semantics,
    ];
    if (ws.dataPath) {
      args.push("--data", ws.dataPath);
    }
    if (options.tnorm) {
      args.push("--tnorm", options.tnorm);
    }
    if (options.samples !== undefined) {
      args.push("--samples", String(options.samples));
    }
    if (options.seed !== undefined) {
      args.push("--seed", String(options.seed));
    }
    const doc = JSON.parse(runCli(args)) as { value: number };
    return doc.value;
  } finally {
    ws.dispose();
  }
}

export function gradient(
  program: BoundProgram | string,
  interp: InterpretationDoc,
  options: GradientOptions = {}
): number[] {
  const ws = stage(sourceOf(program), interp, options.data);
  try {
    const args = [
      "grad", "--json",
      "--program", ws.programPath,
      "--interp", ws.interpPath as string,
      "--semantics", options.semantics ?? "prob",
    ];
    if (ws.dataPath) {
      args.push("--data", ws.dataPath);
    }
    if (options.tnorm) {
      args.push("--tnorm", options.tnorm);
    }
    if (options.estimator) {
      args.push("--estimator", options.estimator);
    }
    if (options.samples !== undefined) {
      args.push("--samples", String(options.samples));
    }
    if (options.seed !== undefined) {
      args.push("--seed", String(options.seed));
    }
    if (options.transform) {
      args.push("--transform", options.transform);
    }
    const doc = JSON.parse(runCli(args)) as { gradient: number[] };
    return doc.gradient;
  } finally {
    ws.dispose();
  }
}

export function train(
  program: BoundProgram | string,
  interp: InterpretationDoc,
  options: TrainOptions
): TrainResult {
  const ws = stage(sourceOf(program), interp, options.data);
  try {
    const outPath = `${ws.programPath}.trained.json`;
    const reportPath = `${ws.programPath}.report.jsonl`;
    const args = [
      "train", "--json",
      "--program", ws.programPath,
      "--interp", ws.interpPath as string,
      "--dataset", options.dataset,
      "--out", outPath,
      "--report", reportPath,
      "--semantics", options.semantics ?? "prob",
    ];
    if (ws.dataPath) {
      args.push("--data", ws.dataPath);
    }
    if (options.tnorm) {
      args.push("--tnorm", options.tnorm);
    }
    if (options.estimator) {
      args.push("--estimator", options.estimator);
    }
    if (options.samples !== undefined) {
      args.push("--samples", String(options.samples));
    }
    if (options.epochs !== undefined) {
      args.push("--epochs", String(options.epochs));
    }
    if (options.batch !== undefined) {
      args.push("--batch", String(options.batch));
    }
    if (options.seed !== undefined) {
      args.push("--seed", String(options.seed));
    }
    if (options.lr !== undefined) {
      args.push("--lr", String(options.lr));
    }
    if (options.optimizer) {
      args.push("--optimizer", options.optimizer);
    }
    if (options.weights) {
      args.push("--weights", options.weights.join(","));
    }
    runCli(args);
    const interpretation = JSON.parse(readFileSync(outPath, "utf-8")) as InterpretationDoc;
    const report = readFileSync(reportPath, "utf-8")
      .split("\n")
      .filter((line) => line.trim().length > 0)
      .map((line) => JSON.parse(line) as EpochRecord);
    return { interpretation, report };
  } finally {
    ws.dispose();
  }
}

export function loadInterpretation(path: string): InterpretationDoc {
  let text: string;
  try {
    text = readFileSync(path, "utf-8");
  } catch (e) {
    throw new UllerError(`cannot read interpretation file ${path}: ${(e as Error).message}`);
  }
  try {
    return JSON.parse(text) as InterpretationDoc;
  } catch (e) {
    throw new UllerSchemaError(`invalid JSON in ${path}: ${(e as Error).message}`);
  }
}

let cachedVersion: string | null = null;

/** Version of the underlying CLI (mirrors the core package). */
export function version(): string {
  if (cachedVersion === null) {
    cachedVersion = coreVersion();
  }
  return cachedVersion;
}
