/** Subprocess plumbing: every call shells out to the `uller` CLI with --json
 * and temporary files, so results are numerically identical to direct CLI use. */

import { spawnSync } from "node:child_process";
import { mkdtempSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import type { InterpretationDoc, JsonValue } from "./types.js";

const ULLER_BIN = process.env.ULLER_BIN ?? "uller";

export class UllerError extends Error {}

export class UllerParseError extends UllerError {
  readonly line: number | null;
  readonly column: number | null;

  constructor(message: string) {
    super(message);
    const m = /line (\d+), column (\d+)/.exec(message);
    this.line = m ? Number(m[1]) : null;
    this.column = m ? Number(m[2]) : null;
  }
}

export class UllerEvalError extends UllerError {}

export class UllerSchemaError extends UllerError {}

export function runCli(args: string[]): string {
  const proc = spawnSync(ULLER_BIN, args, { encoding: "utf-8", maxBuffer: 64 * 1024 * 1024 });
  if (proc.error) {
    throw new UllerError(`failed to launch ${ULLER_BIN}: ${proc.error.message}`);
  }
  if (proc.status !== 0) {
    const message = (proc.stderr || proc.stdout || `exit code ${proc.status}`).trim();
    throw classifyError(message);
  }
  return proc.stdout;
}

function classifyError(message: string): UllerError {
  const stripped = message.replace(/^error:\s*/m, "").replace(/\x1b\[[0-9;]*m/g, "");
  if (/at line \d+, column \d+/.test(stripped) && /expected|unexpected|unterminated/i.test(stripped)) {
    return new UllerParseError(stripped);
  }
  if (/\(at \$\.?/.test(stripped) || /invalid JSON|top-level keys/i.test(stripped)) {
    return new UllerSchemaError(stripped);
  }
  return new UllerEvalError(stripped);
}

export interface Workspace {
  programPath: string;
  interpPath?: string;
  dataPath?: string;
  dispose(): void;
}

export function stage(
  source: string,
  interp?: InterpretationDoc,
  data?: Record<string, JsonValue[]>
): Workspace {
  const dir = mkdtempSync(join(tmpdir(), "uller-"));
  const programPath = join(dir, "program.uller");
  writeFileSync(programPath, source, "utf-8");
  let interpPath: string | undefined;
  if (interp !== undefined) {
    interpPath = join(dir, "interp.json");
    writeFileSync(interpPath, JSON.stringify(interp), "utf-8");
  }
  let dataPath: string | undefined;
  if (data !== undefined) {
    dataPath = join(dir, "data.json");
    writeFileSync(dataPath, JSON.stringify({ datasets: data }), "utf-8");
  }
  return {
    programPath,
    interpPath,
    dataPath,
    dispose: () => rmSync(dir, { recursive: true, force: true }),
  };
}

export function coreVersion(): string {
  return runCli(["--version"]).trim();
}
