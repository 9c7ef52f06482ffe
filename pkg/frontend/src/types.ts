/** JSON shapes shared with the CLI: interpretation schema and canonical AST. */

export type JsonValue = number | boolean | string | { [prop: string]: JsonValue };

export type FunctionKind = "table" | "parameterised" | "deterministic_table";

export interface FunctionSpec {
  args: string[];
  codomain: string;
  kind: FunctionKind;
  /** table: argsKey -> { valueKey -> probability (number or "p/q") };
   *  parameterised: argsKey -> logits;
   *  deterministic_table: argsKey -> value. */
  rows: Record<string, Record<string, number | string> | number[] | JsonValue>;
}

export interface InterpretationDoc {
  domains?: Record<string, JsonValue[]>;
  constants?: Record<string, JsonValue>;
  functions?: Record<string, FunctionSpec>;
  datasets?: Record<string, JsonValue[]>;
}

export type Semantics = "classical" | "prob" | "viterbi" | "fuzzy" | "sample";
export type TNorm = "godel" | "product" | "lukasiewicz";

export interface EvaluateOptions {
  tnorm?: TNorm;
  samples?: number;
  seed?: number;
  /** extra dataset bindings merged over the interpretation */
  data?: Record<string, JsonValue[]>;
}

export interface GradientOptions extends EvaluateOptions {
  semantics?: "prob" | "fuzzy";
  estimator?: "exact" | "score";
  transform?: "neg" | "neg_log" | "value";
}

export interface TrainOptions {
  dataset: string;
  semantics?: "prob" | "fuzzy";
  tnorm?: TNorm;
  estimator?: "exact" | "score";
  samples?: number;
  epochs?: number;
  batch?: number;
  seed?: number;
  lr?: number;
  optimizer?: "adam" | "sgd";
  weights?: number[];
  data?: Record<string, JsonValue[]>;
}

export interface EpochRecord {
  epoch: number;
  loss: number;
  satisfaction: number;
  theta_norm: number;
}

export interface TrainResult {
  interpretation: InterpretationDoc;
  report: EpochRecord[];
}

export type AstNode =
  | { node: "ForAll" | "Exists"; var: string; domain: string; body: AstNode }
  | { node: "And" | "Or" | "Implies"; left: AstNode; right: AstNode }
  | { node: "Not"; body: AstNode }
  | { node: "Pred"; name: string; args: AstTerm[] }
  | { node: "Statement"; var: string; func: string; args: AstTerm[]; body: AstNode }
  | { node: "Program"; formulas: AstNode[] };

export type AstTerm =
  | { node: "Var" | "Const"; name: string }
  | { node: "PropAccess"; base: AstTerm; prop: string }
  | { node: "Arith"; op: "+" | "-" | "*"; left: AstTerm; right: AstTerm }
  | { node: "Literal"; type: "int" | "real" | "symbol" | "bool"; value: number | string | boolean };
