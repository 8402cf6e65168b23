/* tslint:disable */
/* eslint-disable */

export function convergenceTraces(num_vars: number, num_clauses: number, seed: number, steps: number, every: number): Uint32Array;

/**
 * Default score parameters for a clause/variable ratio: `[zeta, eta, delta]`.
 */
export function defaultScoreParams(ratio: number): Float64Array;

export function pickDistribution(makes: Uint32Array, breaks: Uint32Array, zeta: number, eta: number, delta: number): Float64Array;

export function satisfiableFractionCurve(r_min: number, r_max: number, points: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly convergenceTraces: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly defaultScoreParams: (a: number) => [number, number];
    readonly pickDistribution: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
    readonly satisfiableFractionCurve: (a: number, b: number, c: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
