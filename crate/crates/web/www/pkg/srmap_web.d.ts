/* tslint:disable */
/* eslint-disable */

/**
 * Runs the pipeline and returns the map, bundle and decision payloads plus
 * bundle geometry for `beta`; `{error}` on bad input.
 */
export function analyze(previous_bib: string, new_bib: string, k: number, seed: number, beta: number): string;

/**
 * How a piece of text turns into terms: each token, whether it is a stop
 * word, and its stem.
 */
export function explain_terms(text: string): string;

/**
 * Re-routes the last analysis' citation paths for a new `beta`.
 */
export function rebundle(beta: number): string;

/**
 * Synthetic review as `{previous, new, oracle}` with BibTeX text.
 */
export function sample_review(seed: number, included: number, excluded: number, _new: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly analyze: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number];
    readonly explain_terms: (a: number, b: number) => [number, number];
    readonly rebundle: (a: number) => [number, number];
    readonly sample_review: (a: number, b: number, c: number, d: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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
