/* tslint:disable */
/* eslint-disable */

/**
 * Compare two partitions typed as text, one community per line. The node
 * count is the number of distinct ids in the two texts.
 */
export function compare_text(ground: string, detected: string): string;

/**
 * Generate a planted-partition network, move `perturb` of its nodes to other
 * communities, and score both partitions.
 */
export function generate_and_score(nodes: number, mixing: number, perturb: number, seed: number): string;

/**
 * The seven comparison metrics as the perturbed share grows from 0 to 1.
 */
export function perturbation_curve(nodes: number, mixing: number, seed: number, steps: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly compare_text: (a: number, b: number, c: number, d: number) => [number, number];
    readonly generate_and_score: (a: number, b: number, c: number, d: number) => [number, number];
    readonly perturbation_curve: (a: number, b: number, c: number, d: number) => [number, number];
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
