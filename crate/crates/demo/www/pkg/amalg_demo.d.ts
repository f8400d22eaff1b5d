/* tslint:disable */
/* eslint-disable */

/**
 * Eigenvalue histogram of Gaussian band matrices with the named profile,
 * with the limit-law verdict: `{simulation, verdict}`.
 */
export function band_spectrum(profile_name: string, n: number, trials: number, bins: number, seed: bigint): string;

/**
 * Decay of `‖E_D(u)‖`, `‖E_D(u²)‖` and of the mixed cumulants under
 * block-Haar conjugation, `ks` comma separated.
 */
export function haar_decay(d: number, ks: string, trials: number, seed: bigint): string;

/**
 * `{n, count, partitions}` with 1-based blocks; `partitions` is null
 * above [`LIST_CAP`].
 */
export function nc_partitions(n: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly band_spectrum: (a: number, b: number, c: number, d: number, e: number, f: bigint) => [number, number, number, number];
    readonly haar_decay: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number, number];
    readonly nc_partitions: (a: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
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
