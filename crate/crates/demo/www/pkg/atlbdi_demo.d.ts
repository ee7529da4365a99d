/* tslint:disable */
/* eslint-disable */

/**
 * Checks `formula` against the model text from every state; the Goldseeker
 * model is used when `model` is empty.
 */
export function check_formula(model: string, formula: string): string;

/**
 * Selects the plan for `agent` (`BA` or `RA`) whose guard matches `hull`, a JSON
 * object from variable name to the list of values considered possible.
 */
export function plan_for_hull(agent: string, hull: string): string;

/**
 * Runs the closed loop from the given start cells with both generated libraries.
 */
export function simulate_goldseeker(ba_row: number, ba_col: number, ra_row: number, ra_col: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly check_formula: (a: number, b: number, c: number, d: number) => [number, number];
    readonly plan_for_hull: (a: number, b: number, c: number, d: number) => [number, number];
    readonly simulate_goldseeker: (a: number, b: number, c: number, d: number) => [number, number];
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
