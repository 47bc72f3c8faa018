/* tslint:disable */
/* eslint-disable */

/**
 * Pattern through 2 to 5 points as `{"class": .., "path": ..}`, the path
 * being SVG path data for a canvas showing the square of half side
 * [`FIT_HALF_SIDE`] around the origin.
 */
export function fit(xs: Float64Array, ys: Float64Array): string;

export function fit_half_side(): number;

/**
 * A scenario as JSON.
 */
export function generate_scenario(f: number, n: number, seed: bigint, mode: string): string;

/**
 * SVG of a scenario's starting configuration.
 */
export function preview(scenario_json: string): string;

/**
 * SVG of configuration `round` of a trace file.
 */
export function render(trace_json: string, round: number): string;

/**
 * Runs a scenario and returns the trace file as JSON.
 */
export function simulate(scenario_json: string, random_frames: boolean): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly fit: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly fit_half_side: () => number;
    readonly generate_scenario: (a: number, b: number, c: bigint, d: number, e: number) => [number, number, number, number];
    readonly preview: (a: number, b: number) => [number, number, number, number];
    readonly render: (a: number, b: number, c: number) => [number, number, number, number];
    readonly simulate: (a: number, b: number, c: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
