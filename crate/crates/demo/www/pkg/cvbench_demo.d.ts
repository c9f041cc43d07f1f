/* tslint:disable */
/* eslint-disable */

export class AssessmentView {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly anova: string;
    readonly mcs: string;
    readonly ranking: string;
}

export class Benchmark {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Blocked ANOVA, Tukey comparisons and the MCS plot for one metric.
     */
    assess(metric: string, m: number, threshold: number): AssessmentView;
    /**
     * Accumulation curves of every method for one split and descriptor set.
     */
    curveSvg(split: number, set: string): string;
    /**
     * Simulates and cross-validates a dataset.
     */
    constructor(n: number, positives: number, signal: number, nsplits: number, seed: bigint);
    readonly n: number;
    readonly nsplits: number;
}

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_assessmentview_free: (a: number, b: number) => void;
    readonly __wbg_benchmark_free: (a: number, b: number) => void;
    readonly assessmentview_anova: (a: number) => [number, number];
    readonly assessmentview_mcs: (a: number) => [number, number];
    readonly assessmentview_ranking: (a: number) => [number, number];
    readonly benchmark_assess: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly benchmark_curveSvg: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly benchmark_n: (a: number) => number;
    readonly benchmark_new: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number];
    readonly benchmark_nsplits: (a: number) => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
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
