/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_assessmentview_free: (a: number, b: number) => void;
export const __wbg_benchmark_free: (a: number, b: number) => void;
export const assessmentview_anova: (a: number) => [number, number];
export const assessmentview_mcs: (a: number) => [number, number];
export const assessmentview_ranking: (a: number) => [number, number];
export const benchmark_assess: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const benchmark_curveSvg: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const benchmark_n: (a: number) => number;
export const benchmark_new: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number];
export const benchmark_nsplits: (a: number) => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_start: () => void;
