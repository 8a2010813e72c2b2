/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const demo_classify: (a: number, b: number) => [number, number];
export const demo_play: (a: number, b: number) => [number, number];
export const demo_solve: (a: number, b: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
