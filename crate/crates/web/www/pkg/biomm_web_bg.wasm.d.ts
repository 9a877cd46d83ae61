/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_decisiongrid_free: (a: number, b: number) => void;
export const __wbg_projection_free: (a: number, b: number) => void;
export const __wbg_spectrogram_free: (a: number, b: number) => void;
export const decisiongrid_cells: (a: number) => [number, number];
export const decisiongrid_resolution: (a: number) => number;
export const decisiongrid_supportVectors: (a: number) => number;
export const decisiongrid_trainAccuracy: (a: number) => number;
export const faceProjection: (a: number, b: number, c: number, d: number) => [number, number, number];
export const projection_labels: (a: number) => [number, number];
export const projection_lda: (a: number) => [number, number];
export const projection_ldaRatio: (a: number) => number;
export const projection_pca: (a: number) => [number, number];
export const projection_pcaRatio: (a: number) => number;
export const spectrogram_cepstra: (a: number) => [number, number];
export const spectrogram_filters: (a: number) => number;
export const spectrogram_frames: (a: number) => number;
export const spectrogram_logMel: (a: number) => [number, number];
export const spectrogram_numCeps: (a: number) => number;
export const spectrogram_summary: (a: number) => [number, number];
export const spectrogram_waveform: (a: number) => [number, number];
export const svmDecisionGrid: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number];
export const voiceSpectrogram: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_start: () => void;
