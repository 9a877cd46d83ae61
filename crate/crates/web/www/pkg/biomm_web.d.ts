/* tslint:disable */
/* eslint-disable */

/**
 * Predicted class over a square grid covering `[0, 1]²`.
 */
export class DecisionGrid {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Row-major, row 0 at `y = 0`.
     */
    cells(): Uint32Array;
    resolution(): number;
    supportVectors(): number;
    trainAccuracy(): number;
}

/**
 * Two-dimensional views of the same synthetic faces.
 */
export class Projection {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    labels(): Uint32Array;
    ldaRatio(): number;
    /**
     * Interleaved `x, y` per sample on the two leading discriminant axes.
     */
    lda(): Float64Array;
    /**
     * Between- over within-class scatter trace of the PCA view.
     */
    pcaRatio(): number;
    /**
     * Interleaved `x, y` per sample on the two leading principal axes.
     */
    pca(): Float64Array;
}

/**
 * Log mel energies and cepstra of one synthetic utterance.
 */
export class Spectrogram {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Frame-major `frames × num_ceps`.
     */
    cepstra(): Float64Array;
    filters(): number;
    frames(): number;
    /**
     * Frame-major `frames × filters`.
     */
    logMel(): Float64Array;
    numCeps(): number;
    /**
     * Means then standard deviations of the cepstra.
     */
    summary(): Float64Array;
    waveform(): Float64Array;
}

/**
 * Generate `clients × faces_per_client` noisy faces and project them.
 */
export function faceProjection(seed: number, clients: number, faces_per_client: number, pixel_noise: number): Projection;

/**
 * Train on points in the unit square and label every grid cell center.
 */
export function svmDecisionGrid(xs: Float64Array, ys: Float64Array, labels: Uint32Array, c: number, gamma: number, resolution: number): DecisionGrid;

/**
 * Synthesize a three-formant utterance and run it through the MFCC chain.
 */
export function voiceSpectrogram(seed: number, f1: number, f2: number, f3: number, secs: number, num_filters: number, num_ceps: number): Spectrogram;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_decisiongrid_free: (a: number, b: number) => void;
    readonly __wbg_projection_free: (a: number, b: number) => void;
    readonly __wbg_spectrogram_free: (a: number, b: number) => void;
    readonly decisiongrid_cells: (a: number) => [number, number];
    readonly decisiongrid_resolution: (a: number) => number;
    readonly decisiongrid_supportVectors: (a: number) => number;
    readonly decisiongrid_trainAccuracy: (a: number) => number;
    readonly faceProjection: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly projection_labels: (a: number) => [number, number];
    readonly projection_lda: (a: number) => [number, number];
    readonly projection_ldaRatio: (a: number) => number;
    readonly projection_pca: (a: number) => [number, number];
    readonly projection_pcaRatio: (a: number) => number;
    readonly spectrogram_cepstra: (a: number) => [number, number];
    readonly spectrogram_filters: (a: number) => number;
    readonly spectrogram_frames: (a: number) => number;
    readonly spectrogram_logMel: (a: number) => [number, number];
    readonly spectrogram_numCeps: (a: number) => number;
    readonly spectrogram_summary: (a: number) => [number, number];
    readonly spectrogram_waveform: (a: number) => [number, number];
    readonly svmDecisionGrid: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number];
    readonly voiceSpectrogram: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __externref_table_dealloc: (a: number) => void;
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
