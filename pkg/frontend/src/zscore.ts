/**
 * Standardize a series to mean 0 / population std 1 so differently scaled
 * state components share one vertical axis. A constant series comes back as
 * all zeros rather than NaN.
 */
export function zscore(values: number[]): number[] {
    const n = values.length;
    if (n === 0) return [];
    const mean = values.reduce((a, b) => a + b, 0) / n;
    const variance = values.reduce((a, b) => a + (b - mean) * (b - mean), 0) / n;
    const std = Math.sqrt(variance);
    if (std === 0) return values.map(() => 0);
    return values.map((v) => (v - mean) / std);
}
