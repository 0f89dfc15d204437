/// Elbow of the cumulative curve of `values`, which must be sorted descending.
///
/// The curve runs through `(i / n, sum(values[..i]) / total)` for `i = 0..=n`.
/// The returned count `i >= 1` maximises the perpendicular distance to the
/// chord from the first to the last point; the first maximum wins. A curve
/// with no bend (all values equal) returns `n`, as does an all-zero input.
pub fn elbow_index(values: &[f64]) -> usize {
    let n = values.len();
    let total: f64 = values.iter().sum();
    if n == 0 || total <= 0.0 {
        return n;
    }
    // After normalisation the chord is y = x, so the distance is (y - x) / sqrt(2).
    let mut best = (n, 0.0);
    let mut cumulative = 0.0;
    for (i, v) in values.iter().enumerate() {
        cumulative += v;
        let count = i + 1;
        let gap = cumulative / total - count as f64 / n as f64;
        if gap > best.1 + 1e-12 {
            best = (count, gap);
        }
    }
    best.0
}
