use super::sweep::ResultRecord;

/// Sample mean and standard error of the mean (zero for fewer than two samples).
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Monte-Carlo summary of one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSummary {
    pub scheme: String,
    pub receiver_type: String,
    pub sweep_value: f64,
    pub mean_wssr: f64,
    pub stderr_wssr: f64,
    pub succeeded: usize,
    pub failed: usize,
}

/// Groups records by `(scheme, receiver type, sweep value)` in first-seen order. Failed
/// runs are counted but excluded from the statistics.
pub fn summarize(records: &[ResultRecord]) -> Vec<PointSummary> {
    let mut keys: Vec<(String, String, u64)> = Vec::new();
    for r in records {
        let key = (r.scheme.clone(), r.receiver_type.clone(), r.sweep_value.to_bits());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(scheme, rtype, bits)| {
            let group: Vec<&ResultRecord> = records
                .iter()
                .filter(|r| r.scheme == scheme && r.receiver_type == rtype && r.sweep_value.to_bits() == bits)
                .collect();
            let ok: Vec<f64> = group.iter().filter(|r| r.is_ok()).map(|r| r.wssr_bps_hz).collect();
            let (mean, se) = mean_stderr(&ok);
            PointSummary {
                scheme,
                receiver_type: rtype,
                sweep_value: f64::from_bits(bits),
                mean_wssr: mean,
                stderr_wssr: se,
                succeeded: ok.len(),
                failed: group.len() - ok.len(),
            }
        })
        .collect()
}

fn ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        // ties share the average rank
        let rank = 0.5 * (i + j) as f64 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = rank;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation (Pearson correlation of average ranks).
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len(), "spearman needs paired samples");
    let (rx, ry) = (ranks(xs), ranks(ys));
    let n = rx.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    sxy / (sxx * syy).sqrt()
}

/// Angular half-width of the rate dips around `anchors`, with a dip being the grid points
/// whose mean lies below half of the peak mean.
pub fn dip_half_width(grid: &[f64], means: &[f64], anchors: &[f64]) -> f64 {
    let peak = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    dip_width_below(grid, means, anchors, 0.5 * peak)
}

/// Like [`dip_half_width`] with the level halfway between the lowest and highest mean.
/// Useful when no dip reaches half of the peak.
pub fn dip_half_depth_width(grid: &[f64], means: &[f64], anchors: &[f64]) -> f64 {
    let peak = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let floor = means.iter().copied().fold(f64::INFINITY, f64::min);
    dip_width_below(grid, means, anchors, 0.5 * (peak + floor))
}

/// Starting from the grid point nearest each anchor, collects the contiguous run of grid
/// points whose mean lies below `level` and returns the largest distance from an anchor to a
/// point of its run (zero when no nearest point is below `level`).
pub fn dip_width_below(grid: &[f64], means: &[f64], anchors: &[f64], level: f64) -> f64 {
    assert_eq!(grid.len(), means.len(), "grid and means must align");
    if grid.is_empty() {
        return 0.0;
    }
    let low = |i: usize| means[i] < level;
    let mut width: f64 = 0.0;
    for &a in anchors {
        let i0 = (0..grid.len())
            .min_by(|&x, &y| (grid[x] - a).abs().total_cmp(&(grid[y] - a).abs()))
            .unwrap_or(0);
        if !low(i0) {
            continue;
        }
        let (mut lo, mut hi) = (i0, i0);
        while lo > 0 && low(lo - 1) {
            lo -= 1;
        }
        while hi + 1 < grid.len() && low(hi + 1) {
            hi += 1;
        }
        width = width.max((grid[lo] - a).abs()).max((grid[hi] - a).abs());
    }
    width
}
