use rand::Rng;
use rfsurrogate_core::FrequencyGrid;

use crate::{Result, SamplingError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyDraw {
    /// Selected grid indices, strictly increasing.
    pub indices: Vec<usize>,
    /// Half-open index range `[l, r)` of every partition; `l == r` marks a
    /// partition narrower than one index.
    pub partitions: Vec<(usize, usize)>,
    /// `u` had no mass and the partitions were given equal widths.
    pub uniform_fallback: bool,
}

/// Cumulative trapezoidal integral of `u` over `s`, starting at zero.
pub fn cumtrapz(u: &[f64], s: &[f64]) -> Vec<f64> {
    let mut c = Vec::with_capacity(u.len());
    let mut acc = 0.0;
    c.push(0.0);
    for i in 1..u.len() {
        acc += 0.5 * (u[i] + u[i - 1]) * (s[i] - s[i - 1]);
        c.push(acc);
    }
    c
}

/// Fractional grid position where the non-decreasing `c` first reaches `t`.
fn inverse(c: &[f64], t: f64) -> f64 {
    let last = c.len() - 1;
    if t <= c[0] {
        return 0.0;
    }
    if t >= c[last] {
        return last as f64;
    }
    let i = c.partition_point(|&v| v < t);
    // c[i - 1] < t ≤ c[i]
    let (lo, hi) = (c[i - 1], c[i]);
    (i - 1) as f64 + (t - lo) / (hi - lo)
}

/// Selects `n` distinct grid indices by splitting the area under `u` into
/// `n` equal parts and drawing one index uniformly inside each part.
pub fn uaw_afs(grid: &FrequencyGrid, u: &[f64], n: usize, rng: &mut impl Rng) -> Result<FrequencyDraw> {
    let g = grid.len();
    if n == 0 || n > g {
        return Err(SamplingError::Invalid(format!("cannot select {n} of {g} frequencies")));
    }
    if u.len() != g {
        return Err(SamplingError::Invalid(format!("{} uncertainty values for {g} frequencies", u.len())));
    }
    if u.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
        return Err(SamplingError::Invalid("uncertainty must be finite and non-negative".into()));
    }
    let c = cumtrapz(u, grid.points());
    let total = c[g - 1];
    let uniform_fallback = !(total > 0.0);
    let mut edges = Vec::with_capacity(n + 1);
    edges.push(0);
    for j in 1..n {
        let e = if uniform_fallback {
            j * g / n
        } else {
            let c_norm: f64 = j as f64 / n as f64 * total;
            // roundoff can land an exact integer position just below it
            (inverse(&c, c_norm) + 1e-9).floor() as usize
        };
        edges.push(e.min(g));
    }
    edges.push(g);
    let partitions: Vec<(usize, usize)> = edges.windows(2).map(|w| (w[0], w[1].max(w[0]))).collect();
    let mut used = vec![false; g];
    let mut indices = Vec::with_capacity(n);
    for &(l, r) in &partitions {
        let mut k = if r > l { rng.random_range(l..r) } else { l.min(g - 1) };
        if used[k] {
            k = (k + 1..g)
                .find(|&i| !used[i])
                .or_else(|| (0..k).rev().find(|&i| !used[i]))
                .expect("n ≤ grid size leaves a free index");
        }
        used[k] = true;
        indices.push(k);
    }
    indices.sort_unstable();
    Ok(FrequencyDraw {
        indices,
        partitions,
        uniform_fallback,
    })
}
