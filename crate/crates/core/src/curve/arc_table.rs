//! Cumulative arc length for curves given by a raw (non unit-speed) parameter.

use crate::error::{Error, Result};
use crate::quadrature::{adaptive, gauss10};

/// Raw parameter grid with cumulative arc length at each grid point.
#[derive(Debug, Clone)]
pub(crate) struct ArcTable {
    raw: Vec<f64>,
    cumulative: Vec<f64>,
}

impl ArcTable {
    /// Builds the table on `[lo, hi]`. `breakpoints` (where the speed may have a
    /// kink) become cell boundaries so every cell integrand is smooth.
    pub fn new(
        speed: &dyn Fn(f64) -> f64,
        lo: f64,
        hi: f64,
        cells: usize,
        breakpoints: &[f64],
    ) -> Result<Self> {
        let mut raw: Vec<f64> = (0..=cells)
            .map(|i| lo + (hi - lo) * i as f64 / cells as f64)
            .collect();
        raw.extend(breakpoints.iter().copied().filter(|&b| b > lo && b < hi));
        raw.sort_by(f64::total_cmp);
        raw.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * (hi - lo));

        let mut cumulative = Vec::with_capacity(raw.len());
        cumulative.push(0.0);
        let mut total = 0.0;
        for w in raw.windows(2) {
            let tol = 1e-15 * (w[1] - w[0]).max(1e-300);
            let piece = adaptive(speed, w[0], w[1], tol, 30).ok_or_else(|| {
                Error::DegenerateCurve(format!(
                    "arc-length integral did not converge on [{}, {}]",
                    w[0], w[1]
                ))
            })?;
            total += piece;
            cumulative.push(total);
        }
        if !(total > 0.0) {
            return Err(Error::DegenerateCurve("curve has zero length".into()));
        }
        Ok(Self { raw, cumulative })
    }

    pub fn total(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    pub fn raw_range(&self) -> (f64, f64) {
        (self.raw[0], *self.raw.last().unwrap())
    }

    /// Arc length from the start of the table to raw parameter `t`.
    pub fn arc_of_raw(&self, speed: &dyn Fn(f64) -> f64, t: f64) -> f64 {
        let k = self.cell_of_raw(t);
        self.cumulative[k] + gauss10().integrate(self.raw[k], t, speed)
    }

    /// Raw parameter at arc length `s` from the start of the table.
    pub fn raw_of_arc(&self, speed: &dyn Fn(f64) -> f64, s: f64) -> f64 {
        let s = s.clamp(0.0, self.total());
        let k = match self.cumulative.binary_search_by(|c| c.total_cmp(&s)) {
            Ok(i) => return self.raw[i],
            Err(i) => i.saturating_sub(1).min(self.raw.len() - 2),
        };
        let (mut lo, mut hi) = (self.raw[k], self.raw[k + 1]);
        let target = s - self.cumulative[k];
        let span = self.cumulative[k + 1] - self.cumulative[k];
        if span <= 0.0 {
            return lo;
        }
        let t0 = self.raw[k];
        let mut t = lo + (hi - lo) * (target / span);
        for _ in 0..100 {
            let f = gauss10().integrate(t0, t, speed) - target;
            if f > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            if f.abs() <= 1e-15 * span.max(1e-300) || hi - lo <= 1e-15 * (1.0 + t.abs()) {
                break;
            }
            let v = speed(t);
            let newton = t - f / v;
            t = if v > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        }
        t
    }

    fn cell_of_raw(&self, t: f64) -> usize {
        match self.raw.binary_search_by(|r| r.total_cmp(&t)) {
            Ok(i) => i.min(self.raw.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.raw.len() - 2),
        }
    }
}
