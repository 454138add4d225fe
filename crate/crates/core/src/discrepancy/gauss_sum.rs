//! Fast evaluation of one-dimensional Gaussian sums
//! `f(t) = Σ_s exp(-((t - s) / h)²)`.
//!
//! The real line (in units of `h`) is cut into boxes of width 1/2. For every
//! box that may hold a target, the sum over sources within reach of the box
//! centre `c` is stored as a truncated expansion
//!
//! `f(c + b) ≈ exp(-b²) Σ_k (2^k / k!) b^k Σ_s exp(-a_s²) a_s^k`, `a_s = s - c`,
//!
//! which is the Taylor series of `exp(2 a b)`. With `|b| ≤ 1/4` the truncation
//! error of a single kernel value is below `exp(-(a-b)²) (2ab)^18 / 18!`,
//! i.e. under 1e-15, and sources beyond the reach contribute below 1e-18.

const ORDER: usize = 18;
const BOX: f64 = 0.5;
const REACH: f64 = 6.75;
const DENSE_SPAN_LIMIT: i64 = 1 << 22;

#[inline]
fn box_of(u: f64) -> i64 {
    (u / BOX).floor() as i64
}

#[inline]
fn centre(m: i64) -> f64 {
    (m as f64 + 0.5) * BOX
}

fn taylor_weights() -> [f64; ORDER] {
    let mut w = [0.0; ORDER];
    let mut v = 1.0;
    for (k, slot) in w.iter_mut().enumerate() {
        *slot = v;
        v *= 2.0 / (k as f64 + 1.0);
    }
    w
}

enum BoxLookup {
    Dense { first: i64, slots: Vec<u32> },
    Sparse { boxes: Vec<i64> },
}

impl BoxLookup {
    fn new(boxes: &[i64]) -> Self {
        match (boxes.first(), boxes.last()) {
            (Some(&first), Some(&last)) if last - first < DENSE_SPAN_LIMIT => {
                let mut slots = vec![u32::MAX; (last - first + 1) as usize];
                for (i, &m) in boxes.iter().enumerate() {
                    slots[(m - first) as usize] = i as u32;
                }
                BoxLookup::Dense { first, slots }
            }
            _ => BoxLookup::Sparse {
                boxes: boxes.to_vec(),
            },
        }
    }

    #[inline]
    fn slot(&self, m: i64) -> Option<usize> {
        match self {
            BoxLookup::Dense { first, slots } => {
                let off = m.checked_sub(*first)?;
                if off < 0 {
                    return None;
                }
                match slots.get(off as usize) {
                    Some(&s) if s != u32::MAX => Some(s as usize),
                    _ => None,
                }
            }
            BoxLookup::Sparse { boxes } => boxes.binary_search(&m).ok(),
        }
    }
}

/// Expansions of `f` over a fixed set of boxes.
pub(crate) struct GaussSum {
    inv_h: f64,
    lookup: BoxLookup,
    coeffs: Vec<[f64; ORDER]>,
}

impl GaussSum {
    /// Expansions valid for every target on the real line. Targets far from
    /// all sources evaluate to zero.
    pub(crate) fn for_all_targets(sorted_sources: &[f64], h: f64) -> Self {
        let inv_h = 1.0 / h;
        let scaled: Vec<f64> = sorted_sources.iter().map(|s| s * inv_h).collect();
        let mut boxes: Vec<i64> = Vec::new();
        for &u in &scaled {
            let lo = box_of(u - REACH);
            let hi = box_of(u + REACH);
            let start = match boxes.last() {
                Some(&last) if last >= lo => last + 1,
                _ => lo,
            };
            boxes.extend(start..=hi);
        }
        Self::build(&scaled, boxes, inv_h)
    }

    /// Expansions only for the boxes holding the sources themselves.
    pub(crate) fn for_own_points(sorted_sources: &[f64], h: f64) -> Self {
        let inv_h = 1.0 / h;
        let scaled: Vec<f64> = sorted_sources.iter().map(|s| s * inv_h).collect();
        let mut boxes: Vec<i64> = scaled.iter().map(|&u| box_of(u)).collect();
        boxes.dedup();
        Self::build(&scaled, boxes, inv_h)
    }

    fn build(scaled: &[f64], boxes: Vec<i64>, inv_h: f64) -> Self {
        let weights = taylor_weights();
        let mut coeffs = Vec::with_capacity(boxes.len());
        let (mut lo, mut hi) = (0usize, 0usize);
        let mut offsets: Vec<f64> = Vec::new();
        let mut powers: Vec<f64> = Vec::new();
        for &m in &boxes {
            let c = centre(m);
            while lo < scaled.len() && scaled[lo] < c - REACH {
                lo += 1;
            }
            hi = hi.max(lo);
            while hi < scaled.len() && scaled[hi] <= c + REACH {
                hi += 1;
            }
            offsets.clear();
            powers.clear();
            for &u in &scaled[lo..hi] {
                let a = u - c;
                offsets.push(a);
                powers.push((-a * a).exp());
            }
            let mut acc = [0.0; ORDER];
            for (k, slot) in acc.iter_mut().enumerate() {
                let mut s = 0.0;
                for (p, &a) in powers.iter_mut().zip(&offsets) {
                    s += *p;
                    *p *= a;
                }
                *slot = s * weights[k];
            }
            coeffs.push(acc);
        }
        GaussSum {
            inv_h,
            lookup: BoxLookup::new(&boxes),
            coeffs,
        }
    }

    /// `f(t)`.
    #[inline]
    pub(crate) fn eval(&self, t: f64) -> f64 {
        let u = t * self.inv_h;
        let m = box_of(u);
        let Some(slot) = self.lookup.slot(m) else {
            return 0.0;
        };
        let b = u - centre(m);
        let c = &self.coeffs[slot];
        let mut acc = 0.0;
        for &ck in c.iter().rev() {
            acc = acc * b + ck;
        }
        acc * (-b * b).exp()
    }

    /// `Σ_t f(t)`.
    pub(crate) fn eval_sum(&self, targets: &[f64]) -> f64 {
        targets.iter().map(|&t| self.eval(t)).sum()
    }
}

/// `Σ_{i≠j} exp(-((x_i - x_j)/h)²)` for ascending `x`.
pub(crate) fn self_sum_sorted(x: &[f64], h: f64) -> f64 {
    let gs = GaussSum::for_own_points(x, h);
    gs.eval_sum(x) - x.len() as f64
}
