//! Finitely supported step functions with dyadic breakpoints and rational values.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::dyadic::{DyadicInterval, DyadicRational};
use crate::error::{Error, Result};
use crate::rational::{pow2, to_f64, Q};

/// `values[i]` holds on `(breakpoints[i], breakpoints[i + 1]]`; zero outside
/// `(breakpoints[0], breakpoints[n]]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StepFunction {
    breakpoints: Vec<DyadicRational>,
    #[serde(with = "crate::rational::serde_q_vec")]
    values: Vec<Q>,
}

impl PartialEq for StepFunction {
    fn eq(&self, other: &Self) -> bool {
        let a = self.canonical();
        let b = other.canonical();
        a.breakpoints == b.breakpoints && a.values == b.values
    }
}

impl StepFunction {
    pub fn new(breakpoints: Vec<DyadicRational>, values: Vec<Q>) -> Result<Self> {
        let f = StepFunction {
            breakpoints,
            values,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.breakpoints.len();
        let ok_len = (n == 0 && self.values.is_empty()) || (n >= 2 && self.values.len() == n - 1);
        if !ok_len {
            return Err(Error::Parse(format!(
                "{} breakpoints need {} values, got {}",
                n,
                n.saturating_sub(1),
                self.values.len()
            )));
        }
        if self.breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parse("breakpoints must be strictly increasing".into()));
        }
        Ok(())
    }

    pub fn zero() -> Self {
        StepFunction {
            breakpoints: Vec::new(),
            values: Vec::new(),
        }
    }

    /// `value * χ_(l, r]`.
    pub fn indicator(l: DyadicRational, r: DyadicRational, value: Q) -> Self {
        if l >= r || value.is_zero() {
            return Self::zero();
        }
        StepFunction {
            breakpoints: vec![l, r],
            values: vec![value],
        }
    }

    pub fn indicator_of(i: &DyadicInterval, value: Q) -> Self {
        Self::indicator(i.left(), i.right(), value)
    }

    /// Builds a function from consecutive cell values on `(start + i*2^k, start + (i+1)*2^k]`.
    pub fn from_cells(start: DyadicRational, scale: i32, cells: &[Q]) -> Self {
        let step = DyadicRational::grid_point(1, scale);
        let mut bps = Vec::with_capacity(cells.len() + 1);
        let mut x = start;
        bps.push(x);
        for _ in cells {
            x = x + step;
            bps.push(x);
        }
        StepFunction {
            breakpoints: if cells.is_empty() { Vec::new() } else { bps },
            values: cells.to_vec(),
        }
        .canonical()
    }

    pub fn breakpoints(&self) -> &[DyadicRational] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Q] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    /// Iterator over `(left, right, value)` pieces.
    pub fn pieces(&self) -> impl Iterator<Item = (DyadicRational, DyadicRational, &Q)> + '_ {
        self.breakpoints
            .windows(2)
            .zip(self.values.iter())
            .map(|(w, v)| (w[0], w[1], v))
    }

    /// Merges equal neighbours and trims zero pieces at both ends.
    pub fn canonical(&self) -> Self {
        let (mut lo, mut hi) = (0, self.values.len());
        while lo < hi && self.values[lo].is_zero() {
            lo += 1;
        }
        while hi > lo && self.values[hi - 1].is_zero() {
            hi -= 1;
        }
        if lo == hi {
            return Self::zero();
        }
        let mut bps = vec![self.breakpoints[lo]];
        let mut vals: Vec<Q> = Vec::with_capacity(hi - lo);
        for i in lo..hi {
            let v = &self.values[i];
            if vals.last() == Some(v) {
                *bps.last_mut().unwrap() = self.breakpoints[i + 1];
            } else {
                vals.push(v.clone());
                bps.push(self.breakpoints[i + 1]);
            }
        }
        StepFunction {
            breakpoints: bps,
            values: vals,
        }
    }

    /// Support hull `(x_0, x_n]`, if nonzero.
    pub fn support(&self) -> Option<(DyadicRational, DyadicRational)> {
        let c = self.canonical();
        match (c.breakpoints.first(), c.breakpoints.last()) {
            (Some(a), Some(b)) => Some((*a, *b)),
            _ => None,
        }
    }

    fn piece_index(&self, x: &Q) -> Option<usize> {
        // index i with x in (b_i, b_{i+1}]
        let n = self.breakpoints.len();
        if n < 2 {
            return None;
        }
        let (mut lo, mut hi) = (0usize, n - 1);
        if x <= &self.breakpoints[0].to_q() || x > &self.breakpoints[n - 1].to_q() {
            return None;
        }
        // invariant: b_lo < x <= b_hi
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if &self.breakpoints[mid].to_q() < x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(lo)
    }

    pub fn eval(&self, x: &Q) -> Q {
        self.piece_index(x)
            .map(|i| self.values[i].clone())
            .unwrap_or_else(Q::zero)
    }

    pub fn eval_dyadic(&self, x: &DyadicRational) -> Q {
        // upper bound: first breakpoint >= x
        let i = self.breakpoints.partition_point(|b| b < x);
        if i == 0 || i >= self.breakpoints.len() {
            return Q::zero();
        }
        self.values[i - 1].clone()
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        let i = self.breakpoints.partition_point(|b| b.to_f64() < t);
        if i == 0 || i >= self.breakpoints.len() {
            return 0.0;
        }
        to_f64(&self.values[i - 1])
    }

    pub fn integral(&self) -> Q {
        self.pieces()
            .map(|(l, r, v)| v * (r - l).to_q())
            .fold(Q::zero(), |a, b| a + b)
    }

    /// Exact `∫_(l, r] f`.
    pub fn integral_over(&self, l: &Q, r: &Q) -> Q {
        if l >= r {
            return Q::zero();
        }
        let mut acc = Q::zero();
        for (a, b, v) in self.pieces() {
            if v.is_zero() {
                continue;
            }
            let a = a.to_q();
            let b = b.to_q();
            let lo = if &a > l { a } else { l.clone() };
            let hi = if &b < r { b } else { r.clone() };
            if lo < hi {
                acc += v * (hi - lo);
            }
        }
        acc
    }

    pub fn l1_norm(&self) -> Q {
        self.pieces()
            .map(|(l, r, v)| v.abs() * (r - l).to_q())
            .fold(Q::zero(), |a, b| a + b)
    }

    pub fn l2_norm_sq(&self) -> Q {
        self.pieces()
            .map(|(l, r, v)| v * v * (r - l).to_q())
            .fold(Q::zero(), |a, b| a + b)
    }

    pub fn inner(&self, other: &StepFunction) -> Q {
        self.mul(other).integral()
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        StepFunction {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &StepFunction) -> Self {
        let mut b = StepBuilder::new();
        b.add_function(self);
        b.add_function(other);
        b.build()
    }

    pub fn sub(&self, other: &StepFunction) -> Self {
        self.add(&other.scale(&-Q::from_integer(1.into())))
    }

    /// Pointwise product.
    pub fn mul(&self, other: &StepFunction) -> Self {
        let mut pts: Vec<DyadicRational> = self
            .breakpoints
            .iter()
            .chain(other.breakpoints.iter())
            .copied()
            .collect();
        pts.sort();
        pts.dedup();
        if pts.len() < 2 {
            return Self::zero();
        }
        let values = pts
            .windows(2)
            .map(|w| self.eval_dyadic(&w[1]) * other.eval_dyadic(&w[1]))
            .collect();
        StepFunction {
            breakpoints: pts,
            values,
        }
        .canonical()
    }

    /// `t ↦ f(2^k t)`.
    pub fn dilate(&self, k: i32) -> Self {
        StepFunction {
            breakpoints: self.breakpoints.iter().map(|b| b.mul_pow2(-k)).collect(),
            values: self.values.clone(),
        }
    }

    /// `f · χ_(l, r]`.
    pub fn restrict(&self, l: DyadicRational, r: DyadicRational) -> Self {
        self.mul(&Self::indicator(l, r, Q::from_integer(1.into())))
    }

    pub fn max_abs(&self) -> Q {
        self.values
            .iter()
            .map(|v| v.abs())
            .max()
            .unwrap_or_else(Q::zero)
    }

    /// Finest dyadic scale needed to resolve every breakpoint.
    pub fn finest_scale(&self) -> Option<i32> {
        self.breakpoints.iter().filter_map(|b| b.grid_scale()).min()
    }

    /// Exact average on `(l, r]`.
    pub fn mean_over(&self, l: &Q, r: &Q) -> Result<Q> {
        if l >= r {
            return Err(Error::DegenerateInterval(l.to_string(), r.to_string()));
        }
        Ok(self.integral_over(l, r) / (r - l))
    }

    pub fn mean_on_interval(&self, i: &DyadicInterval) -> Q {
        self.integral_over(&i.left().to_q(), &i.right().to_q()) / pow2(i.scale)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("step function serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: StepFunction = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        f.validate()?;
        Ok(f)
    }
}

/// Exact average of `b` over `(l, r]`.
pub fn mean_on(b: &StepFunction, interval: (DyadicRational, DyadicRational)) -> Result<Q> {
    b.mean_over(&interval.0.to_q(), &interval.1.to_q())
}

/// Accumulates `value · χ_(l, r]` terms into a step function via a difference map.
#[derive(Default)]
pub struct StepBuilder {
    deltas: BTreeMap<DyadicRational, Q>,
}

impl StepBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_indicator(&mut self, l: DyadicRational, r: DyadicRational, value: &Q) {
        if l >= r || value.is_zero() {
            return;
        }
        *self.deltas.entry(l).or_insert_with(Q::zero) += value;
        *self.deltas.entry(r).or_insert_with(Q::zero) -= value;
    }

    pub fn add_interval(&mut self, i: &DyadicInterval, value: &Q) {
        self.add_indicator(i.left(), i.right(), value);
    }

    pub fn add_function(&mut self, f: &StepFunction) {
        for (l, r, v) in f.pieces() {
            self.add_indicator(l, r, v);
        }
    }

    pub fn build(self) -> StepFunction {
        let mut bps = Vec::with_capacity(self.deltas.len());
        let mut vals = Vec::with_capacity(self.deltas.len());
        let mut running = Q::zero();
        for (x, d) in self.deltas {
            if !bps.is_empty() {
                vals.push(running.clone());
            }
            bps.push(x);
            running += d;
        }
        if bps.len() < 2 {
            return StepFunction::zero();
        }
        StepFunction {
            breakpoints: bps,
            values: vals,
        }
        .canonical()
    }
}
