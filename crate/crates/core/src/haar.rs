//! Exact Haar analysis of step functions.
//!
//! Coefficients are stored as the rational half-difference
//! `c_I = <b>_{I_left} - <b>_{I_right}`. With the normalisation
//! `h_I = |I|^{-1/2} (χ_{I_left} - χ_{I_right})` this gives
//! `b_I = (b, h_I) = |I|^{1/2} c_I / 2` and `b_I^2 = |I| c_I^2 / 4`, so every
//! quantity that only involves squares stays rational.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::dyadic::{DyadicInterval, DyadicRational};
use crate::error::{Error, Result};
use crate::rational::{pow2, qi, Q};
use crate::step::{StepBuilder, StepFunction};

/// Two-sided analysis window: every dyadic interval of scale `<= top_scale`
/// lying in `(-2^top_scale, 2^top_scale]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub top_scale: i32,
}

impl Window {
    pub fn new(top_scale: i32) -> Self {
        Window { top_scale }
    }

    /// Smallest window holding the support of `b`, enlarged by `extra` scales.
    pub fn covering(b: &StepFunction, extra: i32) -> Self {
        let k = match b.support() {
            None => 0,
            Some((lo, hi)) => {
                let mut k = 0;
                let bound = |k: i32| DyadicRational::grid_point(1, k);
                while -bound(k) > lo || bound(k) < hi {
                    k += 1;
                }
                while k > -60 && -bound(k - 1) <= lo && bound(k - 1) >= hi {
                    k -= 1;
                }
                k
            }
        };
        Window::new(k + extra)
    }

    pub fn roots(&self) -> [DyadicInterval; 2] {
        [
            DyadicInterval::new(self.top_scale, -1),
            DyadicInterval::new(self.top_scale, 0),
        ]
    }

    pub fn check_support(&self, b: &StepFunction) -> Result<()> {
        if let Some((lo, hi)) = b.support() {
            let r = DyadicRational::grid_point(1, self.top_scale);
            if lo < -r || hi > r {
                return Err(Error::WindowTooSmall {
                    support_lo: lo.to_string(),
                    support_hi: hi.to_string(),
                    window: format!("(-{r}, {r}]"),
                });
            }
        }
        Ok(())
    }
}

/// Cumulative integrals at the breakpoints; `F(x) = ∫_{-∞}^x f` in `O(log n)`.
pub struct PrefixIntegral<'a> {
    f: &'a StepFunction,
    cumulative: Vec<Q>,
}

impl<'a> PrefixIntegral<'a> {
    pub fn new(f: &'a StepFunction) -> Self {
        let mut cumulative = Vec::with_capacity(f.breakpoints().len());
        let mut acc = Q::zero();
        if !f.breakpoints().is_empty() {
            cumulative.push(acc.clone());
        }
        for (l, r, v) in f.pieces() {
            acc += v * (r - l).to_q();
            cumulative.push(acc.clone());
        }
        PrefixIntegral { f, cumulative }
    }

    pub fn at(&self, x: &DyadicRational) -> Q {
        let bps = self.f.breakpoints();
        if bps.is_empty() || *x <= bps[0] {
            return Q::zero();
        }
        let i = bps.partition_point(|b| b < x);
        if i >= bps.len() {
            return self.cumulative[bps.len() - 1].clone();
        }
        // bps[i-1] < x <= bps[i]
        &self.cumulative[i - 1] + &self.f.values()[i - 1] * (*x - bps[i - 1]).to_q()
    }

    pub fn over(&self, i: &DyadicInterval) -> Q {
        self.at(&i.right()) - self.at(&i.left())
    }

    /// `c_I` for a single interval.
    pub fn coefficient(&self, i: &DyadicInterval) -> Q {
        let l = self.at(&i.left());
        let m = self.at(&i.midpoint());
        let r = self.at(&i.right());
        (qi(2) * m - l - r) * pow2(1 - i.scale)
    }
}

/// Sparse map from dyadic intervals to the rational half-differences `c_I`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct HaarCoefficients {
    entries: BTreeMap<DyadicInterval, Q>,
}

impl HaarCoefficients {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, i: DyadicInterval, c: Q) {
        if c.is_zero() {
            self.entries.remove(&i);
        } else {
            self.entries.insert(i, c);
        }
    }

    pub fn get(&self, i: &DyadicInterval) -> Q {
        self.entries.get(i).cloned().unwrap_or_else(Q::zero)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&DyadicInterval, &Q)> {
        self.entries.iter()
    }

    /// `b_I^2 = |I| c_I^2 / 4`.
    pub fn energy(&self, i: &DyadicInterval) -> Q {
        let c = self.get(i);
        &c * &c * pow2(i.scale - 2)
    }

    /// `Σ_{J ⊆ I} b_J^2`.
    pub fn subtree_energy(&self, i: &DyadicInterval) -> Q {
        self.entries
            .iter()
            .filter(|(j, _)| j.is_within(i))
            .map(|(j, c)| c * c * pow2(j.scale - 2))
            .fold(Q::zero(), |a, b| a + b)
    }

    /// Entries whose interval lies inside `i`.
    pub fn within(&self, i: &DyadicInterval) -> HaarCoefficients {
        HaarCoefficients {
            entries: self
                .entries
                .iter()
                .filter(|(j, _)| j.is_within(i))
                .map(|(j, c)| (*j, c.clone()))
                .collect(),
        }
    }

    /// `Σ b_J h_J = Σ (c_J / 2)(χ_{J_left} - χ_{J_right})`.
    pub fn synthesize(&self) -> StepFunction {
        let mut b = StepBuilder::new();
        for (j, c) in &self.entries {
            let half = c / qi(2);
            b.add_interval(&j.left_child(), &half);
            b.add_interval(&j.right_child(), &-half);
        }
        b.build()
    }

    /// `Σ_J χ_J c_J^2 / 4`, i.e. `Σ χ_J b_J^2 / |J|`.
    pub fn square_function(&self) -> StepFunction {
        let mut b = StepBuilder::new();
        for (j, c) in &self.entries {
            b.add_interval(j, &(c * c / qi(4)));
        }
        b.build()
    }
}

/// Scales `k` at which some breakpoint lies strictly inside a grid interval,
/// paired with those intervals. Intervals without an interior breakpoint carry
/// a zero coefficient.
pub(crate) fn active_intervals(
    breakpoints: &[DyadicRational],
    k: i32,
) -> impl Iterator<Item = DyadicInterval> + '_ {
    let mut last: Option<i64> = None;
    breakpoints.iter().filter_map(move |x| {
        let s = x.grid_scale()?;
        if s >= k {
            return None;
        }
        let j = x.floor_div_pow2(k);
        if last == Some(j) {
            return None;
        }
        last = Some(j);
        Some(DyadicInterval::new(k, j))
    })
}

/// Exact `c_I` for every dyadic `I` in `window` (all other coefficients vanish).
pub fn haar_coefficients(b: &StepFunction, window: Window) -> Result<HaarCoefficients> {
    window.check_support(b)?;
    let b = b.canonical();
    let mut out = HaarCoefficients::new();
    let Some(finest) = b.finest_scale() else {
        return Ok(out);
    };
    let prefix = PrefixIntegral::new(&b);
    for k in (finest + 1)..=window.top_scale {
        for i in active_intervals(b.breakpoints(), k) {
            out.insert(i, prefix.coefficient(&i));
        }
    }
    Ok(out)
}

/// `P_I b = Σ_{J ⊆ I} b_J h_J`.
pub fn project(b: &StepFunction, i: &DyadicInterval) -> StepFunction {
    let local = b.restrict(i.left(), i.right());
    let window = Window::new(i.scale.max(Window::covering(&local, 0).top_scale));
    haar_coefficients(&local, window)
        .expect("window covers restriction")
        .within(i)
        .synthesize()
}

/// Square function truncated to a window, with the analytic bound on the
/// discarded ancestor terms.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSquareFunction {
    pub value: StepFunction,
    pub window: Window,
    /// Upper bound `‖b‖₂² / 2^top_scale` on every pointwise discarded tail value.
    pub tail_bound: Q,
}

/// `S[b] = Σ_{I} χ_I b_I^2 / |I|` over every dyadic `I` in the window.
pub fn square_function(b: &StepFunction, window: Window) -> Result<TruncatedSquareFunction> {
    let coeffs = haar_coefficients(b, window)?;
    Ok(TruncatedSquareFunction {
        value: coeffs.square_function(),
        window,
        tail_bound: b.l2_norm_sq() * pow2(-window.top_scale),
    })
}

/// `t ↦ b(2^k t)`.
pub fn dilate(b: &StepFunction, k: i32) -> StepFunction {
    b.dilate(k)
}
