//! Generators for the counterexample families: Rademacher functions, the
//! dyadic symbol `b_N` and its dyadic log, measures `μ_f` whose dyadic
//! balayage is `S[f]`, and the Poisson staircase.

use num_traits::{Signed, Zero};

use crate::dyadic::{DyadicInterval, DyadicRational};
use crate::error::{Error, Result};
use crate::haar::{haar_coefficients, Window};
use crate::measure::{Atom, Measure, Segment};
use crate::rational::{pow2, q, qi, to_f64, Q};
use crate::step::{StepBuilder, StepFunction};

/// The tiling `I_0 = (0,1]`, `I_{-1} = (-2,0]`, `I_k = (2^k - 1, 2^{k+1} - 1]`
/// for `k >= 1` and `I_k = (-2^{-k}, -2^{-k-1}]` for `k <= -2`.
pub fn counterexample_interval(k: i32) -> (DyadicRational, DyadicRational) {
    let p = |e: i32| DyadicRational::grid_point(1, e);
    let one = DyadicRational::from_int(1);
    match k {
        0 => (DyadicRational::ZERO, one),
        -1 => (DyadicRational::from_int(-2), DyadicRational::ZERO),
        k if k >= 1 => (p(k) - one, p(k + 1) - one),
        k => (-p(-k), -p(-k - 1)),
    }
}

/// `|I_k|`.
pub fn counterexample_length(k: i32) -> Q {
    let (l, r) = counterexample_interval(k);
    (r - l).to_q()
}

/// Value of `r_n` on the cell `(i 2^{-n}, (i+1) 2^{-n}]`.
fn rademacher_sign(i: i64) -> i64 {
    if i.rem_euclid(2) == 0 {
        -1
    } else {
        1
    }
}

/// `r_n = r_1(2^{n-1} ·)` restricted to `(l, r]`, where `r_1` is `-1` on
/// `(j, j + 1/2]` and `+1` on `(j + 1/2, j + 1]`.
pub fn rademacher(n: u32, l: DyadicRational, r: DyadicRational) -> Result<StepFunction> {
    if n == 0 {
        return Err(Error::InvalidParameter("Rademacher index starts at 1".into()));
    }
    if l >= r {
        return Err(Error::DegenerateInterval(l.to_string(), r.to_string()));
    }
    let k = -(n as i32);
    let first = l.floor_div_pow2(k);
    let last = r.ceil_div_pow2(k);
    let cells: Vec<Q> = (first..last).map(|i| qi(rademacher_sign(i))).collect();
    Ok(StepFunction::from_cells(DyadicRational::grid_point(first, k), k, &cells).restrict(l, r))
}

/// `Σ_{n=1}^{depth} r_n` on `(l, r]`, with `l, r` integers.
fn rademacher_sum(depth: u32, l: i64, r: i64) -> StepFunction {
    let k = -(depth as i32);
    let per_unit = 1i64 << depth;
    let cells: Vec<Q> = (l * per_unit..r * per_unit)
        .map(|i| {
            let s: i64 = (1..=depth).map(|n| rademacher_sign(i >> (depth - n))).sum();
            qi(s)
        })
        .collect();
    StepFunction::from_cells(DyadicRational::grid_point(l * per_unit, k), k, &cells)
}

/// `b_N = Σ_k Σ_{n=1}^{N-|k|} χ_{I_k} r_n`.
pub fn dyadic_counterexample(n: u32) -> Result<StepFunction> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    let mut b = StepBuilder::new();
    let n = n as i32;
    for k in (1 - n)..n {
        let depth = (n - k.abs()) as u32;
        let (l, r) = counterexample_interval(k);
        let piece = rademacher_sum(depth, l.floor_div_pow2(0), r.floor_div_pow2(0));
        b.add_function(&piece);
    }
    Ok(b.build())
}

/// `Σ_{k=0}^{N} (N - k) χ_{I_k ∪ I_{-k}}`.
pub fn dyadic_log(n: u32) -> StepFunction {
    let mut b = StepBuilder::new();
    let n = n as i32;
    for k in 0..=n {
        let w = qi((n - k) as i64);
        let (l, r) = counterexample_interval(k);
        b.add_indicator(l, r, &w);
        if k > 0 {
            let (l, r) = counterexample_interval(-k);
            b.add_indicator(l, r, &w);
        }
    }
    b.build()
}

/// `μ_f = Σ_I f_I² δ_{z(I)}` with `z(I) = (center of I, 3|I|/4)`, the center of `T_I`.
pub fn balayage_measure_from_function(f: &StepFunction, window: Window) -> Result<Measure> {
    let coeffs = haar_coefficients(f, window)?;
    let atoms = coeffs
        .iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, _)| Atom {
            x: i.midpoint().to_q(),
            y: q(3, 4) * pow2(i.scale),
            mass: coeffs.energy(i),
        })
        .collect();
    Ok(Measure {
        atoms,
        segments: vec![],
    })
}

/// `Σ_{j=0}^m` Lebesgue measure on `(-h 2^j, h 2^j] × {h 2^{-j}}`.
pub fn poisson_staircase(m: u32, h: &Q) -> Result<Measure> {
    if !h.is_positive() {
        return Err(Error::InvalidParameter(format!("h = {h} must be positive")));
    }
    let segments = (0..=m as i32)
        .map(|j| Segment {
            a: -(h * pow2(j)),
            b: h * pow2(j),
            y: h * pow2(-j),
            density: qi(1),
        })
        .collect();
    Ok(Measure {
        atoms: vec![],
        segments,
    })
}

/// The staircase layer `μ_j` alone.
pub fn staircase_layer(j: i32) -> Measure {
    Measure::segment(-pow2(j), pow2(j), pow2(-j), qi(1))
}

/// `I_j = (-2^j, 2^j]` carrying the layer `μ_j`.
pub fn staircase_interval(j: i32) -> (f64, f64) {
    (-(2f64.powi(j)), 2f64.powi(j))
}

/// Working bound for `‖S[b_N]‖_BMO = ‖dyadic_log(N)‖_BMO`.
pub const DYADIC_LOG_BMO_BOUND: f64 = 8.0;
/// Working bound for `‖S_μ‖_BMO` over the staircase family.
pub const STAIRCASE_BMO_BOUND: f64 = 10.0;

/// Parameters realising `Carl(μ) = 1`, `‖S^d_μ‖_BMO + ‖S^d_μ‖₂ < ε`.
#[derive(Clone, Debug, PartialEq)]
pub struct DyadicRecipe {
    pub n: u32,
    pub k: i32,
    /// Bound on `‖S^d_μ‖_BMO`, namely `DYADIC_LOG_BMO_BOUND / N`.
    pub bmo_bound: f64,
    /// `‖S^d_μ‖₂²`, exact.
    pub l2_sq: Q,
}

/// `N` with `C/N < ε/2`, then the least `K >= 0` with `‖S[b̂(2^K ·)]‖₂ < ε/2`.
pub fn dyadic_epsilon_recipe(eps: f64) -> Result<DyadicRecipe> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("ε = {eps} must be positive")));
    }
    let n = (2.0 * DYADIC_LOG_BMO_BOUND / eps).floor() as u32 + 1;
    // S[b / √N] = S[b] / N
    let base = dyadic_log(n).l2_norm_sq() / qi(n as i64 * n as i64);
    let mut k = 0;
    while to_f64(&(&base * pow2(-k))).sqrt() >= eps / 2.0 {
        k += 1;
    }
    Ok(DyadicRecipe {
        n,
        k,
        bmo_bound: DYADIC_LOG_BMO_BOUND / n as f64,
        l2_sq: base * pow2(-k),
    })
}

impl DyadicRecipe {
    /// `μ_f` for `f = b_N(2^K ·)/√N`; masses `f_I²` stay rational.
    pub fn measure(&self) -> Result<Measure> {
        let b = dyadic_counterexample(self.n)?.dilate(self.k);
        let mu = balayage_measure_from_function(&b, Window::covering(&b, 0))?;
        Ok(mu.times(&q(1, self.n as i64)))
    }
}

/// Parameters realising `Carl(μ) = 1`, `‖S_μ‖_BMO + ‖S_μ‖₁ < ε`.
#[derive(Clone, Debug, PartialEq)]
pub struct PoissonRecipe {
    pub m: u32,
    /// `h = 2^{-h_exp}`.
    pub h_exp: i32,
    pub bmo_bound: f64,
    pub l1: Q,
}

/// `m` with `C/(m+1) < ε/2`, then `h = 2^{-e}` with `h (2^{m+2} - 2)/(m+1) < ε/2`.
pub fn poisson_epsilon_recipe(eps: f64) -> Result<PoissonRecipe> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("ε = {eps} must be positive")));
    }
    let m = (2.0 * STAIRCASE_BMO_BOUND / eps).floor() as u32;
    let l1_unit = (pow2(m as i32 + 2) - qi(2)) / qi(m as i64 + 1);
    let mut e = 0;
    while to_f64(&(&l1_unit * pow2(-e))) >= eps / 2.0 {
        e += 1;
    }
    Ok(PoissonRecipe {
        m,
        h_exp: e,
        bmo_bound: STAIRCASE_BMO_BOUND / (m + 1) as f64,
        l1: l1_unit * pow2(-e),
    })
}

impl PoissonRecipe {
    pub fn measure(&self) -> Result<Measure> {
        Ok(poisson_staircase(self.m, &pow2(-self.h_exp))?.times(&q(1, self.m as i64 + 1)))
    }
}

/// Dyadic intervals of the tiling that are genuinely dyadic (used for probes).
pub fn counterexample_dyadic_pieces(k: i32) -> Vec<DyadicInterval> {
    let (l, r) = counterexample_interval(k);
    let (a, b) = (l.floor_div_pow2(0), r.floor_div_pow2(0));
    (a..b).map(|j| DyadicInterval::new(0, j)).collect()
}
