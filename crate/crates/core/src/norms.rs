//! Dyadic BMO (exact), grid-sup BMO estimates, mean oscillation, L¹ and L² norms.
//!
//! The full BMO norm is estimated from below by the supremum of the L¹ mean
//! oscillation over two dyadic grids, the standard one and the grid shifted by
//! a third of the scale. Every interval is contained in an interval of one of
//! the two grids of comparable length, so the estimate is within an absolute
//! factor of the true norm.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, ToPrimitive, Zero};

use crate::balayage::PoissonBalayage;
use crate::dyadic::DyadicInterval;
use crate::error::{Error, Result};
use crate::haar::{active_intervals, haar_coefficients, Window};
use crate::rational::{floor, fmt_q, pow2, q, qi, to_f64, Q};
use crate::report::{Method, NormReport, Witness};
use crate::step::StepFunction;

/// `‖b‖²_{BMO^d} = sup_I (1/|I|) Σ_{J ⊆ I} b_J²`, exactly, with the first
/// maximiser in (scale, position) order as witness.
pub fn bmod_norm_sq(b: &StepFunction) -> NormReport {
    let b = b.canonical();
    if b.is_zero() {
        return NormReport::exact(Q::zero(), None).with_param("intervals", 0);
    }
    let window = Window::covering(&b, 0);
    let coeffs = haar_coefficients(&b, window).expect("covering window holds the support");
    let mut pending: BTreeMap<DyadicInterval, Q> =
        coeffs.iter().map(|(i, _)| (*i, coeffs.energy(i))).collect();
    let mut best = Q::zero();
    let mut witness = None;
    let mut visited = 0usize;
    let mut root_energy: BTreeMap<DyadicInterval, Q> = BTreeMap::new();
    while let Some((i, e)) = pending.pop_first() {
        visited += 1;
        let ratio = &e * pow2(-i.scale);
        if ratio > best {
            best = ratio;
            witness = Some(i);
        }
        if i.scale < window.top_scale {
            *pending.entry(i.parent()).or_insert_with(Q::zero) += &e;
        } else {
            root_energy.insert(i, e);
        }
    }
    // Above the window each root's ancestor chain only sees the root's integral F:
    // the coefficient at scale K + m has b_J² = F² / 2^{K+m}.
    let roots = window.roots();
    let mut chains: Vec<(DyadicInterval, Q, Q, Q)> = roots
        .iter()
        .map(|r| {
            let f = b.integral_over(&r.left().to_q(), &r.right().to_q());
            let l2 = b.mul(&b).integral_over(&r.left().to_q(), &r.right().to_q());
            let e = root_energy.get(r).cloned().unwrap_or_else(Q::zero);
            (*r, f, l2, e)
        })
        .collect();
    let mut ancestors = 0usize;
    for m in 1..=256 {
        let k = window.top_scale + m;
        let mut active = false;
        for (root, f, l2, e) in chains.iter_mut() {
            // Bessel: every later ratio on this side is at most ‖b χ_root‖² / 2^k
            if f.is_zero() || &*l2 * pow2(-k) <= best {
                continue;
            }
            active = true;
            *e += &*f * &*f * pow2(-k);
            ancestors += 1;
            let ratio = &*e * pow2(-k);
            if ratio > best {
                best = ratio;
                witness = Some(root.ancestor(k));
            }
        }
        if !active {
            break;
        }
    }
    NormReport::exact(best, witness.map(Witness::Dyadic))
        .with_param("window_top_scale", window.top_scale)
        .with_param("intervals", visited + ancestors)
}

/// `‖b‖_{BMO^d}` as a float.
pub fn bmod_norm(b: &StepFunction) -> f64 {
    bmod_norm_sq(b).value.sqrt()
}

/// `(1/|I|) ∫_I |b - <b>_I|²`, which equals `(1/|I|) ‖P_I b‖²`; the
/// L²-oscillation route to a single term of the BMO^d supremum.
pub fn local_energy(b: &StepFunction, i: &DyadicInterval) -> Q {
    let (l, r) = (i.left().to_q(), i.right().to_q());
    let view = RationalStep::new(b);
    let mean = view.integral_between(&l, &r) * pow2(-i.scale);
    let sq = view.map(|v| (v - &mean) * (v - &mean));
    let outside = (&r - &l) - view.covered(&l, &r);
    (sq.integral_between(&l, &r) + outside * &mean * &mean) * pow2(-i.scale)
}

/// Rational breakpoints, values and running integrals of a step function.
struct RationalStep {
    xs: Vec<Q>,
    vals: Vec<Q>,
    cumulative: Vec<Q>,
}

impl RationalStep {
    fn new(f: &StepFunction) -> Self {
        let f = f.canonical();
        let xs: Vec<Q> = f.breakpoints().iter().map(|x| x.to_q()).collect();
        Self::from_parts(xs, f.values().to_vec())
    }

    fn from_parts(xs: Vec<Q>, vals: Vec<Q>) -> Self {
        let mut cumulative = Vec::with_capacity(xs.len());
        let mut acc = Q::zero();
        if !xs.is_empty() {
            cumulative.push(acc.clone());
        }
        for (w, v) in xs.windows(2).zip(&vals) {
            acc += v * (&w[1] - &w[0]);
            cumulative.push(acc.clone());
        }
        RationalStep {
            xs,
            vals,
            cumulative,
        }
    }

    fn map(&self, f: impl Fn(&Q) -> Q) -> Self {
        Self::from_parts(self.xs.clone(), self.vals.iter().map(f).collect())
    }

    fn integral_to(&self, x: &Q) -> Q {
        let n = self.xs.len();
        if n == 0 || x <= &self.xs[0] {
            return Q::zero();
        }
        let i = self.xs.partition_point(|b| b < x);
        if i >= n {
            return self.cumulative[n - 1].clone();
        }
        &self.cumulative[i - 1] + &self.vals[i - 1] * (x - &self.xs[i - 1])
    }

    fn integral_between(&self, l: &Q, r: &Q) -> Q {
        self.integral_to(r) - self.integral_to(l)
    }

    /// Length of `(l, r] ∩ (x_0, x_n]`.
    fn covered(&self, l: &Q, r: &Q) -> Q {
        match (self.xs.first(), self.xs.last()) {
            (Some(a), Some(b)) => {
                let lo = if a > l { a } else { l };
                let hi = if b < r { b } else { r };
                if lo < hi {
                    hi - lo
                } else {
                    Q::zero()
                }
            }
            _ => Q::zero(),
        }
    }

    /// `(1/(r-l)) ∫_l^r |f - <f>|`.
    fn oscillation(&self, l: &Q, r: &Q) -> Q {
        let len = r - l;
        let mean = self.integral_between(l, r) / &len;
        let mut total = (&len - self.covered(l, r)) * mean.abs();
        let n = self.xs.len();
        if n >= 2 {
            let start = self.xs.partition_point(|x| x <= l).saturating_sub(1);
            for i in start..n - 1 {
                if &self.xs[i] >= r {
                    break;
                }
                let lo = if &self.xs[i] > l { &self.xs[i] } else { l };
                let hi = if &self.xs[i + 1] < r { &self.xs[i + 1] } else { r };
                if lo < hi {
                    total += (&self.vals[i] - &mean).abs() * (hi - lo);
                }
            }
        }
        total / len
    }
}

/// `(1/|I|) ∫_I |f - <f>_I|` over `(l, r]`, exactly.
pub fn mean_oscillation(f: &StepFunction, l: &Q, r: &Q) -> Result<Q> {
    if l >= r {
        return Err(Error::DegenerateInterval(fmt_q(l), fmt_q(r)));
    }
    Ok(RationalStep::new(f).oscillation(l, r))
}

/// `sup_I (1/|I|) ∫_I |f - <f>_I|` over dyadic `I` of scale at most `top_scale`,
/// exactly. Only intervals with a breakpoint in their interior can oscillate.
pub fn dyadic_oscillation_sup(f: &StepFunction, top_scale: i32) -> (Q, Option<DyadicInterval>) {
    let Some(fine) = f.finest_scale() else {
        return (Q::zero(), None);
    };
    let rs = RationalStep::new(f);
    let mut best = Q::zero();
    let mut witness = None;
    for k in fine + 1..=top_scale {
        let cands: BTreeSet<DyadicInterval> = f
            .breakpoints()
            .iter()
            .map(|x| DyadicInterval::containing(x, k))
            .filter(|i| f.breakpoints().iter().any(|x| i.has_interior_point(x)))
            .collect();
        for i in cands {
            let v = rs.oscillation(&i.left().to_q(), &i.right().to_q());
            if v > best {
                best = v;
                witness = Some(i);
            }
        }
    }
    (best, witness)
}

const OSC_SAMPLES: usize = 64;
const BISECTIONS: usize = 60;

/// Mean oscillation of a Poisson balayage on `[l, r]`.
///
/// The mean comes from closed-form antiderivatives; `∫|f - m| = 2 ∫ (f - m)_+`
/// is evaluated on the sign pattern found by sampling and bisection, so a
/// missed sign change can only lower the result.
pub fn mean_oscillation_poisson(p: &PoissonBalayage, l: f64, r: f64) -> Result<f64> {
    if !(r > l) {
        return Err(Error::DegenerateInterval(l.to_string(), r.to_string()));
    }
    let len = r - l;
    let m = p.integral(l, r) / len;
    let g = |t: f64| p.eval(t) - m;
    let mut pts: Vec<f64> = (0..=OSC_SAMPLES)
        .map(|i| l + len * (i as f64 / OSC_SAMPLES as f64))
        .collect();
    pts.extend(
        p.terms
            .iter()
            .flat_map(|t| t.features())
            .map(|(x, _)| x)
            .filter(|&x| x > l && x < r),
    );
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    let mut cuts = vec![l];
    let mut prev = (pts[0], g(pts[0]));
    for &t in &pts[1..] {
        let v = g(t);
        if (prev.1 > 0.0) != (v > 0.0) {
            let (mut a, mut b) = (prev.0, t);
            let a_pos = prev.1 > 0.0;
            for _ in 0..BISECTIONS {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if (g(mid) > 0.0) == a_pos {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            cuts.push(0.5 * (a + b));
        }
        prev = (t, v);
    }
    cuts.push(r);
    let mut positive = 0.0;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        if g(0.5 * (a + b)) > 0.0 {
            positive += p.integral(a, b) - m * (b - a);
        }
    }
    Ok((2.0 * positive / len).max(0.0))
}

/// Which of the two dyadic grids an interval belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Grid {
    Standard,
    /// `(2^k (j + s_k), 2^k (j + 1 + s_k)]` with `s_k = (-1)^k / 3`.
    Third,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GridInterval {
    pub scale: i32,
    pub grid: Grid,
    pub pos: i64,
}

fn third_shift(k: i32) -> Q {
    if k.rem_euclid(2) == 0 {
        q(1, 3)
    } else {
        q(-1, 3)
    }
}

impl GridInterval {
    fn shift_q(&self) -> Q {
        match self.grid {
            Grid::Standard => Q::zero(),
            Grid::Third => third_shift(self.scale),
        }
    }

    fn shift_f64(&self) -> f64 {
        to_f64(&self.shift_q())
    }

    pub fn endpoints(&self) -> (Q, Q) {
        let s = self.shift_q();
        let len = pow2(self.scale);
        (
            (qi(self.pos) + &s) * &len,
            (qi(self.pos + 1) + &s) * &len,
        )
    }

    pub fn endpoints_f64(&self) -> (f64, f64) {
        let s = self.shift_f64();
        let len = 2f64.powi(self.scale);
        ((self.pos as f64 + s) * len, ((self.pos + 1) as f64 + s) * len)
    }

    fn witness(&self) -> Witness {
        match self.grid {
            Grid::Standard => Witness::Dyadic(DyadicInterval::new(self.scale, self.pos)),
            Grid::Third => {
                let (a, b) = self.endpoints();
                Witness::Exact { a, b }
            }
        }
    }

    /// The interval of this grid at scale `k` holding `x` (`x` not a grid point).
    fn containing(x: &Q, k: i32, grid: Grid) -> GridInterval {
        let s = match grid {
            Grid::Standard => Q::zero(),
            Grid::Third => third_shift(k),
        };
        let u = x * pow2(-k) - s;
        let mut j = floor(&u);
        if Q::from_integer(j.clone()) == u {
            j -= 1;
        }
        GridInterval {
            scale: k,
            grid,
            pos: j.to_i64().expect("grid index fits in i64"),
        }
    }
}

/// Scale range `2^min_scale ..= 2^max_scale` and optional spatial window.
#[derive(Clone, Debug, PartialEq)]
pub struct BmoParams {
    pub min_scale: i32,
    pub max_scale: i32,
    /// `[a, b]`; defaults to the support hull padded by `2^max_scale` on both sides.
    pub window: Option<(f64, f64)>,
}

impl Default for BmoParams {
    fn default() -> Self {
        BmoParams {
            min_scale: -12,
            max_scale: 12,
            window: None,
        }
    }
}

impl BmoParams {
    pub fn scales(min_scale: i32, max_scale: i32) -> Self {
        BmoParams {
            min_scale,
            max_scale,
            window: None,
        }
    }

    /// The same family after `t ↦ 2^e t`.
    pub fn dilated(&self, e: i32) -> Self {
        let f = 2f64.powi(e);
        BmoParams {
            min_scale: self.min_scale + e,
            max_scale: self.max_scale + e,
            window: self.window.map(|(a, b)| (a * f, b * f)),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.min_scale > self.max_scale {
            return Err(Error::InvalidParameter(format!(
                "empty scale range {}..{}",
                self.min_scale, self.max_scale
            )));
        }
        if let Some((a, b)) = self.window {
            if !(b > a) {
                return Err(Error::InvalidParameter(format!("empty window [{a}, {b}]")));
            }
        }
        Ok(())
    }

    fn window_or(&self, lo: f64, hi: f64) -> (f64, f64) {
        self.window.unwrap_or_else(|| {
            let pad = 2f64.powi(self.max_scale);
            (lo - pad, hi + pad)
        })
    }

    fn describe(&self, report: NormReport, window: (f64, f64), candidates: usize) -> NormReport {
        report
            .with_param("scales", format!("{}..{}", self.min_scale, self.max_scale))
            .with_param("grids", "standard+third")
            .with_param("window", format!("[{}, {}]", window.0, window.1))
            .with_param("candidates", candidates)
    }
}

/// A function whose BMO norm can be estimated.
#[derive(Clone, Copy, Debug)]
pub enum Oscillating<'a> {
    Step(&'a StepFunction),
    Poisson(&'a PoissonBalayage),
}

/// Grid-sup lower estimate of `‖f‖_BMO`.
pub fn bmo_estimate(f: Oscillating<'_>, params: &BmoParams) -> Result<NormReport> {
    match f {
        Oscillating::Step(s) => bmo_estimate_step(s, params),
        Oscillating::Poisson(p) => bmo_estimate_poisson(p, params),
    }
}

/// Index of the largest value; ties go to the smallest index.
fn argmax<T, V, F>(items: &[T], f: F) -> Option<(usize, V)>
where
    T: Sync,
    V: PartialOrd + Send,
    F: Fn(&T) -> V + Sync + Send,
{
    let pick = |a: (usize, V), b: (usize, V)| {
        if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
            b
        } else {
            a
        }
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items
            .par_iter()
            .enumerate()
            .map(|(i, x)| (i, f(x)))
            .reduce_with(pick)
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().enumerate().map(|(i, x)| (i, f(x))).reduce(pick)
    }
}

fn sort_candidates(c: &mut Vec<GridInterval>) {
    c.sort_by(|a, b| {
        a.scale
            .cmp(&b.scale)
            .then(a.endpoints_f64().0.partial_cmp(&b.endpoints_f64().0).unwrap())
            .then(a.grid.cmp(&b.grid))
    });
    c.dedup();
}

fn inside(i: &GridInterval, window: (f64, f64)) -> bool {
    let (a, b) = i.endpoints_f64();
    a >= window.0 && b <= window.1
}

/// Exact mean oscillations over every grid interval with an interior
/// breakpoint (all others see a constant function).
pub fn bmo_estimate_step(f: &StepFunction, params: &BmoParams) -> Result<NormReport> {
    params.validate()?;
    let f = f.canonical();
    let Some((lo, hi)) = f.support() else {
        return Ok(params.describe(
            NormReport::approx(0.0, Method::GridSup, None),
            params.window.unwrap_or((0.0, 0.0)),
            0,
        ));
    };
    let window = params.window_or(lo.to_f64(), hi.to_f64());
    let bps = f.breakpoints();
    let bq: Vec<Q> = bps.iter().map(|x| x.to_q()).collect();
    let mut cand = Vec::new();
    for k in params.min_scale..=params.max_scale {
        cand.extend(active_intervals(bps, k).map(|i| GridInterval {
            scale: k,
            grid: Grid::Standard,
            pos: i.pos,
        }));
        let mut last = None;
        for x in &bq {
            let g = GridInterval::containing(x, k, Grid::Third);
            if last != Some(g.pos) {
                cand.push(g);
                last = Some(g.pos);
            }
        }
    }
    cand.retain(|i| inside(i, window));
    sort_candidates(&mut cand);
    let view = RationalStep::new(&f);
    let best = argmax(&cand, |i| {
        let (l, r) = i.endpoints();
        view.oscillation(&l, &r)
    });
    let report = match best {
        Some((idx, v)) if v.is_positive() => {
            let mut r = NormReport::exact(v, Some(cand[idx].witness()));
            r.method = Method::GridSup;
            r
        }
        _ => NormReport::approx(0.0, Method::GridSup, None),
    };
    Ok(params.describe(report, window, cand.len()))
}

/// Grid intervals within this many of their own lengths of a kernel feature
/// are scanned; far from every feature the balayage is smooth on the scale of
/// the interval.
pub const NEAR_FEATURE: i64 = 16;

/// Mean oscillations of `S_μ` over grid intervals near the measure's features.
pub fn bmo_estimate_poisson(p: &PoissonBalayage, params: &BmoParams) -> Result<NormReport> {
    params.validate()?;
    let feats = p.features();
    if feats.is_empty() {
        return Ok(params.describe(
            NormReport::approx(0.0, Method::GridSup, None),
            params.window.unwrap_or((0.0, 0.0)),
            0,
        ));
    }
    let xs: Vec<f64> = {
        let mut v: Vec<f64> = feats.iter().map(|f| f.0).collect();
        v.dedup();
        v
    };
    let window = params.window_or(xs[0], xs[xs.len() - 1]);
    let mut set = BTreeSet::new();
    for k in params.min_scale..=params.max_scale {
        let len = 2f64.powi(k);
        for grid in [Grid::Standard, Grid::Third] {
            let s = match grid {
                Grid::Standard => 0.0,
                Grid::Third => to_f64(&third_shift(k)),
            };
            for &x in &xs {
                let c = (x / len - s).floor() as i64;
                for pos in c - NEAR_FEATURE..=c + NEAR_FEATURE {
                    let g = GridInterval {
                        scale: k,
                        grid,
                        pos,
                    };
                    if inside(&g, window) {
                        set.insert(g);
                    }
                }
            }
        }
    }
    let mut cand: Vec<GridInterval> = set.into_iter().collect();
    sort_candidates(&mut cand);
    let best = argmax(&cand, |i| {
        let (a, b) = i.endpoints_f64();
        mean_oscillation_poisson(p, a, b).unwrap_or(0.0)
    });
    let report = match best {
        Some((idx, v)) if v > 0.0 => {
            let (a, b) = cand[idx].endpoints_f64();
            NormReport::approx(v, Method::GridSup, Some(Witness::Interval { a, b }))
        }
        _ => NormReport::approx(0.0, Method::GridSup, None),
    };
    Ok(params.describe(report, window, cand.len()))
}

pub fn l1_norm(f: &StepFunction) -> NormReport {
    NormReport::exact(f.l1_norm(), None)
}

pub fn l2_norm_sq(f: &StepFunction) -> NormReport {
    NormReport::exact(f.l2_norm_sq(), None)
}

/// `‖S_μ‖₁` is the total mass.
pub fn poisson_l1_norm(m: &crate::measure::Measure) -> NormReport {
    let mut r = NormReport::exact(crate::balayage::poisson_l1(m), None);
    r.method = Method::ClosedForm;
    r
}

/// `‖S_μ‖₂²` by quadrature.
pub fn poisson_l2_norm_sq(p: &PoissonBalayage) -> NormReport {
    NormReport::approx(p.l2_sq_by_quadrature(), Method::Quadrature, None)
        .with_param("rel_tol", "1e-12")
}
