//! Dyadic and Poisson balayages of a measure.
//!
//! The Poisson kernel of the upper half-plane is `p_{(x,y)}(t) = y / (π((t-x)^2 + y^2))`.
//! An atom contributes a scaled kernel; a segment of density `ρ` on `(a, b] × {y}`
//! contributes `(ρ/π)[arctan((b-t)/y) - arctan((a-t)/y)]`.

use std::f64::consts::PI;

use num_traits::{Signed, Zero};

use crate::dyadic::{DyadicInterval, DyadicRational};
use crate::error::{Error, Result};
use crate::measure::{grid_index, Measure};
use crate::quadrature;
use crate::rational::{ceil_log2, pow2, to_f64, Q};
use crate::step::{StepBuilder, StepFunction};

/// `S^d_μ = Σ_I χ_I μ(T_I) / |I|`, exact.
pub fn dyadic_balayage(m: &Measure) -> StepFunction {
    let mut out = StepBuilder::new();
    for a in &m.atoms {
        if !a.mass.is_positive() {
            continue;
        }
        let k = ceil_log2(&a.y);
        let i = DyadicInterval::new(k, grid_index(&a.x, k));
        out.add_interval(&i, &(&a.mass * pow2(-k)));
    }
    for s in &m.segments {
        if !s.density.is_positive() {
            continue;
        }
        let k = ceil_log2(&s.y);
        let len = pow2(k);
        // first interval meeting (a, b): floor(a / 2^k); last: the one holding b
        let first = crate::rational::floor(&(&s.a * pow2(-k)));
        let first: i64 = num_traits::ToPrimitive::to_i64(&first).expect("grid index fits in i64");
        let last = grid_index(&s.b, k);
        let cell = |j: i64| DyadicInterval::new(k, j);
        let value_on = |j: i64| -> Q {
            let i = cell(j);
            s.mass_over(&i.left().to_q(), &i.right().to_q()) / &len
        };
        if first == last {
            out.add_interval(&cell(first), &value_on(first));
            continue;
        }
        out.add_interval(&cell(first), &value_on(first));
        out.add_interval(&cell(last), &value_on(last));
        if last > first + 1 {
            let l = cell(first + 1).left();
            let r = cell(last - 1).right();
            out.add_indicator(l, r, &s.density);
        }
    }
    out.build()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KernelTerm {
    Atom { x: f64, y: f64, w: f64 },
    Segment { a: f64, b: f64, y: f64, rho: f64 },
}

/// `arctan(u1) - arctan(u2)` given `du = u1 - u2` computed independently.
fn atan_diff(u1: f64, u2: f64, du: f64) -> f64 {
    if u1 * u2 > 0.0 {
        (du / (1.0 + u1 * u2)).atan()
    } else {
        u1.atan() - u2.atan()
    }
}

/// `G(u) = u arctan(u) - ln(1 + u^2) / 2`, an antiderivative of `arctan`.
fn g(u: f64) -> f64 {
    u * u.atan() - 0.5 * u.hypot(1.0).ln() * 2.0
}

/// `G(u1) - G(u2)` with `du = u1 - u2`, stable when both are large and of one sign.
fn g_diff(u1: f64, u2: f64, du: f64) -> f64 {
    if u1 * u2 > 0.0 && u1.abs().min(u2.abs()) > 1.0 {
        // G is even; for v > 1: G(v) = (π/2) v - v arctan(1/v) - ln(1 + v^2)/2
        let (v1, v2, dv) = if u1 > 0.0 {
            (u1, u2, du)
        } else {
            (-u1, -u2, -du)
        };
        let phi = |v: f64| v * (1.0 / v).atan();
        let log_ratio = (dv * (v1 + v2) / (1.0 + v2 * v2)).ln_1p();
        0.5 * PI * dv - (phi(v1) - phi(v2)) - 0.5 * log_ratio
    } else {
        g(u1) - g(u2)
    }
}

impl KernelTerm {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            KernelTerm::Atom { x, y, w } => {
                let d = t - x;
                w * y / (PI * (d * d + y * y))
            }
            KernelTerm::Segment { a, b, y, rho } => {
                rho / PI * atan_diff((b - t) / y, (a - t) / y, (b - a) / y)
            }
        }
    }

    /// `∫_l^r` of the term, from closed-form antiderivatives.
    pub fn integral(&self, l: f64, r: f64) -> f64 {
        match *self {
            KernelTerm::Atom { x, y, w } => {
                w / PI * atan_diff((r - x) / y, (l - x) / y, (r - l) / y)
            }
            KernelTerm::Segment { a, b, y, rho } => {
                let du = (r - l) / y;
                let db = g_diff((b - l) / y, (b - r) / y, du);
                let da = g_diff((a - l) / y, (a - r) / y, du);
                rho * y / PI * (db - da)
            }
        }
    }

    pub fn mass(&self) -> f64 {
        match *self {
            KernelTerm::Atom { w, .. } => w,
            KernelTerm::Segment { a, b, rho, .. } => rho * (b - a),
        }
    }

    /// `(abscissa, height)` pairs where the term changes shape.
    pub fn features(&self) -> Vec<(f64, f64)> {
        match *self {
            KernelTerm::Atom { x, y, .. } => vec![(x, y)],
            KernelTerm::Segment { a, b, y, .. } => vec![(a, y), (b, y)],
        }
    }
}

/// Closed-form Poisson balayage `S_μ` of an atom/segment measure.
#[derive(Clone, Debug, PartialEq)]
pub struct PoissonBalayage {
    pub terms: Vec<KernelTerm>,
}

impl PoissonBalayage {
    pub fn new(m: &Measure) -> Self {
        let mut terms = Vec::new();
        for a in &m.atoms {
            if a.mass.is_positive() {
                terms.push(KernelTerm::Atom {
                    x: to_f64(&a.x),
                    y: to_f64(&a.y),
                    w: to_f64(&a.mass),
                });
            }
        }
        for s in &m.segments {
            if s.density.is_positive() {
                terms.push(KernelTerm::Segment {
                    a: to_f64(&s.a),
                    b: to_f64(&s.b),
                    y: to_f64(&s.y),
                    rho: to_f64(&s.density),
                });
            }
        }
        PoissonBalayage { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms summed in index order, so results are bit-reproducible.
    pub fn eval(&self, t: f64) -> f64 {
        self.terms.iter().map(|k| k.eval(t)).sum()
    }

    pub fn integral(&self, l: f64, r: f64) -> f64 {
        self.terms.iter().map(|k| k.integral(l, r)).sum()
    }

    pub fn mean(&self, l: f64, r: f64) -> Result<f64> {
        if !(r > l) {
            return Err(Error::DegenerateInterval(l.to_string(), r.to_string()));
        }
        Ok(self.integral(l, r) / (r - l))
    }

    pub fn total_mass(&self) -> f64 {
        self.terms.iter().map(KernelTerm::mass).sum()
    }

    pub fn features(&self) -> Vec<(f64, f64)> {
        let mut f: Vec<(f64, f64)> = self.terms.iter().flat_map(KernelTerm::features).collect();
        f.sort_by(|a, b| a.partial_cmp(b).unwrap());
        f.dedup();
        f
    }

    /// Quadrature breakpoints clustering geometrically around each feature.
    pub fn quadrature_breaks(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (x, y) in self.features() {
            out.push(x);
            let mut d = y;
            for _ in 0..10 {
                out.push(x - d);
                out.push(x + d);
                d *= 4.0;
            }
        }
        out
    }

    /// `∫_ℝ S_μ` by quadrature; independent of the mass identity.
    pub fn l1_by_quadrature(&self) -> f64 {
        quadrature::integrate_line(&|t| self.eval(t), &self.quadrature_breaks(), 1e-12)
    }

    /// `‖S_μ‖₂²` by quadrature.
    pub fn l2_sq_by_quadrature(&self) -> f64 {
        quadrature::integrate_line(
            &|t| {
                let v = self.eval(t);
                v * v
            },
            &self.quadrature_breaks(),
            1e-12,
        )
    }

    /// Samples `(t, S_μ(t))` on `[a, b]` with the given step.
    pub fn sample(&self, a: f64, b: f64, step: f64) -> Vec<(f64, f64)> {
        sample_grid(a, b, step)
            .into_iter()
            .map(|t| (t, self.eval(t)))
            .collect()
    }
}

pub(crate) fn sample_grid(a: f64, b: f64, step: f64) -> Vec<f64> {
    if !(step > 0.0) || b < a {
        return Vec::new();
    }
    let n = ((b - a) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| a + i as f64 * step).collect()
}

pub fn poisson_eval(m: &Measure, t: f64) -> f64 {
    PoissonBalayage::new(m).eval(t)
}

/// Mean of `S_μ` on `[l, r]` via antiderivatives.
pub fn poisson_interval_mean(m: &Measure, l: f64, r: f64) -> Result<f64> {
    PoissonBalayage::new(m).mean(l, r)
}

/// `‖S_μ‖₁ = μ(ℝ²₊)`: each kernel integrates to one.
pub fn poisson_l1(m: &Measure) -> Q {
    m.pruned().total_mass()
}

/// Convenience: exact dyadic balayage evaluated at a rational point.
pub fn dyadic_balayage_at(m: &Measure, t: &Q) -> Q {
    let f = dyadic_balayage(m);
    if f.is_zero() {
        Q::zero()
    } else {
        f.eval(t)
    }
}

#[allow(dead_code)]
fn _assert_dyadic(_: DyadicRational) {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Segment;
    use crate::rational::{q, qi};
    use proptest::prelude::*;

    fn layer(j: i32) -> Measure {
        Measure::segment(-pow2(j), pow2(j), pow2(-j), qi(1))
    }

    fn staircase(m: i32) -> Measure {
        Measure {
            atoms: vec![],
            segments: (0..=m)
                .map(|j| Segment {
                    a: -pow2(j),
                    b: pow2(j),
                    y: pow2(-j),
                    density: qi(1),
                })
                .collect(),
        }
    }

    #[test]
    fn dyadic_balayage_examples() {
        let a = Measure::atom(q(3, 10), q(6, 10), qi(5));
        assert_eq!(
            dyadic_balayage(&a),
            StepFunction::indicator_of(&DyadicInterval::new(0, 0), qi(5))
        );
        let mut expected = StepBuilder::new();
        for j in 0..=4 {
            let r = DyadicRational::grid_point(1, j);
            expected.add_indicator(-r, r, &qi(1));
        }
        assert_eq!(dyadic_balayage(&staircase(4)), expected.build());
    }

    #[test]
    fn dyadic_balayage_matches_top_enumeration() {
        let m = Measure {
            atoms: vec![],
            segments: vec![Segment {
                a: q(-7, 3),
                b: q(5, 2),
                y: q(3, 8),
                density: qi(2),
            }],
        };
        let f = dyadic_balayage(&m);
        for j in -8..8 {
            let i = DyadicInterval::new(-1, j);
            let expected = m.top_mass(&i) * qi(2);
            assert_eq!(f.mean_on_interval(&i), expected, "{i}");
        }
    }

    #[test]
    fn poisson_eval_examples() {
        for j in 0..8 {
            let v = poisson_eval(&layer(j), 0.0);
            let closed = 2.0 / PI * (4f64.powi(j)).atan();
            assert!((v - closed).abs() < 1e-14);
            assert!(v <= 1.0);
            let far = poisson_eval(&layer(j), 2f64.powi(j + 1));
            assert!(far <= 2f64.powi(-2 * j + 1) / PI);
        }
        let a = Measure::atom(q(1, 3), q(1, 4), qi(2));
        assert!((poisson_eval(&a, 1.0 / 3.0) - 2.0 / (PI * 0.25)).abs() < 1e-14);
    }

    #[test]
    fn interval_mean_examples() {
        let a = Measure::atom(q(1, 2), q(1, 4), qi(1));
        let m01 = poisson_interval_mean(&a, 0.0, 1.0).unwrap();
        assert!((m01 - 2.0 / PI * 2f64.atan()).abs() < 1e-14);
        assert!((m01 - 0.7048).abs() < 1e-4);
        let m23 = poisson_interval_mean(&a, 2.0, 3.0).unwrap();
        assert!((m23 - (10f64.atan() - 6f64.atan()) / PI).abs() < 1e-14);
        assert!((m23 - 0.0208).abs() < 1e-4);
        let mut prev = f64::INFINITY;
        for k in 1..10 {
            let d = 2f64.powi(k);
            let v = poisson_interval_mean(&a, d, d + 1.0).unwrap();
            assert!(v < prev);
            prev = v;
        }
        assert!(poisson_interval_mean(&a, 1.0, 1.0).is_err());
    }

    #[test]
    fn l1_identity_and_quadrature() {
        for m in 0..=6 {
            let mu = staircase(m);
            assert_eq!(poisson_l1(&mu), qi((1 << (m + 2)) - 2));
            let quad = PoissonBalayage::new(&mu).l1_by_quadrature();
            let exact = ((1 << (m + 2)) - 2) as f64;
            assert!(((quad - exact) / exact).abs() < 1e-6, "m={m} quad={quad}");
        }
        assert_eq!(poisson_l1(&Measure::atom(qi(0), qi(1), qi(1))), qi(1));
    }

    #[test]
    fn segment_integral_matches_quadrature() {
        let t = KernelTerm::Segment {
            a: -1024.0,
            b: 1024.0,
            y: 1.0 / 1024.0,
            rho: 1.0,
        };
        for (l, r) in [(1023.9, 1024.1), (-5.0, 3.0), (1000.0, 1030.0), (2000.0, 2000.5), (1024.0, 1024.0 + 1.0 / 4096.0)] {
            let closed = t.integral(l, r);
            let quad = quadrature::integrate(&|s| t.eval(s), l, r, 1e-15, 1e-13);
            assert!((closed - quad).abs() < 1e-10 * (1.0 + quad.abs()), "({l},{r}) {closed} {quad}");
        }
    }

    #[test]
    fn l2_quadrature_matches_semigroup_for_atoms() {
        // ∫ p_{(x1,y1)} p_{(x2,y2)} = p_{(x1, y1+y2)}(x2)
        let m = Measure {
            atoms: vec![
                crate::measure::Atom { x: qi(0), y: q(1, 2), mass: qi(1) },
                crate::measure::Atom { x: qi(2), y: qi(1), mass: qi(3) },
            ],
            segments: vec![],
        };
        let p = |dx: f64, y: f64| y / (PI * (dx * dx + y * y));
        let exact = p(0.0, 1.0) + 9.0 * p(0.0, 2.0) + 2.0 * 3.0 * p(2.0, 1.5);
        let quad = PoissonBalayage::new(&m).l2_sq_by_quadrature();
        assert!((quad - exact).abs() < 1e-9, "{quad} vs {exact}");
    }

    fn arb_measure() -> impl Strategy<Value = Measure> {
        let atom = (-16i64..16, 1i64..16, 1i64..6).prop_map(|(x, y, w)| crate::measure::Atom {
            x: q(x, 4),
            y: q(y, 8),
            mass: q(w, 2),
        });
        let seg = (-12i64..12, 1i64..10, 1i64..12, 1i64..4).prop_map(|(a, len, y, rho)| Segment {
            a: q(a, 3),
            b: q(a + len, 3),
            y: q(y, 8),
            density: qi(rho),
        });
        (
            prop::collection::vec(atom, 0..4),
            prop::collection::vec(seg, 0..3),
        )
            .prop_map(|(atoms, segments)| Measure { atoms, segments })
    }

    proptest! {
        #[test]
        fn pointwise_domination(m in arb_measure(), ts in prop::collection::vec(-200i64..200, 20)) {
            let d = dyadic_balayage(&m);
            let p = PoissonBalayage::new(&m);
            for t in ts {
                let tq = q(t, 37);
                let lhs = to_f64(&d.eval(&tq));
                let rhs = 4.0 * PI * p.eval(to_f64(&tq));
                prop_assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-300, "t={} {} > {}", tq, lhs, rhs);
            }
        }

        #[test]
        fn linearity(m1 in arb_measure(), m2 in arb_measure(), t in -100i64..100) {
            let sum = m1.plus(&m2);
            prop_assert_eq!(dyadic_balayage(&sum), dyadic_balayage(&m1).add(&dyadic_balayage(&m2)));
            let tf = t as f64 / 13.0;
            let lhs = poisson_eval(&sum, tf);
            let rhs = poisson_eval(&m1, tf) + poisson_eval(&m2, tf);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        }

        #[test]
        fn dilation(m in arb_measure(), e in -3i32..4, t in -100i64..100) {
            let h = pow2(e);
            let scaled = crate::measure::scale_measure(&m, &h).unwrap();
            let tf = t as f64 / 7.0;
            let lhs = poisson_eval(&scaled, tf);
            let rhs = poisson_eval(&m, tf / to_f64(&h));
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
        }

        #[test]
        fn means_match_quadrature(m in arb_measure(), l in -40i64..40, len in 1i64..30) {
            let p = PoissonBalayage::new(&m);
            let (a, b) = (l as f64 / 8.0, (l + len) as f64 / 8.0);
            let closed = p.integral(a, b);
            let quad = quadrature::integrate(&|t| p.eval(t), a, b, 1e-14, 1e-12);
            prop_assert!((closed - quad).abs() < 1e-9 * (1.0 + quad.abs()));
        }
    }
}
