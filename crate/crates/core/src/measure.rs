//! Positive measures on the upper half-plane built from point masses and
//! horizontal Lebesgue segments.
//!
//! Boundary conventions: `Q_I = {x ∈ (l, r], 0 < y <= |I|}` and
//! `T_I = {x ∈ (l, r], |I|/2 < y <= |I|}`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::dyadic::DyadicInterval;
use crate::error::{Error, Result};
use crate::rational::{ceil, ceil_log2, pow2, qi, Q};
use crate::report::{NormReport, Witness};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Atom {
    #[serde(with = "crate::rational::serde_q")]
    pub x: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub y: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub mass: Q,
}

/// Lebesgue measure with linear `density` on `(a, b] × {y}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    #[serde(with = "crate::rational::serde_q")]
    pub a: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub b: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub y: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub density: Q,
}

impl Segment {
    /// Mass of the part of the segment over `(l, r]`.
    pub fn mass_over(&self, l: &Q, r: &Q) -> Q {
        let lo = if &self.a > l { &self.a } else { l };
        let hi = if &self.b < r { &self.b } else { r };
        if lo < hi {
            &self.density * (hi - lo)
        } else {
            Q::zero()
        }
    }

    pub fn mass(&self) -> Q {
        &self.density * (&self.b - &self.a)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Measure {
    #[serde(default)]
    pub atoms: Vec<Atom>,
    #[serde(default)]
    pub segments: Vec<Segment>,
}

/// `x ∈ (x_lo, x_hi]`, `y ∈ (y_lo, y_hi]`; `None` leaves a side unbounded
/// (`y_lo = None` means `y > 0`).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Rect {
    pub x_lo: Option<Q>,
    pub x_hi: Option<Q>,
    pub y_lo: Option<Q>,
    pub y_hi: Option<Q>,
}

impl Rect {
    pub fn contains(&self, x: &Q, y: &Q) -> bool {
        self.contains_x(x) && self.contains_y(y)
    }

    pub fn contains_x(&self, x: &Q) -> bool {
        self.x_lo.as_ref().is_none_or(|lo| x > lo) && self.x_hi.as_ref().is_none_or(|hi| x <= hi)
    }

    pub fn contains_y(&self, y: &Q) -> bool {
        self.y_lo.as_ref().is_none_or(|lo| y > lo) && self.y_hi.as_ref().is_none_or(|hi| y <= hi)
    }
}

/// Finite union of rectangles in the half-plane.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Region {
    pub rects: Vec<Rect>,
}

impl Region {
    pub fn full() -> Self {
        Region {
            rects: vec![Rect::default()],
        }
    }

    pub fn rect(rect: Rect) -> Self {
        Region { rects: vec![rect] }
    }

    /// Carleson box over the rational interval `(l, r]`.
    pub fn carleson_box(l: &Q, r: &Q) -> Self {
        Region::rect(Rect {
            x_lo: Some(l.clone()),
            x_hi: Some(r.clone()),
            y_lo: None,
            y_hi: Some(r - l),
        })
    }

    pub fn carleson_square(i: &DyadicInterval) -> Self {
        Self::carleson_box(&i.left().to_q(), &i.right().to_q())
    }

    pub fn top(i: &DyadicInterval) -> Self {
        Region::rect(Rect {
            x_lo: Some(i.left().to_q()),
            x_hi: Some(i.right().to_q()),
            y_lo: Some(pow2(i.scale - 1)),
            y_hi: Some(pow2(i.scale)),
        })
    }

    pub fn union(mut self, other: Region) -> Self {
        self.rects.extend(other.rects);
        self
    }

    pub fn contains(&self, x: &Q, y: &Q) -> bool {
        self.rects.iter().any(|r| r.contains(x, y))
    }

    /// Disjoint, sorted x-intervals `(lo, hi]` of the horizontal slice at height `y`.
    pub fn slice_at(&self, y: &Q) -> Vec<(Option<Q>, Option<Q>)> {
        let mut ivs: Vec<(Option<Q>, Option<Q>)> = self
            .rects
            .iter()
            .filter(|r| r.contains_y(y))
            .map(|r| (r.x_lo.clone(), r.x_hi.clone()))
            .filter(|(lo, hi)| match (lo, hi) {
                (Some(lo), Some(hi)) => lo < hi,
                _ => true,
            })
            .collect();
        // None as lower bound sorts first
        ivs.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(Option<Q>, Option<Q>)> = Vec::new();
        for (lo, hi) in ivs {
            if let Some(last) = merged.last_mut() {
                let touches = match (&last.1, &lo) {
                    (None, _) => true,
                    (Some(_), None) => true,
                    (Some(h), Some(l)) => l <= h,
                };
                if touches {
                    last.1 = match (&last.1, &hi) {
                        (None, _) | (_, None) => None,
                        (Some(a), Some(b)) => Some(if a > b { a.clone() } else { b.clone() }),
                    };
                    continue;
                }
            }
            merged.push((lo, hi));
        }
        merged
    }
}

/// Index `j` of the grid interval `(j 2^k, (j+1) 2^k]` holding `x`.
pub fn grid_index(x: &Q, k: i32) -> i64 {
    (ceil(&(x * pow2(-k))) - BigInt::from(1))
        .to_i64()
        .expect("grid index fits in i64")
}

impl Measure {
    pub fn new(atoms: Vec<Atom>, segments: Vec<Segment>) -> Result<Self> {
        let m = Measure { atoms, segments };
        m.validate()?;
        Ok(m)
    }

    pub fn empty() -> Self {
        Measure::default()
    }

    pub fn atom(x: Q, y: Q, mass: Q) -> Self {
        Measure {
            atoms: vec![Atom { x, y, mass }],
            segments: Vec::new(),
        }
    }

    pub fn segment(a: Q, b: Q, y: Q, density: Q) -> Self {
        Measure {
            atoms: Vec::new(),
            segments: vec![Segment { a, b, y, density }],
        }
    }

    pub fn validate(&self) -> Result<()> {
        for a in &self.atoms {
            if !a.y.is_positive() || a.mass.is_negative() {
                return Err(Error::InvalidParameter(format!(
                    "atom at ({}, {}) needs y > 0 and mass >= 0",
                    a.x, a.y
                )));
            }
        }
        for s in &self.segments {
            if !s.y.is_positive() || s.density.is_negative() || s.a >= s.b {
                return Err(Error::InvalidParameter(format!(
                    "segment ({}, {}] at height {} needs a < b, y > 0, density >= 0",
                    s.a, s.b, s.y
                )));
            }
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let m: Measure = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        m.validate()?;
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("measure serializes")
    }

    pub fn plus(&self, other: &Measure) -> Measure {
        let mut m = self.clone();
        m.atoms.extend(other.atoms.iter().cloned());
        m.segments.extend(other.segments.iter().cloned());
        m
    }

    pub fn total_mass(&self) -> Q {
        let a = self.atoms.iter().fold(Q::zero(), |acc, a| acc + &a.mass);
        self.segments.iter().fold(a, |acc, s| acc + s.mass())
    }

    /// No positive mass anywhere.
    pub fn is_empty(&self) -> bool {
        self.total_mass().is_zero()
    }

    /// Same measure with zero-mass pieces dropped.
    pub fn pruned(&self) -> Measure {
        Measure {
            atoms: self.atoms.iter().filter(|a| a.mass.is_positive()).cloned().collect(),
            segments: self
                .segments
                .iter()
                .filter(|s| s.density.is_positive())
                .cloned()
                .collect(),
        }
    }

    pub fn heights(&self) -> impl Iterator<Item = &Q> {
        self.atoms
            .iter()
            .filter(|a| a.mass.is_positive())
            .map(|a| &a.y)
            .chain(self.segments.iter().filter(|s| s.density.is_positive()).map(|s| &s.y))
    }

    pub fn min_height(&self) -> Option<Q> {
        self.heights().min().cloned()
    }

    pub fn max_height(&self) -> Option<Q> {
        self.heights().max().cloned()
    }

    /// Abscissae where the mass distribution changes: atom positions and segment ends.
    pub fn features(&self) -> Vec<Q> {
        let mut f: Vec<Q> = self
            .atoms
            .iter()
            .filter(|a| a.mass.is_positive())
            .map(|a| a.x.clone())
            .chain(
                self.segments
                    .iter()
                    .filter(|s| s.density.is_positive())
                    .flat_map(|s| [s.a.clone(), s.b.clone()]),
            )
            .collect();
        f.sort();
        f.dedup();
        f
    }

    /// `[min x, max x]` over the support.
    pub fn x_hull(&self) -> Option<(Q, Q)> {
        let f = self.features();
        Some((f.first()?.clone(), f.last()?.clone()))
    }

    pub fn mass_in(&self, region: &Region) -> Q {
        self.restrict(region).total_mass()
    }

    fn mass_in_rect(&self, x_lo: &Q, x_hi: &Q, y_lo: &Q, y_hi: &Q) -> Q {
        let mut acc = Q::zero();
        for a in &self.atoms {
            if &a.x > x_lo && &a.x <= x_hi && &a.y > y_lo && &a.y <= y_hi {
                acc += &a.mass;
            }
        }
        for s in &self.segments {
            if &s.y > y_lo && &s.y <= y_hi {
                acc += s.mass_over(x_lo, x_hi);
            }
        }
        acc
    }

    /// `μ(T_I)`.
    pub fn top_mass(&self, i: &DyadicInterval) -> Q {
        self.mass_in_rect(
            &i.left().to_q(),
            &i.right().to_q(),
            &pow2(i.scale - 1),
            &pow2(i.scale),
        )
    }

    /// `μ(Q_I)` for the rational interval `(l, r]`.
    pub fn box_mass_over(&self, l: &Q, r: &Q) -> Q {
        if l >= r {
            return Q::zero();
        }
        self.mass_in_rect(l, r, &Q::zero(), &(r - l))
    }

    /// `μ(Q_I)`.
    pub fn box_mass(&self, i: &DyadicInterval) -> Q {
        self.box_mass_over(&i.left().to_q(), &i.right().to_q())
    }

    /// `μ_E(A) = μ(E ∩ A)`, returned in the same atom/segment form.
    pub fn restrict(&self, region: &Region) -> Measure {
        let atoms = self
            .atoms
            .iter()
            .filter(|a| region.contains(&a.x, &a.y))
            .cloned()
            .collect();
        let mut segments = Vec::new();
        for s in &self.segments {
            for (lo, hi) in region.slice_at(&s.y) {
                let a = match lo {
                    Some(lo) if lo > s.a => lo,
                    _ => s.a.clone(),
                };
                let b = match hi {
                    Some(hi) if hi < s.b => hi,
                    _ => s.b.clone(),
                };
                if a < b {
                    segments.push(Segment {
                        a,
                        b,
                        y: s.y.clone(),
                        density: s.density.clone(),
                    });
                }
            }
        }
        Measure { atoms, segments }
    }

    /// `c μ`: masses and densities multiplied by `c >= 0`.
    pub fn times(&self, c: &Q) -> Measure {
        Measure {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    mass: &a.mass * c,
                    ..a.clone()
                })
                .collect(),
            segments: self
                .segments
                .iter()
                .map(|g| Segment {
                    density: &g.density * c,
                    ..g.clone()
                })
                .collect(),
        }
    }

    pub fn restrict_to_square(&self, i: &DyadicInterval) -> Measure {
        self.restrict(&Region::carleson_square(i))
    }

    /// Image under `(x, y) ↦ (s x + t, s y)`; atom masses and segment lengths
    /// scale by `s`, densities are kept, so `μ'(Q_{sI+t}) = s μ(Q_I)`.
    pub fn affine(&self, s: &Q, t: &Q) -> Result<Measure> {
        if !s.is_positive() {
            return Err(Error::InvalidParameter(format!("scale factor {s} must be positive")));
        }
        Ok(Measure {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    x: &a.x * s + t,
                    y: &a.y * s,
                    mass: &a.mass * s,
                })
                .collect(),
            segments: self
                .segments
                .iter()
                .map(|g| Segment {
                    a: &g.a * s + t,
                    b: &g.b * s + t,
                    y: &g.y * s,
                    density: g.density.clone(),
                })
                .collect(),
        })
    }

    /// Candidate grid positions at scale `k`: every `μ(Q_I)` at that scale is
    /// attained by one of them (between consecutive features the box mass is
    /// constant).
    /// `μ(Q_I)` for every candidate `I` at scale `k`, atoms bucketed in one pass.
    pub(crate) fn box_masses_at_scale(&self, features: &[Q], k: i32) -> Vec<(i64, Q)> {
        let h = pow2(k);
        let mut cells: BTreeMap<i64, Q> = BTreeMap::new();
        for a in self.atoms.iter().filter(|a| a.y <= h) {
            *cells.entry(grid_index(&a.x, k)).or_insert_with(Q::zero) += &a.mass;
        }
        let low: Vec<&Segment> = self.segments.iter().filter(|s| s.y <= h).collect();
        Measure::candidate_positions(features, k)
            .into_iter()
            .map(|j| {
                let mut mass = cells.get(&j).cloned().unwrap_or_else(Q::zero);
                if !low.is_empty() {
                    let l = Q::from_integer(j.into()) * &h;
                    let r = &l + &h;
                    for s in &low {
                        mass += s.mass_over(&l, &r);
                    }
                }
                (j, mass)
            })
            .collect()
    }

    pub(crate) fn candidate_positions(features: &[Q], k: i32) -> Vec<i64> {
        let mut js: Vec<i64> = features
            .iter()
            .flat_map(|p| {
                let j = grid_index(p, k);
                [j, j + 1]
            })
            .collect();
        js.sort_unstable();
        js.dedup();
        js
    }
}

/// `(x, y) ↦ (h x, h y)` with masses scaled so that Carl is invariant and
/// `S_{μ_h}(t) = S_μ(t / h)`.
pub fn scale_measure(m: &Measure, h: &Q) -> Result<Measure> {
    m.affine(h, &Q::zero())
}

pub fn top_mass(m: &Measure, i: &DyadicInterval) -> Q {
    m.top_mass(i)
}

pub fn box_mass(m: &Measure, i: &DyadicInterval) -> Q {
    m.box_mass(i)
}

pub fn restrict(m: &Measure, r: &Region) -> Measure {
    m.restrict(r)
}

/// Exact `sup_I μ(Q_I)/|I|` over dyadic `I`, with the first maximiser in
/// (scale, position) order as witness.
pub fn carleson_constant(m: &Measure) -> NormReport {
    let m = m.pruned();
    let Some(y_min) = m.min_height() else {
        return NormReport::exact(Q::zero(), None).with_param("scales", "none");
    };
    let total = m.total_mass();
    let features = m.features();
    let k_min = ceil_log2(&y_min);
    let mut best = Q::zero();
    let mut witness: Option<DyadicInterval> = None;
    let mut k = k_min;
    loop {
        // tail: μ(Q_I)/|I| <= total / 2^k for every interval at this scale and above
        if witness.is_some() && &total * pow2(-k) < best {
            break;
        }
        for (j, mass) in m.box_masses_at_scale(&features, k) {
            let ratio = mass * pow2(-k);
            if ratio > best {
                best = ratio;
                witness = Some(DyadicInterval::new(k, j));
            }
        }
        k += 1;
    }
    NormReport::exact(best, witness.map(Witness::Dyadic))
        .with_param("scales", format!("{}..{}", k_min, k - 1))
}

/// `sup_I (1/|I|) Σ_{J ⊆ I} μ(T_J)`, the Carleson-sequence constant of the tops.
/// Since `Q_I` is the disjoint union of the `T_J`, this equals [`carleson_constant`];
/// it is computed here by summing tops explicitly as an independent route.
pub fn carleson_sequence_constant(m: &Measure) -> Q {
    let m = m.pruned();
    let Some(y_min) = m.min_height() else {
        return Q::zero();
    };
    let Some(y_max) = m.max_height() else {
        return Q::zero();
    };
    let features = m.features();
    let k_min = ceil_log2(&y_min);
    let k_top = ceil_log2(&y_max);
    let total = m.total_mass();
    let mut best = Q::zero();
    let mut k = k_min;
    loop {
        if best.is_positive() && &total * pow2(-k) < best {
            break;
        }
        for j in Measure::candidate_positions(&features, k) {
            let mut sum = Q::zero();
            // tops of descendants down to the lowest occupied scale
            for kk in (k_min..=k.min(k_top)).rev() {
                let shift = (k - kk) as u32;
                let first = j << shift;
                let count = 1i64 << shift;
                sum += tops_mass_range(&m, kk, first, first + count);
            }
            let ratio = sum * pow2(-k);
            if ratio > best {
                best = ratio;
            }
        }
        k += 1;
    }
    best
}

/// `Σ_{first <= j < last} μ(T_{(k, j)})`, evaluated as a mass over one strip.
fn tops_mass_range(m: &Measure, k: i32, first: i64, last: i64) -> Q {
    let l = qi(first) * pow2(k);
    let r = qi(last) * pow2(k);
    m.mass_in_rect(&l, &r, &pow2(k - 1), &pow2(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{parse_q, q};
    use proptest::prelude::*;

    fn staircase(m: u32) -> Measure {
        let segments = (0..=m as i32)
            .map(|j| Segment {
                a: -pow2(j),
                b: pow2(j),
                y: pow2(-j),
                density: qi(1),
            })
            .collect();
        Measure {
            atoms: vec![],
            segments,
        }
    }

    #[test]
    fn top_mass_examples() {
        let m = Measure::atom(q(3, 10), q(6, 10), qi(1));
        assert_eq!(m.top_mass(&DyadicInterval::new(0, 0)), qi(1));
        let s = Measure::segment(qi(0), qi(1), q(1, 2), qi(1));
        assert_eq!(s.top_mass(&DyadicInterval::new(-1, 0)), q(1, 2));
        assert_eq!(s.top_mass(&DyadicInterval::new(0, 0)), qi(0));
    }

    #[test]
    fn box_mass_examples() {
        assert_eq!(staircase(2).box_mass_over(&qi(-1), &qi(1)), qi(6));
        let a = Measure::atom(q(1, 2), q(1, 2), qi(1));
        assert_eq!(a.box_mass(&DyadicInterval::new(-2, 1)), qi(0));
        assert_eq!(Measure::empty().box_mass(&DyadicInterval::new(3, -2)), qi(0));
    }

    #[test]
    fn restrict_examples() {
        let s = staircase(2);
        assert_eq!(s.restrict(&Region::full()), s);
        let a = Measure::atom(q(1, 2), q(1, 2), qi(1));
        assert_eq!(a.restrict_to_square(&DyadicInterval::new(-1, 0)), a);
        let r = s.restrict_to_square(&DyadicInterval::new(0, 0));
        // heights 1, 1/2, 1/4 all <= 1; each clipped to (0, 1]
        assert_eq!(r.segments.len(), 3);
        assert!(r.segments.iter().all(|g| g.a == qi(0) && g.b == qi(1)));
        assert_eq!(r.total_mass(), qi(3));
        assert_eq!(r.total_mass(), s.box_mass(&DyadicInterval::new(0, 0)));
    }

    #[test]
    fn overlapping_region_counts_once() {
        let s = Measure::segment(qi(0), qi(4), qi(1), qi(1));
        let r1 = Region::carleson_box(&qi(0), &qi(2));
        let r2 = Region::carleson_box(&qi(1), &qi(3));
        let m = s.restrict(&r1.union(r2));
        assert_eq!(m.total_mass(), qi(3));
    }

    #[test]
    fn carleson_examples() {
        for m in 0..=6u32 {
            let r = carleson_constant(&staircase(m));
            assert_eq!(r.exact_value().unwrap(), &qi(m as i64 + 1));
            assert_eq!(r.dyadic_witness(), Some(DyadicInterval::new(0, -1)));
        }
        let r = carleson_constant(&Measure::atom(q(1, 2), q(1, 2), qi(1)));
        assert_eq!(r.exact_value().unwrap(), &qi(2));
        assert_eq!(r.dyadic_witness(), Some(DyadicInterval::new(-1, 0)));
        let r = carleson_constant(&Measure::empty());
        assert_eq!(r.exact_value().unwrap(), &qi(0));
        assert!(r.witness.is_none());
    }

    #[test]
    fn scale_measure_invariants() {
        let s = staircase(3);
        assert_eq!(scale_measure(&s, &qi(1)).unwrap(), s);
        for h in [q(1, 4), q(1, 16)] {
            let t = scale_measure(&s, &h).unwrap();
            assert_eq!(carleson_constant(&t).exact_value().unwrap(), &qi(4));
            assert_eq!(t.total_mass(), &h * s.total_mass());
        }
        assert!(scale_measure(&s, &qi(0)).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let js = r#"{"atoms":[{"x":"1/2","y":"1/2","mass":"1"}],"segments":[{"a":"-4","b":"4","y":"1/4","density":"1"}]}"#;
        let m = Measure::from_json(js).unwrap();
        assert_eq!(m.to_json(), js);
        let dec = Measure::from_json(r#"{"atoms":[{"x":"0.3","y":"0.6","mass":"1"}]}"#).unwrap();
        assert_eq!(dec.atoms[0].x, parse_q("3/10").unwrap());
        assert!(Measure::from_json(r#"{"atoms":[{"x":"0","y":"0","mass":"1"}]}"#).is_err());
        assert!(Measure::from_json(r#"{"segments":[{"a":"1","b":"0","y":"1","density":"1"}]}"#).is_err());
    }

    fn arb_measure() -> impl Strategy<Value = Measure> {
        let atom = (-16i64..16, 1i64..16, 1i64..6).prop_map(|(x, y, w)| Atom {
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
        fn box_mass_splits_into_top_and_children(m in arb_measure(), k in -3i32..3, j in -6i64..6) {
            let i = DyadicInterval::new(k, j);
            let lhs = m.box_mass(&i);
            let rhs = m.top_mass(&i) + m.box_mass(&i.left_child()) + m.box_mass(&i.right_child());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn restriction_lowers_carl(m in arb_measure(), k in -2i32..3, j in -4i64..4) {
            let r = Region::carleson_square(&DyadicInterval::new(k, j));
            let c = carleson_constant(&m).exact.unwrap();
            let cr = carleson_constant(&m.restrict(&r)).exact.unwrap();
            prop_assert!(cr <= c);
        }

        #[test]
        fn restriction_matches_box_masses(m in arb_measure(), k in -2i32..3, j in -4i64..4, k2 in -3i32..3, j2 in -6i64..6) {
            let region = Region::carleson_square(&DyadicInterval::new(k, j));
            let i = DyadicInterval::new(k2, j2);
            let lhs = m.restrict(&region).box_mass(&i);
            let both = m.restrict(&region).restrict(&Region::carleson_square(&i)).total_mass();
            prop_assert_eq!(lhs, both);
        }

        #[test]
        fn carleson_matches_brute_force(m in arb_measure()) {
            let r = carleson_constant(&m);
            let best = r.exact.clone().unwrap();
            // brute force over a fixed block of scales and positions
            let mut brute = Q::zero();
            for k in -4..9 {
                for j in grid_index(&qi(-5), k)..=grid_index(&qi(9), k) {
                    let i = DyadicInterval::new(k, j);
                    let v = m.box_mass(&i) * pow2(-k);
                    if v > brute { brute = v; }
                }
            }
            prop_assert_eq!(best.clone(), brute);
            prop_assert_eq!(carleson_sequence_constant(&m), best);
        }

        #[test]
        fn carl_is_dilation_invariant(m in arb_measure(), e in -3i32..4) {
            let h = pow2(e);
            let c = carleson_constant(&m).exact.unwrap();
            prop_assert_eq!(carleson_constant(&scale_measure(&m, &h).unwrap()).exact.unwrap(), c);
        }
    }
}
