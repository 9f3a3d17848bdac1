//! Two-sided characterizations of the Carleson constant through balayages of
//! restrictions `μ_{Q_I}`, dyadic and continuous.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::balayage::{dyadic_balayage, PoissonBalayage};
use crate::dyadic::DyadicInterval;
use crate::error::{Error, Result};
use crate::haar::{haar_coefficients, Window};
use crate::measure::{carleson_constant, Measure, Region};
use crate::norms::{bmo_estimate_poisson, bmod_norm_sq, BmoParams};
use crate::rational::{ceil_log2, fmt_q, pow2, q, qi, to_f64, Q};
use crate::report::Witness;

/// Certified lower constant: `Carl(μ) <= 2 sup_I ‖S^d_{μ_{Q_I}}‖_{BMO^d}`.
pub const LOWER_BOUND: f64 = 2.0;
/// Empirical band for `sup_I ‖S^d_{μ_{Q_I}}‖_{BMO^d} / Carl(μ)`.
pub const UPPER_BAND: f64 = 8.0;
/// Floor for `D / Carl(μ)` after normalization.
pub const BALAY_FLOOR: f64 = 0.01;

/// `‖S^d_{μ_{Q_I}}‖²_{BMO^d}` for one interval.
pub fn restricted_bmod_sq(m: &Measure, i: &DyadicInterval) -> Q {
    let restricted = m.restrict_to_square(i);
    bmod_norm_sq(&dyadic_balayage(&restricted))
        .exact
        .expect("dyadic norm is exact")
}

/// Result of the scan over candidate Carleson squares.
#[derive(Clone, Debug, PartialEq)]
pub struct RestrictedSup {
    /// Squared value, exact.
    pub value_sq: Q,
    pub value: f64,
    pub witness: DyadicInterval,
    pub candidates: usize,
    /// Candidates on which `<S^d_{μ_{Q_I}}>_I |I| = μ(Q_I)` was checked (all
    /// hold, or the scan returns an error); zero for the tree route.
    pub average_identity_checked: usize,
}

/// Dyadic intervals that can realise a restricted supremum: feature-adjacent
/// positions from the scale of the lowest mass up to the scale where every
/// restriction is one of the two half-line parts of `μ`.
pub fn restriction_candidates(m: &Measure) -> Result<Vec<DyadicInterval>> {
    let m = m.pruned();
    let (Some(y_min), Some(y_max)) = (m.min_height(), m.max_height()) else {
        return Err(Error::EmptyMeasure);
    };
    let feats = m.features();
    let reach = feats
        .iter()
        .map(|x| x.abs())
        .max()
        .unwrap_or_else(Q::zero);
    let mut k_stab = ceil_log2(&y_max);
    while pow2(k_stab) < reach {
        k_stab += 1;
    }
    let carl_scale = carleson_constant(&m)
        .dyadic_witness()
        .map(|i| i.scale)
        .unwrap_or(k_stab);
    let k_min = ceil_log2(&y_min);
    let mut out = Vec::new();
    for k in k_min..=k_stab.max(carl_scale) {
        out.extend(
            Measure::candidate_positions(&feats, k)
                .into_iter()
                .map(|j| DyadicInterval::new(k, j)),
        );
    }
    Ok(out)
}

/// `sup_I ‖S^d_{μ_{Q_I}}‖_{BMO^d}` over [`restriction_candidates`], restricting,
/// sweeping and taking the norm for each candidate, and checking the average
/// identity `<S^d_{μ_{Q_I}}>_I = μ(Q_I)/|I|` on every one.
pub fn restricted_sup_dyadic_direct(m: &Measure) -> Result<RestrictedSup> {
    let candidates = restriction_candidates(m)?;
    let mut best = Q::zero();
    let mut witness = candidates[0];
    for i in &candidates {
        let restricted = m.restrict_to_square(i);
        let s = dyadic_balayage(&restricted);
        if s.mean_on_interval(i) * pow2(i.scale) != m.box_mass(i) {
            return Err(Error::InvalidParameter(format!(
                "average identity fails on {}",
                i.label()
            )));
        }
        if let Some((lo, hi)) = s.support() {
            if lo < i.left() || hi > i.right() {
                return Err(Error::InvalidParameter(format!(
                    "restricted balayage leaves {}",
                    i.label()
                )));
            }
        }
        let v = bmod_norm_sq(&s).exact.expect("dyadic norm is exact");
        if v > best {
            best = v;
            witness = *i;
        }
    }
    Ok(RestrictedSup {
        value: to_f64(&best).sqrt(),
        value_sq: best,
        witness,
        average_identity_checked: candidates.len(),
        candidates: candidates.len(),
    })
}

/// `sup_I ‖S^d_{μ_{Q_I}}‖_{BMO^d}` from the Haar tree of `S^d_μ` alone.
///
/// On `J ⊆ I` the coefficients of `S^d_{μ_{Q_I}}` and `S^d_μ` agree, and above
/// `I` the restricted balayage only shows its integral `μ(Q_I)`, so with
/// `E_J = Σ_{J' ⊆ J} b_{J'}²`
/// `‖S^d_{μ_{Q_I}}‖² = max(max_{J ⊆ I} E_J/|J|, (E_I + μ(Q_I)²/(2|I|)) / (2|I|))`.
pub fn restricted_sup_dyadic(m: &Measure) -> Result<RestrictedSup> {
    let m = m.pruned();
    let candidates = restriction_candidates(&m)?;
    let s = dyadic_balayage(&m);
    let top = candidates.iter().map(|i| i.scale).max().unwrap_or(0);
    let window = Window::new(top.max(Window::covering(&s, 0).top_scale));
    let coeffs = haar_coefficients(&s, window)?;
    // bottom-up: subtree energy and best subtree ratio
    let mut pending: BTreeMap<DyadicInterval, (Q, Q)> = coeffs
        .iter()
        .map(|(i, _)| (*i, (coeffs.energy(i), Q::zero())))
        .collect();
    let mut tree: BTreeMap<DyadicInterval, (Q, Q)> = BTreeMap::new();
    while let Some((i, (e, below))) = pending.pop_first() {
        let ratio = &e * pow2(-i.scale);
        let best = if ratio > below { ratio } else { below };
        if i.scale < window.top_scale {
            let slot = pending
                .entry(i.parent())
                .or_insert_with(|| (Q::zero(), Q::zero()));
            slot.0 += &e;
            if best > slot.1 {
                slot.1 = best.clone();
            }
        }
        tree.insert(i, (e, best));
    }
    let feats = m.features();
    let mut best = Q::zero();
    let mut witness = candidates[0];
    let mut k = i32::MIN;
    for i in &candidates {
        if i.scale == k {
            continue;
        }
        k = i.scale;
        let len = pow2(k);
        for (j, mass) in m.box_masses_at_scale(&feats, k) {
            let i = DyadicInterval::new(k, j);
            let (e, below) = tree.get(&i).cloned().unwrap_or_else(|| (Q::zero(), Q::zero()));
            let above = (e + &mass * &mass / (qi(2) * &len)) / (qi(2) * &len);
            let v = if above > below { above } else { below };
            if v > best {
                best = v;
                witness = i;
            }
        }
    }
    Ok(RestrictedSup {
        value: to_f64(&best).sqrt(),
        value_sq: best,
        witness,
        candidates: candidates.len(),
        average_identity_checked: 0,
    })
}

/// `sup_{E ∈ regions} ‖S^d_{μ_E}‖_{BMO^d}` with the index of the maximiser.
pub fn restricted_sup_region(m: &Measure, regions: &[Region]) -> Result<(f64, usize)> {
    if regions.is_empty() {
        return Err(Error::InvalidParameter("empty region family".into()));
    }
    let mut best = Q::zero();
    let mut idx = 0;
    for (n, r) in regions.iter().enumerate() {
        let v = bmod_norm_sq(&dyadic_balayage(&m.restrict(r)))
            .exact
            .expect("dyadic norm is exact");
        if v > best {
            best = v;
            idx = n;
        }
    }
    Ok((to_f64(&best).sqrt(), idx))
}

/// A measure moved by `(x, y) ↦ (s x + t, s y)` so that the Carleson witness
/// lands on `J = (1/4, 3/4]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Normalized {
    pub measure: Measure,
    pub scale: Q,
    pub shift: Q,
    /// Carleson witness of the original measure.
    pub witness: DyadicInterval,
    /// `Carl` of the original measure; the map preserves `μ(Q_I)/|I|` for
    /// every interval, but not the dyadic grid.
    pub carl: Q,
    /// `μ'(Q_J)`, equal to `Carl |J|`.
    pub mass_j: Q,
}

pub fn normalize_for_balay(m: &Measure) -> Result<Normalized> {
    let m = m.pruned();
    if m.is_empty() {
        return Err(Error::EmptyMeasure);
    }
    let report = carleson_constant(&m);
    let witness = report.dyadic_witness().ok_or(Error::EmptyMeasure)?;
    let carl = report.exact.clone().expect("Carleson constant is exact");
    let scale = pow2(-witness.scale - 1);
    let shift = q(1, 4) - witness.left().to_q() * &scale;
    let measure = m.affine(&scale, &shift)?;
    let mass_j = measure.box_mass_over(&q(1, 4), &q(3, 4));
    Ok(Normalized {
        measure,
        scale,
        shift,
        witness,
        carl,
        mass_j,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BalayLower {
    pub mean_near: f64,
    pub mean_far: f64,
    /// `<S_{μ_{Q_[0,1]}}>_{[0,1]} - <S_{μ_{Q_[0,1]}}>_{[2,3]}`.
    pub d: f64,
    pub carl: f64,
    pub ratio: f64,
    pub pass: bool,
}

/// `D` for a measure with `μ(Q_{(1/4,3/4]}) >= Carl/4`, where `carl` is the
/// Carleson constant the normalization refers to.
pub fn verify_balay_lower(m: &Measure, carl: &Q) -> Result<BalayLower> {
    let mass = m.box_mass_over(&q(1, 4), &q(3, 4));
    if !carl.is_positive() || mass * qi(4) < *carl {
        return Err(Error::NotNormalized {
            mass: fmt_q(&m.box_mass_over(&q(1, 4), &q(3, 4))),
            carl: fmt_q(carl),
        });
    }
    let unit = m.restrict(&Region::carleson_box(&qi(0), &qi(1)));
    let p = PoissonBalayage::new(&unit);
    let mean_near = p.mean(0.0, 1.0)?;
    let mean_far = p.mean(2.0, 3.0)?;
    let d = mean_near - mean_far;
    let carl = to_f64(carl);
    Ok(BalayLower {
        mean_near,
        mean_far,
        d,
        carl,
        ratio: d / carl,
        pass: d >= BALAY_FLOOR * carl,
    })
}

impl Normalized {
    pub fn verify_lower(&self) -> Result<BalayLower> {
        verify_balay_lower(&self.measure, &self.carl)
    }
}

/// `sup_I ‖S_{μ_{Q_I}}‖_BMO` over the near-maximal Carleson squares, each
/// estimated on the two grids at scales `|I|/4 ..= 4|I|` around `I`.
pub fn restricted_sup_continuous(m: &Measure, carl: &Q) -> Result<(f64, Option<Witness>)> {
    let mut best = 0.0;
    let mut witness = None;
    for i in restriction_candidates(m)? {
        if m.box_mass(&i) * qi(4) < carl * pow2(i.scale) {
            continue;
        }
        let p = PoissonBalayage::new(&m.restrict_to_square(&i));
        let len = 2f64.powi(i.scale);
        let params = BmoParams {
            min_scale: i.scale - 2,
            max_scale: i.scale + 2,
            window: Some((i.left().to_f64() - 4.0 * len, i.right().to_f64() + 4.0 * len)),
        };
        let r = bmo_estimate_poisson(&p, &params)?;
        if r.value > best {
            best = r.value;
            witness = r.witness;
        }
    }
    Ok((best, witness))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SandwichReport {
    pub carl: f64,
    pub carl_exact: String,
    pub carl_witness: Option<String>,
    pub sup_restricted: f64,
    pub sup_restricted_sq: String,
    pub sup_witness: String,
    pub lower_ratio: f64,
    pub upper_ratio: f64,
    /// Continuous counterpart, reported only.
    pub sup_restricted_continuous: Option<f64>,
    pub lower_ok: bool,
    pub upper_ok: bool,
    pub pass: bool,
}

/// `Carl(μ)` against `sup_I ‖S^d_{μ_{Q_I}}‖_{BMO^d}`; with `continuous`, also the
/// Poisson counterpart.
pub fn sandwich(m: &Measure, continuous: bool) -> Result<SandwichReport> {
    let m = m.pruned();
    if m.is_empty() {
        return Err(Error::EmptyMeasure);
    }
    let carl_report = carleson_constant(&m);
    let carl_q = carl_report.exact.clone().expect("exact");
    let carl = to_f64(&carl_q);
    let sup = restricted_sup_dyadic(&m)?;
    let lower_ratio = carl / sup.value;
    let upper_ratio = sup.value / carl;
    let cont = if continuous {
        Some(restricted_sup_continuous(&m, &carl_q)?.0)
    } else {
        None
    };
    // Carl <= 2 sup, compared exactly as Carl² <= 4 sup²
    let lower_ok = &carl_q * &carl_q <= qi(4) * &sup.value_sq;
    let upper_ok = upper_ratio <= UPPER_BAND;
    Ok(SandwichReport {
        carl,
        carl_exact: fmt_q(&carl_q),
        carl_witness: carl_report.dyadic_witness().map(|i| i.label()),
        sup_restricted: sup.value,
        sup_restricted_sq: fmt_q(&sup.value_sq),
        sup_witness: sup.witness.label(),
        lower_ratio,
        upper_ratio,
        sup_restricted_continuous: cont,
        lower_ok,
        upper_ok,
        pass: lower_ok && upper_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::poisson_staircase;
    use crate::measure::{Atom, Rect, Segment};
    use std::f64::consts::PI;

    #[test]
    fn tree_route_matches_direct_route() {
        let mut corpus = crate::corpus::random_measures(5, 150);
        for m in 0..=5 {
            corpus.push(poisson_staircase(m, &q(3, 2)).unwrap());
        }
        corpus.push(crate::constructions::dyadic_epsilon_recipe(4.0).unwrap().measure().unwrap());
        for m in &corpus {
            let direct = restricted_sup_dyadic_direct(m).unwrap();
            let tree = restricted_sup_dyadic(m).unwrap();
            assert_eq!(direct.value_sq, tree.value_sq, "{m:?}");
            assert_eq!(direct.witness, tree.witness);
        }
    }

    #[test]
    fn single_atom_is_extremal() {
        let m = Measure::atom(q(1, 2), q(1, 2), qi(1));
        let s = restricted_sup_dyadic(&m).unwrap();
        assert_eq!(s.value_sq, qi(1));
        assert_eq!(s.witness, DyadicInterval::new(-1, 0));
        let r = sandwich(&m, false).unwrap();
        assert_eq!(r.carl, 2.0);
        assert_eq!(r.lower_ratio, 2.0);
        assert!(r.pass);
        assert!(restricted_sup_dyadic(&Measure::empty()).is_err());
    }

    #[test]
    fn region_family_examples() {
        let m = poisson_staircase(3, &qi(1)).unwrap();
        let squares: Vec<Region> = restriction_candidates(&m)
            .unwrap()
            .iter()
            .map(Region::carleson_square)
            .collect();
        let (v, _) = restricted_sup_region(&m, &squares).unwrap();
        assert_eq!(v, restricted_sup_dyadic(&m).unwrap().value);
        let mut wider = squares.clone();
        wider.push(Region::full());
        let (w, _) = restricted_sup_region(&m, &wider).unwrap();
        assert!(w >= v);
        assert!(w >= bmod_norm_sq(&dyadic_balayage(&m)).value.sqrt());
        assert!(restricted_sup_region(&m, &[]).is_err());
        let rect = Region::rect(Rect {
            x_lo: Some(qi(-3)),
            x_hi: Some(q(1, 2)),
            y_lo: None,
            y_hi: Some(q(1, 2)),
        })
        .union(Region::carleson_box(&qi(2), &qi(5)));
        let (u, _) = restricted_sup_region(&m, &[rect]).unwrap();
        assert!(u <= 4.0 * 4.0);
    }

    #[test]
    fn normalization() {
        let m = poisson_staircase(3, &qi(1)).unwrap();
        let n = normalize_for_balay(&m).unwrap();
        assert_eq!(n.carl, qi(4));
        assert!(n.mass_j >= qi(1));
        assert_eq!(n.mass_j, &n.carl / qi(2));
        let a = Measure::atom(q(5, 3), q(1, 100), qi(3));
        let n = normalize_for_balay(&a).unwrap();
        let atom: &Atom = &n.measure.atoms[0];
        assert!(atom.x > q(1, 4) && atom.x <= q(3, 4) && atom.y <= q(1, 2));
        assert!(n.mass_j * qi(4) >= n.carl);
        assert!(normalize_for_balay(&Measure::empty()).is_err());
    }

    #[test]
    fn balay_lower_examples() {
        let a = Measure::atom(q(1, 2), q(1, 4), qi(1));
        assert_eq!(carleson_constant(&a).exact, Some(qi(4)));
        let r = verify_balay_lower(&a, &qi(4)).unwrap();
        let expected = 2.0 / PI * 2f64.atan() - (10f64.atan() - 6f64.atan()) / PI;
        assert!((r.d - expected).abs() < 1e-14);
        assert!((r.d - 0.684).abs() < 1e-3);
        assert!(r.pass && r.ratio > 0.17);
        let s = poisson_staircase(5, &qi(1)).unwrap();
        let r = normalize_for_balay(&s).unwrap().verify_lower().unwrap();
        assert!(r.pass, "{r:?}");
        let far = Measure {
            atoms: vec![],
            segments: vec![Segment {
                a: qi(5),
                b: qi(6),
                y: qi(1),
                density: qi(1),
            }],
        };
        assert!(matches!(
            verify_balay_lower(&far, &qi(1)),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn staircase_sandwich() {
        for m in 1..=5 {
            let mu = poisson_staircase(m, &qi(1)).unwrap();
            let r = sandwich(&mu, m <= 2).unwrap();
            assert!(r.pass, "{r:?}");
            assert!(r.lower_ratio >= 1.0 / 8.0 && r.lower_ratio <= 8.0);
            assert!(r.upper_ratio >= 1.0 / 8.0 && r.upper_ratio <= 8.0);
        }
    }
}
