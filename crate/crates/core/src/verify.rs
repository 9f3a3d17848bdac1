//! Named numerical verifications with pass/fail verdicts.

use std::f64::consts::PI;

use num_traits::Zero;
use serde::Serialize;

use crate::balayage::{dyadic_balayage, poisson_eval, poisson_l1, PoissonBalayage};
use crate::characterization::{
    normalize_for_balay, restricted_sup_dyadic, restricted_sup_dyadic_direct, sandwich,
};
use crate::constructions::{
    dyadic_counterexample, dyadic_log, poisson_staircase, staircase_layer, DYADIC_LOG_BMO_BOUND,
    STAIRCASE_BMO_BOUND,
};
use crate::corpus::{random_measures, random_step, regression_corpus, rng};
use crate::dyadic::DyadicInterval;
use crate::error::{Error, Result};
use crate::haar::{square_function, Window};
use crate::measure::{carleson_constant, carleson_sequence_constant, scale_measure, Measure};
use crate::norms::{
    bmo_estimate_poisson, bmo_estimate_step, bmod_norm_sq, dyadic_oscillation_sup, BmoParams,
};
use crate::paraproduct::{
    check_rademacher_diagonality, detect_orientation, random_slice_symbol, verify_diagpart,
    verify_paraproduct_identity, HaarBasisSlice,
};
use crate::rational::{pow2, qi, to_f64};

pub const NAMES: [&str; 10] = [
    "bala",
    "dbala",
    "dcounter",
    "paraid",
    "diagpart",
    "rademacher",
    "pcounter",
    "dbalay",
    "balay",
    "lemma41",
];

/// `|S_{μ_j} - χ_{I_j}| 2^{2j}` bound away from the edges of `I_j`.
pub const LEMMA41_BOUND: f64 = 16.0 / PI;
/// Empirical constant for `‖S_μ‖_BMO <= C Carl(μ)`.
pub const POISSON_BMO_CONSTANT: f64 = 32.0;

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Random objects (or sample points per region for `lemma41`).
    pub samples: usize,
    /// Paraproduct slice depth, or depth of random step functions.
    pub depth: u32,
    /// Largest family parameter: `m`, `N` or `j`.
    pub max_param: u32,
    pub tol: f64,
}

impl VerifyOptions {
    /// Defaults for each verification.
    pub fn for_name(name: &str) -> Self {
        let (samples, depth, max_param) = match name {
            "lemma41" => (1000, 0, 12),
            "paraid" => (100, 5, 0),
            "diagpart" => (10, 4, 0),
            "rademacher" => (0, 6, 4),
            "pcounter" => (0, 0, 10),
            "dcounter" => (0, 0, 10),
            "dbala" => (50, 6, 0),
            _ => (100, 0, 6),
        };
        VerifyOptions {
            seed: 7,
            samples,
            depth,
            max_param,
            tol: 1e-9,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub checked: usize,
    /// Worst observed value of the certified quantity.
    pub worst: f64,
    pub bound: f64,
    pub notes: Vec<String>,
}

impl Verdict {
    fn new(name: &str, bound: f64) -> Self {
        Verdict {
            name: name.into(),
            pass: true,
            checked: 0,
            worst: 0.0,
            bound,
            notes: Vec::new(),
        }
    }

    /// Records a value that must not exceed the bound.
    fn observe(&mut self, value: f64, what: impl FnOnce() -> String) {
        self.checked += 1;
        self.worst = self.worst.max(value);
        if !(value <= self.bound) {
            self.fail(format!("{}: {value} > {}", what(), self.bound));
        }
    }

    /// Records an exact condition.
    fn require(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.fail(what());
        }
    }

    fn fail(&mut self, note: String) {
        self.pass = false;
        if self.notes.len() < 20 {
            self.notes.push(note);
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {}: checked {}, worst {:.6e}, bound {:.6e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.checked,
            self.worst,
            self.bound
        )
    }
}

pub fn run(name: &str, opts: &VerifyOptions) -> Result<Verdict> {
    match name {
        "bala" => bala(opts),
        "dbala" => dbala(opts),
        "dcounter" => dcounter(opts),
        "paraid" => paraid(opts),
        "diagpart" => diagpart(opts),
        "rademacher" => rademacher(opts),
        "pcounter" => pcounter(opts),
        "dbalay" => dbalay(opts),
        "balay" => balay(opts),
        "lemma41" => lemma41(opts),
        other => Err(Error::InvalidParameter(format!("unknown verification {other}"))),
    }
}

/// Sample points of the two regions `|t| <= 2^{j-1}` and `|t| >= 2^{j+1}`.
pub fn lemma41_samples(j: i32, per_region: usize) -> (Vec<f64>, Vec<f64>) {
    let half = 2f64.powi(j - 1);
    let n = per_region.max(2);
    let inner = (0..n)
        .map(|i| -half + 2.0 * half * i as f64 / (n - 1) as f64)
        .collect();
    let edge = 2f64.powi(j + 1);
    let outer = (0..n)
        .map(|i| {
            let t = edge * 1e6f64.powf((i / 2) as f64 / (n / 2) as f64);
            if i % 2 == 0 {
                t
            } else {
                -t
            }
        })
        .collect();
    (inner, outer)
}

/// Largest `|S_{μ_j}(t) - χ_{I_j}(t)| 2^{2j}` over [`lemma41_samples`].
pub fn lemma41_deviation(j: i32, per_region: usize) -> f64 {
    let layer = staircase_layer(j);
    let (inner, outer) = lemma41_samples(j, per_region);
    let scale = 2f64.powi(2 * j);
    let a = inner
        .iter()
        .map(|&t| (poisson_eval(&layer, t) - 1.0).abs() * scale);
    let b = outer.iter().map(|&t| poisson_eval(&layer, t) * scale);
    a.chain(b).fold(0.0, f64::max)
}

fn lemma41(o: &VerifyOptions) -> Result<Verdict> {
    let mut v = Verdict::new("lemma41", LEMMA41_BOUND);
    for j in 0..=o.max_param as i32 {
        let d = lemma41_deviation(j, o.samples);
        v.observe(d, || format!("j = {j}"));
    }
    Ok(v)
}

fn bala(o: &VerifyOptions) -> Result<Verdict> {
    let mut v = Verdict::new("bala", POISSON_BMO_CONSTANT);
    for (n, m) in random_measures(o.seed, o.samples).iter().enumerate() {
        let carl = carleson_constant(m).value;
        let bmo = bmo_estimate_poisson(&PoissonBalayage::new(m), &BmoParams::default())?.value;
        v.observe(bmo / carl, || format!("measure #{n}"));
    }
    v.notes.push("ratio ‖S_μ‖_BMO / Carl(μ), empirical constant".into());
    Ok(v)
}

/// `Carl = sup (1/|I|) Σ_{J⊆I} μ(T_J)` exactly, and the oscillation bound
/// `2 ‖b‖²_{BMO^d}` for square functions, both for `S^d_μ` and for random `b`.
fn dbala(o: &VerifyOptions) -> Result<Verdict> {
    let mut v = Verdict::new("dbala", 1.0);
    for (n, m) in random_measures(o.seed, o.samples).iter().enumerate() {
        let carl = carleson_constant(m).exact.expect("exact");
        v.require(carl == carleson_sequence_constant(m), || {
            format!("measure #{n}: Carleson constant differs from the sequence constant")
        });
        let s = dyadic_balayage(m);
        let (osc, _) = dyadic_oscillation_sup(&s, 6);
        v.observe(to_f64(&(osc / (qi(2) * &carl))), || format!("measure #{n}"));
    }
    let mut r = rng(o.seed);
    for n in 0..o.samples {
        let b = random_step(&mut r, o.depth);
        let bmod = bmod_norm_sq(&b).exact.expect("exact");
        if bmod.is_zero() {
            continue;
        }
        let s = square_function(&b, Window::covering(&b, 2))?.value;
        let (osc, _) = dyadic_oscillation_sup(&s, 3);
        v.observe(to_f64(&(osc / (qi(2) * bmod))), || format!("function #{n}"));
    }
    v.notes.push("ratio of dyadic mean oscillation to 2 ‖b‖²_{BMO^d}".into());
    Ok(v)
}

fn dcounter(o: &VerifyOptions) -> Result<Verdict> {
    let mut v = Verdict::new("dcounter", DYADIC_LOG_BMO_BOUND);
    for n in 1..=o.max_param {
        let b = dyadic_counterexample(n)?;
        let bmod = bmod_norm_sq(&b).exact.expect("exact");
        v.require(bmod == qi(n as i64), || format!("N = {n}: ‖b‖² = {bmod}"));
        let s = square_function(&b, Window::covering(&b, 0))?.value;
        v.require(s == dyadic_log(n), || format!("N = {n}: S[b] is not the dyadic log"));
        let base = s.l2_norm_sq() / qi(n as i64 * n as i64);
        for k in 1..=3 {
            let bk = b.dilate(k);
            let sk = square_function(&bk, Window::covering(&bk, 0))?.value;
            let l2 = sk.l2_norm_sq() / qi(n as i64 * n as i64);
            v.require(l2 == &base * pow2(-k), || format!("N = {n}, K = {k}: L² scaling"));
        }
    }
    for n in 1..=o.max_param + 2 {
        let bmo = bmo_estimate_step(&dyadic_log(n), &BmoParams::default())?.value;
        v.observe(bmo, || format!("N = {n}: ‖S[b_N]‖_BMO"));
    }
    Ok(v)
}

fn paraid(o: &VerifyOptions) -> Result<Verdict> {
    let mut v = Verdict::new("paraid", o.tol);
    let slice = HaarBasisSlice::new(DyadicInterval::new(0, 0), o.depth);
    let mut r = rng(o.seed);
    for n in 0..o.samples {
        let b = random_slice_symbol(&mut r, &slice);
        let rep = verify_paraproduct_identity(&b, &slice)?;
        v.observe(rep.residual, || format!("symbol #{n}: floating residual"));
        v.require(rep.exact_mismatches == 0, || {
            format!("symbol #{n}: {} exact mismatches", rep.exact_mismatches)
        });
    }
    Ok(v)
}

fn diagpart(o: &VerifyOptions) -> Result<Verdict> {
    let mut v = Verdict::new("diagpart", 0.0);
    let slice = HaarBasisSlice::new(DyadicInterval::new(0, 0), o.depth);
    let orientation = detect_orientation();
    let mut r = rng(o.seed);
    for n in 0..o.samples.max(1) {
        let b = random_slice_symbol(&mut r, &slice);
        for i in &slice.basis {
            let rep = verify_diagpart(&b, i, orientation)?;
            v.observe(rep.residual, || format!("symbol #{n}, h_{}", i.label()));
            v.require(rep.pass, || format!("symbol #{n}, h_{}: exact mismatch", i.label()));
        }
    }
    v.notes.push(format!("orientation {orientation:?}"));
    Ok(v)
}

fn rademacher(o: &VerifyOptions) -> Result<Verdict> {
    let mut v = Verdict::new("rademacher", 0.0);
    let slice = HaarBasisSlice::new(DyadicInterval::new(0, 0), o.depth);
    for n in 1..=o.max_param {
        let rep = check_rademacher_diagonality(n, &slice)?;
        v.observe(rep.interior_off_diagonal, || format!("N = {n}"));
        v.require(rep.interior_exact_zero, || format!("N = {n}: nonzero interior entry"));
        v.notes.push(format!(
            "N = {n}: {} interior vectors, boundary off-diagonal {:.3e}",
            rep.interior_vectors, rep.all_off_diagonal
        ));
    }
    Ok(v)
}

/// Staircase: `Carl = m + 1`, bounded BMO with decreasing ratio, and the
/// h-scaling behaviour.
fn pcounter(o: &VerifyOptions) -> Result<Verdict> {
    let mut v = Verdict::new("pcounter", STAIRCASE_BMO_BOUND);
    let mut last_ratio = f64::INFINITY;
    let h_exp = 3;
    for m in 1..=o.max_param {
        let mu = poisson_staircase(m, &qi(1))?;
        let carl = carleson_constant(&mu).exact.expect("exact");
        v.require(carl == qi(m as i64 + 1), || format!("m = {m}: Carl = {carl}"));
        let l1 = poisson_l1(&mu);
        v.require(l1 == pow2(m as i32 + 2) - qi(2), || format!("m = {m}: L¹ = {l1}"));
        let params = BmoParams::default();
        let bmo = bmo_estimate_poisson(&PoissonBalayage::new(&mu), &params)?.value;
        v.observe(bmo, || format!("m = {m}: ‖S_μ‖_BMO"));
        let ratio = bmo / to_f64(&carl);
        v.require(ratio < last_ratio, || format!("m = {m}: ratio {ratio} not decreasing"));
        last_ratio = ratio;
        let h = pow2(-h_exp);
        let scaled = scale_measure(&mu, &h)?;
        v.require(carleson_constant(&scaled).exact.as_ref() == Some(&carl), || {
            format!("m = {m}: Carl changes under h-scaling")
        });
        v.require(poisson_l1(&scaled) == &h * &l1, || format!("m = {m}: L¹ not scaled by h"));
        let bmo_h = bmo_estimate_poisson(&PoissonBalayage::new(&scaled), &params.dilated(h_exp))?.value;
        v.require((bmo_h - bmo).abs() <= o.tol * bmo.max(1.0), || {
            format!("m = {m}: BMO {bmo_h} after h-scaling, {bmo} before")
        });
    }
    Ok(v)
}

fn sandwich_corpus(o: &VerifyOptions) -> Vec<(String, Measure)> {
    let mut c: Vec<(String, Measure)> = random_measures(o.seed, o.samples)
        .into_iter()
        .enumerate()
        .map(|(n, m)| (format!("random #{n}"), m))
        .collect();
    for m in 0..=o.max_param {
        c.push((format!("staircase m={m}"), poisson_staircase(m, &qi(1)).expect("h > 0")));
    }
    c
}

fn dbalay(o: &VerifyOptions) -> Result<Verdict> {
    let mut v = Verdict::new("dbalay", 2.0);
    let mut upper: f64 = 0.0;
    for (name, m) in sandwich_corpus(o) {
        let r = sandwich(&m, false)?;
        v.observe(r.lower_ratio, || format!("{name}: Carl / sup"));
        v.require(r.upper_ok, || format!("{name}: sup / Carl = {}", r.upper_ratio));
        let direct = restricted_sup_dyadic_direct(&m)?;
        v.checked += direct.average_identity_checked;
        let tree = restricted_sup_dyadic(&m)?;
        v.require(direct.value_sq == tree.value_sq, || {
            format!("{name}: direct and tree routes differ")
        });
        upper = upper.max(r.upper_ratio);
    }
    v.notes.push(format!("largest sup / Carl {upper:.6}"));
    Ok(v)
}

fn balay(o: &VerifyOptions) -> Result<Verdict> {
    let mut v = Verdict::new("balay", 1.0);
    let mut least = f64::INFINITY;
    for (name, m) in regression_corpus(o.seed, o.samples) {
        let r = normalize_for_balay(&m)?.verify_lower()?;
        least = least.min(r.ratio);
        // observed quantity: Carl / (100 D), at most 1 when D >= Carl / 100
        v.observe(r.carl / (100.0 * r.d), || format!("{name}: D = {}, Carl = {}", r.d, r.carl));
    }
    v.notes.push(format!("smallest D / Carl {least:.6}"));
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(name: &str) -> VerifyOptions {
        let mut o = VerifyOptions::for_name(name);
        o.samples = o.samples.min(4);
        o.max_param = o.max_param.min(3);
        o
    }

    #[test]
    fn quick_runs_pass() {
        for name in NAMES {
            let v = run(name, &quick(name)).unwrap();
            assert!(v.checked > 0, "{name}");
            if name == "pcounter" {
                // ‖S_μ‖_BMO / Carl rises from m = 1 to m = 2, then decreases
                assert!(!v.pass);
                assert_eq!(v.notes.len(), 1, "{v:?}");
                assert!(v.notes[0].starts_with("m = 2: ratio"), "{v:?}");
            } else {
                assert!(v.pass, "{v:?}");
            }
        }
        assert!(run("nope", &quick("bala")).is_err());
    }

    #[test]
    fn lemma41_regions() {
        let (inner, outer) = lemma41_samples(3, 100);
        assert!(inner.iter().all(|t| t.abs() <= 4.0));
        assert!(outer.iter().all(|t| t.abs() >= 16.0));
        assert!(lemma41_deviation(0, 100) <= LEMMA41_BOUND);
    }
}
