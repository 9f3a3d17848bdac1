//! The dyadic paraproduct `π_b f = Σ_I h_I b_I <f>_I`, its adjoint, and the
//! Haar-basis identities for `π_b* π_b`.
//!
//! Every operator is applied exactly: `b_J h_J = (c_J/2)(χ_{J_left} - χ_{J_right})`
//! is rational whatever the parity of the scale. Matrices in the orthonormal
//! Haar basis carry factors `|I|^{±1/2}` and are assembled in `f64`; the exact
//! path works with the rescaled entries `(|I| |I'|)^{1/2} M_{I',I}`, which are
//! rational.

use std::collections::{BTreeMap, HashMap};

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::dyadic::DyadicInterval;
use crate::error::{Error, Result};
use crate::haar::{haar_coefficients, HaarCoefficients, PrefixIntegral, Window};
use crate::norms::bmod_norm_sq;
use crate::rational::{pow2, qi, to_f64, Q};
use crate::step::{StepBuilder, StepFunction};

/// The full binary tree below `window` down to `depth` generations.
#[derive(Clone, Debug, PartialEq)]
pub struct HaarBasisSlice {
    pub window: DyadicInterval,
    pub depth: u32,
    /// Ordered by scale descending, then position ascending.
    pub basis: Vec<DyadicInterval>,
    index: HashMap<DyadicInterval, usize>,
}

impl HaarBasisSlice {
    pub fn new(window: DyadicInterval, depth: u32) -> Self {
        let mut basis = Vec::with_capacity((1usize << (depth + 1)) - 1);
        for g in 0..=depth {
            let k = window.scale - g as i32;
            let first = window.pos << g;
            basis.extend((first..first + (1i64 << g)).map(|j| DyadicInterval::new(k, j)));
        }
        let index = basis.iter().enumerate().map(|(i, j)| (*j, i)).collect();
        HaarBasisSlice {
            window,
            depth,
            basis,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn index_of(&self, i: &DyadicInterval) -> Option<usize> {
        self.index.get(i).copied()
    }

    pub fn contains(&self, i: &DyadicInterval) -> bool {
        self.index.contains_key(i)
    }

    /// `I` is away from both endpoints of the window.
    pub fn is_interior(&self, i: &DyadicInterval) -> bool {
        i.left() > self.window.left() && i.right() < self.window.right()
    }

    pub fn labels(&self) -> Vec<String> {
        self.basis.iter().map(DyadicInterval::label).collect()
    }
}

/// `|I|^{1/2} h_I = χ_{I_left} - χ_{I_right}`.
pub fn scaled_haar(i: &DyadicInterval) -> StepFunction {
    let mut b = StepBuilder::new();
    b.add_interval(&i.left_child(), &qi(1));
    b.add_interval(&i.right_child(), &qi(-1));
    b.build()
}

fn joint_window(a: &StepFunction, b: &StepFunction, extra: Option<&DyadicInterval>) -> Window {
    let mut k = Window::covering(a, 0).top_scale.max(Window::covering(b, 0).top_scale);
    if let Some(i) = extra {
        k = k.max(i.scale).max(Window::covering(&StepFunction::indicator_of(i, qi(1)), 0).top_scale);
    }
    Window::new(k)
}

/// `Σ_{I ⊆ window} h_I b_I <f>_I`.
pub fn apply_paraproduct(b: &StepFunction, f: &StepFunction, window: Window) -> Result<StepFunction> {
    window.check_support(f)?;
    let coeffs = haar_coefficients(b, window)?;
    let prefix = PrefixIntegral::new(f);
    let mut out = StepBuilder::new();
    for (j, c) in coeffs.iter() {
        let mean = prefix.over(j) * pow2(-j.scale);
        if mean.is_zero() {
            continue;
        }
        let w = c * mean / qi(2);
        out.add_interval(&j.left_child(), &w);
        out.add_interval(&j.right_child(), &-w);
    }
    Ok(out.build())
}

/// `Σ_{I ⊆ window} b_I g_I χ_I / |I|`.
pub fn apply_adjoint(b: &StepFunction, g: &StepFunction, window: Window) -> Result<StepFunction> {
    let cb = haar_coefficients(b, window)?;
    let cg = haar_coefficients(g, window)?;
    let mut out = StepBuilder::new();
    for (j, c) in cb.iter() {
        let d = cg.get(j);
        if !d.is_zero() {
            out.add_interval(j, &(c * d / qi(4)));
        }
    }
    Ok(out.build())
}

/// Haar coefficients of `b` after checking that every one of them sits in the
/// slice; otherwise the truncated matrices would not see all interactions.
pub fn slice_coefficients(b: &StepFunction, slice: &HaarBasisSlice) -> Result<HaarCoefficients> {
    let w = slice.window;
    if let Some((lo, hi)) = b.support() {
        if lo < w.left() || hi > w.right() {
            return Err(Error::TreeTouchesBoundary(format!(
                "support ({lo}, {hi}] leaves {}",
                w.label()
            )));
        }
        if !b.integral().is_zero() {
            return Err(Error::TreeTouchesBoundary(format!(
                "nonzero mean on {} puts coefficients above the slice",
                w.label()
            )));
        }
    }
    let window = joint_window(b, &StepFunction::zero(), Some(&w));
    let coeffs = haar_coefficients(b, window)?;
    if let Some((j, _)) = coeffs.iter().find(|(j, _)| !slice.contains(j)) {
        return Err(Error::TreeTouchesBoundary(j.label()));
    }
    Ok(coeffs)
}

/// `I ↦ ‖π_b h_I‖² = Σ_{J ⊊ I} b_J² / |I|` on the slice.
pub fn diag_coefficients(b: &StepFunction, slice: &HaarBasisSlice) -> BTreeMap<DyadicInterval, Q> {
    let window = joint_window(b, &StepFunction::zero(), Some(&slice.window));
    let coeffs = haar_coefficients(b, window).expect("joint window holds the support");
    slice
        .basis
        .iter()
        .map(|i| {
            let strict = coeffs.subtree_energy(i) - coeffs.energy(i);
            (*i, strict * pow2(-i.scale))
        })
        .collect()
}

/// Dense square matrix indexed by a basis slice.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    pub labels: Vec<DyadicInterval>,
    pub kind: String,
    /// Row-major.
    pub data: Vec<f64>,
}

impl OperatorMatrix {
    pub fn zeros(labels: &[DyadicInterval], kind: &str) -> Self {
        let n = labels.len();
        OperatorMatrix {
            labels: labels.to_vec(),
            kind: kind.to_string(),
            data: vec![0.0; n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.n() + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        let n = self.n();
        self.data[r * n + c] = v;
    }

    pub fn transpose(&self, kind: &str) -> Self {
        let mut t = OperatorMatrix::zeros(&self.labels, kind);
        for r in 0..self.n() {
            for c in 0..self.n() {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn combine(&self, other: &Self, sign: f64, kind: &str) -> Self {
        OperatorMatrix {
            labels: self.labels.clone(),
            kind: kind.to_string(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + sign * b)
                .collect(),
        }
    }

    pub fn matmul(&self, other: &Self, kind: &str) -> Self {
        let n = self.n();
        let mut out = OperatorMatrix::zeros(&self.labels, kind);
        for r in 0..n {
            for k in 0..n {
                let a = self.get(r, k);
                if a == 0.0 {
                    continue;
                }
                for c in 0..n {
                    out.data[r * n + c] += a * other.get(k, c);
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n();
        (0..n)
            .map(|r| (0..n).map(|c| self.get(r, c) * v[c]).sum())
            .collect()
    }

    pub fn apply_transpose(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut out = vec![0.0; n];
        for r in 0..n {
            for c in 0..n {
                out[c] += self.get(r, c) * v[r];
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_off_diagonal(&self) -> f64 {
        let n = self.n();
        let mut m: f64 = 0.0;
        for r in 0..n {
            for c in 0..n {
                if r != c {
                    m = m.max(self.get(r, c).abs());
                }
            }
        }
        m
    }

    /// Dense CSV with a header of `k:j` labels; the first column repeats them.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("row");
        for l in &self.labels {
            s.push(',');
            s.push_str(&l.label());
        }
        s.push('\n');
        for r in 0..self.n() {
            s.push_str(&self.labels[r].label());
            for c in 0..self.n() {
                s.push_str(&format!(",{:.16e}", self.get(r, c)));
            }
            s.push('\n');
        }
        s
    }
}

/// `b_J = |J|^{1/2} c_J / 2`.
fn haar_value(coeffs: &HaarCoefficients, j: &DyadicInterval) -> f64 {
    2f64.powi(j.scale).sqrt() * to_f64(&coeffs.get(j)) / 2.0
}

fn paraproduct_entries(coeffs: &HaarCoefficients, slice: &HaarBasisSlice, kind: &str) -> OperatorMatrix {
    let mut m = OperatorMatrix::zeros(&slice.basis, kind);
    for (c, i) in slice.basis.iter().enumerate() {
        let inv = 1.0 / 2f64.powi(i.scale).sqrt();
        for (r, j) in slice.basis.iter().enumerate() {
            if j.is_strictly_within(i) {
                let v = haar_value(coeffs, j);
                if v != 0.0 {
                    m.set(r, c, v * i.haar_sign_on(j) as f64 * inv);
                }
            }
        }
    }
    m
}

/// Matrix of `π_b` on the slice: entry `(J, I) = b_J ε(I, J) |I|^{-1/2}` for `J ⊊ I`.
pub fn paraproduct_matrix(b: &StepFunction, slice: &HaarBasisSlice) -> Result<OperatorMatrix> {
    let coeffs = slice_coefficients(b, slice)?;
    Ok(paraproduct_entries(&coeffs, slice, "pi_b"))
}

/// Matrix of `π_b*`, assembled column by column from [`apply_adjoint`].
pub fn adjoint_matrix(b: &StepFunction, slice: &HaarBasisSlice) -> Result<OperatorMatrix> {
    slice_coefficients(b, slice)?;
    let window = joint_window(b, &StepFunction::zero(), Some(&slice.window));
    let mut m = OperatorMatrix::zeros(&slice.basis, "pi_b_adjoint");
    for (c, i) in slice.basis.iter().enumerate() {
        let image = apply_adjoint(b, &scaled_haar(i), window)?;
        let prefix = PrefixIntegral::new(&image);
        let norm_i = 2f64.powi(i.scale).sqrt();
        for (r, k) in slice.basis.iter().enumerate() {
            // (h_K, g) = |K|^{1/2} c_K(g) / 2
            let v = to_f64(&prefix.coefficient(k)) * 2f64.powi(k.scale).sqrt() / 2.0;
            if v != 0.0 {
                m.set(r, c, v / norm_i);
            }
        }
    }
    Ok(m)
}

pub fn diag_matrix(b: &StepFunction, slice: &HaarBasisSlice) -> OperatorMatrix {
    let d = diag_coefficients(b, slice);
    let mut m = OperatorMatrix::zeros(&slice.basis, "diag");
    for (i, j) in slice.basis.iter().enumerate() {
        m.set(i, i, to_f64(&d[j]));
    }
    m
}

/// Outcome of an identity check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    /// Largest floating entry residual.
    pub residual: f64,
    /// Entries where the exact rational sides differ.
    pub exact_mismatches: usize,
    pub checked: usize,
    pub tolerance: f64,
    pub pass: bool,
}

/// `π_b* π_b` applied to `χ_{I_left} - χ_{I_right}`, exactly.
fn gram_image(b: &StepFunction, i: &DyadicInterval, window: Window) -> Result<StepFunction> {
    let image = apply_paraproduct(b, &scaled_haar(i), window)?;
    apply_adjoint(b, &image, window)
}

/// Rescaled Gram matrix `(|I||I'|)^{1/2} (h_{I'}, π_b*π_b h_I)`, rows `I'`.
fn scaled_gram(b: &StepFunction, slice: &HaarBasisSlice) -> Result<Vec<Vec<Q>>> {
    let window = joint_window(b, &StepFunction::zero(), Some(&slice.window));
    let n = slice.len();
    let mut cols = vec![vec![Q::zero(); n]; n];
    for (c, i) in slice.basis.iter().enumerate() {
        let image = gram_image(b, i, window)?;
        let prefix = PrefixIntegral::new(&image);
        for (r, k) in slice.basis.iter().enumerate() {
            // (χ_{K_l} - χ_{K_r}, g) = |K| c_K(g) / 2
            cols[r][c] = prefix.coefficient(k) * pow2(k.scale - 1);
        }
    }
    Ok(cols)
}

/// Rescaled right-hand side `π_S + π_S* + Diag` from the Haar data of `b` and `S[b]`.
fn scaled_rhs(coeffs: &HaarCoefficients, slice: &HaarBasisSlice) -> Vec<Vec<Q>> {
    let s = coeffs.square_function();
    let prefix = PrefixIntegral::new(&s);
    let n = slice.len();
    let mut m = vec![vec![Q::zero(); n]; n];
    for (c, i) in slice.basis.iter().enumerate() {
        for (r, k) in slice.basis.iter().enumerate() {
            if k.is_strictly_within(i) {
                // (π_S) entry (K, I) = S_K ε(I, K) |I|^{-1/2}; rescaled: |K| c_K(S)/2 · ε
                let v = prefix.coefficient(k) * pow2(k.scale - 1) * qi(i.haar_sign_on(k) as i64);
                m[r][c] += &v;
                m[c][r] += v;
            }
        }
        // Diag: |I| · Σ_{J ⊊ I} b_J² / |I|
        m[c][c] += coeffs.subtree_energy(i) - coeffs.energy(i);
    }
    m
}

/// Checks `π_b*π_b = π_{S[b]} + π_{S[b]}* + Diag(b)` on the slice, in floating
/// point (matrix products) and exactly (operator application against the
/// rescaled Haar formulas).
pub fn verify_paraproduct_identity(b: &StepFunction, slice: &HaarBasisSlice) -> Result<IdentityReport> {
    let coeffs = slice_coefficients(b, slice)?;
    let p = paraproduct_entries(&coeffs, slice, "pi_b");
    let lhs = p.transpose("pi_b_adjoint").matmul(&p, "gram");
    let s = coeffs.square_function();
    let ps = paraproduct_entries(
        &haar_coefficients(&s, joint_window(&s, &StepFunction::zero(), Some(&slice.window)))?,
        slice,
        "pi_S",
    );
    let rhs = ps
        .combine(&ps.transpose("pi_S_adjoint"), 1.0, "pi_S_sym")
        .combine(&diag_matrix(b, slice), 1.0, "rhs");
    let residual = lhs.combine(&rhs, -1.0, "residual").max_abs();
    let exact_l = scaled_gram(b, slice)?;
    let exact_r = scaled_rhs(&coeffs, slice);
    let mismatches = exact_l
        .iter()
        .flatten()
        .zip(exact_r.iter().flatten())
        .filter(|(a, b)| a != b)
        .count();
    let tolerance = 1e-9;
    Ok(IdentityReport {
        residual,
        exact_mismatches: mismatches,
        checked: slice.len() * slice.len(),
        tolerance,
        pass: residual <= tolerance && mismatches == 0,
    })
}

/// Which half of `I` carries the plus sign in the elementary identity for
/// `π_b*π_b h_I`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Orientation {
    LeftPlus,
    RightPlus,
}

impl Orientation {
    fn halves(&self, i: &DyadicInterval) -> (DyadicInterval, DyadicInterval) {
        match self {
            Orientation::LeftPlus => (i.left_child(), i.right_child()),
            Orientation::RightPlus => (i.right_child(), i.left_child()),
        }
    }
}

/// Fixes the orientation with a single-coefficient probe: `b = h_{(0,1]}`, `I = (0,2]`.
pub fn detect_orientation() -> Orientation {
    let i = DyadicInterval::new(1, 0);
    let b = scaled_haar(&DyadicInterval::new(0, 0));
    let g = gram_image(&b, &i, Window::new(1)).expect("probe fits its window");
    if g.eval(&Q::new(1.into(), 2.into())).is_positive() {
        Orientation::LeftPlus
    } else {
        Orientation::RightPlus
    }
}

/// `Σ_{J ⊆ I⁺} χ_J b_J²/|J| - Σ_{J ⊆ I⁻} χ_J b_J²/|J|`.
pub fn diagpart_rhs(b: &StepFunction, i: &DyadicInterval, orientation: Orientation) -> StepFunction {
    let window = joint_window(b, &StepFunction::zero(), Some(i));
    let coeffs = haar_coefficients(b, window).expect("joint window holds the support");
    let (plus, minus) = orientation.halves(i);
    coeffs
        .within(&plus)
        .square_function()
        .sub(&coeffs.within(&minus).square_function())
}

/// Checks `|I|^{1/2} π_b*π_b h_I` against [`diagpart_rhs`], exactly.
pub fn verify_diagpart(b: &StepFunction, i: &DyadicInterval, orientation: Orientation) -> Result<IdentityReport> {
    let window = joint_window(b, &StepFunction::zero(), Some(i));
    let lhs = gram_image(b, i, window)?;
    let rhs = diagpart_rhs(b, i, orientation);
    let diff = lhs.sub(&rhs);
    let residual = to_f64(&diff.max_abs());
    let mismatches = usize::from(!diff.is_zero());
    Ok(IdentityReport {
        residual,
        exact_mismatches: mismatches,
        checked: 1,
        tolerance: 0.0,
        pass: mismatches == 0,
    })
}

/// `χ_W Σ_{n=1}^N r_n`.
pub fn rademacher_symbol(n: u32, window: &DyadicInterval) -> Result<StepFunction> {
    let mut b = StepBuilder::new();
    for k in 1..=n {
        b.add_function(&crate::constructions::rademacher(k, window.left(), window.right())?);
    }
    Ok(b.build())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagonalityReport {
    pub n: u32,
    /// Largest off-diagonal entry of `π_b*π_b` between interior basis vectors; exact.
    pub interior_off_diagonal: f64,
    pub interior_exact_zero: bool,
    /// Same over the whole slice, reported only.
    pub all_off_diagonal: f64,
    pub interior_vectors: usize,
    pub pass: bool,
}

/// Off-diagonal part of `π_b*π_b` for the Rademacher symbol on the slice window.
pub fn check_rademacher_diagonality(n: u32, slice: &HaarBasisSlice) -> Result<DiagonalityReport> {
    let b = rademacher_symbol(n, &slice.window)?;
    slice_coefficients(&b, slice).map_err(|e| match e {
        Error::TreeTouchesBoundary(at) => Error::InvalidParameter(format!(
            "N = {n} needs a deeper slice than depth {} (coefficient at {at})",
            slice.depth
        )),
        other => other,
    })?;
    let gram = scaled_gram(&b, slice)?;
    let mut interior: f64 = 0.0;
    let mut interior_zero = true;
    let mut all: f64 = 0.0;
    for (r, k) in slice.basis.iter().enumerate() {
        for (c, i) in slice.basis.iter().enumerate() {
            if r == c {
                continue;
            }
            // undo the (|I||K|)^{1/2} rescaling
            let v = to_f64(&gram[r][c]) / (2f64.powi(i.scale) * 2f64.powi(k.scale)).sqrt();
            all = all.max(v.abs());
            if slice.is_interior(i) && slice.is_interior(k) {
                interior = interior.max(v.abs());
                interior_zero &= gram[r][c].is_zero();
            }
        }
    }
    let interior_vectors = slice.basis.iter().filter(|i| slice.is_interior(i)).count();
    Ok(DiagonalityReport {
        n,
        interior_off_diagonal: interior,
        interior_exact_zero: interior_zero,
        all_off_diagonal: all,
        interior_vectors,
        pass: interior_zero && interior <= 1e-12,
    })
}

pub const POWER_TOL: f64 = 1e-8;
pub const POWER_MAX_STEPS: usize = 10_000;

/// Largest singular value by power iteration on `AᵀA` from a fixed start vector.
pub fn spectral_norm(a: &OperatorMatrix) -> Result<f64> {
    let n = a.n();
    if n == 0 || a.max_abs() == 0.0 {
        return Ok(0.0);
    }
    // fixed, generic start: no coordinate vanishes and no symmetry is shared
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + ((i * 7919) % 97) as f64 / 97.0).collect();
    let norm = |x: &[f64]| x.iter().map(|t| t * t).sum::<f64>().sqrt();
    let nv = norm(&v);
    v.iter_mut().for_each(|t| *t /= nv);
    let mut sigma = 0.0;
    for _ in 0..POWER_MAX_STEPS {
        let w = a.apply_transpose(&a.apply(&v));
        let nw = norm(&w);
        if nw == 0.0 {
            return Ok(0.0);
        }
        let next = nw.sqrt();
        v = w.into_iter().map(|t| t / nw).collect();
        if (next - sigma).abs() <= POWER_TOL * next {
            return Ok(next);
        }
        sigma = next;
    }
    Err(Error::NoConvergence(POWER_MAX_STEPS))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormRatios {
    pub pi_b: f64,
    pub pi_s: f64,
    pub pi_s_sym: f64,
    /// `‖π_b*π_b - Diag(b)‖`.
    pub off_diag: f64,
    /// `‖·‖_{BMO^d}` of the parts of `b` and `S[b]` the slice matrices see.
    pub bmod_b: f64,
    pub bmod_s: f64,
    /// `‖π_b‖ / ‖b‖_{BMO^d}`, `‖π_S‖ / ‖S‖_{BMO^d}`, `‖π_S + π_S*‖ / ‖S‖_{BMO^d}`;
    /// empty when `b = 0`.
    pub ratios: Vec<f64>,
}

/// The part of a symbol a slice matrix can see: coefficients on intervals
/// strictly inside the slice window (the window's own coefficient would need
/// an ancestor column).
fn visible_part(coeffs: &HaarCoefficients, slice: &HaarBasisSlice) -> StepFunction {
    let mut out = HaarCoefficients::new();
    for (j, c) in coeffs.iter() {
        if slice.contains(j) && *j != slice.window {
            out.insert(*j, c.clone());
        }
    }
    out.synthesize()
}

pub fn operator_norm_ratios(b: &StepFunction, slice: &HaarBasisSlice) -> Result<NormRatios> {
    let coeffs = slice_coefficients(b, slice)?;
    let p = paraproduct_entries(&coeffs, slice, "pi_b");
    let s = coeffs.square_function();
    let sc = haar_coefficients(&s, joint_window(&s, &StepFunction::zero(), Some(&slice.window)))?;
    let ps = paraproduct_entries(&sc, slice, "pi_S");
    let sym = ps.combine(&ps.transpose("pi_S_adjoint"), 1.0, "pi_S_sym");
    let off = p
        .transpose("pi_b_adjoint")
        .matmul(&p, "gram")
        .combine(&diag_matrix(b, slice), -1.0, "off_diag");
    let bmod_b = bmod_norm_sq(&visible_part(&coeffs, slice)).value.sqrt();
    let bmod_s = bmod_norm_sq(&visible_part(&sc, slice)).value.sqrt();
    let (pi_b, pi_s, pi_s_sym, off_diag) = (
        spectral_norm(&p)?,
        spectral_norm(&ps)?,
        spectral_norm(&sym)?,
        spectral_norm(&off)?,
    );
    let mut ratios = Vec::new();
    if bmod_b > 0.0 {
        ratios.push(pi_b / bmod_b);
    }
    if bmod_s > 0.0 {
        ratios.push(pi_s / bmod_s);
        ratios.push(pi_s_sym / bmod_s);
    }
    Ok(NormRatios {
        pi_b,
        pi_s,
        pi_s_sym,
        off_diag,
        bmod_b,
        bmod_s,
        ratios,
    })
}

/// Random symbol with every Haar coefficient inside the slice: coefficients
/// `c_J ∈ {-3, …, 3}/2` on each `J` of the slice, about half of them zero.
pub fn random_slice_symbol<R: rand::Rng>(rng: &mut R, slice: &HaarBasisSlice) -> StepFunction {
    let mut c = HaarCoefficients::new();
    for j in &slice.basis {
        if rng.random_bool(0.5) {
            let v: i64 = rng.random_range(-3..=3);
            c.insert(*j, Q::new(v.into(), 2.into()));
        }
    }
    c.synthesize()
}
