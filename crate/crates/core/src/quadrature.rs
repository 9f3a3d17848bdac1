//! Adaptive Gauss–Kronrod (7, 15) quadrature.
//!
//! Only used as an independent cross-check of closed-form integrals.

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[i] * s;
        if i % 2 == 1 {
            gauss += WG[i / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// `∫_a^b f` to absolute tolerance `abs_tol` or relative tolerance `rel_tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (v, e) = gk15(f, a, b);
    refine(f, a, b, v, e, abs_tol, rel_tol, 0)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    whole: f64,
    err: f64,
    abs_tol: f64,
    rel_tol: f64,
    depth: u32,
) -> f64 {
    if err <= abs_tol.max(rel_tol * whole.abs()) || depth >= 50 {
        return whole;
    }
    let m = 0.5 * (a + b);
    let (l, el) = gk15(f, a, m);
    let (r, er) = gk15(f, m, b);
    refine(f, a, m, l, el, 0.5 * abs_tol, rel_tol, depth + 1)
        + refine(f, m, b, r, er, 0.5 * abs_tol, rel_tol, depth + 1)
}

/// `∫_ℝ f` for `f = O(t^{-2})`, split at the sorted `breaks` and with both
/// tails mapped to finite intervals.
pub fn integrate_line<F: Fn(f64) -> f64>(f: &F, breaks: &[f64], rel_tol: f64) -> f64 {
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|x| x.is_finite()).collect();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    if pts.is_empty() {
        pts.push(0.0);
    }
    let lo = pts[0] - 1.0;
    let hi = pts[pts.len() - 1] + 1.0;
    let mut panels = vec![lo];
    panels.extend(pts.iter().copied());
    panels.push(hi);
    let tol = 1e-15;
    let mut total = 0.0;
    for w in panels.windows(2) {
        total += integrate(f, w[0], w[1], tol, rel_tol);
    }
    // right tail: t = hi + s/(1-s), s in (0, 1)
    let right = |s: f64| {
        if s >= 1.0 {
            return 0.0;
        }
        let d = 1.0 - s;
        f(hi + s / d) / (d * d)
    };
    let left = |s: f64| {
        if s >= 1.0 {
            return 0.0;
        }
        let d = 1.0 - s;
        f(lo - s / d) / (d * d)
    };
    total += integrate(&right, 0.0, 1.0, tol, rel_tol);
    total += integrate(&left, 0.0, 1.0, tol, rel_tol);
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomials_exact() {
        let v = integrate(&|x: f64| x * x, 0.0, 1.0, 1e-14, 1e-14);
        assert!((v - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn cauchy_kernel_on_line() {
        let y = 1e-3;
        let f = |t: f64| y / (PI * ((t - 5.0) * (t - 5.0) + y * y));
        let v = integrate_line(&f, &[5.0 - y, 5.0, 5.0 + y], 1e-12);
        assert!((v - 1.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn arctan_antiderivative() {
        let v = integrate(&|x: f64| 1.0 / (1.0 + x * x), -3.0, 7.0, 1e-14, 1e-13);
        assert!((v - (7f64.atan() + 3f64.atan())).abs() < 1e-12);
    }
}
