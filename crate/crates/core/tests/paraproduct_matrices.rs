use balayage::corpus::rng;
use balayage::paraproduct::{
    adjoint_matrix, diag_matrix, paraproduct_matrix, random_slice_symbol, spectral_norm,
    HaarBasisSlice, OperatorMatrix,
};
use balayage::DyadicInterval;
use nalgebra::DMatrix;

fn dense(a: &OperatorMatrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(a.n(), a.n(), &a.data)
}

fn largest_singular_value(m: &DMatrix<f64>) -> f64 {
    m.clone().svd(false, false).singular_values.max()
}

#[test]
fn spectral_norm_matches_svd() {
    let slice = HaarBasisSlice::new(DyadicInterval::new(0, 0), 4);
    let mut r = rng(11);
    for _ in 0..20 {
        let b = random_slice_symbol(&mut r, &slice);
        let p = paraproduct_matrix(&b, &slice).unwrap();
        let svd = largest_singular_value(&dense(&p));
        let power = spectral_norm(&p).unwrap();
        assert!((svd - power).abs() <= 1e-6 * svd.max(1.0), "{svd} vs {power}");
    }
}

#[test]
fn adjoint_is_transpose_and_diag_is_gram_diagonal() {
    let slice = HaarBasisSlice::new(DyadicInterval::new(1, -1), 4);
    let mut r = rng(12);
    for _ in 0..10 {
        let b = random_slice_symbol(&mut r, &slice);
        let p = dense(&paraproduct_matrix(&b, &slice).unwrap());
        let a = dense(&adjoint_matrix(&b, &slice).unwrap());
        assert!((&p.transpose() - &a).abs().max() <= 1e-12);
        let gram = p.transpose() * &p;
        let d = dense(&diag_matrix(&b, &slice));
        for i in 0..slice.len() {
            assert!((gram[(i, i)] - d[(i, i)]).abs() <= 1e-12, "entry {i}");
        }
    }
}
