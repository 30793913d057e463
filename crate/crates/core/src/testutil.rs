//! Fixtures and proptest strategies shared by the unit tests.

use proptest::prelude::*;

use crate::hilbert::{validate_metric, MetricOperator, StateVector};
use crate::linalg::{matrix_exp_hermitian_generator, ComplexMatrix, C64};

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// η₂ at (r=1, s=2, φ=π/6).
pub fn eta2_matrix() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[[c(0.8, 0.0), c(0.0, -0.2)], [c(0.0, 0.2), c(0.8, 0.0)]])
}

pub fn eta2() -> MetricOperator {
    validate_metric(&eta2_matrix()).unwrap()
}

pub fn h_pt_matrix(r: f64, s: f64, phi: f64) -> ComplexMatrix {
    ComplexMatrix::from_rows(&[
        [C64::from_polar(r, phi), c(s, 0.0)],
        [c(s, 0.0), C64::from_polar(r, -phi)],
    ])
}

pub fn det2(m: &ComplexMatrix) -> C64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

fn complex_entries(len: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len)
        .prop_map(|v| v.into_iter().map(|(a, b)| C64::new(a, b)).collect())
}

pub fn random_square(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    complex_entries(n * n).prop_map(move |v| ComplexMatrix::from_vec(n, n, v).unwrap())
}

pub fn random_hermitian(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    random_square(n).prop_map(|m| m.hermitian_part())
}

pub fn random_unitary(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    random_hermitian(n).prop_map(|h| matrix_exp_hermitian_generator(&h, 3.0).unwrap())
}

/// Metric with eigenvalues in `[0.05, 2]`.
pub fn random_metric(n: usize) -> impl Strategy<Value = MetricOperator> {
    (random_unitary(n), prop::collection::vec(0.05f64..2.0, n)).prop_map(|(u, l)| {
        validate_metric(&u.sandwich(&ComplexMatrix::real_diag(&l)).hermitian_part()).unwrap()
    })
}

/// Metric with eigenvalues in `[0.05, 1]`.
pub fn random_subidentity_metric(n: usize) -> impl Strategy<Value = MetricOperator> {
    (random_unitary(n), prop::collection::vec(0.05f64..1.0, n)).prop_map(|(u, l)| {
        validate_metric(&u.sandwich(&ComplexMatrix::real_diag(&l)).hermitian_part()).unwrap()
    })
}

/// Nonzero vector inside the unit ball.
pub fn random_vector(n: usize) -> impl Strategy<Value = StateVector> {
    (complex_entries(n), 0.1f64..1.0).prop_filter_map("zero vector", |(v, scale)| {
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        (norm > 1e-3).then(|| StateVector::new(v.iter().map(|z| z * (scale / norm)).collect()).unwrap())
    })
}

/// Unit-trace density matrix of full rank (almost surely).
pub fn random_density(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    random_square(n).prop_map(|a| {
        let m = (&a * &a.dagger()).hermitian_part();
        let t = m.trace().re;
        m.scale(1.0 / t)
    })
}
