//! The 2×2 affine nested problem `x = A(Bx) + b`.

use super::ProblemError;
use crate::linalg::{matvec, solve_direct, DenseMatrix};

/// Coupling entry below the diagonal of both matrices.
pub const COUPLING: f64 = 0.001;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearNested {
    /// `[[α, 0], [0.001, 0.001]]`
    pub a: DenseMatrix,
    /// `[[β, 0], [0.001, 0.001]]`
    pub b_mat: DenseMatrix,
    pub rhs: Vec<f64>,
    /// Solution of `(I − AB) x = b`.
    pub x_star: Vec<f64>,
}

fn coupling_matrix(diag: f64) -> DenseMatrix {
    DenseMatrix::from_rows(&[&[diag, 0.0], &[COUPLING, COUPLING]]).expect("2x2")
}

impl LinearNested {
    /// `S(x) = A x + b`
    pub fn s(&self, x: &[f64]) -> Vec<f64> {
        let mut y = matvec(&self.a, x).expect("length 2");
        y.iter_mut().zip(&self.rhs).for_each(|(yi, bi)| *yi += bi);
        y
    }

    /// `F(x) = B x`
    pub fn f(&self, x: &[f64]) -> Vec<f64> {
        matvec(&self.b_mat, x).expect("length 2")
    }

    pub fn ab(&self) -> DenseMatrix {
        self.a.matmul(&self.b_mat).expect("2x2")
    }
}

pub fn linear_nested(alpha: f64, beta: f64) -> Result<LinearNested, ProblemError> {
    let a = coupling_matrix(alpha);
    let b_mat = coupling_matrix(beta);
    let rhs = vec![1.0, 1.0];
    let system = DenseMatrix::identity(2).sub(&a.matmul(&b_mat)?)?;
    let x_star = solve_direct(&system, &rhs)?;
    Ok(LinearNested {
        a,
        b_mat,
        rhs,
        x_star,
    })
}
