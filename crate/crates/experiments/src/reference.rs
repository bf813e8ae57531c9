//! Reference values the reproduced tables are compared against.
//!
//! Arrays are indexed in the order of the accompanying parameter lists.

// 7.071e-1 is a measured error, not 1/√2
#![allow(clippy::approx_constant)]

/// Scalar map parameters `γ` and their Lipschitz constants `γe^γ/4`.
pub const SCALAR_GAMMAS: [f64; 3] = [0.3, 1.145, 1.2];
pub const SCALAR_LIPSCHITZ: [f64; 3] = [0.101239, 0.899524, 0.996035];
pub const PERTURBATIONS: [f64; 3] = [1e-1, 1e-2, 1e-3];

/// `|x_ε − x*|` for the scalar map, `[γ][ε]`.
pub const SCALAR_DIRECT_ERRORS: [[f64; 3]; 3] = [
    [1.090e-1, 1.089e-2, 1.089e-3],
    [2.016e-1, 1.827e-2, 1.813e-3],
    [2.290e-1, 1.981e-2, 1.961e-3],
];

/// Diagonal entries `α` (of A) and `β` (of B) of the 2×2 problem.
pub const LINEAR_COEFFICIENTS: [f64; 3] = [0.1, 0.9, 0.99];

/// Nested bound `(εα + δ)/(1 − αβ)` with `ε = δ`, `[ε][α][β]`.
///
/// The entries at (1e-1, 0.99, 0.9) use the exponent implied by the linear
/// scaling in `ε` (1.826e0, not 1.826e-1).
pub const LINEAR_ESTIMATES: [[[f64; 3]; 3]; 3] = [
    [
        [1.111e-1, 1.209e-1, 1.221e-1],
        [2.087e-1, 1.000e0, 1.743e0],
        [2.209e-1, 1.826e0, 1.000e1],
    ],
    [
        [1.111e-2, 1.209e-2, 1.221e-2],
        [2.088e-2, 1.000e-1, 1.743e-1],
        [2.209e-2, 1.826e-1, 1.000e0],
    ],
    [
        [1.111e-3, 1.209e-3, 1.221e-3],
        [2.088e-3, 1.000e-2, 1.743e-2],
        [2.209e-3, 1.826e-2, 1.000e-1],
    ],
];

/// Measured `‖x_ε − x*‖₂` for the 2×2 problem, `[ε][α][β]`.
///
/// Three entries carry exponents corrected to the linear scaling in `ε`:
/// (1e-1, 0.99, 0.9), (1e-3, 0.9, 0.99) and (1e-3, 0.99, 0.9).
pub const LINEAR_MEASURED: [[[f64; 3]; 3]; 3] = [
    [
        [1.058e-1, 1.111e-1, 1.117e-1],
        [1.638e-1, 7.107e-1, 1.235e0],
        [1.715e-1, 1.293e0, 7.071e0],
    ],
    [
        [1.058e-2, 1.111e-2, 1.117e-2],
        [1.638e-2, 7.107e-2, 1.235e-1],
        [1.715e-2, 1.293e-1, 7.071e-1],
    ],
    [
        [1.058e-3, 1.111e-3, 1.117e-3],
        [1.638e-3, 7.107e-3, 1.235e-2],
        [1.715e-3, 1.293e-2, 7.071e-2],
    ],
];

pub const NESTED_LS: [f64; 3] = [0.1, 0.9, 0.99];
pub const NESTED_LF: [f64; 4] = [0.01, 0.1, 0.9, 0.99];

/// Global estimate for the nested scalar problem, `[ε][L_S][L_F]`.
pub const NESTED_ESTIMATES: [[[f64; 4]; 3]; 3] = [
    [
        [1.101e-1, 1.111e-1, 1.209e-1, 1.221e-1],
        [1.917e-1, 2.088e-1, 1.000e0, 1.743e0],
        [2.010e-1, 2.209e-1, 1.826e0, 1.000e1],
    ],
    [
        [1.101e-2, 1.111e-2, 1.209e-2, 1.221e-2],
        [1.917e-2, 2.088e-2, 1.000e-1, 1.743e-1],
        [2.010e-2, 2.209e-2, 1.826e-1, 1.000e0],
    ],
    [
        [1.101e-3, 1.111e-3, 1.209e-3, 1.221e-3],
        [1.917e-3, 2.088e-3, 1.000e-2, 1.743e-2],
        [2.010e-3, 2.209e-3, 1.826e-2, 1.000e-1],
    ],
];

/// Measured `|x_ε − x*|` for the nested scalar problem, `[ε][L_S][L_F]`.
pub const NESTED_MEASURED: [[[f64; 4]; 3]; 3] = [
    [
        [1.039e-1, 1.039e-1, 1.042e-1, 1.042e-1],
        [1.350e-1, 1.370e-1, 1.618e-1, 1.658e-1],
        [1.386e-1, 1.411e-1, 1.746e-1, 1.806e-1],
    ],
    [
        [1.037e-2, 1.037e-2, 1.038e-2, 1.039e-2],
        [1.334e-2, 1.350e-2, 1.525e-2, 1.551e-2],
        [1.368e-2, 1.388e-2, 1.621e-2, 1.658e-2],
    ],
    [
        [1.037e-3, 1.037e-3, 1.038e-3, 1.038e-3],
        [1.333e-3, 1.348e-3, 1.518e-3, 1.542e-3],
        [1.366e-3, 1.386e-3, 1.612e-3, 1.646e-3],
    ],
];

/// Inner tolerances of the transmission sweeps.
pub const TRANSMISSION_TAUS: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];
pub const TRANSMISSION_DXS: [f64; 4] = [0.1, 0.05, 0.025, 0.0125];

/// Error with the `‖b‖`-relative criterion, `[τ][dx]`.
pub const RHS_RELATIVE_ERRORS: [[f64; 4]; 4] = [
    [7.606e-1, 4.189e0, 3.440e149, 3.755e148],
    [9.620e-2, 2.502e-2, 2.621e-1, 7.288e-1],
    [1.230e-2, 2.773e-3, 1.192e-1, 1.254e-1],
    [9.110e-4, 1.033e-3, 1.074e-2, 2.602e-2],
];

/// Error with the absolute criterion, `[τ][dx]`.
pub const ABSOLUTE_ERRORS: [[f64; 4]; 4] = [
    [6.643e-3, 7.308e-3, 8.993e-3, 7.187e-3],
    [7.727e-4, 6.344e-4, 8.048e-4, 6.775e-4],
    [7.117e-5, 8.603e-5, 8.354e-5, 6.880e-5],
    [5.497e-6, 7.426e-6, 7.685e-6, 6.470e-6],
];

/// Outer and cumulative CG iterations with the initial-residual criterion,
/// `[τ][dx]` as `(outer, inner)`.
pub const RELATIVE_ITERATIONS: [[(usize, usize); 4]; 4] = [
    [(106, 2220), (205, 8298), (401, 29224), (379, 40556)],
    [(105, 2903), (205, 11537), (401, 44321), (803, 156774)],
    [(105, 3121), (205, 12585), (399, 48341), (759, 181789)],
    [(105, 3369), (208, 13765), (402, 53478), (835, 222359)],
];
