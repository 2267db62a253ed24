//! Eigenvalues of singular Sturm-Liouville problems
//!
//! ```text
//! -u''(x) + q(x) u(x) = lambda rho(x) u(x),   a < x < b,   u(a) = u(b) = 0
//! ```
//!
//! by Sinc collocation after a single- or double-exponential change of
//! variables. The problem is pulled back to the real line with a catalog
//! map, collocated on a truncated Sinc mesh and reduced to a symmetric
//! definite generalized eigenproblem `(A - mu D^2) v = 0`.
//!
//! ```
//! use descm::{builtin_bessel, convergence_study, Method};
//!
//! let bessel = builtin_bessel(1).unwrap();
//! let records = convergence_study(&bessel, Method::DeBalanced, &[20], &[1]).unwrap();
//! assert!(records[0].abs_error.unwrap() < 1e-9);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod eigen;
pub mod error;
pub mod lambertw;
pub mod mesh;
pub mod problems;
pub mod sinc;
pub mod study;
pub mod transform;

pub use eigen::{
    assemble, solve_generalized, solve_standard_symmetric, GeneralizedSystem, Spectrum,
};
pub use error::{Error, Result};
pub use lambertw::lambert_w0;
pub use mesh::{de_mesh, de_mesh_symmetric, se_mesh, DecayProfile, MeshConfig};
pub use problems::{
    bessel_zero, builtin, builtin_bessel, builtin_laguerre, builtin_singular, parse_expression,
    parse_problem_config, reference_eigenvalue, SturmLiouvilleProblem,
};
pub use sinc::{diff_matrix, sinc, sinc_basis, SincWeights};
pub use study::{
    compare_methods, convergence_study, emit_csv, errors_at_common_size, pre_plateau, rate_fit,
    read_csv, solve_problem, write_csv, Method, RateFit, StudyRecord,
};
pub use transform::{
    map_catalog, qtilde_eval, weight_eval, ConformalMap, DecayKind, IntervalKind,
    TransformedProblem,
};
