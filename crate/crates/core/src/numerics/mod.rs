//! Self-contained numerical kernels: dense complex LU, a symmetric
//! tridiagonal eigensolver, Muller's method and Gauss–Legendre quadrature.

mod matrix;
mod muller;
mod quadrature;
mod tridiag;

pub use matrix::{lu_logdet, lu_solve, wrap_phase, ComplexMatrix, LogDet, LuFactorization};
pub use muller::{muller_find_root, MullerOptions, MullerRoot};
pub use quadrature::{legendre_table, legendre_with_derivative, GaussLegendre};
pub use tridiag::{sym_tridiag_eigen, SymTridiag, TridiagEigen};
