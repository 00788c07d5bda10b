use nalgebra::DMatrix;

use crate::block::{Block, Kind};
use crate::error::{Error, Result};
use crate::matrix::MatrixRepr;
use crate::C64;

/// `2 Re Σ conj(Ū_ij) D_ij`
fn pair(ubar: &DMatrix<C64>, d: &DMatrix<C64>) -> f64 {
    2.0 * ubar.iter().zip(d.iter()).map(|(u, v)| (u.conj() * v).re).sum::<f64>()
}

/// Derivative of the matrix of a parameterized primitive.
pub(crate) fn dmat(b: &Block) -> Result<Option<DMatrix<C64>>> {
    let i = C64::i();
    Ok(Some(match b.kind() {
        Kind::Rotation { generator, theta } => {
            let (s, c) = (theta.get() / 2.0).sin_cos();
            let g = generator.mat()?.to_dense();
            let dim = g.nrows();
            DMatrix::identity(dim, dim) * C64::new(-0.5 * s, 0.0) + g * C64::new(0.0, -0.5 * c)
        }
        Kind::Shift { theta } => DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::new(0.0, 0.0),
            i * (i * theta.get()).exp(),
        ])),
        Kind::Phase { theta } => DMatrix::identity(2, 2) * (i * (i * theta.get()).exp()),
        Kind::TimeEvolution { hamiltonian, .. } => {
            let h = hamiltonian.mat()?.to_dense();
            let u = b.mat()?.to_dense();
            h * u * (-i)
        }
        _ => return Ok(None),
    }))
}

/// Parameter adjoints of a primitive block given the adjoint `Ū` of its
/// matrix: `θ̄ = 2 Re⟨∂U/∂θ, Ū⟩`. Constant blocks have no parameters and
/// yield an empty vector.
pub fn mat_back(b: &Block, ubar: &MatrixRepr) -> Result<Vec<f64>> {
    if ubar.dim() != 1 << b.nqubits() {
        return Err(Error::shape(format!(
            "adjoint of size {} for a {}-qubit block",
            ubar.dim(),
            b.nqubits()
        )));
    }
    if !b.is_primitive() {
        return Err(Error::validation("mat_back expects a primitive block"));
    }
    match dmat(b)? {
        Some(d) => Ok(vec![pair(&ubar.to_dense(), &d)]),
        None => Ok(Vec::new()),
    }
}

pub(crate) fn mat_back_dense(b: &Block, ubar: &DMatrix<C64>) -> Result<f64> {
    let d = dmat(b)?.ok_or_else(|| Error::validation("block has no parameter"))?;
    Ok(pair(ubar, &d))
}
