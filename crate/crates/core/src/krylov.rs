//! Lanczos-based action of `exp(-i H t)` on a state, and ground-state energies.
//!
//! The operator is supplied as a closure computing `dst = H src` on whole
//! register buffers. Batched or focused registers are handled as one long
//! vector: `H` acts identically on every column, so the Krylov space of the
//! stacked vector yields the same exponential.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::register::Register;
use crate::C64;

/// Largest Krylov subspace.
pub const MAX_DIM: usize = 30;
/// Target residual estimate, relative to the input norm.
pub const TOL: f64 = 1e-12;

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Builds up to `max_dim` orthonormal Lanczos vectors starting from `v0 / |v0|`.
/// Returns (basis, alpha, beta) where `beta[j]` couples vector `j` and `j + 1`.
struct Lanczos {
    basis: Vec<Register>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
}

fn lanczos<F>(hop: &mut F, start: &Register, max_dim: usize, mut stop: impl FnMut(&[f64], &[f64]) -> bool) -> Result<Lanczos>
where
    F: FnMut(&Register, &mut Register) -> Result<()>,
{
    let nrm = norm(start.state());
    let mut v = start.clone();
    v.scale(C64::new(1.0 / nrm, 0.0));
    let mut basis = vec![v];
    let mut alpha = Vec::new();
    let mut beta = Vec::new();
    let mut w = start.zeros_like();
    for j in 0..max_dim {
        hop(&basis[j], &mut w)?;
        let a = dot(basis[j].state(), w.state()).re;
        alpha.push(a);
        // full reorthogonalization, twice for stability
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q.state(), w.state());
                w.axpy(-c, q)?;
            }
        }
        let b = norm(w.state());
        beta.push(b);
        if b < 1e-13 || j + 1 == max_dim || stop(&alpha, &beta) {
            break;
        }
        let mut next = w.clone();
        next.scale(C64::new(1.0 / b, 0.0));
        basis.push(next);
    }
    Ok(Lanczos { basis, alpha, beta })
}

fn tridiag_eigen(alpha: &[f64], beta: &[f64]) -> SymmetricEigen<f64, nalgebra::Dyn> {
    let m = alpha.len();
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    SymmetricEigen::new(t)
}

/// `exp(-i T t) e1` for the tridiagonal `T`.
fn expm_e1(alpha: &[f64], beta: &[f64], t: C64) -> DVector<C64> {
    let eig = tridiag_eigen(alpha, beta);
    let q = &eig.eigenvectors;
    let m = alpha.len();
    DVector::from_fn(m, |i, _| {
        (0..m)
            .map(|k| q[(i, k)] * q[(0, k)] * (-C64::i() * t * eig.eigenvalues[k]).exp())
            .sum()
    })
}

/// Replaces `reg` by `exp(-i H t) reg`.
pub fn expmv<F>(mut hop: F, t: C64, reg: &mut Register) -> Result<()>
where
    F: FnMut(&Register, &mut Register) -> Result<()>,
{
    if t == C64::new(0.0, 0.0) {
        return Ok(());
    }
    let mut remaining = 1.0f64;
    let mut frac = 1.0f64;
    let mut halvings = 0;
    while remaining > 0.0 {
        let beta0 = norm(reg.state());
        if beta0 == 0.0 {
            return Ok(());
        }
        let step = frac.min(remaining);
        let dt = t * step;
        let mut converged = false;
        let lz = lanczos(&mut hop, reg, MAX_DIM, |a, b| {
            let m = a.len();
            if m < 2 {
                return false;
            }
            let y = expm_e1(a, &b[..m - 1], dt);
            converged = b[m - 1] * y[m - 1].norm() <= TOL;
            converged
        })?;
        let m = lz.alpha.len();
        let happy = *lz.beta.last().unwrap() < 1e-13;
        let y = expm_e1(&lz.alpha, &lz.beta[..m - 1], dt);
        let err = lz.beta[m - 1] * y[m - 1].norm();
        if !(happy || converged || err <= TOL) {
            halvings += 1;
            if halvings > 60 {
                return Err(Error::unsupported("Krylov exponential failed to converge"));
            }
            frac = step / 2.0;
            continue;
        }
        let out = reg.state_mut();
        out.fill(C64::new(0.0, 0.0));
        for (k, q) in lz.basis.iter().enumerate().take(m) {
            let c = y[k] * beta0;
            for (o, v) in out.iter_mut().zip(q.state()) {
                *o += c * v;
            }
        }
        remaining -= step;
        if remaining < 1e-15 {
            remaining = 0.0;
        }
    }
    Ok(())
}

/// Lowest eigenvalue of a hermitian operator by restarted Lanczos.
pub fn ground_energy<F>(mut hop: F, nqubits: usize, seed: u64) -> Result<f64>
where
    F: FnMut(&Register, &mut Register) -> Result<()>,
{
    let mut v = Register::rand_state(nqubits, 1, seed)?;
    let dim = 1usize << nqubits;
    let kmax = dim.min(120);
    let mut last = f64::INFINITY;
    for _ in 0..50 {
        let lz = lanczos(&mut hop, &v, kmax, |_, _| false)?;
        let m = lz.alpha.len();
        let eig = tridiag_eigen(&lz.alpha, &lz.beta[..m - 1]);
        let (k, &e) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty spectrum");
        let exact = m == dim || *lz.beta.last().unwrap() < 1e-13;
        let mut next = v.zeros_like();
        for (i, q) in lz.basis.iter().enumerate().take(m) {
            next.axpy(C64::new(eig.eigenvectors[(i, k)], 0.0), q)?;
        }
        next.normalize();
        v = next;
        if exact || (last - e).abs() <= 1e-12 * e.abs().max(1.0) {
            return Ok(e);
        }
        last = e;
    }
    Ok(last)
}
