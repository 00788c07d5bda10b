use crate::error::{Error, Result};
use crate::C64;

/// Generalized permutation matrix: row `i` holds `vals[i]` at column `perm[i]`.
///
/// Column indices are stored 0-based; [`PermMatrix::from_one_based`] accepts
/// the 1-based form used in gate definitions such as
/// `([1, 3, 2, 4], [1, i, i, 1])` for ISWAP.
#[derive(Debug, Clone, PartialEq)]
pub struct PermMatrix {
    perm: Vec<usize>,
    vals: Vec<C64>,
}

impl PermMatrix {
    pub fn new(perm: Vec<usize>, vals: Vec<C64>) -> Result<Self> {
        if perm.len() != vals.len() {
            return Err(Error::shape(format!(
                "permutation has {} entries but {} values",
                perm.len(),
                vals.len()
            )));
        }
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::validation(format!(
                    "{perm:?} is not a permutation of 0..{}",
                    perm.len()
                )));
            }
        }
        Ok(PermMatrix { perm, vals })
    }

    pub fn from_one_based(perm: &[usize], vals: Vec<C64>) -> Result<Self> {
        let zero_based = perm
            .iter()
            .map(|&p| {
                p.checked_sub(1)
                    .ok_or_else(|| Error::validation("1-based permutation contains 0"))
            })
            .collect::<Result<Vec<_>>>()?;
        PermMatrix::new(zero_based, vals)
    }

    pub(crate) fn new_unchecked(perm: Vec<usize>, vals: Vec<C64>) -> Self {
        debug_assert_eq!(perm.len(), vals.len());
        PermMatrix { perm, vals }
    }

    pub fn identity(dim: usize) -> Self {
        PermMatrix {
            perm: (0..dim).collect(),
            vals: vec![C64::new(1.0, 0.0); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn perm_one_based(&self) -> Vec<usize> {
        self.perm.iter().map(|p| p + 1).collect()
    }

    pub fn vals(&self) -> &[C64] {
        &self.vals
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        if self.perm[row] == col {
            self.vals[row]
        } else {
            C64::new(0.0, 0.0)
        }
    }

    /// Product `self * rhs`.
    pub fn compose(&self, rhs: &PermMatrix) -> PermMatrix {
        let (perm, vals) = self
            .perm
            .iter()
            .zip(&self.vals)
            .map(|(&p, &v)| (rhs.perm[p], v * rhs.vals[p]))
            .unzip();
        PermMatrix { perm, vals }
    }

    pub fn adjoint(&self) -> PermMatrix {
        let n = self.dim();
        let mut perm = vec![0; n];
        let mut vals = vec![C64::new(0.0, 0.0); n];
        for (i, (&p, &v)) in self.perm.iter().zip(&self.vals).enumerate() {
            perm[p] = i;
            vals[p] = v.conj();
        }
        PermMatrix { perm, vals }
    }

    pub fn kron(&self, rhs: &PermMatrix) -> PermMatrix {
        let db = rhs.dim();
        let mut perm = Vec::with_capacity(self.dim() * db);
        let mut vals = Vec::with_capacity(self.dim() * db);
        for (&pa, &va) in self.perm.iter().zip(&self.vals) {
            for (&pb, &vb) in rhs.perm.iter().zip(&rhs.vals) {
                perm.push(pa * db + pb);
                vals.push(va * vb);
            }
        }
        PermMatrix { perm, vals }
    }

    pub fn scale(&self, c: C64) -> PermMatrix {
        PermMatrix {
            perm: self.perm.clone(),
            vals: self.vals.iter().map(|v| v * c).collect(),
        }
    }

    /// `y = P x`
    #[inline]
    pub fn matvec(&self, x: &[C64], y: &mut [C64]) {
        for ((yi, &p), &v) in y.iter_mut().zip(&self.perm).zip(&self.vals) {
            *yi = v * x[p];
        }
    }
}
