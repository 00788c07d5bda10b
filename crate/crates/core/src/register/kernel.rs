//! Generic multi-control, multi-qubit gate kernel.
//!
//! A gate on `k` target bits acts on groups of `2^k` amplitudes whose indices
//! differ only in the target bits. Groups are enumerated by spreading a
//! counter over the non-target, non-control bit positions and or-ing in the
//! required control pattern.

use rayon::prelude::*;

use crate::bitstr::{deposit_bits, insert_zero_bits};
use crate::matrix::{CscMatrix, MatrixRepr};
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Columns shorter than this are processed serially.
const PAR_MIN_AMPS: usize = 1 << 14;

enum Kern<'a> {
    Diag(&'a [C64]),
    Perm(&'a [usize], &'a [C64]),
    Csc(&'a CscMatrix),
    /// Row-major entries.
    Dense(Vec<C64>),
}

/// Target/control layout for one instruction, in 0-based bit positions.
pub(crate) struct Layout {
    offsets: Vec<usize>,
    fixed_sorted: Vec<usize>,
    ctrl_want: usize,
    ngroups_bits: usize,
}

impl Layout {
    pub(crate) fn new(nbits: usize, locs: &[usize], ctrl_locs: &[usize], ctrl_want: usize) -> Self {
        let offsets = (0..1usize << locs.len()).map(|m| deposit_bits(m, locs)).collect();
        let mut fixed_sorted: Vec<usize> = locs.iter().chain(ctrl_locs).copied().collect();
        fixed_sorted.sort_unstable();
        Layout {
            offsets,
            ngroups_bits: nbits - fixed_sorted.len(),
            fixed_sorted,
            ctrl_want,
        }
    }

    #[inline]
    pub(crate) fn base(&self, j: usize) -> usize {
        insert_zero_bits(j, &self.fixed_sorted) | self.ctrl_want
    }

    pub(crate) fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub(crate) fn ngroups(&self) -> usize {
        1 << self.ngroups_bits
    }
}

fn kern_of(m: &MatrixRepr) -> Option<Kern<'_>> {
    Some(match m {
        MatrixRepr::Identity(_) => return None,
        MatrixRepr::Diagonal(d) => Kern::Diag(d),
        MatrixRepr::Permutation(p) => Kern::Perm(p.perm(), p.vals()),
        MatrixRepr::Sparse(s) => Kern::Csc(s),
        MatrixRepr::Dense(_) | MatrixRepr::OuterProduct(_) => {
            let d = m.to_dense();
            let n = d.nrows();
            Kern::Dense((0..n * n).map(|k| d[(k / n, k % n)]).collect())
        }
    })
}

/// Raw pointer shared between threads that touch disjoint index sets.
#[derive(Clone, Copy)]
struct SharedPtr(*mut C64);
unsafe impl Send for SharedPtr {}
unsafe impl Sync for SharedPtr {}

/// Applies one group. `col` must be valid for every `base | offset`.
#[inline(always)]
unsafe fn apply_group(kern: &Kern<'_>, col: *mut C64, base: usize, offs: &[usize], v: &mut [C64]) {
    match kern {
        Kern::Diag(d) => {
            for (o, di) in offs.iter().zip(d.iter()) {
                if *di != ONE {
                    *col.add(base | o) *= di;
                }
            }
        }
        Kern::Perm(perm, vals) => {
            for (m, o) in offs.iter().enumerate() {
                v[m] = *col.add(base | o);
            }
            for (m, o) in offs.iter().enumerate() {
                *col.add(base | o) = vals[m] * v[perm[m]];
            }
        }
        Kern::Csc(s) => {
            for (m, o) in offs.iter().enumerate() {
                v[m] = *col.add(base | o);
                *col.add(base | o) = ZERO;
            }
            for (j, &vj) in v.iter().enumerate() {
                if vj == ZERO {
                    continue;
                }
                for (i, a) in s.column(j) {
                    *col.add(base | offs[i]) += a * vj;
                }
            }
        }
        Kern::Dense(rows) => {
            let dim = offs.len();
            if dim == 2 {
                let (p, q) = (col.add(base | offs[0]), col.add(base | offs[1]));
                let (a, b) = (*p, *q);
                *p = rows[0] * a + rows[1] * b;
                *q = rows[2] * a + rows[3] * b;
                return;
            }
            for (m, o) in offs.iter().enumerate() {
                v[m] = *col.add(base | o);
            }
            for (i, o) in offs.iter().enumerate() {
                let row = &rows[i * dim..(i + 1) * dim];
                *col.add(base | o) = row.iter().zip(v.iter()).map(|(a, x)| a * x).sum();
            }
        }
    }
}

fn apply_range(kern: &Kern<'_>, layout: &Layout, col: SharedPtr, range: std::ops::Range<usize>) {
    let offs = layout.offsets();
    let mut v = vec![ZERO; offs.len()];
    for j in range {
        let base = layout.base(j);
        // SAFETY: base | offs[m] < column length, and distinct j give disjoint groups.
        unsafe { apply_group(kern, col.0, base, offs, &mut v) };
    }
}

/// Applies `m` to every `2^nbits`-long column of `buf`.
///
/// `locs` and `ctrl_locs` are 0-based bit positions within a column; they
/// must be distinct and in range (checked by the caller).
pub(crate) fn apply_matrix(
    buf: &mut [C64],
    nbits: usize,
    m: &MatrixRepr,
    locs: &[usize],
    ctrl_locs: &[usize],
    ctrl_want: usize,
) {
    let Some(kern) = kern_of(m) else { return };
    let layout = Layout::new(nbits, locs, ctrl_locs, ctrl_want);
    let col_len = 1usize << nbits;
    let ngroups = layout.ngroups();
    let parallel = buf.len() >= PAR_MIN_AMPS && rayon::current_num_threads() > 1;
    if !parallel {
        for col in buf.chunks_mut(col_len) {
            apply_range(&kern, &layout, SharedPtr(col.as_mut_ptr()), 0..ngroups);
        }
    } else if buf.len() / col_len >= rayon::current_num_threads() {
        buf.par_chunks_mut(col_len)
            .for_each(|col| apply_range(&kern, &layout, SharedPtr(col.as_mut_ptr()), 0..ngroups));
    } else {
        let chunk = (ngroups / (4 * rayon::current_num_threads())).max(256);
        for col in buf.chunks_mut(col_len) {
            let ptr = SharedPtr(col.as_mut_ptr());
            (0..ngroups.div_ceil(chunk)).into_par_iter().for_each(|c| {
                let ptr = ptr;
                apply_range(&kern, &layout, ptr, c * chunk..((c + 1) * chunk).min(ngroups))
            });
        }
    }
}

/// Exchanges bit positions `p` and `q` of every index within each column.
pub(crate) fn swap_bits(buf: &mut [C64], nbits: usize, p: usize, q: usize) {
    if p == q {
        return;
    }
    let (lo, hi) = (p.min(q), p.max(q));
    let fixed = [lo, hi];
    let col_len = 1usize << nbits;
    for col in buf.chunks_mut(col_len) {
        for j in 0..col_len >> 2 {
            let base = insert_zero_bits(j, &fixed);
            col.swap(base | (1 << p), base | (1 << q));
        }
    }
}
