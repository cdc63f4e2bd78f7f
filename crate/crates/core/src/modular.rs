//! Relation spaces too large for exact elimination, solved modulo a prime and
//! certified over the rationals.
//!
//! Rows are eliminated modulo p = 2^61 - 1 with Markowitz pivoting. Each free
//! column f gives a kernel vector w_f (w_f[f] = 1, zero on the other free
//! columns) by back-substitution. Its entries are rationally reconstructed, and
//! every original row is then checked exactly to be orthogonal to it. The
//! number of vectors equals the corank mod p, which bounds the rational corank
//! from above, so the certified vectors span the exact annihilator of the row
//! space. The quotient map is then v -> (f -> <w_f, v>).

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashSet};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{guard_bytes, SparseRow};
use crate::scalar::{FormalScalar, Rat};

const P: u64 = (1u64 << 61) - 1;
const RECON_BOUND: i128 = 1 << 30;
const MOD_ENTRY_BYTES: usize = 16;
const KERNEL_ENTRY_BYTES: usize = 40;

fn mul(a: u64, b: u64) -> u64 {
    let t = a as u128 * b as u128;
    let s = (t as u64 & P) + (t >> 61) as u64;
    if s >= P {
        s - P
    } else {
        s
    }
}

fn add(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= P {
        s - P
    } else {
        s
    }
}

fn neg(a: u64) -> u64 {
    if a == 0 {
        0
    } else {
        P - a
    }
}

fn inv(a: u64) -> u64 {
    let (mut r, mut b, mut e) = (1u64, a, P - 2);
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, b);
        }
        b = mul(b, b);
        e >>= 1;
    }
    r
}

fn big_mod(x: &BigInt) -> u64 {
    let m = BigInt::from(P);
    let mut r = x % &m;
    if r.is_negative() {
        r += &m;
    }
    r.to_u64().expect("residue below p")
}

fn to_mod(x: &Rat) -> Result<u64> {
    let b = x.to_big();
    let d = big_mod(b.denom());
    if d == 0 {
        return Err(Error::Guard("denominator divisible by the modulus".into()));
    }
    Ok(mul(big_mod(b.numer()), inv(d)))
}

/// Smallest n/d with n = a d mod p and |n|, d below the bound.
fn reconstruct(a: u64) -> Option<Rat> {
    let (mut r0, mut r1) = (P as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 >= RECON_BOUND {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if t1 == 0 || t1.abs() >= RECON_BOUND {
        return None;
    }
    let (n, d) = if t1 < 0 { (-r1, -t1) } else { (r1, t1) };
    Some(Rat::new(n as i64, d as i64))
}

type ModRow = Vec<(u32, u64)>;

/// `a - f b` for sorted sparse rows.
fn axpy(a: &ModRow, f: u64, b: &ModRow) -> ModRow {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, neg(mul(f, b[j].1))));
            j += 1;
        } else {
            let v = add(a[i].1, neg(mul(f, b[j].1)));
            if v != 0 {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Certified basis of the annihilator of a row space.
#[derive(Clone, Debug)]
pub struct DualBasis {
    ncols: usize,
    free: Vec<u32>,
    /// For each column j, the pairs (position of f in `free`, w_f[j]).
    by_column: Vec<Vec<(u32, Rat)>>,
}

impl DualBasis {
    pub fn build(rows: &[SparseRow], ncols: usize) -> Result<DualBasis> {
        let guard = guard_bytes();
        let over = |entries: usize| -> Result<()> {
            if entries * MOD_ENTRY_BYTES > guard {
                return Err(Error::Guard(format!(
                    "modular elimination exceeds {guard} bytes (JACOBI_GUARD_BYTES)"
                )));
            }
            Ok(())
        };
        let mut active: Vec<Option<ModRow>> = Vec::with_capacity(rows.len());
        for r in rows {
            let mut v: ModRow = Vec::with_capacity(r.len());
            for (c, x) in r {
                let m = to_mod(x)?;
                if m != 0 {
                    v.push((*c, m));
                }
            }
            v.sort_unstable_by_key(|e| e.0);
            active.push(Some(v));
        }
        let mut col_rows: Vec<HashSet<u32>> = vec![HashSet::new(); ncols];
        let mut heap = BinaryHeap::new();
        let mut stored = 0usize;
        for (i, r) in active.iter().enumerate() {
            let r = r.as_ref().expect("fresh row");
            stored += r.len();
            for &(c, _) in r {
                col_rows[c as usize].insert(i as u32);
            }
            heap.push(Reverse((r.len(), i)));
        }
        over(stored)?;
        let mut pivots: Vec<(u32, ModRow)> = Vec::new();
        let mut is_pivot = vec![false; ncols];
        while let Some(Reverse((w, i))) = heap.pop() {
            let Some(r) = active[i].as_ref() else {
                continue;
            };
            if r.len() != w {
                continue;
            }
            if r.is_empty() {
                active[i] = None;
                continue;
            }
            let &(c, a) = r
                .iter()
                .min_by_key(|(c, _)| col_rows[*c as usize].len())
                .expect("nonempty row");
            let piv = active[i].take().expect("active row");
            for &(cc, _) in &piv {
                col_rows[cc as usize].remove(&(i as u32));
            }
            let ia = inv(a);
            let piv: ModRow = piv.iter().map(|&(cc, v)| (cc, mul(v, ia))).collect();
            let others: Vec<u32> = col_rows[c as usize].iter().copied().collect();
            for o in others {
                let o = o as usize;
                let ro = active[o].take().expect("active row");
                let f = ro.iter().find(|x| x.0 == c).expect("pivot column entry").1;
                for &(cc, _) in &ro {
                    col_rows[cc as usize].remove(&(o as u32));
                }
                let nr = axpy(&ro, f, &piv);
                stored = stored + nr.len() - ro.len();
                for &(cc, _) in &nr {
                    col_rows[cc as usize].insert(o as u32);
                }
                heap.push(Reverse((nr.len(), o)));
                active[o] = Some(nr);
            }
            over(stored)?;
            is_pivot[c as usize] = true;
            pivots.push((c, piv));
        }
        drop(col_rows);
        drop(active);
        let free: Vec<u32> = (0..ncols as u32)
            .filter(|&c| !is_pivot[c as usize])
            .collect();
        let kernel: Vec<Result<Vec<(u32, Rat)>>> = free
            .par_iter()
            .map(|&f| {
                let mut x = vec![0u64; ncols];
                x[f as usize] = 1;
                for (c, row) in pivots.iter().rev() {
                    let mut s = 0u64;
                    for &(j, v) in row {
                        let xj = x[j as usize];
                        if xj != 0 && j != *c {
                            s = add(s, mul(v, xj));
                        }
                    }
                    x[*c as usize] = neg(s);
                }
                let w: Vec<(u32, Rat)> = x
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0)
                    .map(|(j, &v)| {
                        reconstruct(v).map(|q| (j as u32, q)).ok_or_else(|| {
                            Error::Guard(format!(
                                "rational reconstruction failed for free column {f}"
                            ))
                        })
                    })
                    .collect::<Result<_>>()?;
                let mut dense = vec![Rat::zero(); ncols];
                for (j, q) in &w {
                    dense[*j as usize] = q.clone();
                }
                for r in rows {
                    let mut s = Rat::zero();
                    for (j, a) in r {
                        let y = &dense[*j as usize];
                        if !y.is_zero() {
                            s += &(a * y);
                        }
                    }
                    if !s.is_zero() {
                        return Err(Error::Guard(format!(
                            "kernel vector for free column {f} failed exact verification"
                        )));
                    }
                }
                Ok(w)
            })
            .collect();
        drop(pivots);
        let mut by_column: Vec<Vec<(u32, Rat)>> = vec![Vec::new(); ncols];
        let mut entries = 0usize;
        for (fi, w) in kernel.into_iter().enumerate() {
            for (j, q) in w? {
                by_column[j as usize].push((fi as u32, q));
                entries += 1;
            }
        }
        if entries * KERNEL_ENTRY_BYTES > guard {
            return Err(Error::Guard(format!(
                "dual basis exceeds {guard} bytes (JACOBI_GUARD_BYTES)"
            )));
        }
        Ok(DualBasis {
            ncols,
            free,
            by_column,
        })
    }

    pub fn rank(&self) -> usize {
        self.ncols - self.free.len()
    }

    pub fn free_columns(&self) -> &[u32] {
        &self.free
    }

    /// Coordinates of `v` modulo the row space, keyed by free column.
    pub fn reduce_fs(&self, v: &BTreeMap<u32, FormalScalar>) -> BTreeMap<u32, FormalScalar> {
        let mut acc: BTreeMap<u32, FormalScalar> = BTreeMap::new();
        for (j, x) in v {
            if x.is_zero() {
                continue;
            }
            for (fi, q) in &self.by_column[*j as usize] {
                let e = acc.entry(self.free[*fi as usize]).or_default();
                *e += &x.scale(q);
            }
        }
        acc.retain(|_, x| !x.is_zero());
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Echelon;

    #[test]
    fn field_arithmetic() {
        for a in [1u64, 2, 3, 12345, P - 1] {
            assert_eq!(mul(a, inv(a)), 1);
        }
        assert_eq!(to_mod(&Rat::new(-1, 2)).unwrap(), neg(inv(2)));
        for (n, d) in [(0, 1), (3, 7), (-395, 12), (1, 1 << 29)] {
            let q = Rat::new(n, d);
            assert_eq!(reconstruct(to_mod(&q).unwrap()), Some(q));
        }
    }

    #[test]
    fn agrees_with_exact_echelon() {
        let rows: Vec<SparseRow> = vec![
            vec![(0, Rat::int(1)), (1, Rat::int(-1))],
            vec![(1, Rat::int(2)), (3, Rat::int(1))],
            vec![(0, Rat::int(2)), (3, Rat::int(1))],
            vec![(2, Rat::new(1, 3)), (4, Rat::int(1))],
        ];
        let d = DualBasis::build(&rows, 5).unwrap();
        let mut e = Echelon::new();
        for r in &rows {
            e.insert(r).unwrap();
        }
        assert_eq!(d.rank(), e.rank());
        for r in &rows {
            let v: BTreeMap<u32, FormalScalar> = r
                .iter()
                .map(|(c, x)| (*c, FormalScalar::from_rat(x.clone())))
                .collect();
            assert!(d.reduce_fs(&v).is_empty());
        }
        let e2: BTreeMap<u32, FormalScalar> = [(2, FormalScalar::int(1))].into();
        assert!(!d.reduce_fs(&e2).is_empty());
    }
}
