//! Exact sparse elimination over the rationals.
//!
//! Rows are kept in semi-echelon form: each stored row has a distinct pivot,
//! its largest column, with coefficient 1. Reducing a vector by eliminating
//! pivot columns from the top down yields the unique representative whose
//! support avoids all pivots.

use std::collections::{BTreeMap, HashMap};
use std::ops::Bound;

use crate::error::{Error, Result};
use crate::scalar::{FormalScalar, Rat};

pub type SparseRow = Vec<(u32, Rat)>;

const DEFAULT_GUARD_BYTES: usize = 8 << 30;
const BYTES_PER_ENTRY: usize = 48;

/// Memory cap for stored elimination rows, from `JACOBI_GUARD_BYTES`.
pub fn guard_bytes() -> usize {
    std::env::var("JACOBI_GUARD_BYTES")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_GUARD_BYTES)
}

#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: Vec<SparseRow>,
    pivot: HashMap<u32, usize>,
    entries: usize,
    guard: usize,
}

impl Echelon {
    pub fn new() -> Echelon {
        Echelon {
            guard: guard_bytes(),
            ..Default::default()
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_pivot(&self, c: u32) -> bool {
        self.pivot.contains_key(&c)
    }

    pub fn pivots(&self) -> impl Iterator<Item = u32> + '_ {
        self.pivot.keys().copied()
    }

    pub fn rows(&self) -> &[SparseRow] {
        &self.rows
    }

    /// Add a row to the span; returns whether the rank grew.
    pub fn insert(&mut self, row: &[(u32, Rat)]) -> Result<bool> {
        let mut w: BTreeMap<u32, Rat> = BTreeMap::new();
        for (c, x) in row {
            if x.is_zero() {
                continue;
            }
            let e = w.entry(*c).or_default();
            *e += x;
            if e.is_zero() {
                w.remove(c);
            }
        }
        loop {
            let Some((&top, x)) = w.iter().next_back() else {
                return Ok(false);
            };
            let Some(&ri) = self.pivot.get(&top) else {
                let inv = x.recip();
                let stored: SparseRow = w.into_iter().map(|(c, v)| (c, &v * &inv)).collect();
                self.entries += stored.len();
                if self.entries * BYTES_PER_ENTRY > self.guard {
                    return Err(Error::Guard(format!(
                        "elimination exceeds {} bytes (JACOBI_GUARD_BYTES)",
                        self.guard
                    )));
                }
                self.pivot.insert(top, self.rows.len());
                self.rows.push(stored);
                return Ok(true);
            };
            let f = x.clone();
            for (c, v) in &self.rows[ri] {
                let d = &f * v;
                let e = w.entry(*c).or_default();
                *e -= &d;
                if e.is_zero() {
                    w.remove(c);
                }
            }
        }
    }

    pub fn reduce_rat(&self, v: &BTreeMap<u32, Rat>) -> BTreeMap<u32, Rat> {
        let mut w = v.clone();
        w.retain(|_, x| !x.is_zero());
        let mut bound = Bound::Unbounded;
        loop {
            let next = w
                .range((Bound::Unbounded, bound))
                .rev()
                .find(|(c, _)| self.pivot.contains_key(c));
            let Some((&c, x)) = next else { return w };
            let f = x.clone();
            for (k, y) in &self.rows[self.pivot[&c]] {
                let d = &f * y;
                let e = w.entry(*k).or_default();
                *e -= &d;
                if e.is_zero() {
                    w.remove(k);
                }
            }
            bound = Bound::Excluded(c);
        }
    }

    pub fn reduce_fs(&self, v: &BTreeMap<u32, FormalScalar>) -> BTreeMap<u32, FormalScalar> {
        let mut w = v.clone();
        w.retain(|_, x| !x.is_zero());
        let mut bound = Bound::Unbounded;
        loop {
            let next = w
                .range((Bound::Unbounded, bound))
                .rev()
                .find(|(c, _)| self.pivot.contains_key(c));
            let Some((&c, x)) = next else { return w };
            let f = x.clone();
            for (k, y) in &self.rows[self.pivot[&c]] {
                let d = f.scale(y);
                let e = w.entry(*k).or_default();
                *e -= &d;
                if e.is_zero() {
                    w.remove(k);
                }
            }
            bound = Bound::Excluded(c);
        }
    }
}

/// Rank of a dense rational matrix.
pub fn dense_rank(mut rows: Vec<Vec<Rat>>) -> usize {
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = rows[rank][col].recip();
        let piv: Vec<Rat> = rows[rank].iter().map(|x| x * &inv).collect();
        for i in 0..rows.len() {
            if i != rank && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                for j in col..ncols {
                    let d = &f * &piv[j];
                    rows[i][j] -= &d;
                }
            }
        }
        rows[rank] = piv;
        rank += 1;
    }
    rank
}

/// Basis of the right nullspace of a dense rational matrix.
pub fn nullspace(rows: &[Vec<Rat>], ncols: usize) -> Vec<Vec<Rat>> {
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let inv = m[rank][col].recip();
        for j in 0..ncols {
            m[rank][j] = &m[rank][j] * &inv;
        }
        for i in 0..m.len() {
            if i != rank && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in 0..ncols {
                    let d = &f * &m[rank][j];
                    m[i][j] -= &d;
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rat::zero(); ncols];
            v[f] = Rat::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[r][f].clone();
            }
            v
        })
        .collect()
}

/// Inverse of a square rational matrix, if it exists.
pub fn invert(a: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let n = a.len();
    let mut m: Vec<Vec<Rat>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            row
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&i| !m[i][col].is_zero())?;
        m.swap(col, p);
        let inv = m[col][col].recip();
        for j in 0..2 * n {
            m[col][j] = &m[col][j] * &inv;
        }
        for i in 0..n {
            if i != col && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in 0..2 * n {
                    let d = &f * &m[col][j];
                    m[i][j] -= &d;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rat {
        Rat::int(n)
    }

    #[test]
    fn echelon_reduces_span_to_zero() {
        let mut e = Echelon::new();
        assert!(e.insert(&[(0, r(1)), (2, r(1))]).unwrap());
        assert!(e.insert(&[(1, r(2)), (2, r(-1))]).unwrap());
        assert!(!e.insert(&[(0, r(2)), (1, r(2)), (2, r(1))]).unwrap());
        assert_eq!(e.rank(), 2);
        let v: BTreeMap<u32, Rat> = [(0, r(3)), (2, r(3))].into_iter().collect();
        assert!(e.reduce_rat(&v).is_empty());
        let u: BTreeMap<u32, Rat> = [(2, r(1))].into_iter().collect();
        let nf = e.reduce_rat(&u);
        assert_eq!(e.reduce_rat(&nf), nf);
        assert!(!nf.is_empty());
    }

    #[test]
    fn dense_helpers() {
        let m = vec![vec![r(1), r(2)], vec![r(2), r(4)]];
        assert_eq!(dense_rank(m.clone()), 1);
        let ns = nullspace(&m, 2);
        assert_eq!(ns, vec![vec![r(-2), r(1)]]);
        let inv = invert(&[vec![r(2), r(0)], vec![r(0), r(4)]]).unwrap();
        assert_eq!(inv[1][1], Rat::new(1, 4));
    }
}
