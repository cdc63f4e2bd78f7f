//! Explicit matrix computations at a fixed integer `N`, independent of the
//! symbolic state sums: Lie algebra bases inside `gl(V)`, dual bases from the
//! Gram matrix of the trace form, and chord diagrams evaluated on `V ⊗ V`.

use super::standard::{Op, OperatorElt, StdSystem};
use super::usl2::{PbwMono, Usl2TensorElt};
use crate::diagrams::JDiagram;
use crate::error::{Error, Result};
use crate::linalg::{invert, nullspace};
use crate::scalar::Rat;

pub type Mat = Vec<Vec<Rat>>;

pub fn zeros(r: usize, c: usize) -> Mat {
    vec![vec![Rat::zero(); c]; r]
}

pub fn identity(d: usize) -> Mat {
    let mut m = zeros(d, d);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Rat::one();
    }
    m
}

fn unit(d: usize, i: usize, j: usize) -> Mat {
    let mut m = zeros(d, d);
    m[i][j] = Rat::one();
    m
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let (n, k, m) = (a.len(), b.len(), b.first().map_or(0, |r| r.len()));
    let mut c = zeros(n, m);
    for i in 0..n {
        for t in 0..k {
            if a[i][t].is_zero() {
                continue;
            }
            for j in 0..m {
                if !b[t][j].is_zero() {
                    let p = &a[i][t] * &b[t][j];
                    c[i][j] += &p;
                }
            }
        }
    }
    c
}

fn add_scaled(a: &mut Mat, b: &Mat, c: &Rat) {
    for (ra, rb) in a.iter_mut().zip(b) {
        for (x, y) in ra.iter_mut().zip(rb) {
            if !y.is_zero() {
                let p = y * c;
                *x += &p;
            }
        }
    }
}

fn trace(a: &Mat) -> Rat {
    let mut t = Rat::zero();
    for (i, r) in a.iter().enumerate() {
        t += &r[i];
    }
    t
}

/// `(a ⊗ b)[(i,k),(j,l)] = a[i][j] b[k][l]`.
pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let (n, m) = (a.len(), b.len());
    let mut c = zeros(n * m, n * m);
    for i in 0..n {
        for j in 0..n {
            if a[i][j].is_zero() {
                continue;
            }
            for k in 0..m {
                for l in 0..m {
                    c[i * m + k][j * m + l] = &a[i][j] * &b[k][l];
                }
            }
        }
    }
    c
}

/// The symplectic form `[[0, I], [-I, 0]]` on `K^{2n}`.
pub fn omega(n: usize) -> Mat {
    let mut w = zeros(2 * n, 2 * n);
    for i in 0..n {
        w[i][i + n] = Rat::one();
        w[i + n][i] = Rat::int(-1);
    }
    w
}

/// Dimension of the standard representation at `N = n`.
pub fn rep_dim(system: StdSystem, n: usize) -> usize {
    if system == StdSystem::Sp2N {
        2 * n
    } else {
        n
    }
}

/// A basis of the Lie algebra as matrices. For sp it is the solution space of `Xᵀω + ωX = 0`.
pub fn lie_basis(system: StdSystem, n: usize) -> Vec<Mat> {
    let d = rep_dim(system, n);
    match system {
        StdSystem::GlN => (0..d)
            .flat_map(|i| (0..d).map(move |j| unit(d, i, j)))
            .collect(),
        StdSystem::SlN => {
            let mut out: Vec<Mat> = Vec::new();
            for i in 0..d {
                for j in 0..d {
                    if i != j {
                        out.push(unit(d, i, j));
                    }
                }
            }
            for i in 0..d.saturating_sub(1) {
                let mut m = unit(d, i, i);
                m[i + 1][i + 1] = Rat::int(-1);
                out.push(m);
            }
            out
        }
        StdSystem::SoN => {
            let mut out = Vec::new();
            for i in 0..d {
                for j in i + 1..d {
                    let mut m = unit(d, i, j);
                    m[j][i] = Rat::int(-1);
                    out.push(m);
                }
            }
            out
        }
        StdSystem::Sp2N => {
            // unknown X[a][b] at index a*d + b; equations (Xᵀω + ωX)[i][j] = 0
            let w = omega(n);
            let mut rows = Vec::new();
            for i in 0..d {
                for j in 0..d {
                    let mut r = vec![Rat::zero(); d * d];
                    for k in 0..d {
                        // (Xᵀω)[i][j] = Σ_k X[k][i] ω[k][j]
                        r[k * d + i] += &w[k][j];
                        // (ωX)[i][j] = Σ_k ω[i][k] X[k][j]
                        r[k * d + j] += &w[i][k];
                    }
                    rows.push(r);
                }
            }
            nullspace(&rows, d * d)
                .into_iter()
                .map(|v| (0..d).map(|a| v[a * d..(a + 1) * d].to_vec()).collect())
                .collect()
        }
    }
}

/// Basis and dual basis under the trace form.
pub fn dual_pairs(basis: &[Mat]) -> Result<Vec<(Mat, Mat)>> {
    let g: Vec<Vec<Rat>> = basis
        .iter()
        .map(|a| basis.iter().map(|b| trace(&matmul(a, b))).collect())
        .collect();
    if basis.is_empty() {
        return Ok(Vec::new());
    }
    let gi = invert(&g).ok_or_else(|| Error::Invalid("trace form is degenerate".into()))?;
    let d = basis[0].len();
    Ok(basis
        .iter()
        .enumerate()
        .map(|(a, x)| {
            let mut dual = zeros(d, d);
            for (b, y) in basis.iter().enumerate() {
                add_scaled(&mut dual, y, &gi[a][b]);
            }
            (x.clone(), dual)
        })
        .collect())
}

/// Matrix of a chord diagram on two strands under the standard representation,
/// summing `x_a ⊗ x^a` over each chord.
pub fn chord_matrix(system: StdSystem, n: usize, d: &JDiagram) -> Result<Mat> {
    if !d.is_chord() || d.n_strands() != 2 {
        return Err(Error::Invalid(
            "matrix evaluation needs a chord diagram on two strands".into(),
        ));
    }
    let pairs = dual_pairs(&lie_basis(system, n))?;
    let dim = rep_dim(system, n);
    let l = d.n_legs();
    let chords: Vec<(usize, usize)> = (0..l)
        .filter(|&p| p < d.mate[p] as usize)
        .map(|p| (p, d.mate[p] as usize))
        .collect();
    let off = d.strand_offsets();
    let mut out = zeros(dim * dim, dim * dim);
    if pairs.is_empty() {
        if chords.is_empty() {
            return Ok(identity(dim * dim));
        }
        return Ok(out);
    }
    let g = pairs.len();
    let mut at: Vec<&Mat> = vec![&pairs[0].0; l];
    for state in 0..g.pow(chords.len() as u32) {
        let mut s = state;
        for &(a, b) in &chords {
            let (x, y) = (&pairs[s % g].0, &pairs[s % g].1);
            s /= g;
            at[a] = x;
            at[b] = y;
        }
        let strand = |k: usize| (off[k]..off[k + 1]).fold(identity(dim), |m, p| matmul(&m, at[p]));
        let t = kron(&strand(0), &strand(1));
        add_scaled(&mut out, &t, &Rat::one());
    }
    Ok(out)
}

/// Explicit matrix of a basis operator at `N = n`.
pub fn op_matrix(system: StdSystem, n: usize, op: Op) -> Mat {
    let d = rep_dim(system, n);
    let mut m = zeros(d * d, d * d);
    match op {
        Op::I => return identity(d * d),
        Op::P => {
            for i in 0..d {
                for j in 0..d {
                    add_scaled(&mut m, &kron(&unit(d, i, j), &unit(d, j, i)), &Rat::one());
                }
            }
        }
        Op::K => match system {
            StdSystem::Sp2N => {
                let w = omega(n);
                for a in 0..d {
                    for b in 0..d {
                        for c in 0..d {
                            for e in 0..d {
                                let k = &w[a][c] * &w[b][e];
                                if !k.is_zero() {
                                    add_scaled(&mut m, &kron(&unit(d, a, b), &unit(d, c, e)), &k);
                                }
                            }
                        }
                    }
                }
            }
            _ => {
                for i in 0..d {
                    for j in 0..d {
                        add_scaled(&mut m, &kron(&unit(d, i, j), &unit(d, i, j)), &Rat::one());
                    }
                }
            }
        },
    }
    m
}

/// Symbolic value substituted at `N = n`, as an explicit matrix.
pub fn operator_matrix(x: &OperatorElt, n: usize) -> Result<Mat> {
    let v = x.evaluate(n as i64)?;
    let d = rep_dim(x.system, n);
    let mut m = zeros(d * d, d * d);
    for (op, c) in Op::ALL.into_iter().zip(v.iter()) {
        add_scaled(&mut m, &op_matrix(x.system, n, op), c);
    }
    Ok(m)
}

/// The irreducible sl2 representation of dimension `d` (highest weight `d - 1`), as `(e, f, h)`.
pub fn sl2_irrep(d: usize) -> [Mat; 3] {
    let (mut e, mut f, mut h) = (zeros(d, d), zeros(d, d), zeros(d, d));
    let m = d as i64 - 1;
    for k in 0..d {
        h[k][k] = Rat::int(m - 2 * k as i64);
        if k + 1 < d {
            // f v_k = v_{k+1}, e v_{k+1} = (k+1)(m-k) v_k
            f[k + 1][k] = Rat::one();
            e[k][k + 1] = Rat::int((k as i64 + 1) * (m - k as i64));
        }
    }
    [e, f, h]
}

fn pbw_matrix(rep: &[Mat; 3], m: &PbwMono) -> Mat {
    let d = rep[0].len();
    let mut out = identity(d);
    for _ in 0..m.f {
        out = matmul(&out, &rep[1]);
    }
    for _ in 0..m.h {
        out = matmul(&out, &rep[2]);
    }
    for _ in 0..m.e {
        out = matmul(&out, &rep[0]);
    }
    out
}

/// Image of a rational element of `U(sl2)^{⊗2}` in a representation.
pub fn usl2_matrix(x: &Usl2TensorElt, rep: &[Mat; 3]) -> Result<Mat> {
    if x.strands() != 2 {
        return Err(Error::Invalid(
            "matrix image needs two tensor factors".into(),
        ));
    }
    let d = rep[0].len();
    let mut out = zeros(d * d, d * d);
    for (key, c) in x.terms() {
        let r = c
            .as_rat()
            .ok_or_else(|| Error::Invalid("symbolic coefficient in matrix image".into()))?;
        add_scaled(
            &mut out,
            &kron(&pbw_matrix(rep, &key[0]), &pbw_matrix(rep, &key[1])),
            &r,
        );
    }
    Ok(out)
}

/// Chord diagram evaluated in an sl2 representation with the basis `e, f, h` and its trace-form dual.
pub fn sl2_chord_matrix(rep: &[Mat; 3], d: &JDiagram) -> Result<Mat> {
    if !d.is_chord() || d.n_strands() != 2 {
        return Err(Error::Invalid(
            "matrix evaluation needs a chord diagram on two strands".into(),
        ));
    }
    // duals from the Gram matrix of tr in the two-dimensional representation
    let basis = sl2_irrep(2).to_vec();
    let gram_pairs = dual_pairs(&basis)?;
    // coordinates of each dual in the basis e, f, h
    let coords: Vec<[Rat; 3]> = gram_pairs
        .iter()
        .map(|(_, y)| {
            let (e, f, h) = (y[0][1].clone(), y[1][0].clone(), y[0][0].clone());
            [e, f, h]
        })
        .collect();
    let dim = rep[0].len();
    let mut duals: Vec<Mat> = Vec::new();
    for c in &coords {
        let mut m = zeros(dim, dim);
        for (k, x) in c.iter().enumerate() {
            add_scaled(&mut m, &rep[k], x);
        }
        duals.push(m);
    }
    let l = d.n_legs();
    let chords: Vec<(usize, usize)> = (0..l)
        .filter(|&p| p < d.mate[p] as usize)
        .map(|p| (p, d.mate[p] as usize))
        .collect();
    let off = d.strand_offsets();
    let mut out = zeros(dim * dim, dim * dim);
    let mut at: Vec<&Mat> = vec![&rep[0]; l];
    for state in 0..3usize.pow(chords.len() as u32) {
        let mut s = state;
        for &(a, b) in &chords {
            at[a] = &rep[s % 3];
            at[b] = &duals[s % 3];
            s /= 3;
        }
        let strand = |k: usize| (off[k]..off[k + 1]).fold(identity(dim), |m, p| matmul(&m, at[p]));
        add_scaled(&mut out, &kron(&strand(0), &strand(1)), &Rat::one());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagrams::relations::chord_basis;
    use crate::diagrams::{DiagElt, Signature};
    use crate::scalar::FormalScalar;
    use crate::weights::standard::{chord_value, compose_basis};
    use crate::weights::usl2::weight_universal_sl2;

    #[test]
    fn lie_algebra_dimensions() {
        for n in 1..=3usize {
            assert_eq!(lie_basis(StdSystem::GlN, n).len(), n * n);
            assert_eq!(lie_basis(StdSystem::SlN, n).len(), n * n - 1);
            assert_eq!(lie_basis(StdSystem::SoN, n).len(), n * (n - 1) / 2);
            assert_eq!(lie_basis(StdSystem::Sp2N, n).len(), n * (2 * n + 1));
        }
    }

    #[test]
    fn composition_table_matches_matrices() {
        for s in StdSystem::ALL {
            for n in 1..=3usize {
                for a in Op::ALL {
                    for b in Op::ALL {
                        let (op, k) = compose_basis(s, a, b);
                        let lhs = matmul(&op_matrix(s, n, a), &op_matrix(s, n, b));
                        let x = OperatorElt::basis(s, op).scale(&k);
                        assert_eq!(lhs, operator_matrix(&x, n).unwrap(), "{s} N={n} {a:?}{b:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn state_sums_match_matrices() {
        for s in StdSystem::ALL {
            for n in 1..=3usize {
                let top = if n == 3 && s == StdSystem::Sp2N { 2 } else { 3 };
                for deg in 0..=top {
                    for d in chord_basis(deg, 2) {
                        let sym = chord_value(s, &d).unwrap();
                        assert_eq!(
                            operator_matrix(&sym, n).unwrap(),
                            chord_matrix(s, n, &d).unwrap(),
                            "{s} N={n} {d:?}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn universal_sl2_matches_representations() {
        for dim in [2usize, 3] {
            let rep = sl2_irrep(dim);
            for deg in 0..=3 {
                for d in chord_basis(deg, 2) {
                    let w = weight_universal_sl2(
                        &DiagElt::from_diagram(Signature::Strands(2), &d, FormalScalar::one())
                            .unwrap(),
                    )
                    .unwrap();
                    let got = usl2_matrix(&w, &rep).unwrap();
                    let want = sl2_chord_matrix(&rep, &d).unwrap();
                    assert_eq!(got, want, "dim {dim} {d:?}");
                }
            }
        }
        // the two-dimensional representation is the standard one of sl_2
        let rep = sl2_irrep(2);
        for d in chord_basis(2, 2) {
            let w = weight_universal_sl2(
                &DiagElt::from_diagram(Signature::Strands(2), &d, FormalScalar::one()).unwrap(),
            )
            .unwrap();
            let sym = chord_value(StdSystem::SlN, &d).unwrap();
            assert_eq!(
                usl2_matrix(&w, &rep).unwrap(),
                operator_matrix(&sym, 2).unwrap()
            );
        }
    }
}
