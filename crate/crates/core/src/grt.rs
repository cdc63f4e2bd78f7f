//! The grt1 defining relations, the pentagon and the two hexagons, evaluated in
//! the free Lie algebra on `{A,B}` and in the truncated envelopes `U(t3)`, `U(t4)`.

use crate::error::{Error, Result};
use crate::kohno::{T4Lie, TnElt};
use crate::lie::{LieElt, AB};
use crate::scalar::FormalScalar;

/// Residuals of the three grt1 relations for a Lie series `psi`.
#[derive(Clone, Debug)]
pub struct Grt1Residuals {
    /// `psi(B,A) + psi(A,B)`.
    pub antisymmetry: LieElt,
    /// `psi(C,A) + psi(B,C) + psi(A,B)` with `C = -A-B`.
    pub hexagon: LieElt,
    /// Linearized pentagon in `U(t4)`.
    pub pentagon: TnElt,
}

impl Grt1Residuals {
    pub fn vanish(&self) -> bool {
        self.antisymmetry.is_zero() && self.hexagon.is_zero() && self.pentagon.is_zero()
    }
}

fn check_ab(psi: &LieElt) -> Result<()> {
    if psi.alphabet() != AB.map(String::from) {
        return Err(Error::AlphabetMismatch(
            psi.alphabet().to_vec(),
            AB.map(String::from).to_vec(),
        ));
    }
    Ok(())
}

fn t4(parts: &[(&str, i64)]) -> Result<T4Lie> {
    T4Lie::linear(parts)
}

/// The five pentagon arguments `(X, Y)`, left side first.
fn pentagon_arguments() -> Result<[(T4Lie, T4Lie); 5]> {
    Ok([
        (t4(&[("t12", 1)])?, t4(&[("t23", 1), ("t24", 1)])?),
        (t4(&[("t13", 1), ("t23", 1)])?, t4(&[("t34", 1)])?),
        (t4(&[("t23", 1)])?, t4(&[("t34", 1)])?),
        (
            t4(&[("t12", 1), ("t13", 1)])?,
            t4(&[("t24", 1), ("t34", 1)])?,
        ),
        (t4(&[("t12", 1)])?, t4(&[("t23", 1)])?),
    ])
}

/// Evaluate the three grt1 relations; terms of degree above `cap` are dropped.
pub fn grt1_residuals(psi: &LieElt, cap: usize) -> Result<Grt1Residuals> {
    check_ab(psi)?;
    let psi = psi.truncate(cap);
    let (a, b) = (LieElt::letter(&AB, "A")?, LieElt::letter(&AB, "B")?);
    let c = a.add(&b)?.neg();
    let antisymmetry = psi
        .substitute(&[b.clone(), a.clone()], Some(cap))?
        .add(&psi)?;
    let hexagon = psi
        .substitute(&[c.clone(), a.clone()], Some(cap))?
        .add(&psi.substitute(&[b, c], Some(cap))?)?
        .add(&psi)?;
    let args = pentagon_arguments()?;
    let mut pent = T4Lie::zero();
    for (k, (x, y)) in args.iter().enumerate() {
        let v = psi.substitute(&[x.clone(), y.clone()], Some(cap))?;
        let sign = if k < 2 { 1 } else { -1 };
        crate::lie::LieTarget::add_scaled(&mut pent, &v, &FormalScalar::int(sign));
    }
    Ok(Grt1Residuals {
        antisymmetry,
        hexagon,
        pentagon: pent.to_tn(cap),
    })
}

/// `exp(log_phi(X, Y))` in `U(t_n)` for Lie images `X, Y`.
fn phi_at(log_phi: &LieElt, x: &TnElt, y: &TnElt) -> Result<TnElt> {
    log_phi
        .substitute(&[x.clone(), y.clone()], Some(x.cap()))?
        .exp()
}

/// Pentagon LHS - RHS in `U(t4)` for `phi = exp(log_phi)`.
pub fn pentagon_residual(log_phi: &LieElt, cap: usize) -> Result<TnElt> {
    check_ab(log_phi)?;
    let args = pentagon_arguments()?;
    let mut f = Vec::with_capacity(5);
    for (x, y) in &args {
        let v = log_phi.substitute(&[x.clone(), y.clone()], Some(cap))?;
        f.push(v.to_tn(cap).exp()?);
    }
    let lhs = f[0].product(&f[1])?;
    let rhs = f[2].product(&f[3])?.product(&f[4])?;
    lhs.sub(&rhs)
}

/// Both hexagons, LHS - RHS in `U(t3)`, for the given `mu`.
pub fn hexagon_residuals(
    mu: &FormalScalar,
    log_phi: &LieElt,
    cap: usize,
) -> Result<(TnElt, TnElt)> {
    check_ab(log_phi)?;
    let g = |s: &str| TnElt::generator(3, s, cap);
    let (t12, t13, t23) = (g("t12")?, g("t13")?, g("t23")?);
    let half = mu * &FormalScalar::rat(1, 2);
    let e = |x: &TnElt| x.scale(&half).exp();
    let phi = |x: &TnElt, y: &TnElt| phi_at(log_phi, x, y);
    let phi123 = phi(&t12, &t23)?;

    let lhs1 = e(&t13.add(&t23)?)?;
    let rhs1 = phi(&t13, &t12)?
        .product(&e(&t13)?)?
        .product(&phi(&t13, &t23)?.inverse()?)?
        .product(&e(&t23)?)?
        .product(&phi123)?;

    let lhs2 = e(&t12.add(&t13)?)?;
    let rhs2 = phi(&t23, &t13)?
        .inverse()?
        .product(&e(&t13)?)?
        .product(&phi(&t12, &t13)?)?
        .product(&e(&t12)?)?
        .product(&phi123.inverse()?)?;
    Ok((lhs1.sub(&rhs1)?, lhs2.sub(&rhs2)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{c_generator, ihara_bracket, sigma3, sigma5};
    use crate::scalar::Rat;

    fn c(k: usize, l: usize) -> LieElt {
        c_generator(k, l).unwrap()
    }

    #[test]
    fn sigma3_and_sigma5_lie_in_grt1() {
        assert!(grt1_residuals(&sigma3(), 3).unwrap().vanish());
        assert!(grt1_residuals(&sigma5(), 5).unwrap().vanish());
    }

    #[test]
    fn degree_one_and_c11_fail() {
        let a = LieElt::letter(&AB, "A").unwrap();
        let r = grt1_residuals(&a, 1).unwrap();
        assert!(!r.antisymmetry.is_zero());
        assert_eq!(
            r.antisymmetry,
            a.add(&LieElt::letter(&AB, "B").unwrap()).unwrap()
        );
        // C11 is antisymmetric but violates the pentagon
        let r = grt1_residuals(&c(1, 1), 2).unwrap();
        assert!(r.antisymmetry.is_zero());
        assert!(!r.vanish());
    }

    #[test]
    fn bracket_of_sigma3_sigma5_is_grt1_up_to_degree_eight() {
        let b = ihara_bracket(&sigma3(), &sigma5()).unwrap();
        let r = grt1_residuals(&b, 8).unwrap();
        assert!(r.antisymmetry.is_zero() && r.hexagon.is_zero());
    }

    #[test]
    fn trivial_and_failing_inputs() {
        let zero = LieElt::zero(&AB);
        assert!(pentagon_residual(&zero, 5).unwrap().is_zero());
        let (h1, h2) = hexagon_residuals(&FormalScalar::one(), &zero, 2).unwrap();
        assert!(!h1.is_zero() || !h2.is_zero());
        let (h1, h2) = hexagon_residuals(&FormalScalar::zero(), &zero, 4).unwrap();
        assert!(h1.is_zero() && h2.is_zero());
    }

    #[test]
    fn degree_two_associator_passes_pentagon_to_three() {
        let l = c(1, 1).scale_rat(&Rat::new(1, 24));
        assert!(pentagon_residual(&l, 3).unwrap().is_zero());
        let (h1, h2) = hexagon_residuals(&FormalScalar::one(), &l, 3).unwrap();
        assert!(h1.is_zero() && h2.is_zero());
        let (h1, _) =
            hexagon_residuals(&FormalScalar::one(), &l.scale_rat(&Rat::int(2)), 2).unwrap();
        assert!(!h1.is_zero());
    }
}
