//! Exact integer polynomial arithmetic for Poincaré/Hilbert series:
//! products of q-integer factors, exact division, and recovery of the
//! degree multiset behind a complete-intersection Hilbert series.
//!
//! Coefficients are arbitrary-precision integers; the Poincaré
//! polynomial of W(E8) has middle coefficients past 32 bits and no
//! silent overflow is acceptable.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Integer-coefficient polynomial in one variable, dense
/// representation, normalized so the trailing coefficient is nonzero.
/// The zero polynomial has an empty coefficient vector and no degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        IntPoly::constant(1)
    }

    pub fn constant(c: i64) -> Self {
        IntPoly::from_coeffs(vec![BigInt::from(c)])
    }

    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_u64_coeffs(coeffs: &[u64]) -> Self {
        IntPoly::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// 1 - t^e
    pub fn one_minus_power(e: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); e + 1];
        coeffs[0] = BigInt::one();
        coeffs[e] = -BigInt::one();
        IntPoly::from_coeffs(coeffs)
    }

    /// 1 + t + … + t^{d-1}
    pub fn q_integer(d: u64) -> Self {
        IntPoly::from_coeffs(vec![BigInt::one(); d as usize])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Degree of a nonzero polynomial. None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeffs_u64(&self) -> Option<Vec<u64>> {
        self.coeffs.iter().map(|c| u64::try_from(c).ok()).collect()
    }

    pub fn eval_at_one(&self) -> BigInt {
        self.coeffs.iter().sum()
    }

    pub fn is_palindromic(&self) -> bool {
        let n = self.coeffs.len();
        (0..n / 2).all(|k| self.coeffs[k] == self.coeffs[n - 1 - k])
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        IntPoly::from_coeffs(out)
    }

    pub fn sub(&self, other: &IntPoly) -> IntPoly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(len);
        for k in 0..len {
            out.push(self.coeff(k) - other.coeff(k));
        }
        IntPoly::from_coeffs(out)
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if first {
                first = false;
            } else if c.is_negative() {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            let mag = c.abs();
            let lead_neg = first && c.is_negative();
            let sign = if lead_neg { "-" } else { "" };
            match k {
                0 => write!(f, "{sign}{mag}")?,
                1 if mag.is_one() => write!(f, "{sign}t")?,
                1 => write!(f, "{sign}{mag}t")?,
                _ if mag.is_one() => write!(f, "{sign}t^{k}")?,
                _ => write!(f, "{sign}{mag}t^{k}")?,
            }
        }
        Ok(())
    }
}

/// Π (1 + t + … + t^{d-1}) over the multiset. The empty multiset gives
/// the constant 1. Degree is Σ(d-1) and the value at t=1 is Π d.
pub fn quantum_factor_product(degree_list: &[u64]) -> IntPoly {
    assert!(
        degree_list.iter().all(|&d| d >= 1),
        "quantum factors need degrees >= 1"
    );
    degree_list
        .iter()
        .fold(IntPoly::one(), |acc, &d| acc.mul(&IntPoly::q_integer(d)))
}

/// Non-exact division outcome: the lowest degree at which the remainder
/// is nonzero, plus the remainder itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisionFailure {
    pub remainder_degree: usize,
    pub remainder: IntPoly,
}

impl fmt::Display for DivisionFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "division leaves a nonzero remainder from degree {} ({})",
            self.remainder_degree, self.remainder
        )
    }
}

/// Exact polynomial division. The denominator must have constant term 1,
/// which makes the candidate quotient a plain integer recursion from the
/// low end; the full product is then checked so a failure is never
/// silently truncated.
pub fn exact_divide(numerator: &IntPoly, denominator: &IntPoly) -> Result<IntPoly, DivisionFailure> {
    assert!(
        !denominator.is_zero() && denominator.coeff(0).is_one(),
        "denominator must be nonzero with constant term 1"
    );
    if numerator.is_zero() {
        return Ok(IntPoly::zero());
    }
    let num_deg = numerator.degree().unwrap();
    let den_deg = denominator.degree().unwrap();

    let quotient = if num_deg < den_deg {
        IntPoly::zero()
    } else {
        let q_deg = num_deg - den_deg;
        let mut q = vec![BigInt::zero(); q_deg + 1];
        for k in 0..=q_deg {
            let mut acc = numerator.coeff(k);
            for j in k.saturating_sub(den_deg)..k {
                let dk = denominator.coeff(k - j);
                if !dk.is_zero() {
                    acc -= &q[j] * dk;
                }
            }
            q[k] = acc;
        }
        IntPoly::from_coeffs(q)
    };

    let remainder = numerator.sub(&quotient.mul(denominator));
    if remainder.is_zero() {
        Ok(quotient)
    } else {
        let remainder_degree = remainder
            .coeffs()
            .iter()
            .position(|c| !c.is_zero())
            .expect("nonzero remainder has a nonzero coefficient");
        Err(DivisionFailure {
            remainder_degree,
            remainder,
        })
    }
}

/// Failed degree-multiset recovery: what was extracted before the
/// structure broke, and the residual that would not factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecoveryFailure {
    pub partial: Vec<u64>,
    pub residual: IntPoly,
    pub reason: String,
}

impl fmt::Display for RecoveryFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "degree recovery failed ({}); partial multiset {:?}, residual {}",
            self.reason, self.partial, self.residual
        )
    }
}

/// Recover the unique multiset {e_1..e_n} with
/// `hilbert = Π (1 + … + t^{e_j - 1})`, or report failure.
///
/// Route: multiply by (1-t)^n, which turns the product into
/// Π(1-t^{e_j}), then peel factors lowest degree first. At each step the
/// lowest positive-degree coefficient must be a negative count of the
/// smallest remaining e; anything else localizes the inconsistency.
pub fn recover_degree_multiset(hilbert: &IntPoly, n: usize) -> Result<Vec<u64>, RecoveryFailure> {
    let fail = |partial: &[u64], residual: &IntPoly, reason: &str| RecoveryFailure {
        partial: partial.to_vec(),
        residual: residual.clone(),
        reason: reason.to_string(),
    };

    if hilbert.is_zero() || !hilbert.coeff(0).is_one() {
        return Err(fail(&[], hilbert, "input is not a Hilbert series with constant term 1"));
    }
    if hilbert.coeffs().iter().any(|c| c.is_negative()) {
        return Err(fail(&[], hilbert, "input has negative coefficients"));
    }

    let one_minus_t = IntPoly::one_minus_power(1);
    let mut g = hilbert.clone();
    for _ in 0..n {
        g = g.mul(&one_minus_t);
    }

    let mut found: Vec<u64> = Vec::new();
    while !g.is_one() {
        if found.len() == n {
            return Err(fail(&found, &g, "residual nontrivial after n factors"));
        }
        let Some(e) = g.coeffs().iter().skip(1).position(|c| !c.is_zero()).map(|i| i + 1)
        else {
            return Err(fail(&found, &g, "residual is constant but not 1"));
        };
        if g.coeff(e).is_positive() {
            return Err(fail(
                &found,
                &g,
                &format!("coefficient at degree {e} is positive; no factor 1 - t^e fits"),
            ));
        }
        match exact_divide(&g, &IntPoly::one_minus_power(e)) {
            Ok(q) => {
                g = q;
                found.push(e as u64);
            }
            Err(_) => {
                return Err(fail(
                    &found,
                    &g,
                    &format!("residual is not divisible by 1 - t^{e}"),
                ));
            }
        }
    }
    if found.len() != n {
        return Err(fail(
            &found,
            &g,
            &format!("recovered {} factors, expected {n}", found.len()),
        ));
    }
    found.sort_unstable();
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn quantum_product_small_cases() {
        assert_eq!(quantum_factor_product(&[]), IntPoly::one());
        assert_eq!(
            quantum_factor_product(&[2]),
            IntPoly::from_u64_coeffs(&[1, 1])
        );
        // Hand expansion; equals the W(A2) length counts.
        assert_eq!(
            quantum_factor_product(&[2, 3]),
            IntPoly::from_u64_coeffs(&[1, 2, 2, 1])
        );
    }

    #[test]
    fn f4_quantum_product_has_weyl_order_mass() {
        let p = quantum_factor_product(&[2, 6, 8, 12]);
        assert_eq!(p.degree(), Some(24));
        assert_eq!(p.eval_at_one(), BigInt::from(1152));
        assert!(p.is_palindromic());
    }

    #[test]
    fn exact_divide_examples() {
        let a2 = IntPoly::from_u64_coeffs(&[1, 2, 2, 1]);
        let q = exact_divide(&a2, &IntPoly::from_u64_coeffs(&[1, 1])).unwrap();
        assert_eq!(q, IntPoly::from_u64_coeffs(&[1, 1, 1]));

        assert_eq!(exact_divide(&a2, &a2).unwrap(), IntPoly::one());

        let err = exact_divide(
            &IntPoly::from_u64_coeffs(&[1, 1, 1]),
            &IntPoly::from_u64_coeffs(&[1, 1]),
        )
        .unwrap_err();
        // Candidate quotient is 1 with remainder t + t^2 ... forced
        // remainder starting where the factor structure breaks.
        assert!(err.remainder_degree >= 1);
        assert!(!err.remainder.is_zero());
    }

    #[test]
    fn recovery_small_cases() {
        assert_eq!(
            recover_degree_multiset(&IntPoly::from_u64_coeffs(&[1, 1]), 1).unwrap(),
            vec![2]
        );
        // Degree-1 factors are legal and recoverable via the count.
        assert_eq!(
            recover_degree_multiset(&IntPoly::one(), 2).unwrap(),
            vec![1, 1]
        );
        let err = recover_degree_multiset(&IntPoly::from_u64_coeffs(&[1, 2]), 1).unwrap_err();
        assert!(err.partial.is_empty());
    }

    #[test]
    fn recovery_count_mismatch() {
        let h = quantum_factor_product(&[2, 3]);
        // Too few slots cannot be padded.
        assert!(recover_degree_multiset(&h, 1).is_err());
        // Extra slots are absorbed by degree-1 factors.
        assert_eq!(recover_degree_multiset(&h, 3).unwrap(), vec![1, 2, 3]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        // Criterion-level round trip: product then recovery is the
        // identity on multisets.
        #[test]
        fn product_then_recovery_round_trips(
            mut degrees in proptest::collection::vec(1u64..=30, 1..=8)
        ) {
            degrees.sort_unstable();
            let h = quantum_factor_product(&degrees);
            let recovered = recover_degree_multiset(&h, degrees.len()).unwrap();
            prop_assert_eq!(recovered, degrees);
        }

        #[test]
        fn divide_undoes_multiply(
            a in proptest::collection::vec(-9i64..=9, 1..=12),
            b in proptest::collection::vec(-9i64..=9, 0..=11),
        ) {
            let mut bc = vec![BigInt::from(1)];
            bc.extend(b.iter().map(|&x| BigInt::from(x)));
            let divisor = IntPoly::from_coeffs(bc);
            let quotient = IntPoly::from_coeffs(a.iter().map(|&x| BigInt::from(x)).collect());
            let product = quotient.mul(&divisor);
            let back = exact_divide(&product, &divisor).unwrap();
            prop_assert_eq!(back, quotient);
        }

        #[test]
        fn quantum_degree_and_mass(degrees in proptest::collection::vec(1u64..=20, 0..=6)) {
            let p = quantum_factor_product(&degrees);
            let expected_degree: u64 = degrees.iter().map(|d| d - 1).sum();
            prop_assert_eq!(p.degree(), Some(expected_degree as usize));
            let mass: u64 = degrees.iter().product();
            prop_assert_eq!(p.eval_at_one(), BigInt::from(mass));
        }
    }
}
