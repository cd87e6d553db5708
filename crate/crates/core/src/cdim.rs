//! The cd_p calculators and the orchestrator that demands agreement
//! among every applicable method.
//!
//! Methods: the closed formula N + n − Σ d_{i,p}, the p-exceptional sum
//! Σ d_i'(p^{k_i} − 1) for odd p, the direct characteristic-map
//! computation, exact division of Poincaré series through Ch(G), and
//! the mod-2 cohomology formula driven by external data. Disagreement
//! is a hard failure: the cross-validation is the point.

use crate::budget::Budget;
use crate::charmap::{compute_char_image, CharImageResult, RecoveryOutcome};
use crate::error::{CoreError, Result};
use crate::polyalg::{exact_divide, quantum_factor_product, IntPoly};
use crate::rootsys::{build_root_system, degrees, torsion_primes, GroupSpec, TorsionData};
use num_traits::{One, Signed};
use std::collections::BTreeMap;
use std::fmt;

/// The five computation routes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    ClosedForm,
    PExceptional,
    DirectCharmap,
    ChowOfG,
    CohomologyP2,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::ClosedForm,
        Method::PExceptional,
        Method::DirectCharmap,
        Method::ChowOfG,
        Method::CohomologyP2,
    ];

    pub fn token(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::PExceptional => "p_exceptional",
            Method::DirectCharmap => "direct_charmap",
            Method::ChowOfG => "chow_of_G",
            Method::CohomologyP2 => "cohomology_p2",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// A degree d = d'·p^k with p ∤ d' and k ≥ 1, factored maximally.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PExceptionalDegree {
    pub d: u64,
    pub d_prime: u64,
    pub k: u32,
}

impl PExceptionalDegree {
    pub fn new(d: u64, p: u32) -> Result<Self> {
        if d == 0 {
            return Err(CoreError::input("degree must be positive".to_string()));
        }
        let p64 = p as u64;
        let mut d_prime = d;
        let mut k = 0u32;
        while d_prime % p64 == 0 {
            d_prime /= p64;
            k += 1;
        }
        if k == 0 {
            return Err(CoreError::input(format!(
                "degree {d} is not divisible by p = {p}"
            )));
        }
        Ok(PExceptionalDegree { d, d_prime, k })
    }

    pub fn contribution(&self, p: u32) -> u64 {
        self.d_prime * ((p as u64).pow(self.k) - 1)
    }
}

/// External mod-2 cohomology data for one group: the Poincaré
/// polynomial of H(G; Z/2) and the odd generator degrees, with a
/// mandatory literature citation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohomologyInput {
    pub poincare: IntPoly,
    pub odd_generator_degrees: Vec<u64>,
    pub provenance: String,
}

impl CohomologyInput {
    pub fn new(
        poincare: IntPoly,
        odd_generator_degrees: Vec<u64>,
        provenance: String,
    ) -> Result<Self> {
        if poincare.is_zero() || !poincare.coeff(0).is_one() {
            return Err(CoreError::input(
                "cohomology Poincaré polynomial must have constant term 1".to_string(),
            ));
        }
        if poincare.coeffs().iter().any(Signed::is_negative) {
            return Err(CoreError::input(
                "cohomology Poincaré polynomial must have nonnegative coefficients".to_string(),
            ));
        }
        if let Some(bad) = odd_generator_degrees.iter().find(|&&d| d % 2 == 0) {
            return Err(CoreError::input(format!(
                "generator degree {bad} is even; the exterior generators must be odd"
            )));
        }
        let total: u64 = odd_generator_degrees.iter().sum();
        let deg = poincare.degree().unwrap() as u64;
        if total > deg {
            return Err(CoreError::input(format!(
                "odd generator degrees sum to {total}, past deg P = {deg}"
            )));
        }
        if (deg - total) % 2 != 0 {
            return Err(CoreError::input(format!(
                "deg P − Σ deg(a_i) = {} is odd",
                deg - total
            )));
        }
        if provenance.trim().is_empty() {
            return Err(CoreError::input(
                "cohomology data needs a provenance citation".to_string(),
            ));
        }
        Ok(CohomologyInput {
            poincare,
            odd_generator_degrees,
            provenance,
        })
    }
}

/// cd_p = N + n − Σ d_{i,p}.
pub fn cd_closed_form(num_pos: u64, rank: usize, mod_p_degrees: &[u64]) -> Result<u64> {
    if mod_p_degrees.len() != rank {
        return Err(CoreError::input(format!(
            "expected {rank} mod-p degrees, got {}",
            mod_p_degrees.len()
        )));
    }
    let sum: u64 = mod_p_degrees.iter().sum();
    let drop: u64 = mod_p_degrees.iter().map(|d| d - 1).sum();
    if drop > num_pos {
        return Err(CoreError::consistency(format!(
            "Σ(d_i,p − 1) = {drop} exceeds N = {num_pos}; the inputs cannot be genuine"
        )));
    }
    Ok(num_pos + rank as u64 - sum)
}

/// cd_p = Σ d_i'·(p^{k_i} − 1) over the p-exceptional degrees, odd p.
pub fn cd_from_p_exceptional(degrees: &[PExceptionalDegree], p: u32) -> Result<u64> {
    if p == 2 {
        return Err(CoreError::input(
            "the p-exceptional formula is stated for odd torsion primes; \
             use the mod-2 cohomology method instead"
                .to_string(),
        ));
    }
    if !crate::charmap::is_prime(p) {
        return Err(CoreError::input(format!("{p} is not a prime")));
    }
    for d in degrees {
        let check = PExceptionalDegree::new(d.d, p)?;
        if check != *d {
            return Err(CoreError::input(format!(
                "invalid factorization {} = {}·{}^{}",
                d.d, d.d_prime, p, d.k
            )));
        }
    }
    Ok(degrees.iter().map(|d| d.contribution(p)).sum())
}

/// cd_p = deg of P(Ch(X),t) / P(R_p,t); exactness is the freeness check.
pub fn cd_via_group_chow(p_chow_x: &IntPoly, p_r: &IntPoly) -> Result<(u64, IntPoly)> {
    let quotient = exact_divide(p_chow_x, p_r).map_err(|f| {
        CoreError::consistency(format!(
            "P(Ch(X)) is not divisible by P(R_p): {f}; \
             either the inputs are wrong or freeness fails"
        ))
    })?;
    let deg = quotient
        .degree()
        .ok_or_else(|| CoreError::consistency("zero quotient series".to_string()))?;
    Ok((deg as u64, quotient))
}

/// cd_2 = ½(deg P(H(G;Z/2), t) − Σ deg(a_i)).
pub fn cd_p2_cohomology(input: &CohomologyInput) -> u64 {
    let deg = input.poincare.degree().unwrap() as u64;
    let total: u64 = input.odd_generator_degrees.iter().sum();
    (deg - total) / 2
}

/// Try to express the drop from the classical to the recovered mod-p
/// degrees as a p-exceptional replacement: cancel the common entries,
/// then pair each leftover classical degree d with the leftover
/// recovered degree d/p^{v_p(d)}. Returns None when no such pairing
/// exists (the decomposition need not exist; it is exposed, not
/// assumed).
pub fn derive_p_exceptional(
    classical: &[u64],
    recovered: &[u64],
    p: u32,
) -> Option<Vec<PExceptionalDegree>> {
    let mut pool: BTreeMap<u64, i64> = BTreeMap::new();
    for &d in classical {
        *pool.entry(d).or_insert(0) += 1;
    }
    let mut leftover_recovered: Vec<u64> = Vec::new();
    for &d in recovered {
        match pool.get_mut(&d) {
            Some(c) if *c > 0 => *c -= 1,
            _ => leftover_recovered.push(d),
        }
    }
    let mut result = Vec::new();
    for (&d, &count) in &pool {
        for _ in 0..count {
            let exc = PExceptionalDegree::new(d, p).ok()?;
            let slot = leftover_recovered.iter().position(|&b| b == exc.d_prime)?;
            leftover_recovered.swap_remove(slot);
            result.push(exc);
        }
    }
    leftover_recovered.is_empty().then_some(result)
}

/// Method-specific payload attached to a result.
#[derive(Debug, Clone)]
pub enum Support {
    Direct(CharImageResult),
    ClosedForm { mod_p_degrees: Vec<u64> },
    Chow { quotient: IntPoly },
    PExceptional { degrees: Vec<PExceptionalDegree> },
    Cohomology { poincare_degree: u64, odd_sum: u64, provenance: String },
}

/// One computed cd value.
#[derive(Debug, Clone)]
pub struct CdResult {
    pub spec: GroupSpec,
    pub prime: u32,
    pub method: Method,
    pub cd: u64,
    pub support: Support,
}

/// Computed or skipped, per method.
#[derive(Debug, Clone)]
pub enum MethodOutcome {
    Computed(CdResult),
    Skipped { method: Method, reason: String },
}

impl MethodOutcome {
    pub fn method(&self) -> Method {
        match self {
            MethodOutcome::Computed(r) => r.method,
            MethodOutcome::Skipped { method, .. } => *method,
        }
    }

    pub fn cd(&self) -> Option<u64> {
        match self {
            MethodOutcome::Computed(r) => Some(r.cd),
            MethodOutcome::Skipped { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// At least one method computed and all computed values coincide.
    Agree,
    /// Nothing was computable within the inputs and budget.
    NoData,
}

impl Verdict {
    pub fn token(self) -> &'static str {
        match self {
            Verdict::Agree => "agree",
            Verdict::NoData => "no_data",
        }
    }
}

/// Full cross-check report for one (group, prime) pair.
#[derive(Debug, Clone)]
pub struct CdReport {
    pub spec: GroupSpec,
    pub prime: u32,
    pub outcomes: Vec<MethodOutcome>,
    pub verdict: Verdict,
    pub cd: Option<u64>,
    pub torsion: TorsionData,
}

/// Run every applicable method and demand agreement.
///
/// `cohomology` supplies the external H(G; Z/2) record when the caller
/// has one that matches the spec.
pub fn compute_all(
    spec: GroupSpec,
    p: u32,
    budget: &Budget,
    cohomology: Option<&CohomologyInput>,
) -> Result<CdReport> {
    compute_all_with_direct(spec, p, budget, cohomology, None)
}

/// As [`compute_all`], with the direct characteristic-map result
/// supplied by the caller (for example from a cover cache) instead of
/// being recomputed.
pub fn compute_all_with_direct(
    spec: GroupSpec,
    p: u32,
    budget: &Budget,
    cohomology: Option<&CohomologyInput>,
    precomputed: Option<CharImageResult>,
) -> Result<CdReport> {
    if !crate::charmap::is_prime(p) {
        return Err(CoreError::input(format!("{p} is not a prime")));
    }
    let rs = build_root_system(spec)?;
    let profile = degrees(&rs);
    let num_pos = rs.num_positive_roots() as u64;
    let rank = rs.rank();
    let torsion = torsion_primes(spec)?;

    let mut outcomes: Vec<MethodOutcome> = Vec::new();

    let direct_attempt = match precomputed {
        Some(res) => {
            if res.spec != spec || res.prime != p {
                return Err(CoreError::precondition(format!(
                    "precomputed image is for {} at p = {}, not {spec} at p = {p}",
                    res.spec, res.prime
                )));
            }
            Ok(res)
        }
        None => compute_char_image(spec, p, budget),
    };
    let direct = match direct_attempt {
        Ok(res) => {
            outcomes.push(MethodOutcome::Computed(CdResult {
                spec,
                prime: p,
                method: Method::DirectCharmap,
                cd: res.cd,
                support: Support::Direct(res.clone()),
            }));
            Some(res)
        }
        Err(CoreError::Infeasible(reason)) => {
            outcomes.push(MethodOutcome::Skipped {
                method: Method::DirectCharmap,
                reason,
            });
            None
        }
        Err(other) => return Err(other),
    };

    // Closed form needs the recovered mod-p degrees.
    match direct.as_ref().map(|d| &d.recovery) {
        Some(RecoveryOutcome::Recovered(degs)) => {
            let cd = cd_closed_form(num_pos, rank, degs)?;
            outcomes.push(MethodOutcome::Computed(CdResult {
                spec,
                prime: p,
                method: Method::ClosedForm,
                cd,
                support: Support::ClosedForm {
                    mod_p_degrees: degs.clone(),
                },
            }));
        }
        Some(RecoveryOutcome::Unrecovered(f)) => {
            outcomes.push(MethodOutcome::Skipped {
                method: Method::ClosedForm,
                reason: format!("mod-p degree recovery failed: {f}"),
            });
        }
        None => {
            outcomes.push(MethodOutcome::Skipped {
                method: Method::ClosedForm,
                reason: "needs the degrees recovered by the direct method".to_string(),
            });
        }
    }

    // Exact division P(Ch X) / P(R_p).
    if let Some(res) = direct.as_ref() {
        let p_chow_x = quantum_factor_product(&profile.degrees);
        let (cd, quotient) = cd_via_group_chow(&p_chow_x, &res.hilbert)?;
        outcomes.push(MethodOutcome::Computed(CdResult {
            spec,
            prime: p,
            method: Method::ChowOfG,
            cd,
            support: Support::Chow { quotient },
        }));
    } else {
        outcomes.push(MethodOutcome::Skipped {
            method: Method::ChowOfG,
            reason: "needs the Hilbert series from the direct method".to_string(),
        });
    }

    // p-exceptional sum, odd primes only.
    if p == 2 {
        outcomes.push(MethodOutcome::Skipped {
            method: Method::PExceptional,
            reason: "stated for odd torsion primes; the mod-2 route is the cohomology method"
                .to_string(),
        });
    } else {
        match direct.as_ref().and_then(|d| d.recovery.degrees()) {
            Some(recovered) => match derive_p_exceptional(&profile.degrees, recovered, p) {
                Some(exc) => {
                    let cd = cd_from_p_exceptional(&exc, p)?;
                    outcomes.push(MethodOutcome::Computed(CdResult {
                        spec,
                        prime: p,
                        method: Method::PExceptional,
                        cd,
                        support: Support::PExceptional { degrees: exc },
                    }));
                }
                None => {
                    outcomes.push(MethodOutcome::Skipped {
                        method: Method::PExceptional,
                        reason: "the degree drop does not factor as a p-exceptional replacement"
                            .to_string(),
                    });
                }
            },
            None => {
                outcomes.push(MethodOutcome::Skipped {
                    method: Method::PExceptional,
                    reason: "needs the degrees recovered by the direct method".to_string(),
                });
            }
        }
    }

    // Mod-2 cohomology, data-driven.
    if p != 2 {
        outcomes.push(MethodOutcome::Skipped {
            method: Method::CohomologyP2,
            reason: "only defined at p = 2".to_string(),
        });
    } else if let Some(input) = cohomology {
        outcomes.push(MethodOutcome::Computed(CdResult {
            spec,
            prime: p,
            method: Method::CohomologyP2,
            cd: cd_p2_cohomology(input),
            support: Support::Cohomology {
                poincare_degree: input.poincare.degree().unwrap() as u64,
                odd_sum: input.odd_generator_degrees.iter().sum(),
                provenance: input.provenance.clone(),
            },
        }));
    } else {
        outcomes.push(MethodOutcome::Skipped {
            method: Method::CohomologyP2,
            reason: "requires an external cohomology data record".to_string(),
        });
    }

    let computed: Vec<&CdResult> = outcomes
        .iter()
        .filter_map(|o| match o {
            MethodOutcome::Computed(r) => Some(r),
            MethodOutcome::Skipped { .. } => None,
        })
        .collect();

    let verdict;
    let cd;
    if computed.is_empty() {
        verdict = Verdict::NoData;
        cd = None;
    } else {
        let first = computed[0].cd;
        if computed.iter().any(|r| r.cd != first) {
            let listing: Vec<String> = computed
                .iter()
                .map(|r| format!("{} -> {} ({:?})", r.method, r.cd, r.support))
                .collect();
            return Err(CoreError::consistency(format!(
                "methods disagree for {spec} at p = {p}: {}",
                listing.join("; ")
            )));
        }
        for r in &computed {
            if r.cd > num_pos {
                return Err(CoreError::consistency(format!(
                    "{} returned cd = {} past N = {num_pos} for {spec}",
                    r.method, r.cd
                )));
            }
        }
        verdict = Verdict::Agree;
        cd = Some(first);
    }

    // The torsion table is cross-checked against the computation
    // whenever it is authoritative for this prime.
    if let Some(value) = cd {
        let authoritative = torsion.complete || matches!(p, 2 | 3 | 5);
        if authoritative && (value > 0) != torsion.contains(p) {
            return Err(CoreError::consistency(format!(
                "torsion table lists {:?} for {spec} but cd_{p} = {value}",
                torsion.primes
            )));
        }
    }

    Ok(CdReport {
        spec,
        prime: p,
        outcomes,
        verdict,
        cd,
        torsion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::{Family, Isogeny};

    fn sc(family: Family, rank: usize) -> GroupSpec {
        GroupSpec::new(family, rank, Isogeny::SimplyConnected).unwrap()
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(cd_closed_form(24, 4, &[2, 4, 6, 8]).unwrap(), 8);
        // Classical degrees give zero because Σ(d_i − 1) = N.
        assert_eq!(cd_closed_form(6, 3, &[2, 3, 4]).unwrap(), 0);
        assert_eq!(
            cd_closed_form(120, 8, &[2, 6, 8, 12, 14, 18, 20, 24]).unwrap(),
            24
        );
        assert!(cd_closed_form(6, 2, &[2, 3, 4]).is_err());
        assert!(matches!(
            cd_closed_form(3, 2, &[4, 4]),
            Err(CoreError::Consistency(_))
        ));
    }

    #[test]
    fn p_exceptional_examples() {
        assert_eq!(cd_from_p_exceptional(&[], 3).unwrap(), 0);
        let nine = PExceptionalDegree::new(9, 3).unwrap();
        assert_eq!((nine.d_prime, nine.k), (1, 2));
        assert_eq!(cd_from_p_exceptional(&[nine], 3).unwrap(), 8);
        let thirty5 = PExceptionalDegree::new(30, 5).unwrap();
        assert_eq!(cd_from_p_exceptional(&[thirty5], 5).unwrap(), 24);
        let thirty3 = PExceptionalDegree::new(30, 3).unwrap();
        assert_eq!(cd_from_p_exceptional(&[nine, thirty3], 3).unwrap(), 28);
        assert!(cd_from_p_exceptional(&[nine], 2).is_err());
        assert!(PExceptionalDegree::new(7, 3).is_err());
    }

    #[test]
    fn chow_division_examples() {
        let series = quantum_factor_product(&[2, 3]);
        assert_eq!(cd_via_group_chow(&series, &series).unwrap().0, 0);

        let perturbed = quantum_factor_product(&[2, 4]);
        assert!(cd_via_group_chow(&series, &perturbed).is_err());
    }

    #[test]
    fn cohomology_formula_and_validation() {
        let trivial = CohomologyInput::new(
            quantum_factor_product(&[4, 6]),
            vec![3, 5],
            "synthetic".to_string(),
        )
        .unwrap();
        assert_eq!(cd_p2_cohomology(&trivial), 0);

        let mut coeffs = vec![0u64; 249];
        coeffs[0] = 1;
        coeffs[248] = 1;
        let e8ish = CohomologyInput::new(
            IntPoly::from_u64_coeffs(&coeffs),
            vec![3, 5, 9, 15, 17, 23, 27, 29],
            "synthetic shape of the E8 record".to_string(),
        )
        .unwrap();
        assert_eq!(cd_p2_cohomology(&e8ish), 60);

        assert!(CohomologyInput::new(
            quantum_factor_product(&[4, 6]),
            vec![4, 4],
            "even degrees".to_string()
        )
        .is_err());
        assert!(CohomologyInput::new(
            quantum_factor_product(&[4, 6]),
            vec![3, 5],
            "  ".to_string()
        )
        .is_err());
    }

    #[test]
    fn derivation_pairs_the_degree_drop() {
        // F4 at p = 3: classical {2,6,8,12}, recovered {2,4,6,8}.
        let exc = derive_p_exceptional(&[2, 6, 8, 12], &[2, 4, 6, 8], 3).unwrap();
        assert_eq!(exc.len(), 1);
        assert_eq!((exc[0].d, exc[0].d_prime, exc[0].k), (12, 4, 1));
        assert_eq!(cd_from_p_exceptional(&exc, 3).unwrap(), 8);

        // No pairing when the drop is not a p-power replacement.
        assert!(derive_p_exceptional(&[2, 6, 8, 12], &[2, 5, 6, 8], 3).is_none());
    }

    #[test]
    fn compute_all_f4_at_3_agrees_on_8() {
        let report = compute_all(sc(Family::F, 4), 3, &Budget::default(), None).unwrap();
        assert_eq!(report.cd, Some(8));
        assert_eq!(report.verdict, Verdict::Agree);
        let computed: Vec<Method> = report
            .outcomes
            .iter()
            .filter(|o| o.cd().is_some())
            .map(|o| o.method())
            .collect();
        assert!(computed.contains(&Method::DirectCharmap));
        assert!(computed.contains(&Method::ClosedForm));
        assert!(computed.contains(&Method::ChowOfG));
        assert!(computed.contains(&Method::PExceptional));
    }

    #[test]
    fn compute_all_non_torsion_is_zero() {
        let report = compute_all(sc(Family::A, 3), 2, &Budget::default(), None).unwrap();
        assert_eq!(report.cd, Some(0));
        assert_eq!(report.verdict, Verdict::Agree);
    }

    #[test]
    fn compute_all_e8_default_reports_skips() {
        let report = compute_all(sc(Family::E, 8), 2, &Budget::default(), None).unwrap();
        assert_eq!(report.verdict, Verdict::NoData);
        assert!(report.cd.is_none());
        assert!(report
            .outcomes
            .iter()
            .all(|o| matches!(o, MethodOutcome::Skipped { .. })));
    }

    #[test]
    fn disagreement_is_a_hard_failure() {
        // A fabricated cohomology record claiming cd_2(SL_4) = 1.
        let fake = CohomologyInput::new(
            IntPoly::from_u64_coeffs(&[1, 0, 0, 1, 0, 1, 1, 0, 1, 0, 0, 1, 0, 0, 0, 1]),
            vec![3, 5, 5],
            "fabricated for the disagreement test".to_string(),
        )
        .unwrap();
        assert_eq!(cd_p2_cohomology(&fake), 1);
        let err = compute_all(sc(Family::A, 3), 2, &Budget::default(), Some(&fake)).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("disagree"), "{msg}");
        assert!(msg.contains("cohomology_p2"), "{msg}");
    }
}
