//! End-to-end harmonic balance solve: balance equations, lex basis,
//! certified roots, back-substitution and residual-based selection.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::algebra::{format_fixed, format_significant, pi_enclosure, sqrt_enclosure, MultiPoly, RatInterval, Rational};
use crate::error::{HbmError, Result};
use crate::groebner::{eliminate_univariate, lex_basis, Budget, GroebnerBasis, GroebnerStats, LexStrategy};
use crate::realroots::{
    back_substitute, isolate_positive_roots, refine, relative_tolerance, root_is_shared, RootEnclosure,
    SolutionEnclosure, UniPoly,
};
use crate::trigring::{build_hbm_system_with_amplitude, parseval_norm_at, HbmSystem};

/// Bits kept when enclosures are rounded before residual evaluation.
const RANKING_BITS: u32 = 256;

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Significant decimal digits for ω and C_N.
    pub digits: usize,
    pub budget: Budget,
    pub strategy: LexStrategy,
    pub amplitude: Rational,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { digits: 30, budget: Budget::default(), strategy: LexStrategy::ViaGrevlex, amplitude: Rational::one() }
    }
}

/// One positive root of the eliminant together with its coefficient branch.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub omega: RootEnclosure,
    pub coefficients: Vec<RatInterval>,
    pub residual: RatInterval,
    pub admissible: bool,
    pub note: Option<String>,
}

impl Candidate {
    fn to_json(&self, digits: usize) -> serde_json::Value {
        json!({
            "omega_decimal": self.omega.decimal(digits.min(17)),
            "residual_decimal": format_significant(&self.residual.midpoint(), digits.min(17)),
            "admissible": self.admissible,
            "note": self.note,
        })
    }
}

/// Selected HBM approximation for one (m, N).
#[derive(Clone, Debug)]
pub struct HbmSolution {
    pub m: u32,
    pub order: usize,
    pub amplitude: Rational,
    pub digits: usize,
    pub omega: RootEnclosure,
    /// a₁, a₃, …, a_{2N−1}.
    pub coefficients: Vec<RatInterval>,
    pub residual: RatInterval,
    /// T_N(A) = 2π/ω.
    pub period: RatInterval,
    /// C_N(m) = T_N(A)/A.
    pub period_coefficient: RatInterval,
    /// Eliminant in ω, ascending coefficients.
    pub univariate: UniPoly,
    /// Every analysed root, admissible ones first, each group by residual.
    pub candidates: Vec<Candidate>,
    pub stats: GroebnerStats,
    pub system: HbmSystem,
    pub basis: GroebnerBasis,
}

impl HbmSolution {
    pub fn univariate_degree(&self) -> usize {
        self.univariate.degree()
    }

    pub fn omega_decimal(&self) -> String {
        self.omega.decimal(self.digits)
    }

    pub fn period_coefficient_decimal(&self) -> String {
        format_significant(&self.period_coefficient.midpoint(), self.digits)
    }

    pub fn residual_decimal(&self) -> String {
        format_significant(&self.residual.midpoint(), self.digits.min(17))
    }

    pub fn omega_f64(&self) -> f64 {
        self.omega.midpoint_f64()
    }

    pub fn period_coefficient_f64(&self) -> f64 {
        crate::algebra::to_f64(&self.period_coefficient.midpoint())
    }

    /// True when the selected ω is exactly a root of `q`.
    pub fn omega_is_root_of(&self, q: &UniPoly) -> bool {
        root_is_shared(&self.omega, q)
    }

    /// ω² as a rational when the eliminant is linear in ω².
    pub fn omega_squared_exact(&self) -> Option<Rational> {
        let c = self.univariate.coeffs();
        if c.len() == 3 && c[1].is_zero() {
            Some(-Rational::new(c[0].clone(), c[2].clone()))
        } else {
            None
        }
    }

    pub fn admissible_count(&self) -> usize {
        self.candidates.iter().filter(|c| c.admissible).count()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "m": self.m,
            "N": self.order,
            "amplitude": self.amplitude.to_string(),
            "omega_decimal": self.omega_decimal(),
            "omega_interval": [self.omega.interval.lo().to_string(), self.omega.interval.hi().to_string()],
            "coefficients": self.coefficients.iter().enumerate().map(|(i, c)| json!({
                "name": format!("a{}", 2 * i + 1),
                "decimal": format_significant(&c.midpoint(), self.digits),
                "interval": [c.lo().to_string(), c.hi().to_string()],
            })).collect::<Vec<_>>(),
            "period_coefficient_decimal": self.period_coefficient_decimal(),
            "residual_decimal": self.residual_decimal(),
            "univariate_degree": self.univariate_degree(),
            "candidates": self.candidates.len(),
            "admissible_candidates": self.admissible_count(),
            "candidate_details": self.candidates.iter().map(|c| c.to_json(self.digits)).collect::<Vec<_>>(),
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("m = {}, N = {}\n", self.m, self.order));
        out.push_str("system:\n");
        for e in &self.system.equations {
            out.push_str(&format!("  {e} = 0\n"));
        }
        out.push_str(&format!("univariate degree = {}\n", self.univariate_degree()));
        out.push_str(&format!("omega = {}\n", self.omega_decimal()));
        for (i, c) in self.coefficients.iter().enumerate() {
            out.push_str(&format!("a{} = {}\n", 2 * i + 1, format_significant(&c.midpoint(), self.digits)));
        }
        out.push_str(&format!("C_N = {}\n", self.period_coefficient_decimal()));
        out.push_str(&format!("residual = {}\n", self.residual_decimal()));
        out.push_str(&format!(
            "candidates = {} positive roots, {} admissible\n",
            self.candidates.len(),
            self.admissible_count()
        ));
        out
    }
}

fn pow10(k: usize) -> Rational {
    Rational::from_integer(num_traits::pow(BigInt::from(10), k))
}

fn pi_bits(digits: usize) -> u32 {
    (digits as f64 * 3.33) as u32 + 64
}

/// 2π/ω enclosed with enough bits for `digits`.
fn period_enclosure(omega: &RatInterval, digits: usize) -> Result<RatInterval> {
    pi_enclosure(pi_bits(digits)).scale(&Rational::from_integer(BigInt::from(2))).checked_div(omega)
}

/// Coefficient a₁ written as −h(ω)/c with c a nonzero constant, if the basis has that shape.
fn a1_shape_numerator(basis: &GroebnerBasis) -> Option<UniPoly> {
    let w = basis.vars().len() - 1;
    let g = basis.generators().iter().find(|g| g.terms()[0].0.leading_variable() == Some(0) && g.degree_in(0) == 1)?;
    let parts = g.coefficients_in(0);
    if !parts[1].is_constant() {
        return None;
    }
    if parts[0].support().iter().any(|&v| v != w) {
        return None;
    }
    UniPoly::from_multi(&parts[0], w).ok()
}

struct Context<'a> {
    system: &'a HbmSystem,
    basis: &'a GroebnerBasis,
    a1_numerator: Option<UniPoly>,
}

impl Context<'_> {
    /// Back-substitutes, filters and scores every branch over one ω root.
    fn analyse(&self, root: &RootEnclosure, eps: &Rational) -> Vec<Candidate> {
        let branches = match back_substitute(self.basis, root, eps) {
            Ok(b) => b,
            Err(e) => {
                log::debug!("root ω ≈ {} skipped: {e}", root.decimal(12));
                return Vec::new();
            }
        };
        branches.into_iter().filter_map(|b| self.score(b)).collect()
    }

    fn score(&self, sol: SolutionEnclosure) -> Option<Candidate> {
        let boxed: Vec<RatInterval> = sol.point().iter().map(|x| x.round_outward(RANKING_BITS)).collect();
        let (admissible, note) = self.admissibility(&sol);
        // Admissible branches must also solve the equations with a₁ divided out.
        let checks = if admissible { &self.system.equations } else { &self.system.ideal_generators };
        for e in checks.iter().chain(&self.system.ideal_generators) {
            if !e.eval_interval(&boxed).contains_zero() {
                log::warn!("branch over ω ≈ {} fails the original system; dropped", sol.omega.decimal(12));
                return None;
            }
        }
        let residual = match parseval_norm_at(&self.system.residual, &boxed) {
            Ok(r) => r,
            Err(e) => {
                log::warn!("residual failed: {e}");
                return None;
            }
        };
        Some(Candidate { omega: sol.omega, coefficients: sol.coefficients, residual, admissible, note })
    }

    fn admissibility(&self, sol: &SolutionEnclosure) -> (bool, Option<String>) {
        let a1 = &sol.coefficients[0];
        if !a1.contains_zero() {
            return (true, None);
        }
        if let Some(h) = &self.a1_numerator {
            if root_is_shared(&sol.omega, h) {
                return (false, Some("a1 = 0".into()));
            }
            // a₁ ≠ 0 exactly; the enclosure is just too wide to show it.
            return (true, None);
        }
        (false, Some("a1 not separated from 0".into()))
    }
}

fn residual_less(a: &Candidate, b: &Candidate) -> Ordering {
    a.residual
        .midpoint()
        .cmp(&b.residual.midpoint())
        .then_with(|| a.omega.interval.lo().cmp(b.omega.interval.lo()))
}

/// Runs the full pipeline with default options.
pub fn solve_hbm(m: u32, order: usize) -> Result<HbmSolution> {
    solve_hbm_with(m, order, &SolveOptions::default())
}

pub fn solve_hbm_with(m: u32, order: usize, options: &SolveOptions) -> Result<HbmSolution> {
    if order == 0 {
        return Err(HbmError::InvalidInput("order N must be at least 1".into()));
    }
    if options.digits == 0 {
        return Err(HbmError::InvalidInput("digits must be positive".into()));
    }
    let system = build_hbm_system_with_amplitude(m, order, &options.amplitude)?;
    log::info!("(m={m}, N={order}): system built, {} equations", system.equations.len());
    let basis = lex_basis(&system.ideal_generators, options.strategy, &options.budget)?;
    log::info!("(m={m}, N={order}): lex basis with {} generators; {}", basis.generators().len(), basis.stats());
    if basis.is_unit_ideal() {
        return Err(HbmError::NoAdmissibleSolution { m, order, reason: "the system has no solutions".into() });
    }
    let w = basis.vars().len() - 1;
    let univariate = UniPoly::from_multi(&eliminate_univariate(&basis)?, w)?;
    let roots = isolate_positive_roots(&univariate)?;
    log::info!("(m={m}, N={order}): eliminant degree {}, {} positive roots", univariate.degree(), roots.len());

    let ctx = Context { system: &system, basis: &basis, a1_numerator: a1_shape_numerator(&basis) };
    let eps_rank = Rational::one() / pow10(15);
    let mut candidates: Vec<Candidate> = roots.par_iter().flat_map_iter(|r| ctx.analyse(r, &eps_rank)).collect();

    // Separate overlapping residuals of admissible candidates before choosing.
    let mut eps = eps_rank.clone();
    let cap = Rational::one() / pow10(options.digits + 5);
    loop {
        let admissible: Vec<usize> = (0..candidates.len()).filter(|&i| candidates[i].admissible).collect();
        let Some(&best) = admissible.iter().min_by(|&&a, &&b| residual_less(&candidates[a], &candidates[b])) else {
            break;
        };
        let rivals: Vec<usize> = admissible
            .iter()
            .copied()
            .filter(|&i| i != best && candidates[i].residual.overlaps(&candidates[best].residual))
            .collect();
        if rivals.is_empty() || eps < cap {
            break;
        }
        eps = &eps / pow10(10);
        for i in std::iter::once(best).chain(rivals) {
            let omega = candidates[i].omega.clone();
            let target = candidates[i].coefficients.clone();
            // Keep the branch whose refined enclosure matches the old one.
            if let Some(c) = ctx.analyse(&omega, &eps).into_iter().find(|c| {
                c.coefficients.iter().zip(&target).all(|(x, y)| x.overlaps(y))
            }) {
                candidates[i] = c;
            }
        }
    }

    candidates.sort_by(|a, b| b.admissible.cmp(&a.admissible).then_with(|| residual_less(a, b)));
    let Some(best) = candidates.first().filter(|c| c.admissible).cloned() else {
        return Err(HbmError::NoAdmissibleSolution {
            m,
            order,
            reason: format!("{} positive roots, none with a1 ≠ 0", roots.len()),
        });
    };

    // Final refinement to the requested precision.
    let omega = refine(&best.omega, &relative_tolerance(&best.omega.interval, options.digits as u32 + 5));
    let final_eps = Rational::one() / pow10(options.digits + 5);
    let chosen = back_substitute(&basis, &omega, &final_eps)?
        .into_iter()
        .find(|s| s.coefficients.iter().zip(&best.coefficients).all(|(x, y)| x.overlaps(y)))
        .ok_or_else(|| HbmError::InconsistentBranch("selected branch lost during refinement".into()))?;
    let boxed: Vec<RatInterval> = chosen.point();
    let residual = parseval_norm_at(&system.residual, &boxed.iter().map(|x| x.round_outward(pi_bits(options.digits) + 64)).collect::<Vec<_>>())?;
    let period = period_enclosure(&chosen.omega.interval, options.digits)?;
    let period_coefficient = period.scale(&options.amplitude.recip());

    Ok(HbmSolution {
        m,
        order,
        amplitude: options.amplitude.clone(),
        digits: options.digits,
        omega: chosen.omega,
        coefficients: chosen.coefficients,
        residual,
        period,
        period_coefficient,
        univariate,
        candidates,
        stats: basis.stats().clone(),
        system,
        basis,
    })
}

/// T_N(A;m) = C_N(m)·A.
pub fn period_for_amplitude(solution: &HbmSolution, amplitude: &Rational) -> Result<RatInterval> {
    if !amplitude.is_positive() {
        return Err(HbmError::InvalidInput(format!("amplitude must be positive, got {amplitude}")));
    }
    Ok(solution.period_coefficient.scale(amplitude))
}

/// Re-solves with Σa = A and checks that the branch is the A = 1 branch
/// scaled by aᵢ → A·aᵢ, ω → ω/A.
pub fn scaled_system_check(m: u32, order: usize, amplitude: &Rational, options: &SolveOptions) -> Result<bool> {
    let base = solve_hbm_with(m, order, &SolveOptions { amplitude: Rational::one(), ..options.clone() })?;
    let scaled = solve_hbm_with(m, order, &SolveOptions { amplitude: amplitude.clone(), ..options.clone() })?;
    let inv = amplitude.recip();
    let omega_ok = scaled.omega.interval.overlaps(&base.omega.interval.scale(&inv));
    let coeffs_ok = scaled.coefficients.iter().zip(&base.coefficients).all(|(s, b)| s.overlaps(&b.scale(amplitude)));
    let period_ok = scaled.period_coefficient.overlaps(&base.period_coefficient);
    Ok(omega_ok && coeffs_ok && period_ok)
}

/// Exact period coefficient 2√(2π) of the weak solution, enclosed.
pub fn exact_period_coefficient(bits: u32) -> Result<RatInterval> {
    let two_pi = pi_enclosure(bits).scale(&Rational::from_integer(BigInt::from(2)));
    let lo = sqrt_enclosure(two_pi.lo(), bits)?;
    let hi = sqrt_enclosure(two_pi.hi(), bits)?;
    Ok(RatInterval::new(lo.lo().clone(), hi.hi().clone())?.scale(&Rational::from_integer(BigInt::from(2))))
}

/// Outcome of one cell of the error table.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CellStatus {
    Solved,
    BudgetExhausted { reason: String, stats: GroebnerStats },
    Failed { message: String },
}

#[derive(Clone, Debug)]
pub struct ErrorTableEntry {
    pub m: u32,
    pub order: usize,
    pub period_coefficient: Option<RatInterval>,
    /// e_N(m) = 100·|C_N − 2√(2π)| / 2√(2π).
    pub relative_error_percent: Option<RatInterval>,
    pub status: CellStatus,
}

impl ErrorTableEntry {
    pub fn error_percent_f64(&self) -> Option<f64> {
        self.relative_error_percent.as_ref().map(|e| crate::algebra::to_f64(&e.midpoint()))
    }

    /// Two decimals, or `-` for cells without a value.
    pub fn error_percent_display(&self) -> String {
        match &self.relative_error_percent {
            Some(e) => format_fixed(&e.midpoint(), 2),
            None => "-".into(),
        }
    }

    pub fn period_coefficient_display(&self, digits: usize) -> String {
        match &self.period_coefficient {
            Some(c) => format_significant(&c.midpoint(), digits),
            None => "-".into(),
        }
    }
}

/// Relative error in percent of an enclosed period coefficient.
pub fn relative_error_percent(c: &RatInterval) -> Result<RatInterval> {
    let exact = exact_period_coefficient(256)?;
    let diff = (c - &exact).abs();
    Ok(diff.checked_div(&exact)?.scale(&Rational::from_integer(BigInt::from(100))))
}

/// Table of e_N(m) for 0 ≤ m ≤ max_m and 1 ≤ N ≤ max_order; cells run in parallel.
pub fn error_table(max_m: u32, max_order: usize, options: &SolveOptions) -> Vec<ErrorTableEntry> {
    let cells: Vec<(u32, usize)> = (0..=max_m).flat_map(|m| (1..=max_order).map(move |n| (m, n))).collect();
    let opts = SolveOptions { amplitude: Rational::one(), ..options.clone() };
    let mut out: Vec<ErrorTableEntry> = cells
        .par_iter()
        .map(|&(m, n)| {
            let result = solve_hbm_with(m, n, &opts).and_then(|s| {
                let e = relative_error_percent(&s.period_coefficient)?;
                Ok((s.period_coefficient, e))
            });
            match result {
                Ok((c, e)) => ErrorTableEntry {
                    m,
                    order: n,
                    period_coefficient: Some(c),
                    relative_error_percent: Some(e),
                    status: CellStatus::Solved,
                },
                Err(HbmError::BudgetExhausted { reason, stats }) => ErrorTableEntry {
                    m,
                    order: n,
                    period_coefficient: None,
                    relative_error_percent: None,
                    status: CellStatus::BudgetExhausted { reason, stats },
                },
                Err(e) => ErrorTableEntry {
                    m,
                    order: n,
                    period_coefficient: None,
                    relative_error_percent: None,
                    status: CellStatus::Failed { message: e.to_string() },
                },
            }
        })
        .collect();
    out.sort_by_key(|e| (e.m, e.order));
    out
}

/// The original system evaluated over the solution box contains zero.
pub fn satisfies_system(system: &HbmSystem, coefficients: &[RatInterval], omega: &RatInterval) -> bool {
    let mut boxed = coefficients.to_vec();
    boxed.push(omega.clone());
    system.equations.iter().chain(&system.ideal_generators).all(|e: &MultiPoly| e.eval_interval(&boxed).contains_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{int, rat};

    #[test]
    fn second_order_m0() {
        let s = solve_hbm_with(0, 2, &SolveOptions { digits: 20, ..Default::default() }).unwrap();
        assert!(s.omega_is_root_of(&UniPoly::from_i64(&[-162, 0, 109])));
        assert!(s.coefficients[0].contains(&rat(10, 9)));
        assert!(s.coefficients[1].contains(&rat(-1, 9)));
        assert!((s.period_coefficient_f64() - 5.153_895_517_509_158).abs() < 1e-12);
        // the a₁ = 0 branch is present in the ideal but excluded
        assert!(s.candidates.iter().any(|c| !c.admissible));
        let excluded = s.candidates.iter().find(|c| !c.admissible).unwrap();
        assert!(s.residual.hi() < excluded.residual.lo());
    }

    #[test]
    fn first_order_closed_forms() {
        for (m, w2) in [(0, int(2)), (1, rat(4, 3)), (2, rat(4, 3)), (3, rat(6, 5))] {
            let s = solve_hbm_with(m, 1, &SolveOptions { digits: 15, ..Default::default() }).unwrap();
            assert_eq!(s.omega_squared_exact(), Some(w2), "m = {m}");
        }
    }

    #[test]
    fn amplitude_scaling() {
        let s = solve_hbm_with(0, 1, &SolveOptions { digits: 15, amplitude: int(3), ..Default::default() }).unwrap();
        assert_eq!(s.omega_squared_exact(), Some(rat(2, 9)));
        assert!(s.coefficients[0].contains(&int(3)));
        let t = period_for_amplitude(&s, &int(2)).unwrap();
        assert!((crate::algebra::to_f64(&t.midpoint()) - 2.0 * 2f64.sqrt() * std::f64::consts::PI).abs() < 1e-9);
        assert!(period_for_amplitude(&s, &int(0)).is_err());
    }

    #[test]
    fn exact_coefficient() {
        let c = exact_period_coefficient(128).unwrap();
        assert!((crate::algebra::to_f64(&c.midpoint()) - 5.013_256_549_262_001).abs() < 1e-14);
    }
}
