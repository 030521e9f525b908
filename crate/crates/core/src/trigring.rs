//! Finite cosine series with polynomial coefficients, and the derivation of
//! the harmonic balance equations for `x^(m+1) x'' + x^m = 0`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed};

use crate::algebra::{content_primitive, int, pi_enclosure, rat, MultiPoly, RatInterval, Rational};
use crate::error::{HbmError, Result};
use crate::realroots::SolutionEnclosure;

/// Ambient variables `a1, a3, …, a{2N−1}, w` for an order-`n` ansatz.
pub fn hbm_variables(n: usize) -> Arc<[String]> {
    let mut v: Vec<String> = (1..=n).map(|j| format!("a{}", 2 * j - 1)).collect();
    v.push("w".to_string());
    v.into()
}

/// Σⱼ cⱼ·cos(j ω t) with polynomial coefficients; ω is the last ambient variable.
#[derive(Clone, PartialEq, Eq)]
pub struct TrigPoly {
    vars: Arc<[String]>,
    harmonics: BTreeMap<u32, MultiPoly>,
}

impl TrigPoly {
    pub fn zero(vars: &Arc<[String]>) -> Self {
        TrigPoly { vars: vars.clone(), harmonics: BTreeMap::new() }
    }

    pub fn constant(vars: &Arc<[String]>, c: MultiPoly) -> Self {
        let mut t = Self::zero(vars);
        t.add_harmonic(0, c);
        t
    }

    pub fn from_harmonics(vars: &Arc<[String]>, items: impl IntoIterator<Item = (u32, MultiPoly)>) -> Self {
        let mut t = Self::zero(vars);
        for (j, c) in items {
            t.add_harmonic(j, c);
        }
        t
    }

    fn add_harmonic(&mut self, j: u32, c: MultiPoly) {
        if c.is_zero() {
            return;
        }
        let sum = match self.harmonics.remove(&j) {
            Some(prev) => &prev + &c,
            None => c,
        };
        if !sum.is_zero() {
            self.harmonics.insert(j, sum);
        }
    }

    pub fn vars(&self) -> &Arc<[String]> {
        &self.vars
    }

    /// Coefficient of cos(jωt); the j = 0 entry is the constant term.
    pub fn coefficient(&self, j: u32) -> MultiPoly {
        self.harmonics.get(&j).cloned().unwrap_or_else(|| MultiPoly::zero(&self.vars))
    }

    pub fn harmonics(&self) -> impl Iterator<Item = (u32, &MultiPoly)> {
        self.harmonics.iter().map(|(j, c)| (*j, c))
    }

    pub fn max_harmonic(&self) -> Option<u32> {
        self.harmonics.keys().next_back().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.harmonics.is_empty()
    }

    pub fn add(&self, other: &TrigPoly) -> TrigPoly {
        let mut out = self.clone();
        for (j, c) in &other.harmonics {
            out.add_harmonic(*j, c.clone());
        }
        out
    }

    pub fn scale(&self, c: &MultiPoly) -> TrigPoly {
        TrigPoly::from_harmonics(&self.vars, self.harmonics.iter().map(|(j, p)| (*j, p * c)))
    }

    pub fn pow(&self, e: u32) -> TrigPoly {
        let mut out = TrigPoly::constant(&self.vars, MultiPoly::one(&self.vars));
        for _ in 0..e {
            out = trig_mul(&out, self);
        }
        out
    }

    /// Numerical value at time `t` for numeric coefficient values `point` (ω included).
    pub fn eval_f64(&self, point: &[f64], t: f64) -> f64 {
        let w = point[point.len() - 1];
        self.harmonics.iter().map(|(j, c)| c.eval_f64(point) * (*j as f64 * w * t).cos()).sum()
    }
}

impl fmt::Debug for TrigPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (j, c) in &self.harmonics {
            m.entry(j, &c.to_string());
        }
        m.finish()
    }
}

/// x_N(t) = Σ_{j=1..N} a_{2j−1} cos((2j−1) ω t).
pub fn build_ansatz(n: usize) -> Result<TrigPoly> {
    if n == 0 {
        return Err(HbmError::InvalidInput("order must be at least 1".into()));
    }
    if n + 1 > crate::algebra::MAX_VARS {
        return Err(HbmError::InvalidInput(format!("order {n} exceeds the supported variable count")));
    }
    let vars = hbm_variables(n);
    Ok(TrigPoly::from_harmonics(&vars, (0..n).map(|i| ((2 * i + 1) as u32, MultiPoly::var(&vars, i)))))
}

/// Second time derivative: cos(jωt) coefficients pick up −j²ω².
pub fn second_derivative(x: &TrigPoly) -> TrigPoly {
    let w = x.vars.len() - 1;
    let w2 = MultiPoly::var(&x.vars, w).pow(2);
    TrigPoly::from_harmonics(
        &x.vars,
        x.harmonics.iter().map(|(j, c)| {
            let k = -(*j as i64) * (*j as i64);
            (*j, (c * &w2).scale(&int(k)))
        }),
    )
}

/// Product with cos(aωt)·cos(bωt) = ½cos((a−b)ωt) + ½cos((a+b)ωt).
pub fn trig_mul(x: &TrigPoly, y: &TrigPoly) -> TrigPoly {
    let half = rat(1, 2);
    let mut acc: BTreeMap<u32, Vec<MultiPoly>> = BTreeMap::new();
    for (a, ca) in &x.harmonics {
        for (b, cb) in &y.harmonics {
            let prod = (ca * cb).scale(&half);
            acc.entry(a.abs_diff(*b)).or_default().push(prod.clone());
            acc.entry(a + b).or_default().push(prod);
        }
    }
    let mut out = TrigPoly::zero(&x.vars);
    for (j, parts) in acc {
        let mut sum = MultiPoly::zero(&x.vars);
        for p in parts {
            sum = &sum + &p;
        }
        out.add_harmonic(j, sum);
    }
    out
}

/// The residual F_N = x^(m+1)·x'' + x^m of the ansatz.
pub fn residual_series(m: u32, n: usize) -> Result<TrigPoly> {
    let x = build_ansatz(n)?;
    let xm = x.pow(m);
    let xdd = second_derivative(&x);
    Ok(trig_mul(&trig_mul(&xm, &x), &xdd).add(&xm))
}

/// Polynomial balance equations for one (m, N) instance.
#[derive(Clone, Debug)]
pub struct HbmSystem {
    pub m: u32,
    pub order: usize,
    pub amplitude: Rational,
    /// N normalized Fourier conditions followed by Σa − A.
    pub equations: Vec<MultiPoly>,
    /// The same conditions keeping common factors in the aᵢ; only content
    /// and powers of ω are removed. These generate the ideal that is
    /// eliminated, so branches with a₁ = 0 stay visible.
    pub ideal_generators: Vec<MultiPoly>,
    /// Un-normalized coefficients A_0, A_1, … of F_N (index = harmonic).
    pub raw_coefficients: Vec<MultiPoly>,
    /// Harmonic index behind each of the first N equations.
    pub harmonics_used: Vec<u32>,
    pub residual: TrigPoly,
}

impl HbmSystem {
    pub fn vars(&self) -> &Arc<[String]> {
        self.residual.vars()
    }

    /// Largest harmonic index whose coefficient enters the system.
    pub fn j_n(&self) -> u32 {
        *self.harmonics_used.last().unwrap()
    }

    /// One equation per line.
    pub fn to_text(&self) -> String {
        self.equations.iter().map(|e| format!("{e}\n")).collect()
    }
}

/// Content-primitive form, signed so the lowest-ω-degree part leads positively.
pub fn normalize_equation(p: &MultiPoly) -> Result<MultiPoly> {
    let (_, prim, _) = content_primitive(p)?;
    Ok(orient(prim))
}

/// Like [`normalize_equation`] but only strips the power of ω from the
/// monomial factor.
pub fn normalize_keeping_factors(p: &MultiPoly) -> Result<MultiPoly> {
    let (_, prim, mut gcd) = content_primitive(p)?;
    gcd.set_exponent(prim.nvars() - 1, 0);
    Ok(orient(prim.mul_term(&gcd, &Rational::one())))
}

fn orient(p: MultiPoly) -> MultiPoly {
    let w = p.nvars() - 1;
    let low = p.terms().iter().map(|(m, _)| m.exponent(w)).min().unwrap();
    let lead = p.terms().iter().find(|(m, _)| m.exponent(w) == low).unwrap();
    if lead.1.is_negative() {
        -&p
    } else {
        p
    }
}

pub fn build_hbm_system(m: u32, n: usize) -> Result<HbmSystem> {
    build_hbm_system_with_amplitude(m, n, &Rational::one())
}

/// HBM system with the normalization Σa = `amplitude`.
pub fn build_hbm_system_with_amplitude(m: u32, n: usize, amplitude: &Rational) -> Result<HbmSystem> {
    if !amplitude.is_positive() {
        return Err(HbmError::InvalidInput(format!("amplitude must be positive, got {amplitude}")));
    }
    let residual = residual_series(m, n)?;
    let vars = residual.vars().clone();
    let top = residual.max_harmonic().unwrap_or(0);
    let raw: Vec<MultiPoly> = (0..=top).map(|j| residual.coefficient(j)).collect();

    let mut equations = Vec::with_capacity(n + 1);
    let mut ideal_generators = Vec::with_capacity(n + 1);
    let mut used = Vec::with_capacity(n);
    for (j, c) in raw.iter().enumerate() {
        if used.len() == n {
            break;
        }
        if c.is_zero() {
            continue;
        }
        equations.push(normalize_equation(c)?);
        ideal_generators.push(normalize_keeping_factors(c)?);
        used.push(j as u32);
    }
    if used.len() < n {
        return Err(HbmError::InvalidInput(format!("only {} nontrivial harmonics for order {n}", used.len())));
    }
    let mut norm = MultiPoly::constant(&vars, -amplitude);
    for i in 0..n {
        norm = &norm + &MultiPoly::var(&vars, i);
    }
    equations.push(norm.clone());
    ideal_generators.push(norm);

    Ok(HbmSystem {
        m,
        order: n,
        amplitude: amplitude.clone(),
        equations,
        ideal_generators,
        raw_coefficients: raw,
        harmonics_used: used,
        residual,
    })
}

/// ∫₀^{2π/ω} F(t)² dt = (2π/ω)(A₀² + ½ Σ_{j≥1} Aⱼ²), enclosed over the solution box.
pub fn parseval_norm(f: &TrigPoly, solution: &SolutionEnclosure) -> Result<RatInterval> {
    let mut point: Vec<RatInterval> = solution.coefficients.clone();
    point.push(solution.omega.interval.clone());
    parseval_norm_at(f, &point)
}

/// Same as [`parseval_norm`] for an explicit box (a-coefficients then ω).
pub fn parseval_norm_at(f: &TrigPoly, point: &[RatInterval]) -> Result<RatInterval> {
    let half = rat(1, 2);
    let mut energy = RatInterval::from_int(0);
    for (j, c) in f.harmonics() {
        let v = c.eval_interval(point).square();
        energy = if j == 0 { &energy + &v } else { &energy + &v.scale(&half) };
    }
    let omega = &point[point.len() - 1];
    let period = pi_enclosure(160).scale(&int(2)).checked_div(omega)?;
    Ok(&period * &energy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn p(vars: &Arc<[String]>, s: &str) -> MultiPoly {
        MultiPoly::parse(s, vars).unwrap()
    }

    #[test]
    fn ansatz_shapes() {
        let x1 = build_ansatz(1).unwrap();
        assert_eq!(x1.harmonics().map(|(j, c)| (j, c.to_string())).collect::<Vec<_>>(), vec![(1, "a1".to_string())]);
        let x4 = build_ansatz(4).unwrap();
        let js: Vec<u32> = x4.harmonics().map(|(j, _)| j).collect();
        assert_eq!(js, vec![1, 3, 5, 7]);
        assert_eq!(x4.coefficient(7).to_string(), "a7");
        assert!(build_ansatz(0).is_err());
    }

    #[test]
    fn second_derivative_examples() {
        let v = hbm_variables(2);
        let x = TrigPoly::from_harmonics(&v, [(1, p(&v, "a1"))]);
        assert_eq!(second_derivative(&x).coefficient(1), p(&v, "-a1*w^2"));
        let x = TrigPoly::from_harmonics(&v, [(3, p(&v, "a3"))]);
        assert_eq!(second_derivative(&x).coefficient(3), p(&v, "-9*a3*w^2"));
        let c = TrigPoly::constant(&v, p(&v, "a1 + 2"));
        assert!(second_derivative(&c).is_zero());
    }

    #[test]
    fn product_to_sum() {
        let v = hbm_variables(2);
        let one = MultiPoly::one(&v);
        let c1 = TrigPoly::from_harmonics(&v, [(1, one.clone())]);
        let c3 = TrigPoly::from_harmonics(&v, [(3, one.clone())]);
        let prod = trig_mul(&c1, &c3);
        assert_eq!(prod, TrigPoly::from_harmonics(&v, [(2, one.scale(&rat(1, 2))), (4, one.scale(&rat(1, 2)))]));

        let x2 = build_ansatz(2).unwrap();
        assert_eq!(trig_mul(&x2, &x2).coefficient(0), p(&v, "1/2*a1^2 + 1/2*a3^2"));
        let xdd = second_derivative(&x2);
        assert_eq!(trig_mul(&x2, &xdd).coefficient(0), p(&v, "-1/2*a1^2*w^2 - 9/2*a3^2*w^2"));
    }

    #[test]
    fn m0_n2_system_matches_known_equations() {
        let sys = build_hbm_system(0, 2).unwrap();
        let v = sys.vars().clone();
        assert_eq!(sys.equations, vec![p(&v, "2 - a1^2*w^2 - 9*a3^2*w^2"), p(&v, "a1 + 10*a3"), p(&v, "a1 + a3 - 1")]);
        assert_eq!(sys.harmonics_used, vec![0, 2]);
        assert_eq!(sys.j_n(), 2);
        assert_eq!(sys.raw_coefficients.len(), 7);
    }

    #[test]
    fn maximal_harmonic_is_m_plus_2_times_top_ansatz_harmonic() {
        for (m, n) in [(0u32, 1usize), (0, 3), (1, 2), (2, 2)] {
            let f = residual_series(m, n).unwrap();
            assert_eq!(f.max_harmonic(), Some((m + 2) * (2 * n as u32 - 1)));
        }
    }

    #[test]
    fn first_order_residual_norm() {
        // F₁ = −cos(2ωt) at a₁ = 1, ω = √2: norm = (2π/√2)/2 = π/√2.
        let f = residual_series(0, 1).unwrap();
        let w = crate::algebra::sqrt_enclosure(&int(2), 80).unwrap();
        let norm = parseval_norm_at(&f, &[RatInterval::from_int(1), w]).unwrap();
        let (lo, hi) = norm.to_f64_pair();
        let expected = std::f64::consts::PI / 2f64.sqrt();
        assert!(lo <= expected + 1e-15 && expected - 1e-15 <= hi);
        assert!((lo - 2.2214).abs() < 1e-4);
    }

    #[test]
    fn zero_residual_has_zero_norm() {
        let v = hbm_variables(1);
        let f = TrigPoly::zero(&v);
        let n = parseval_norm_at(&f, &[RatInterval::from_int(1), RatInterval::from_int(1)]).unwrap();
        assert!(n.is_point() && n.lo().is_zero());
    }

    #[test]
    fn amplitude_must_be_positive() {
        assert!(build_hbm_system_with_amplitude(0, 1, &int(0)).is_err());
    }
}
