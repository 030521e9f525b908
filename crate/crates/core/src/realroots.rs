//! Certified real-root isolation by Sturm sequences, refinement, and
//! triangular back-substitution over a lexicographic Gröbner basis.

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::algebra::{format_significant, MultiPoly, RatInterval, Rational};
use crate::error::{HbmError, Result};
use crate::groebner::GroebnerBasis;

/// Univariate polynomial with integer coefficients, ascending degree.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UniPoly {
    coeffs: Vec<BigInt>,
}

fn sign(x: &BigInt) -> i8 {
    match x.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Clears denominators by a positive factor, so roots and signs are unchanged.
    pub fn from_rationals(coeffs: &[Rational]) -> Self {
        let mut den = BigInt::one();
        for c in coeffs {
            den = den.lcm(c.denom());
        }
        Self::new(coeffs.iter().map(|c| c.numer() * (&den / c.denom())).collect())
    }

    pub fn from_multi(p: &MultiPoly, var: usize) -> Result<Self> {
        let c = p
            .as_univariate(var)
            .ok_or_else(|| HbmError::InvalidInput(format!("{p} is not univariate in {}", p.vars()[var])))?;
        Ok(Self::from_rationals(&c))
    }

    pub fn to_multi(&self, vars: &Arc<[String]>, var: usize) -> MultiPoly {
        let n = vars.len();
        MultiPoly::from_terms(
            vars,
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| (crate::algebra::Monomial::var(n, var, i as u16), Rational::from_integer(c.clone()))),
        )
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> &BigInt {
        self.coeffs.last().expect("zero polynomial has no leading coefficient")
    }

    /// Divides by the positive content.
    pub fn primitive(&self) -> UniPoly {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
            if g.is_one() {
                return self.clone();
            }
        }
        if g.is_zero() || g.is_one() {
            return self.clone();
        }
        UniPoly { coeffs: self.coeffs.iter().map(|c| c / &g).collect() }
    }

    /// Same polynomial scaled to a positive leading coefficient.
    pub fn monic_sign(&self) -> UniPoly {
        if !self.is_zero() && self.leading().is_negative() {
            UniPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
        } else {
            self.clone()
        }
    }

    pub fn derivative(&self) -> UniPoly {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect())
    }

    /// Sign of p(x), computed exactly.
    pub fn sign_at(&self, x: &Rational) -> i8 {
        if self.is_zero() {
            return 0;
        }
        let n = x.numer();
        let d = x.denom();
        // Σ cᵢ nⁱ d^(deg−i) has the sign of p(x) because d > 0.
        let mut acc = self.leading().clone();
        let mut dpow = BigInt::one();
        for c in self.coeffs.iter().rev().skip(1) {
            dpow *= d;
            acc = acc * n + c * &dpow;
        }
        sign(&acc)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + Rational::from_integer(c.clone());
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + crate::algebra::to_f64(&Rational::from_integer(c.clone()));
        }
        acc
    }

    /// Interval Horner evaluation.
    pub fn eval_interval(&self, x: &RatInterval) -> RatInterval {
        let mut acc = RatInterval::from_int(0);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + &RatInterval::point(Rational::from_integer(c.clone()));
        }
        acc
    }

    /// A positive multiple of the remainder of `self` by `d`.
    pub fn signed_prem(&self, d: &UniPoly) -> UniPoly {
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut r = self.coeffs.clone();
        let db = d.degree();
        let ld = d.leading();
        while r.len() > db && !r.is_empty() {
            let lr = r.last().unwrap().clone();
            let s = r.len() - 1 - db;
            let g = lr.gcd(ld);
            let mut a = ld / &g;
            let mut b = lr / &g;
            // Keep the multiplier of r positive so signs are preserved.
            if a.is_negative() {
                a = -a;
                b = -b;
            }
            for c in r.iter_mut() {
                *c *= &a;
            }
            for (i, dc) in d.coeffs.iter().enumerate() {
                r[i + s] -= &b * dc;
            }
            debug_assert!(r.last().unwrap().is_zero());
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        UniPoly::new(r).primitive()
    }

    /// Primitive gcd with positive leading coefficient.
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.primitive(), other.primitive());
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.signed_prem(&b);
            a = b;
            b = r;
        }
        a.primitive().monic_sign()
    }

    /// Exact quotient `self / d` up to a positive scalar.
    pub fn div_exact(&self, d: &UniPoly) -> UniPoly {
        let mut r: Vec<Rational> = self.coeffs.iter().map(|c| Rational::from_integer(c.clone())).collect();
        let db = d.degree();
        let ld = Rational::from_integer(d.leading().clone());
        let mut q = vec![Rational::zero(); self.degree().saturating_sub(db) + 1];
        while r.len() > db && !r.is_empty() {
            let s = r.len() - 1 - db;
            let f = r.last().unwrap() / &ld;
            for (i, dc) in d.coeffs.iter().enumerate() {
                r[i + s] -= &f * Rational::from_integer(dc.clone());
            }
            q[s] = f;
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        debug_assert!(r.iter().all(|c| c.is_zero()), "division was not exact");
        UniPoly::from_rationals(&q).primitive()
    }

    /// Product of the distinct irreducible factors.
    pub fn square_free(&self) -> UniPoly {
        if self.degree() == 0 {
            return self.primitive().monic_sign();
        }
        let g = self.gcd(&self.derivative());
        if g.degree() == 0 {
            self.primitive().monic_sign()
        } else {
            self.div_exact(&g).monic_sign()
        }
    }

    /// Drops the factor tᵏ; returns the cofactor and k.
    pub fn strip_zero_roots(&self) -> (UniPoly, usize) {
        let k = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        (UniPoly { coeffs: self.coeffs[k..].to_vec() }, k)
    }

    pub fn is_even(&self) -> bool {
        self.coeffs.iter().enumerate().all(|(i, c)| i % 2 == 0 || c.is_zero())
    }

    /// 1 + max|cᵢ|/|c_lead|.
    pub fn cauchy_bound(&self) -> Rational {
        let lead = Rational::from_integer(self.leading().abs());
        let max = self.coeffs[..self.degree()].iter().map(|c| c.abs()).max().unwrap_or_else(BigInt::zero);
        Rational::one() + Rational::from_integer(max) / lead
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars: Arc<[String]> = vec!["t".to_string()].into();
        write!(f, "{}", self.to_multi(&vars, 0))
    }
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UniPoly({self})")
    }
}

/// Sturm chain of the square-free part of `p`: p₀, p₀′, then negated
/// remainders, each stored as a primitive positive multiple.
pub fn sturm_sequence(p: &UniPoly) -> Vec<UniPoly> {
    assert!(!p.is_zero(), "Sturm sequence of the zero polynomial");
    let p0 = p.square_free();
    let mut chain = vec![p0.clone()];
    if p0.degree() == 0 {
        return chain;
    }
    chain.push(p0.derivative().primitive());
    loop {
        let n = chain.len();
        let r = chain[n - 2].signed_prem(&chain[n - 1]);
        if r.is_zero() {
            break;
        }
        chain.push(UniPoly { coeffs: r.coeffs.iter().map(|c| -c).collect() });
    }
    chain
}

/// Sign variations of the chain at `x`, zeros skipped.
fn variations(chain: &[UniPoly], x: &Rational) -> usize {
    let mut last = 0i8;
    let mut count = 0;
    for p in chain {
        let s = p.sign_at(x);
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

/// Number of distinct real roots in the open interval (lo, hi).
pub fn count_roots(p: &UniPoly, interval: &RatInterval) -> Result<usize> {
    let chain = sturm_sequence(p);
    count_with_chain(&chain, interval)
}

fn count_with_chain(chain: &[UniPoly], interval: &RatInterval) -> Result<usize> {
    for x in [interval.lo(), interval.hi()] {
        if chain[0].sign_at(x) == 0 {
            return Err(HbmError::EndpointIsRoot(x.to_string()));
        }
    }
    Ok(variations(chain, interval.lo()).saturating_sub(variations(chain, interval.hi())))
}

/// Isolating interval of exactly one simple root of `poly`.
#[derive(Clone)]
pub struct RootEnclosure {
    pub interval: RatInterval,
    /// Sturm count over the interval, always 1.
    pub multiplicity_certificate: usize,
    pub sign_left: i8,
    pub sign_right: i8,
    /// The interval is a single point that is an exact rational root.
    pub rational_root: bool,
    poly: Arc<UniPoly>,
}

impl RootEnclosure {
    /// Square-free polynomial whose sign change certifies the root.
    pub fn poly(&self) -> &UniPoly {
        &self.poly
    }

    pub fn width(&self) -> Rational {
        self.interval.width()
    }

    pub fn midpoint_f64(&self) -> f64 {
        crate::algebra::to_f64(&self.interval.midpoint())
    }

    pub fn decimal(&self, digits: usize) -> String {
        format_significant(&self.interval.midpoint(), digits)
    }

    /// Refines until the relative width is below 10^-(digits+2), then renders.
    pub fn decimal_refined(&self, digits: usize) -> String {
        let tol = relative_tolerance(&self.interval, digits as u32 + 2);
        refine(self, &tol).decimal(digits)
    }
}

impl fmt::Debug for RootEnclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RootEnclosure({:?} ≈ {})", self.interval, self.decimal(12))
    }
}

impl Serialize for RootEnclosure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("RootEnclosure", 3)?;
        st.serialize_field("interval", &[self.interval.lo().to_string(), self.interval.hi().to_string()])?;
        st.serialize_field("decimal", &self.decimal(17))?;
        st.serialize_field("rational_root", &self.rational_root)?;
        st.end()
    }
}

/// `10^-digits · max(|mid|, 1)`-style absolute tolerance for an interval.
pub fn relative_tolerance(interval: &RatInterval, digits: u32) -> Rational {
    let scale = interval.lo().abs().max(interval.hi().abs());
    let scale = if scale.is_zero() { Rational::one() } else { scale };
    scale / Rational::from_integer(num_traits::pow(BigInt::from(10), digits as usize))
}

fn dyadic_ceil_pow2(x: &Rational) -> Rational {
    let mut b = Rational::one();
    while &b < x {
        b *= Rational::from_integer(BigInt::from(2));
    }
    b
}

/// Isolates every positive real root of `p`.
pub fn isolate_positive_roots(p: &UniPoly) -> Result<Vec<RootEnclosure>> {
    if p.is_zero() {
        return Err(HbmError::ZeroPolynomial);
    }
    let (stripped, _) = p.strip_zero_roots();
    if stripped.degree() == 0 {
        return Ok(Vec::new());
    }
    let chain = sturm_sequence(&stripped);
    let sqf = Arc::new(chain[0].clone());
    let bound = dyadic_ceil_pow2(&sqf.cauchy_bound());
    let two = Rational::from_integer(BigInt::from(2));

    let mut out = Vec::new();
    // (lo, hi, V(lo), V(hi)); lo = 0 is allowed as it is no longer a root.
    let v0 = variations(&chain, &Rational::zero());
    let vb = variations(&chain, &bound);
    let mut stack = vec![(Rational::zero(), bound, v0, vb)];
    while let Some((lo, hi, vlo, vhi)) = stack.pop() {
        let count = vlo.saturating_sub(vhi);
        if count == 0 {
            continue;
        }
        if count == 1 && !lo.is_zero() {
            out.push(RootEnclosure {
                sign_left: sqf.sign_at(&lo),
                sign_right: sqf.sign_at(&hi),
                interval: RatInterval::new(lo, hi)?,
                multiplicity_certificate: 1,
                rational_root: false,
                poly: sqf.clone(),
            });
            continue;
        }
        let mid = (&lo + &hi) / &two;
        if sqf.sign_at(&mid) == 0 {
            // Exact rational root: split around it with non-root endpoints.
            out.push(RootEnclosure {
                interval: RatInterval::point(mid.clone()),
                multiplicity_certificate: 1,
                sign_left: 0,
                sign_right: 0,
                rational_root: true,
                poly: sqf.clone(),
            });
            let mut delta = (&hi - &lo) / Rational::from_integer(BigInt::from(4));
            loop {
                let l = &mid - &delta;
                let r = &mid + &delta;
                if sqf.sign_at(&l) != 0 && sqf.sign_at(&r) != 0 {
                    let vl = variations(&chain, &l);
                    let vr = variations(&chain, &r);
                    if vl == vr + 1 {
                        stack.push((lo.clone(), l, vlo, vl));
                        stack.push((r, hi.clone(), vr, vhi));
                        break;
                    }
                }
                delta /= &two;
            }
            continue;
        }
        let vmid = variations(&chain, &mid);
        stack.push((mid.clone(), hi, vmid, vhi));
        stack.push((lo, mid, vlo, vmid));
    }
    out.sort_by(|a, b| a.interval.lo().cmp(b.interval.lo()));
    Ok(out)
}

/// Shrinks the enclosure below `eps` width. Newton steps are tried first and
/// kept only when a sign change confirms them; bisection is the fallback.
pub fn refine(enclosure: &RootEnclosure, eps: &Rational) -> RootEnclosure {
    if enclosure.rational_root || enclosure.width() <= *eps {
        return enclosure.clone();
    }
    let p = enclosure.poly.as_ref();
    let dp = p.derivative();
    let two = Rational::from_integer(BigInt::from(2));
    let mut lo = enclosure.interval.lo().clone();
    let mut hi = enclosure.interval.hi().clone();
    let s_lo = enclosure.sign_left;
    let mut newton_ok = true;
    while &hi - &lo > *eps {
        let width = &hi - &lo;
        if newton_ok {
            let x = (&lo + &hi) / &two;
            let d = dp.eval(&x);
            if !d.is_zero() {
                let step = p.eval(&x) / d;
                let guess = &x - &step;
                // Round the guess to a dyadic grid finer than the expected error.
                let bits = (bit_length_inverse(&width) * 2 + 8).min(1 << 20);
                let guess = crate::algebra::floor_dyadic(&guess, bits);
                let radius = (&width * &width).max(Rational::new(BigInt::one(), BigInt::one() << bits as usize)) ;
                let l = &guess - &radius;
                let r = &guess + &radius;
                if l > lo && r < hi {
                    let sl = p.sign_at(&l);
                    let sr = p.sign_at(&r);
                    if sl == 0 {
                        return point_enclosure(enclosure, l);
                    }
                    if sr == 0 {
                        return point_enclosure(enclosure, r);
                    }
                    if sl == s_lo && sr == -s_lo {
                        lo = l;
                        hi = r;
                        continue;
                    }
                }
            }
            newton_ok = false;
        }
        let mid = (&lo + &hi) / &two;
        match p.sign_at(&mid) {
            0 => return point_enclosure(enclosure, mid),
            s if s == s_lo => lo = mid,
            _ => hi = mid,
        }
        // Retry Newton once the interval has shrunk by a few bisections.
        if !newton_ok && (&hi - &lo) * Rational::from_integer(BigInt::from(16)) < width {
            newton_ok = true;
        }
    }
    RootEnclosure {
        interval: RatInterval::new(lo, hi).expect("ordered endpoints"),
        multiplicity_certificate: 1,
        sign_left: enclosure.sign_left,
        sign_right: enclosure.sign_right,
        rational_root: false,
        poly: enclosure.poly.clone(),
    }
}

fn point_enclosure(e: &RootEnclosure, x: Rational) -> RootEnclosure {
    RootEnclosure {
        interval: RatInterval::point(x),
        multiplicity_certificate: 1,
        sign_left: 0,
        sign_right: 0,
        rational_root: true,
        poly: e.poly.clone(),
    }
}

/// ⌈log₂(1/w)⌉ for 0 < w, clamped at 0.
fn bit_length_inverse(w: &Rational) -> u32 {
    let n = w.numer().bits() as i64;
    let d = w.denom().bits() as i64;
    (d - n + 1).max(0) as u32
}

/// True when the enclosed root is also a root of `q`.
pub fn root_is_shared(enclosure: &RootEnclosure, q: &UniPoly) -> bool {
    if q.is_zero() {
        return true;
    }
    if enclosure.rational_root {
        return q.sign_at(enclosure.interval.lo()) == 0;
    }
    let g = enclosure.poly.gcd(q);
    if g.degree() == 0 {
        return false;
    }
    // Endpoints are not roots of the enclosure polynomial, hence not of g.
    count_roots(&g, &enclosure.interval).map(|c| c == 1).unwrap_or(false)
}

/// ω root together with enclosures of a₁, a₃, … that solve the system.
#[derive(Clone, Debug)]
pub struct SolutionEnclosure {
    pub omega: RootEnclosure,
    pub coefficients: Vec<RatInterval>,
}

impl SolutionEnclosure {
    /// The full box: coefficients followed by ω.
    pub fn point(&self) -> Vec<RatInterval> {
        let mut v = self.coefficients.clone();
        v.push(self.omega.interval.clone());
        v
    }

    pub fn max_coefficient_width(&self) -> Rational {
        self.coefficients.iter().map(|c| c.width()).max().unwrap_or_else(Rational::zero)
    }
}

/// Generators grouped by their lexicographic leading variable.
fn by_leading_variable(basis: &GroebnerBasis) -> Vec<Vec<&MultiPoly>> {
    let n = basis.vars().len();
    let mut out = vec![Vec::new(); n];
    for g in basis.generators() {
        if let Some(v) = g.terms()[0].0.leading_variable() {
            out[v].push(g);
        }
    }
    out
}

/// Encloses a₁, …, a_{2N−1} over the ω root by solving the triangular lex
/// basis from the bottom up, refining ω until every width is at most `eps`.
pub fn back_substitute(basis: &GroebnerBasis, omega: &RootEnclosure, eps: &Rational) -> Result<Vec<SolutionEnclosure>> {
    let n = basis.vars().len();
    let w = n - 1;
    let groups = by_leading_variable(basis);
    if groups[w].is_empty() {
        return Err(HbmError::NotZeroDimensional("no univariate generator in ω".into()));
    }
    let mut omega = omega.clone();
    let max_rounds = 64;
    for round in 0..max_rounds {
        let mut branches: Vec<Vec<Option<RatInterval>>> = vec![vec![None; n]];
        for b in branches.iter_mut() {
            b[w] = Some(omega.interval.clone());
        }
        let mut undecided = false;
        for var in (0..w).rev() {
            let mut next = Vec::new();
            for branch in branches {
                match solve_variable(&groups[var], var, &branch)? {
                    VarSolve::Values(vals) => {
                        for v in vals {
                            let mut nb = branch.clone();
                            nb[var] = Some(v);
                            next.push(nb);
                        }
                    }
                    VarSolve::Undecided => {
                        undecided = true;
                        next.push(branch);
                    }
                    VarSolve::Free => {
                        return Err(HbmError::NotZeroDimensional(format!("{} is unconstrained", basis.vars()[var])));
                    }
                }
            }
            branches = next;
            if undecided {
                break;
            }
        }
        if !undecided {
            let mut sols = Vec::new();
            let mut too_wide = false;
            for b in &branches {
                let boxed: Vec<RatInterval> = b.iter().map(|x| x.clone().unwrap()).collect();
                // Every generator must vanish somewhere in the box.
                if basis.generators().iter().any(|g| !g.eval_interval(&boxed).contains_zero()) {
                    continue;
                }
                if boxed[..w].iter().any(|x| x.width() > *eps) {
                    too_wide = true;
                }
                sols.push(SolutionEnclosure { omega: omega.clone(), coefficients: boxed[..w].to_vec() });
            }
            if !too_wide {
                if sols.is_empty() {
                    return Err(HbmError::InconsistentBranch(format!(
                        "no real coefficients over ω ≈ {}",
                        omega.decimal(12)
                    )));
                }
                return Ok(sols);
            }
        }
        let target = omega.width() / Rational::from_integer(BigInt::from(1u64 << 16));
        omega = refine(&omega, &target);
        log::trace!("back-substitution round {round}: ω width {}", crate::algebra::to_f64(&omega.width()));
    }
    Err(HbmError::InconsistentBranch(format!(
        "coefficient enclosures did not converge over ω ≈ {}",
        omega.decimal(12)
    )))
}

enum VarSolve {
    Values(Vec<RatInterval>),
    Undecided,
    Free,
}

/// Solves for `var` given enclosures of all later variables.
fn solve_variable(gens: &[&MultiPoly], var: usize, known: &[Option<RatInterval>]) -> Result<VarSolve> {
    if gens.is_empty() {
        return Ok(VarSolve::Free);
    }
    let point_with = |x: RatInterval| -> Vec<RatInterval> {
        known
            .iter()
            .enumerate()
            .map(|(i, v)| if i == var { x.clone() } else { v.clone().unwrap_or_else(|| RatInterval::from_int(0)) })
            .collect()
    };
    // Shape position: some generator is linear in `var`.
    if let Some(g) = gens.iter().find(|g| g.degree_in(var) == 1) {
        let parts = g.coefficients_in(var);
        let zero = point_with(RatInterval::from_int(0));
        let c1 = parts[1].eval_interval(&zero);
        if c1.contains_zero() {
            return Ok(VarSolve::Undecided);
        }
        let c0 = parts[0].eval_interval(&zero);
        let value = (-&c0).checked_div(&c1)?;
        return Ok(VarSolve::Values(vec![value]));
    }
    // Fallback: the lowest-degree generator in `var` with interval coefficients.
    let g = gens.iter().min_by_key(|g| g.degree_in(var)).unwrap();
    let zero = point_with(RatInterval::from_int(0));
    let coeff_boxes: Vec<RatInterval> = g.coefficients_in(var).iter().map(|c| c.eval_interval(&zero)).collect();
    if coeff_boxes.last().unwrap().contains_zero() {
        return Ok(VarSolve::Undecided);
    }
    // Isolate the roots of the midpoint polynomial, then confirm each by an
    // interval sign change and a derivative that excludes zero.
    let mids: Vec<Rational> = coeff_boxes.iter().map(|c| c.midpoint()).collect();
    let mid_poly = UniPoly::from_rationals(&mids);
    let roots = isolate_real_roots(&mid_poly)?;
    let deriv_boxes: Vec<RatInterval> = coeff_boxes
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c.scale(&Rational::from_integer(BigInt::from(k))))
        .collect();
    let eval = |coeffs: &[RatInterval], x: &RatInterval| -> RatInterval {
        let mut acc = RatInterval::from_int(0);
        for c in coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    };
    let mut vals = Vec::new();
    for r in roots {
        let r = refine(&r, &(r.width() / Rational::from_integer(BigInt::from(1u64 << 20))));
        let mut pad = r.width().max(Rational::new(BigInt::one(), BigInt::one() << 40));
        let mut accepted = false;
        for _ in 0..8 {
            let box_ = RatInterval::new(r.interval.lo() - &pad, r.interval.hi() + &pad)?;
            let left = eval(&coeff_boxes, &RatInterval::point(box_.lo().clone()));
            let right = eval(&coeff_boxes, &RatInterval::point(box_.hi().clone()));
            let deriv = eval(&deriv_boxes, &box_);
            let sign_change = (left.is_negative() && right.is_positive()) || (left.is_positive() && right.is_negative());
            if sign_change && !deriv.contains_zero() {
                vals.push(box_);
                accepted = true;
                break;
            }
            pad *= Rational::from_integer(BigInt::from(4));
        }
        if !accepted {
            return Ok(VarSolve::Undecided);
        }
    }
    Ok(VarSolve::Values(vals))
}

/// Isolates all real roots (positive, zero and negative).
pub fn isolate_real_roots(p: &UniPoly) -> Result<Vec<RootEnclosure>> {
    if p.is_zero() {
        return Err(HbmError::ZeroPolynomial);
    }
    let (stripped, k) = p.strip_zero_roots();
    let mut out = Vec::new();
    if stripped.degree() > 0 {
        let reflected = UniPoly::new(
            stripped.coeffs.iter().enumerate().map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() }).collect(),
        );
        for r in isolate_positive_roots(&reflected)? {
            let sqf = Arc::new(p.square_free());
            let interval = -&r.interval;
            out.push(RootEnclosure {
                sign_left: sqf.sign_at(interval.lo()),
                sign_right: sqf.sign_at(interval.hi()),
                interval,
                multiplicity_certificate: 1,
                rational_root: r.rational_root,
                poly: sqf,
            });
        }
    }
    if k > 0 {
        out.push(RootEnclosure {
            interval: RatInterval::point(Rational::zero()),
            multiplicity_certificate: 1,
            sign_left: 0,
            sign_right: 0,
            rational_root: true,
            poly: Arc::new(p.square_free()),
        });
    }
    if stripped.degree() > 0 {
        let sqf = Arc::new(p.square_free());
        for r in isolate_positive_roots(&stripped)? {
            out.push(RootEnclosure { poly: sqf.clone(), ..r });
        }
    }
    out.sort_by(|a, b| a.interval.lo().cmp(b.interval.lo()));
    Ok(out)
}
