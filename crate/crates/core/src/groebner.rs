//! Reduced Gröbner bases by Buchberger's algorithm, plus FGLM order conversion.
//!
//! Polynomials are handled fraction-free inside the completion loop: every
//! intermediate is kept as a primitive integer polynomial sorted by the
//! working order.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{gcd_all, Monomial, MonomialOrder, MultiPoly, Rational};
use crate::error::{HbmError, Result};

/// Resource caps for a single basis computation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_spairs: u64,
    /// Cap on the summed coefficient bit-length of the working basis.
    pub max_coefficient_bits: u64,
    pub time_limit: Option<Duration>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_spairs: 1_000_000, max_coefficient_bits: 100_000_000, time_limit: None }
    }
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget { max_spairs: u64::MAX, max_coefficient_bits: u64::MAX, time_limit: None }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroebnerStats {
    pub spairs_processed: u64,
    pub reductions_to_zero: u64,
    pub pairs_pruned: u64,
    pub max_coefficient_bits: u64,
    pub elapsed_ms: u64,
}

impl fmt::Display for GroebnerStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} S-pairs, {} zero reductions, {} pruned, max {} coefficient bits, {} ms",
            self.spairs_processed, self.reductions_to_zero, self.pairs_pruned, self.max_coefficient_bits, self.elapsed_ms
        )
    }
}

/// Reduced Gröbner basis. Generators are primitive integer polynomials with
/// positive leading coefficient, sorted by ascending leading monomial.
#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    generators: Vec<MultiPoly>,
    order: MonomialOrder,
    stats: GroebnerStats,
}

impl GroebnerBasis {
    pub fn generators(&self) -> &[MultiPoly] {
        &self.generators
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn stats(&self) -> &GroebnerStats {
        &self.stats
    }

    pub fn vars(&self) -> &Arc<[String]> {
        self.generators[0].vars()
    }

    /// Remainder of `p` modulo the basis.
    pub fn reduce(&self, p: &MultiPoly) -> MultiPoly {
        crate::algebra::normal_form(p, &self.generators, self.order)
    }

    /// Ideal membership, by fraction-free reduction.
    pub fn contains(&self, p: &MultiPoly) -> bool {
        if p.is_zero() {
            return true;
        }
        let basis: Vec<IntPoly> = self.generators.iter().map(|g| IntPoly::from_multi(g, self.order)).collect();
        let refs: Vec<&IntPoly> = basis.iter().collect();
        reduce_full(IntPoly::from_multi(p, self.order), &refs, self.order, false, None).is_some_and(|r| r.is_zero())
    }

    pub fn is_unit_ideal(&self) -> bool {
        self.generators.len() == 1 && self.generators[0].is_constant()
    }

    /// Buchberger's criterion checked over every pair of generators.
    pub fn satisfies_buchberger_criterion(&self) -> bool {
        let g = &self.generators;
        for i in 0..g.len() {
            for j in i + 1..g.len() {
                if !self.contains(&s_polynomial(&g[i], &g[j], self.order)) {
                    return false;
                }
            }
        }
        true
    }

    /// No monomial of a generator is divisible by another generator's leading monomial.
    pub fn is_reduced(&self) -> bool {
        let leads: Vec<Monomial> = self.generators.iter().map(|g| g.leading_monomial(self.order).unwrap()).collect();
        self.generators.iter().enumerate().all(|(i, g)| {
            g.terms()
                .iter()
                .all(|(m, _)| leads.iter().enumerate().all(|(j, l)| i == j || !l.divides(m)))
        })
    }

    /// One polynomial per line, in the algebra module's rendering.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for g in &self.generators {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let gens: Vec<serde_json::Value> = self
            .generators
            .iter()
            .map(|g| {
                serde_json::Value::Array(
                    g.terms()
                        .iter()
                        .map(|(m, c)| serde_json::json!({"exponents": m.exponents(), "coefficient": c.to_string()}))
                        .collect(),
                )
            })
            .collect();
        serde_json::json!({
            "variables": self.vars().to_vec(),
            "order": self.order,
            "generators": gens,
        })
    }
}

// ---------------------------------------------------------------------------
// Integer polynomials sorted by a working order.

#[derive(Clone, Debug)]
struct IntPoly {
    terms: Vec<(Monomial, BigInt)>,
    sugar: u32,
}

impl IntPoly {
    fn from_multi(p: &MultiPoly, order: MonomialOrder) -> IntPoly {
        let mut den = BigInt::one();
        for (_, c) in p.terms() {
            den = den.lcm(c.denom());
        }
        let mut terms: Vec<(Monomial, BigInt)> =
            p.terms().iter().map(|(m, c)| (*m, c.numer() * (&den / c.denom()))).collect();
        terms.sort_by(|a, b| order.cmp(&b.0, &a.0));
        let mut out = IntPoly { sugar: p.total_degree(), terms };
        out.make_primitive();
        out
    }

    fn to_multi(&self, vars: &Arc<[String]>) -> MultiPoly {
        MultiPoly::from_terms(vars, self.terms.iter().map(|(m, c)| (*m, Rational::from_integer(c.clone()))))
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn lm(&self) -> &Monomial {
        &self.terms[0].0
    }

    fn lc(&self) -> &BigInt {
        &self.terms[0].1
    }

    fn content(&self) -> BigInt {
        gcd_all(self.terms.iter().map(|(_, c)| c))
    }

    /// Divides by the content and makes the leading coefficient positive.
    fn make_primitive(&mut self) {
        if self.terms.is_empty() {
            return;
        }
        let mut g = self.content();
        if self.terms[0].1.is_negative() {
            g = -g;
        }
        if !g.is_one() {
            for (_, c) in self.terms.iter_mut() {
                *c /= &g;
            }
        }
    }

    fn bits(&self) -> u64 {
        self.terms.iter().map(|(_, c)| c.bits()).max().unwrap_or(0)
    }

    fn total_bits(&self) -> u64 {
        self.terms.iter().map(|(_, c)| c.bits()).sum()
    }
}

/// `a·p − b·q·g`, where the terms of `p` before `start` are known to exceed
/// every monomial of `q·g`.
fn combine(
    p: &[(Monomial, BigInt)],
    start: usize,
    a: &BigInt,
    q: &Monomial,
    b: &BigInt,
    g: &[(Monomial, BigInt)],
    order: MonomialOrder,
) -> Vec<(Monomial, BigInt)> {
    let mut out = Vec::with_capacity(p.len() + g.len());
    let a_is_one = a.is_one();
    for (m, c) in &p[..start] {
        out.push((*m, if a_is_one { c.clone() } else { c * a }));
    }
    let (mut i, mut j) = (start, 0);
    while i < p.len() || j < g.len() {
        let gm = g.get(j).map(|(m, _)| m.mul(q));
        let ord = match (p.get(i), gm.as_ref()) {
            (Some((pm, _)), Some(gm)) => order.cmp(pm, gm),
            (Some(_), None) => Ordering::Greater,
            _ => Ordering::Less,
        };
        match ord {
            Ordering::Greater => {
                let c = &p[i].1;
                out.push((p[i].0, if a_is_one { c.clone() } else { c * a }));
                i += 1;
            }
            Ordering::Less => {
                out.push((gm.unwrap(), -(b * &g[j].1)));
                j += 1;
            }
            Ordering::Equal => {
                let c = if a_is_one { p[i].1.clone() } else { &p[i].1 * a } - b * &g[j].1;
                if !c.is_zero() {
                    out.push((p[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Fully reduces `f` modulo `basis` (top and tail), returning a primitive result.
///
/// Returns `None` if the deadline passes mid-reduction.
fn reduce_full(
    f: IntPoly,
    basis: &[&IntPoly],
    order: MonomialOrder,
    top_only: bool,
    deadline: Option<Instant>,
) -> Option<IntPoly> {
    let mut p = f;
    let mut k = 0;
    let mut steps = 0u32;
    while k < p.terms.len() {
        let m = p.terms[k].0;
        let hit = basis.iter().find(|g| g.lm().divides(&m));
        match hit {
            Some(g) => {
                let q = g.lm().quotient_of(&m).unwrap();
                let c = &p.terms[k].1;
                let d = c.gcd(g.lc());
                let mut a = g.lc() / &d;
                let mut b = c / &d;
                if a.is_negative() {
                    a = -a;
                    b = -b;
                }
                p.sugar = p.sugar.max(g.sugar + q.degree());
                p.terms = combine(&p.terms, k, &a, &q, &b, &g.terms, order);
                steps += 1;
                if steps.is_multiple_of(8) {
                    p.make_primitive();
                }
                if deadline.is_some_and(|d| Instant::now() > d) {
                    return None;
                }
            }
            None => {
                if top_only {
                    break;
                }
                k += 1;
            }
        }
    }
    p.make_primitive();
    Some(p)
}

fn spoly_int(f: &IntPoly, g: &IntPoly, order: MonomialOrder) -> IntPoly {
    let l = f.lm().lcm(g.lm());
    let qf = f.lm().quotient_of(&l).unwrap();
    let qg = g.lm().quotient_of(&l).unwrap();
    let d = f.lc().gcd(g.lc());
    let a = g.lc() / &d;
    let b = f.lc() / &d;
    // a·qf·f − b·qg·g; the leading terms cancel.
    let lifted: Vec<(Monomial, BigInt)> = f.terms.iter().map(|(m, c)| (m.mul(&qf), c.clone())).collect();
    let terms = combine(&lifted, 0, &a, &qg, &b, &g.terms, order);
    let sugar = (f.sugar + qf.degree()).max(g.sugar + qg.degree());
    let mut out = IntPoly { terms, sugar };
    out.make_primitive();
    out
}

/// S-polynomial with leading terms cancelled, scaled to a primitive integer polynomial.
pub fn s_polynomial(f: &MultiPoly, g: &MultiPoly, order: MonomialOrder) -> MultiPoly {
    assert!(!f.is_zero() && !g.is_zero(), "S-polynomial of the zero polynomial");
    let fi = IntPoly::from_multi(f, order);
    let gi = IntPoly::from_multi(g, order);
    spoly_int(&fi, &gi, order).to_multi(f.vars())
}

#[derive(Clone, Debug)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
    sugar: u32,
}

struct Completion<'a> {
    order: MonomialOrder,
    budget: &'a Budget,
    polys: Vec<IntPoly>,
    active: Vec<bool>,
    pairs: Vec<Pair>,
    stats: GroebnerStats,
    started: Instant,
    deadline: Option<Instant>,
}

impl<'a> Completion<'a> {
    fn check_budget(&mut self) -> Result<()> {
        self.stats.elapsed_ms = self.started.elapsed().as_millis() as u64;
        if self.stats.spairs_processed > self.budget.max_spairs {
            return Err(self.exhausted("S-pair cap reached"));
        }
        let total: u64 = self
            .polys
            .iter()
            .zip(&self.active)
            .filter(|(_, &a)| a)
            .map(|(p, _)| p.total_bits())
            .sum();
        if total > self.budget.max_coefficient_bits {
            return Err(self.exhausted("coefficient bit budget reached"));
        }
        if self.deadline.is_some_and(|d| Instant::now() > d) {
            return Err(self.exhausted("time limit reached"));
        }
        Ok(())
    }

    fn exhausted(&self, reason: &str) -> HbmError {
        let mut stats = self.stats.clone();
        stats.elapsed_ms = self.started.elapsed().as_millis() as u64;
        HbmError::BudgetExhausted { reason: reason.to_string(), stats }
    }

    /// Gebauer–Möller update for a new generator.
    fn update(&mut self, h: IntPoly) {
        let hi = self.polys.len();
        let hlm = *h.lm();
        let hsugar = h.sugar;
        self.polys.push(h);
        self.active.push(true);

        let candidates: Vec<Pair> = (0..hi)
            .filter(|&g| self.active[g])
            .map(|g| {
                let gp = &self.polys[g];
                let lcm = hlm.lcm(gp.lm());
                let sugar = (hsugar + hlm.quotient_of(&lcm).unwrap().degree())
                    .max(gp.sugar + gp.lm().quotient_of(&lcm).unwrap().degree());
                Pair { i: g, j: hi, lcm, sugar }
            })
            .collect();
        let before = candidates.len();

        // Chain criterion among the new pairs; coprime pairs are kept here and dropped below.
        let mut kept: Vec<Pair> = Vec::new();
        for idx in 0..candidates.len() {
            let p = &candidates[idx];
            let coprime = hlm.is_coprime(self.polys[p.i].lm());
            let dominated = candidates[idx + 1..].iter().any(|q| q.lcm.divides(&p.lcm))
                || kept.iter().any(|q| q.lcm.divides(&p.lcm));
            if coprime || !dominated {
                kept.push(p.clone());
            }
        }
        // Among equal lcms keep a single representative.
        let mut deduped: Vec<Pair> = Vec::new();
        for p in kept {
            if let Some(pos) = deduped.iter().position(|q| q.lcm == p.lcm) {
                let coprime_p = hlm.is_coprime(self.polys[p.i].lm());
                if coprime_p {
                    deduped[pos] = p;
                }
            } else {
                deduped.push(p);
            }
        }
        let new_pairs: Vec<Pair> =
            deduped.into_iter().filter(|p| !hlm.is_coprime(self.polys[p.i].lm())).collect();
        self.stats.pairs_pruned += (before - new_pairs.len()) as u64;

        // Old pairs made redundant by the new leading monomial.
        let polys = &self.polys;
        let old = std::mem::take(&mut self.pairs);
        let mut pruned = 0u64;
        self.pairs = old
            .into_iter()
            .filter(|p| {
                let drop = hlm.divides(&p.lcm)
                    && hlm.lcm(polys[p.i].lm()) != p.lcm
                    && hlm.lcm(polys[p.j].lm()) != p.lcm;
                if drop {
                    pruned += 1;
                }
                !drop
            })
            .collect();
        self.stats.pairs_pruned += pruned;
        self.pairs.extend(new_pairs);

        for g in 0..hi {
            if self.active[g] && hlm.divides(self.polys[g].lm()) {
                self.active[g] = false;
            }
        }
    }

    fn select_pair(&mut self) -> Option<Pair> {
        if self.pairs.is_empty() {
            return None;
        }
        let order = self.order;
        let idx = (0..self.pairs.len())
            .min_by(|&x, &y| {
                let (a, b) = (&self.pairs[x], &self.pairs[y]);
                a.sugar
                    .cmp(&b.sugar)
                    .then_with(|| a.lcm.degree().cmp(&b.lcm.degree()))
                    .then_with(|| order.cmp(&a.lcm, &b.lcm))
                    .then_with(|| (a.j, a.i).cmp(&(b.j, b.i)))
            })
            .unwrap();
        Some(self.pairs.swap_remove(idx))
    }

    fn reducers(&self) -> Vec<&IntPoly> {
        self.polys.iter().zip(&self.active).filter(|(_, &a)| a).map(|(p, _)| p).collect()
    }
}

/// Reduced Gröbner basis of the ideal generated by `gens`, default budget.
pub fn buchberger(gens: &[MultiPoly], order: MonomialOrder) -> Result<GroebnerBasis> {
    buchberger_with_budget(gens, order, &Budget::default())
}

pub fn buchberger_with_budget(gens: &[MultiPoly], order: MonomialOrder, budget: &Budget) -> Result<GroebnerBasis> {
    let started = Instant::now();
    buchberger_until(gens, order, budget, started, budget.time_limit.map(|l| started + l))
}

fn buchberger_until(
    gens: &[MultiPoly],
    order: MonomialOrder,
    budget: &Budget,
    started: Instant,
    deadline: Option<Instant>,
) -> Result<GroebnerBasis> {
    let nonzero: Vec<&MultiPoly> = gens.iter().filter(|g| !g.is_zero()).collect();
    let Some(first) = nonzero.first() else {
        return Err(HbmError::ZeroPolynomial);
    };
    let vars = first.vars().clone();
    for g in &nonzero {
        if g.vars() != &vars {
            return Err(HbmError::MismatchedVariables { left: vars.to_vec(), right: g.vars().to_vec() });
        }
    }

    let mut inputs: Vec<IntPoly> = nonzero.iter().map(|g| IntPoly::from_multi(g, order)).collect();
    inputs.sort_by(|a, b| order.cmp(a.lm(), b.lm()));

    let mut state = Completion {
        order,
        budget,
        polys: Vec::new(),
        active: Vec::new(),
        pairs: Vec::new(),
        stats: GroebnerStats::default(),
        started,
        deadline,
    };

    for f in inputs {
        let h = {
            let reducers = state.reducers();
            reduce_full(f, &reducers, order, false, deadline)
        };
        let Some(h) = h else {
            return Err(state.exhausted("time limit reached"));
        };
        if !h.is_zero() {
            state.update(h);
        }
    }

    while let Some(pair) = state.select_pair() {
        state.stats.spairs_processed += 1;
        let s = spoly_int(&state.polys[pair.i], &state.polys[pair.j], order);
        let h = {
            let reducers = state.reducers();
            reduce_full(s, &reducers, order, false, deadline)
        };
        let Some(h) = h else {
            return Err(state.exhausted("time limit reached"));
        };
        if h.is_zero() {
            state.stats.reductions_to_zero += 1;
        } else {
            state.stats.max_coefficient_bits = state.stats.max_coefficient_bits.max(h.bits());
            log::debug!(
                "basis +1: lm {:?}, {} terms, {} bits, {} pairs pending",
                h.lm(),
                h.terms.len(),
                h.bits(),
                state.pairs.len()
            );
            if h.lm().is_one() {
                state.update(h);
                break;
            }
            state.update(h);
        }
        state.check_budget()?;
    }

    let Completion { polys, active, mut stats, .. } = state;
    let kept: Vec<IntPoly> = polys.into_iter().zip(active).filter(|(_, a)| *a).map(|(p, _)| p).collect();
    let Some(generators) = interreduce(kept, order, deadline) else {
        stats.elapsed_ms = started.elapsed().as_millis() as u64;
        return Err(HbmError::BudgetExhausted { reason: "time limit reached".into(), stats });
    };
    for g in &generators {
        stats.max_coefficient_bits = stats.max_coefficient_bits.max(g.bits());
    }
    stats.elapsed_ms = started.elapsed().as_millis() as u64;
    Ok(GroebnerBasis { generators: generators.iter().map(|g| g.to_multi(&vars)).collect(), order, stats })
}

/// Minimalizes and tail-reduces a Gröbner basis, sorted by ascending leading monomial.
fn interreduce(mut gens: Vec<IntPoly>, order: MonomialOrder, deadline: Option<Instant>) -> Option<Vec<IntPoly>> {
    gens.sort_by(|a, b| order.cmp(a.lm(), b.lm()));
    if gens.iter().any(|g| g.lm().is_one()) {
        let one = gens.into_iter().find(|g| g.lm().is_one()).unwrap();
        return Some(vec![IntPoly { terms: vec![(one.terms[0].0, BigInt::one())], sugar: 0 }]);
    }
    let mut minimal: Vec<IntPoly> = Vec::new();
    for g in gens {
        if !minimal.iter().any(|h| h.lm().divides(g.lm())) {
            minimal.push(g);
        }
    }
    let mut out = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<&IntPoly> = minimal.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| p).collect();
        out.push(reduce_full(minimal[i].clone(), &others, order, false, deadline)?);
    }
    Some(out)
}

/// The generator of a lex basis that involves only the last ambient variable.
pub fn eliminate_univariate(basis: &GroebnerBasis) -> Result<MultiPoly> {
    if basis.order != MonomialOrder::Lex {
        return Err(HbmError::NotZeroDimensional("basis is not lexicographic".into()));
    }
    let last = basis.vars().len() - 1;
    basis
        .generators
        .iter()
        .find(|g| !g.is_constant() && g.support() == vec![last])
        .cloned()
        .ok_or_else(|| HbmError::NotZeroDimensional(format!("no generator in {} alone", basis.vars()[last])))
}

// ---------------------------------------------------------------------------
// FGLM conversion for zero-dimensional ideals.

/// Standard monomials of a zero-dimensional basis, ascending in its order.
pub fn normal_set(basis: &GroebnerBasis) -> Result<Vec<Monomial>> {
    let n = basis.vars().len();
    let leads: Vec<Monomial> = basis.generators.iter().map(|g| g.leading_monomial(basis.order).unwrap()).collect();
    if leads.iter().any(|l| l.is_one()) {
        return Ok(Vec::new());
    }
    // Zero-dimensional iff every variable has a pure power among the leading monomials.
    let mut bounds = vec![0u16; n];
    for v in 0..n {
        bounds[v] = leads
            .iter()
            .filter(|l| is_pure_power(l, v))
            .map(|l| l.exponent(v))
            .min()
            .ok_or_else(|| HbmError::NotZeroDimensional(format!("no pure power of {}", basis.vars()[v])))?;
    }
    let mut out = Vec::new();
    let mut stack = vec![Monomial::one(n)];
    let mut seen = std::collections::HashSet::new();
    while let Some(m) = stack.pop() {
        if !seen.insert(m) || leads.iter().any(|l| l.divides(&m)) {
            continue;
        }
        out.push(m);
        for v in 0..n {
            if m.exponent(v) + 1 < bounds[v] {
                let mut next = m;
                next.set_exponent(v, m.exponent(v) + 1);
                stack.push(next);
            }
        }
    }
    out.sort_by(|a, b| basis.order.cmp(a, b));
    Ok(out)
}

fn is_pure_power(m: &Monomial, v: usize) -> bool {
    m.exponent(v) > 0 && m.exponents().iter().enumerate().all(|(i, &e)| i == v || e == 0)
}

/// Column `num / den` with integer entries.
#[derive(Clone)]
struct IntColumn {
    den: BigInt,
    num: Vec<BigInt>,
}

impl IntColumn {
    fn unit(dim: usize, i: usize) -> Self {
        let mut num = vec![BigInt::zero(); dim];
        num[i] = BigInt::one();
        IntColumn { den: BigInt::one(), num }
    }

    fn from_rationals(v: &[Rational]) -> Self {
        let mut den = BigInt::one();
        for x in v {
            den = den.lcm(x.denom());
        }
        IntColumn { num: v.iter().map(|x| x.numer() * (&den / x.denom())).collect(), den }
    }
}

fn vector_content(v: &[BigInt]) -> BigInt {
    gcd_all(v)
}

/// Converts a zero-dimensional reduced basis to another order (FGLM).
pub fn fglm(basis: &GroebnerBasis, target: MonomialOrder) -> Result<GroebnerBasis> {
    fglm_strided(basis, target, 1, None)
}

/// FGLM on the subring generated by the other variables and v^stride, v the
/// last variable. The basis must be invariant under v → ζv for ζ a
/// stride-th root of unity; the result is expressed in the packed variable
/// v^stride → v.
fn fglm_strided(
    basis: &GroebnerBasis,
    target: MonomialOrder,
    stride: u16,
    deadline: Option<Instant>,
) -> Result<GroebnerBasis> {
    let started = Instant::now();
    let vars = basis.vars().clone();
    let n = vars.len();
    let last = n - 1;
    if basis.is_unit_ideal() {
        return Ok(GroebnerBasis { generators: basis.generators.clone(), order: target, stats: basis.stats.clone() });
    }
    let std_monos: Vec<Monomial> = normal_set(basis)?
        .into_iter()
        .filter(|m| m.exponent(last) % stride == 0)
        .map(|mut m| {
            m.set_exponent(last, m.exponent(last) / stride);
            m
        })
        .collect();
    let dim = std_monos.len();
    let index: HashMap<Monomial, usize> = std_monos.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    log::debug!("FGLM: quotient dimension {dim}");

    // Normal form of a packed monomial as an integer column over a common denominator.
    let to_column = |m: &Monomial| -> Result<IntColumn> {
        let mut wide = *m;
        wide.set_exponent(last, m.exponent(last) * stride);
        let r = basis.reduce(&MultiPoly::term(&vars, wide, Rational::one()));
        let mut v = vec![Rational::zero(); dim];
        for (m, c) in r.terms() {
            if m.exponent(last) % stride != 0 {
                return Err(HbmError::InvalidInput("basis is not invariant under the packing of the last variable".into()));
            }
            let mut packed = *m;
            packed.set_exponent(last, m.exponent(last) / stride);
            v[index[&packed]] = c.clone();
        }
        Ok(IntColumn::from_rationals(&v))
    };

    // Multiplication matrices, filled lazily column by column.
    let mut mult: Vec<Vec<Option<IntColumn>>> = vec![vec![None; dim]; n];
    // Image of w under x_var, as (integer vector z, L) with M·w = z / L.
    let mut mult_apply = |var: usize, w: &[BigInt]| -> Result<(Vec<BigInt>, BigInt)> {
        let mut l = BigInt::one();
        for (k, c) in w.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if mult[var][k].is_none() {
                let prod = std_monos[k].mul(&Monomial::var(n, var, 1));
                let col = match index.get(&prod) {
                    Some(&i) => IntColumn::unit(dim, i),
                    None => to_column(&prod)?,
                };
                mult[var][k] = Some(col);
            }
            l = l.lcm(&mult[var][k].as_ref().unwrap().den);
        }
        let mut out = vec![BigInt::zero(); dim];
        for (k, c) in w.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let col = mult[var][k].as_ref().unwrap();
            let f = c * (&l / &col.den);
            for (o, x) in out.iter_mut().zip(&col.num) {
                if !x.is_zero() {
                    *o += &f * x;
                }
            }
        }
        Ok((out, l))
    };

    // Staircase entries hold w_k = μ_k · NF(s_k) with w_k a primitive integer vector.
    // Echelon rows hold (vector, combination over the w_k, pivot) with
    // vector = Σ comb_k w_k.
    let mut rows: Vec<(Vec<BigInt>, Vec<BigInt>, usize)> = Vec::new();
    let mut staircase: Vec<(Monomial, Vec<BigInt>, Rational)> = Vec::new();
    let mut new_basis: Vec<MultiPoly> = Vec::new();
    let mut new_leads: Vec<Monomial> = Vec::new();

    let mut candidates: BTreeMap<OrdKey, (Monomial, Option<(usize, usize)>)> = BTreeMap::new();
    let one = Monomial::one(n);
    candidates.insert(OrdKey(one, target), (one, None));

    while let Some((_, (mono, origin))) = candidates.pop_first() {
        if new_leads.iter().any(|l| l.divides(&mono)) {
            continue;
        }
        if deadline.is_some_and(|d| Instant::now() > d) {
            let mut stats = basis.stats.clone();
            stats.elapsed_ms += started.elapsed().as_millis() as u64;
            return Err(HbmError::BudgetExhausted { reason: "time limit reached during FGLM".into(), stats });
        }
        let (v, mu) = match origin {
            None => {
                let c = to_column(&one)?;
                (c.num, Rational::from_integer(c.den))
            }
            Some((s, var)) => {
                let (z, l) = mult_apply(var, &staircase[s].1)?;
                // NF(x·s) = z / (L μ_s).
                (z, &staircase[s].2 * Rational::from_integer(l))
            }
        };
        let g = vector_content(&v);
        let (v, mu) = if g.is_zero() || g.is_one() {
            (v, mu)
        } else {
            (v.iter().map(|x| x / &g).collect(), mu / Rational::from_integer(g))
        };

        let k = staircase.len();
        let mut red = v.clone();
        let mut comb = vec![BigInt::zero(); k + 1];
        comb[k] = BigInt::one();
        for (row, rcomb, piv) in &rows {
            if red[*piv].is_zero() {
                continue;
            }
            let d = red[*piv].gcd(&row[*piv]);
            let mut a = &row[*piv] / &d;
            let mut b = &red[*piv] / &d;
            if a.is_negative() {
                a = -a;
                b = -b;
            }
            for (x, y) in red.iter_mut().zip(row) {
                *x = &*x * &a - &b * y;
            }
            for (x, y) in comb.iter_mut().zip(rcomb) {
                *x = &*x * &a - &b * y;
            }
            for x in comb.iter_mut().skip(rcomb.len()) {
                *x *= &a;
            }
            let c = vector_content(&red).gcd(&vector_content(&comb));
            if !c.is_one() && !c.is_zero() {
                for x in red.iter_mut().chain(comb.iter_mut()) {
                    *x /= &c;
                }
            }
        }
        match red.iter().position(|x| !x.is_zero()) {
            None => {
                // Σ comb_k μ_k NF(s_k) = 0 gives the generator Σ comb_k μ_k s_k.
                let mut terms = vec![(mono, Rational::from_integer(comb[k].clone()) * &mu)];
                for (j, (sm, _, mu_j)) in staircase.iter().enumerate() {
                    if !comb[j].is_zero() {
                        terms.push((*sm, Rational::from_integer(comb[j].clone()) * mu_j));
                    }
                }
                new_basis.push(MultiPoly::from_terms(&vars, terms));
                new_leads.push(mono);
            }
            Some(piv) => {
                staircase.push((mono, v, mu));
                for r in rows.iter_mut() {
                    r.1.push(BigInt::zero());
                }
                rows.push((red, comb, piv));
                for var in 0..n {
                    let next = mono.mul(&Monomial::var(n, var, 1));
                    candidates.entry(OrdKey(next, target)).or_insert((next, Some((k, var))));
                }
                if staircase.len() > dim {
                    return Err(HbmError::NotZeroDimensional("staircase exceeds quotient dimension".into()));
                }
            }
        }
    }

    let mut gens: Vec<IntPoly> = new_basis.iter().map(|g| IntPoly::from_multi(g, target)).collect();
    gens.sort_by(|a, b| target.cmp(a.lm(), b.lm()));
    let mut stats = basis.stats.clone();
    for g in &gens {
        stats.max_coefficient_bits = stats.max_coefficient_bits.max(g.bits());
    }
    stats.elapsed_ms += started.elapsed().as_millis() as u64;
    Ok(GroebnerBasis { generators: gens.iter().map(|g| g.to_multi(&vars)).collect(), order: target, stats })
}

#[derive(Clone, Copy, PartialEq, Eq)]
struct OrdKey(Monomial, MonomialOrder);

impl PartialOrd for OrdKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.1.cmp(&self.0, &other.0)
    }
}

/// How a lexicographic basis should be obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LexStrategy {
    /// Buchberger directly in lex.
    Direct,
    /// Buchberger in grevlex followed by FGLM.
    ViaGrevlex,
    /// As `ViaGrevlex`, but when the last variable only occurs in powers of
    /// v^k the grevlex computation also runs on the substitution v^k → v.
    /// Much faster on some systems, much slower on others.
    PackedGrevlex,
}

/// Reduced lex basis of a zero-dimensional ideal by the chosen route.
///
/// When the last variable only occurs with exponents divisible by some k ≥ 2,
/// the lex work runs on the substitution v^k → v and the result is expanded
/// back; for lex with that variable smallest this commutes with taking the
/// reduced basis. The budget's time limit covers the whole computation.
pub fn lex_basis(gens: &[MultiPoly], strategy: LexStrategy, budget: &Budget) -> Result<GroebnerBasis> {
    let started = Instant::now();
    let deadline = budget.time_limit.map(|l| started + l);
    let stride = last_variable_stride(gens);
    let pack = |gens: &[MultiPoly]| -> Vec<MultiPoly> { gens.iter().map(|g| rescale_last_variable(g, 1, stride)).collect() };
    let mut basis = match (strategy, stride >= 2) {
        (LexStrategy::Direct, false) => buchberger_until(gens, MonomialOrder::Lex, budget, started, deadline)?,
        (LexStrategy::Direct, true) => buchberger_until(&pack(gens), MonomialOrder::Lex, budget, started, deadline)?,
        (LexStrategy::ViaGrevlex, _) | (LexStrategy::PackedGrevlex, false) => {
            let g = buchberger_until(gens, MonomialOrder::GrevLex, budget, started, deadline)?;
            fglm_strided(&g, MonomialOrder::Lex, stride.max(1), deadline)?
        }
        (LexStrategy::PackedGrevlex, true) => {
            let g = buchberger_until(&pack(gens), MonomialOrder::GrevLex, budget, started, deadline)?;
            fglm_strided(&g, MonomialOrder::Lex, 1, deadline)?
        }
    };
    if stride >= 2 {
        basis.generators = basis.generators.iter().map(|g| rescale_last_variable(g, stride, 1)).collect();
    }
    basis.stats.elapsed_ms = started.elapsed().as_millis() as u64;
    Ok(basis)
}

/// gcd of the exponents of the last variable over all terms (0 if absent).
fn last_variable_stride(gens: &[MultiPoly]) -> u16 {
    let mut g = 0u16;
    for p in gens {
        let last = p.nvars() - 1;
        for (m, _) in p.terms() {
            g = g.gcd(&m.exponent(last));
        }
    }
    g
}

/// Maps each exponent e of the last variable to e·num/den.
fn rescale_last_variable(p: &MultiPoly, num: u16, den: u16) -> MultiPoly {
    let last = p.nvars() - 1;
    MultiPoly::from_terms(
        p.vars(),
        p.terms().iter().map(|(m, c)| {
            let mut m = *m;
            m.set_exponent(last, m.exponent(last) * num / den);
            (m, c.clone())
        }),
    )
}
