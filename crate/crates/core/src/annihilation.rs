//! The annihilation Lie algebra of `𝔅(p)`, spanned by `L_{i,m} := (L_i)_{(m+1)}`.

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::conformal::{BlockAlgebra, GenIndex, LambdaElement};
use crate::poly::{Poly, Var};
use crate::rat;
use crate::report::CheckEntry;

/// `L_{i,m}` with `m ≥ −1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct AnnGen {
    pub i: GenIndex,
    pub m: i64,
}

impl AnnGen {
    pub fn new(i: GenIndex, m: i64) -> Self {
        assert!(m >= -1, "L_{{{i},{m}}} is outside the basis");
        AnnGen { i, m }
    }
}

impl fmt::Display for AnnGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L_{{{},{}}}", self.i, self.m)
    }
}

/// Finite combination of `L_{i,m}` with coefficients polynomial in p.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AnnElement {
    terms: BTreeMap<AnnGen, Poly>,
}

impl AnnElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(g: AnnGen, coeff: Poly) -> Self {
        let mut e = Self::zero();
        e.add_term(g, &coeff);
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, g: AnnGen) -> Poly {
        self.terms.get(&g).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (AnnGen, &Poly)> {
        self.terms.iter().map(|(&g, c)| (g, c))
    }

    pub fn add_term(&mut self, g: AnnGen, coeff: &Poly) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry(g).or_default();
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&g);
        }
    }

    pub fn add(&mut self, other: &AnnElement) {
        for (&g, c) in &other.terms {
            self.add_term(g, c);
        }
    }

    pub fn scale(&self, f: &Poly) -> AnnElement {
        let mut out = AnnElement::zero();
        for (&g, c) in &self.terms {
            out.add_term(g, &(c * f));
        }
        out
    }
}

impl fmt::Display for AnnElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (g, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})·{g}")?;
        }
        Ok(())
    }
}

/// `k!` times the `λ^k` coefficient of `[L_i λ L_j]`.
pub fn kproduct(alg: &BlockAlgebra, i: GenIndex, j: GenIndex, k: u32) -> LambdaElement {
    let fact = Poly::constant(rat::factorial(k as u64));
    alg.bracket_gen_var(i, j, Var::Lambda)
        .map(|f| &f.coefficient_of(Var::Lambda, k as u8) * &fact)
}

/// `((j+p)(m+1) − (i+p)(n+1)) L_{i+j,m+n}`.
pub fn ann_bracket_closed(alg: &BlockAlgebra, a: AnnGen, b: AnnGen) -> AnnElement {
    let params = alg.params();
    let coeff = &(&params.affine(b.i as i64, 1) * &Poly::int(a.m + 1))
        - &(&params.affine(a.i as i64, 1) * &Poly::int(b.m + 1));
    if a.m + b.m < -1 {
        debug_assert!(coeff.is_zero());
        return AnnElement::zero();
    }
    AnnElement::single(AnnGen::new(a.i + b.i, a.m + b.m), coeff)
}

/// `(f(∂) L_k)_{(r)}` in annihilation coordinates, using
/// `(∂^e a)_{(r)} = (−1)^e r(r−1)⋯(r−e+1) a_{(r−e)}`.
fn mode(element: &LambdaElement, r: i64) -> AnnElement {
    let mut out = AnnElement::zero();
    if r < 0 {
        return out;
    }
    for (k, f) in element.components() {
        let top = f.degree_in(Var::Partial).unwrap_or(0) as i64;
        for e in 0..=top.min(r) {
            let mut falling = rat::int(if e % 2 == 0 { 1 } else { -1 });
            for t in 0..e {
                falling *= rat::int(r - t);
            }
            let c = f.coefficient_of(Var::Partial, e as u8).scale(&falling);
            out.add_term(AnnGen::new(k, r - e - 1), &c);
        }
    }
    out
}

/// `[(L_i)_{(m+1)}, (L_j)_{(n+1)}] = Σ_k C(m+1,k) ((L_i)_{(k)} L_j)_{(m+n+2−k)}`.
pub fn ann_bracket_derived(alg: &BlockAlgebra, a: AnnGen, b: AnnGen) -> AnnElement {
    let (big_m, big_n) = (a.m + 1, b.m + 1);
    let mut out = AnnElement::zero();
    for k in 0..=big_m {
        let prod = kproduct(alg, a.i, b.i, k as u32);
        if prod.is_zero() {
            continue;
        }
        let binom = Poly::constant(rat::binomial(big_m as u64, k as u64));
        out.add(&mode(&prod, big_m + big_n - k).scale(&binom));
    }
    out
}

/// Closed bracket extended bilinearly.
pub fn ann_bracket(alg: &BlockAlgebra, x: &AnnElement, y: &AnnElement) -> AnnElement {
    let mut out = AnnElement::zero();
    for (a, ca) in x.terms() {
        for (b, cb) in y.terms() {
            out.add(&ann_bracket_closed(alg, a, b).scale(&(ca * cb)));
        }
    }
    out
}

/// Generators `L_{i,m}` with `i ≤ n` and `−1 ≤ m ≤ n`.
pub fn grid(n: usize) -> Vec<AnnGen> {
    (0..=n)
        .flat_map(|i| (-1..=n as i64).map(move |m| AnnGen::new(i, m)))
        .collect()
}

fn ann_entry(indices: &[AnnGen], residual: &AnnElement) -> CheckEntry {
    let flat = indices
        .iter()
        .flat_map(|g| [g.i, (g.m + 1) as usize])
        .collect();
    CheckEntry::from_display(flat, residual.is_zero(), residual)
}

/// Derived minus closed bracket over the grid. Entry indices are
/// `(i, m+1, j, n+1)` so they stay non-negative.
pub fn closed_vs_derived_grid(alg: &BlockAlgebra, n: usize) -> Vec<CheckEntry> {
    let gens = grid(n);
    let pairs: Vec<(AnnGen, AnnGen)> = gens
        .iter()
        .flat_map(|&a| gens.iter().map(move |&b| (a, b)))
        .collect();
    pairs
        .into_par_iter()
        .map(|(a, b)| {
            let mut diff = ann_bracket_derived(alg, a, b);
            diff.add(&ann_bracket_closed(alg, a, b).scale(&Poly::int(-1)));
            ann_entry(&[a, b], &diff)
        })
        .collect()
}

pub fn antisymmetry_grid(alg: &BlockAlgebra, n: usize) -> Vec<CheckEntry> {
    let gens = grid(n);
    let pairs: Vec<(AnnGen, AnnGen)> = gens
        .iter()
        .flat_map(|&a| gens.iter().map(move |&b| (a, b)))
        .collect();
    pairs
        .into_par_iter()
        .map(|(a, b)| {
            let mut sum = ann_bracket_closed(alg, a, b);
            sum.add(&ann_bracket_closed(alg, b, a));
            ann_entry(&[a, b], &sum)
        })
        .collect()
}

/// Closed structure constant `(j(m+1) − i(n+1)) + (m−n)p` as integer
/// coefficients `[constant, p]`.
fn closed_affine(a: AnnGen, b: AnnGen) -> [i128; 2] {
    let (i, j) = (a.i as i128, b.i as i128);
    let (m1, n1) = (a.m as i128 + 1, b.m as i128 + 1);
    [j * m1 - i * n1, m1 - n1]
}

/// Coefficient of `L_{i+j+k, m+n+r}` in `[a,[b,c]]`, as a quadratic in `p`.
fn nested_closed(a: AnnGen, b: AnnGen, c: AnnGen) -> [i128; 3] {
    if b.m + c.m < -1 {
        return [0; 3];
    }
    let inner = closed_affine(b, c);
    let outer = closed_affine(a, AnnGen::new(b.i + c.i, b.m + c.m));
    [
        inner[0] * outer[0],
        inner[0] * outer[1] + inner[1] * outer[0],
        inner[1] * outer[1],
    ]
}

/// `[a,[b,c]] + [b,[c,a]] + [c,[a,b]]` over all triples in the grid. Every
/// term is a multiple of `L_{i+j+k, m+n+r}` whose coefficient is an integer
/// quadratic in `p`, so the sum is formed exactly in integers.
pub fn jacobi_grid(alg: &BlockAlgebra, n: usize) -> Vec<CheckEntry> {
    let gens = grid(n);
    let triples: Vec<(AnnGen, AnnGen, AnnGen)> = gens
        .iter()
        .flat_map(|&a| {
            let gens = &gens;
            gens.iter()
                .flat_map(move |&b| gens.iter().map(move |&c| (a, b, c)))
        })
        .collect();
    let params = alg.params();
    triples
        .into_par_iter()
        .map(|(a, b, c)| {
            let mut sum = [0i128; 3];
            for t in [nested_closed(a, b, c), nested_closed(b, c, a), nested_closed(c, a, b)] {
                for (s, x) in sum.iter_mut().zip(t) {
                    *s += x;
                }
            }
            let coeff = params.specialize(&Poly::from_terms((0u8..3).map(|e| {
                (crate::poly::Monomial::var(Var::P, e), rat::int(sum[e as usize] as i64))
            })));
            let residual = if coeff.is_zero() || a.m + b.m + c.m < -1 {
                AnnElement::zero()
            } else {
                AnnElement::single(AnnGen::new(a.i + b.i + c.i, a.m + b.m + c.m), coeff)
            };
            ann_entry(&[a, b, c], &residual)
        })
        .collect()
}

/// Structure constants as CSV rows `i,m,j,n,coefficient,target_i,target_m`,
/// ordered by `(i, m, j, n)`.
pub fn structure_table_csv(alg: &BlockAlgebra, n: usize) -> String {
    let gens = grid(n);
    let mut out = String::from("i,m,j,n,coefficient,target_i,target_m\n");
    for &a in &gens {
        for &b in &gens {
            let coeff = ann_bracket_closed(alg, a, b)
                .terms()
                .next()
                .map(|(_, c)| c.clone())
                .unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                a.i,
                a.m,
                b.i,
                b.m,
                coeff,
                a.i + b.i,
                a.m + b.m
            )
            .expect("writing to a String");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::AlgebraParams;
    use crate::poly::{c, v};
    use crate::report::failures;

    fn formal() -> BlockAlgebra {
        BlockAlgebra::new(AlgebraParams::formal())
    }

    #[test]
    fn kproduct_examples() {
        let alg = formal();
        let p = v(Var::P);
        assert_eq!(
            kproduct(&alg, 1, 2, 0),
            LambdaElement::single(3, &(&c(1) + &p) * &v(Var::Partial))
        );
        assert_eq!(kproduct(&alg, 1, 2, 1), LambdaElement::single(3, &c(3) + &(&c(2) * &p)));
        assert!(kproduct(&alg, 1, 2, 5).is_zero());
    }

    #[test]
    fn closed_examples() {
        let m1 = BlockAlgebra::new(AlgebraParams::int(-1).unwrap());
        let got = ann_bracket_closed(&m1, AnnGen::new(1, 0), AnnGen::new(2, 1));
        assert_eq!(got, AnnElement::single(AnnGen::new(3, 1), Poly::one()));
        assert!(ann_bracket_closed(&m1, AnnGen::new(2, 3), AnnGen::new(2, 3)).is_zero());

        let alg = formal();
        for n in 0..4 {
            let got = ann_bracket_closed(&alg, AnnGen::new(0, -1), AnnGen::new(3, n));
            let want = -(&v(Var::P) * &Poly::int(n + 1));
            assert_eq!(got, AnnElement::single(AnnGen::new(3, n - 1), want));
        }
    }

    #[test]
    fn derived_examples() {
        let m1 = BlockAlgebra::new(AlgebraParams::int(-1).unwrap());
        assert_eq!(
            ann_bracket_derived(&m1, AnnGen::new(1, 0), AnnGen::new(2, 1)),
            AnnElement::single(AnnGen::new(3, 1), Poly::one())
        );
        assert!(ann_bracket_derived(&formal(), AnnGen::new(0, -1), AnnGen::new(0, -1)).is_zero());
    }

    #[test]
    fn integer_jacobiator_matches_bracket() {
        let alg = formal();
        let el = |g: AnnGen| AnnElement::single(g, Poly::one());
        let gens = grid(2);
        for &a in &gens {
            for &b in &gens {
                for &c in &gens {
                    let want = ann_bracket(&alg, &el(a), &ann_bracket(&alg, &el(b), &el(c)));
                    let mut got = AnnElement::zero();
                    let q = nested_closed(a, b, c);
                    if a.m + b.m + c.m >= -1 {
                        let p = v(Var::P);
                        let f = &(&Poly::int(q[0] as i64) + &(&Poly::int(q[1] as i64) * &p))
                            + &(&Poly::int(q[2] as i64) * &p.pow(2));
                        got.add_term(AnnGen::new(a.i + b.i + c.i, a.m + b.m + c.m), &f);
                    }
                    assert_eq!(got, want, "{a:?} {b:?} {c:?}");
                }
            }
        }
    }

    #[test]
    fn small_grids_agree() {
        let alg = formal();
        assert_eq!(failures(&closed_vs_derived_grid(&alg, 3)), 0);
        assert_eq!(failures(&antisymmetry_grid(&alg, 3)), 0);
        assert_eq!(failures(&jacobi_grid(&alg, 2)), 0);
    }

    #[test]
    fn csv_rows_are_ordered() {
        let m1 = BlockAlgebra::new(AlgebraParams::int(-1).unwrap());
        let csv = structure_table_csv(&m1, 1);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 1 + 6 * 6);
        assert_eq!(lines[1], "0,-1,0,-1,0,0,-2");
        assert!(lines.contains(&"1,0,1,0,0,2,0"));
    }
}
