//! Exact symbolic form of the series terms.
//!
//! For odd `N = 2i+1 ≥ 3` the term is
//!
//! ```text
//! A_N = -P_cyc( sum_{k=1..i} c_k sum_{odd a_1+...+a_{2k+1} = N} A_{a_1} ∘ ... ∘ A_{a_{2k+1}} )
//! ```
//!
//! with `c_k` the arcsine coefficient. The inner sum runs over ordered
//! tuples; we enumerate multisets instead and weight each one by its number
//! of distinct orderings.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use super::scalar::arcsin_coeff;
use crate::error::{Error, Result};

/// Largest order the generator accepts.
pub const MAX_ORDER: usize = 41;

/// One monomial `coefficient · A_{p_1} ∘ ... ∘ A_{p_r}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Summand {
    pub coefficient: BigRational,
    /// Odd parts in non-increasing order.
    pub partition: Vec<usize>,
}

impl Summand {
    /// Monomial as `(order, exponent)` pairs, highest order first.
    pub fn powers(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for &p in &self.partition {
            match out.last_mut() {
                Some((q, e)) if *q == p => *e += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicTerm {
    pub order: usize,
    /// False only for the order-one term `A_1 = eta`.
    pub projected: bool,
    pub summands: Vec<Summand>,
}

fn check_order(order: usize) -> Result<()> {
    if order % 2 == 0 {
        return Err(Error::InvalidOrder(order));
    }
    if order > MAX_ORDER {
        return Err(Error::OrderTooLarge { requested: order, cap: MAX_ORDER });
    }
    Ok(())
}

/// All multisets of `parts` odd positive integers summing to `total`, each
/// listed in non-increasing order.
pub fn odd_partitions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn rec(rem: usize, slots: usize, max_part: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slots == 0 {
            if rem == 0 {
                out.push(cur.clone());
            }
            return;
        }
        // every remaining slot needs at least 1
        if rem < slots {
            return;
        }
        let mut p = max_part.min(rem - (slots - 1));
        if p % 2 == 0 {
            p -= 1;
        }
        loop {
            cur.push(p);
            rec(rem - p, slots - 1, p, cur, out);
            cur.pop();
            if p < 3 {
                break;
            }
            p -= 2;
        }
    }
    let mut out = Vec::new();
    if parts > 0 && total >= parts {
        rec(total, parts, total, &mut Vec::new(), &mut out);
    }
    out
}

/// Number of distinct orderings of a multiset, `r! / prod(mult!)`.
pub fn permutation_count(partition: &[usize]) -> BigInt {
    let fact = |k: usize| (1..=k).fold(BigInt::one(), |a, v| a * BigInt::from(v));
    let mut denom = BigInt::one();
    let mut run = 0;
    for (idx, p) in partition.iter().enumerate() {
        run += 1;
        if idx + 1 == partition.len() || partition[idx + 1] != *p {
            denom *= fact(run);
            run = 0;
        }
    }
    fact(partition.len()) / denom
}

/// Symbolic terms of orders `1, 3, ..., max_order`.
pub fn symbolic_terms(max_order: usize) -> Result<Vec<SymbolicTerm>> {
    check_order(max_order)?;
    let mut terms = vec![SymbolicTerm {
        order: 1,
        projected: false,
        summands: vec![Summand { coefficient: BigRational::one(), partition: vec![1] }],
    }];
    for order in (3..=max_order).step_by(2) {
        let i = (order - 1) / 2;
        let mut summands = Vec::new();
        for k in (1..=i).rev() {
            let ck = arcsin_coeff(k as u32);
            for partition in odd_partitions(order, 2 * k + 1) {
                let coefficient = &ck * BigRational::from_integer(permutation_count(&partition));
                summands.push(Summand { coefficient, partition });
            }
        }
        terms.push(SymbolicTerm { order, projected: true, summands });
    }
    Ok(terms)
}

/// Numeric coefficients for evaluation.
#[derive(Debug, Clone)]
pub(crate) struct CompiledTerm {
    pub summands: Vec<(f64, Vec<(usize, usize)>)>,
}

pub(crate) fn compile(term: &SymbolicTerm) -> CompiledTerm {
    CompiledTerm {
        summands: term
            .summands
            .iter()
            .map(|s| (s.coefficient.to_f64().unwrap_or(f64::NAN), s.powers()))
            .collect(),
    }
}

fn ratio_text(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn factor_text(order: usize) -> String {
    if order == 1 {
        "eta".to_string()
    } else {
        format!("A{order}")
    }
}

/// Plain-text rendering, one line per term.
pub fn format_text(terms: &[SymbolicTerm]) -> String {
    let mut out = String::new();
    for t in terms {
        if !t.projected {
            let _ = writeln!(out, "A{} = eta", t.order);
            continue;
        }
        let body: Vec<String> = t
            .summands
            .iter()
            .map(|s| {
                let mono: Vec<String> = s
                    .powers()
                    .iter()
                    .map(|&(p, e)| if e == 1 { factor_text(p) } else { format!("{}^{e}", factor_text(p)) })
                    .collect();
                format!("{} {}", ratio_text(&s.coefficient), mono.join(" o "))
            })
            .collect();
        let _ = writeln!(out, "A{} = -Pcyc( {} )", t.order, body.join(" + "));
    }
    out
}

/// LaTeX rendering using Hadamard powers.
pub fn format_latex(terms: &[SymbolicTerm]) -> String {
    let factor = |p: usize| if p == 1 { "\\eta".to_string() } else { format!("A_{{{p}}}(\\eta)") };
    let mut out = String::new();
    for t in terms {
        if !t.projected {
            let _ = writeln!(out, "A_{{{}}}(\\eta) = \\eta \\\\", t.order);
            continue;
        }
        let body: Vec<String> = t
            .summands
            .iter()
            .map(|s| {
                let mono: Vec<String> = s
                    .powers()
                    .iter()
                    .map(|&(p, e)| {
                        if e == 1 {
                            factor(p)
                        } else if p == 1 {
                            format!("\\eta^{{\\circ {e}}}")
                        } else {
                            format!("({})^{{\\circ {e}}}", factor(p))
                        }
                    })
                    .collect();
                let c = &s.coefficient;
                let coeff = if c.denom().is_one() {
                    c.numer().to_string()
                } else {
                    format!("\\frac{{{}}}{{{}}}", c.numer(), c.denom())
                };
                format!("{coeff} {}", mono.join(" \\circ "))
            })
            .collect();
        let _ = writeln!(
            out,
            "A_{{{}}}(\\eta) = -\\mathcal{{P}}_{{\\mathrm{{cyc}}}}\\left( {} \\right) \\\\",
            t.order,
            body.join(" + ")
        );
    }
    out
}

/// CSV rendering: `order,numerator,denominator,coefficient,partition`.
///
/// Coefficients are those inside `-P_cyc(...)`; the sign is not folded in.
pub fn format_csv(terms: &[SymbolicTerm]) -> String {
    let mut out = String::from("order,numerator,denominator,coefficient,partition\n");
    for t in terms {
        for s in &t.summands {
            let parts: Vec<String> = s.partition.iter().map(|p| p.to_string()).collect();
            let _ = writeln!(
                out,
                "{},{},{},{:.17e},{}",
                t.order,
                s.coefficient.numer(),
                s.coefficient.denom(),
                s.coefficient.to_f64().unwrap_or(f64::NAN),
                parts.join(" ")
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn coeff_of(term: &SymbolicTerm, partition: &[usize]) -> BigRational {
        term.summands
            .iter()
            .find(|s| s.partition == partition)
            .map(|s| s.coefficient.clone())
            .unwrap_or_else(|| panic!("partition {partition:?} missing"))
    }

    #[test]
    fn partitions_are_odd_and_sum() {
        for total in (3..=21).step_by(2) {
            for parts in (3..=total).step_by(2) {
                for p in odd_partitions(total, parts) {
                    assert_eq!(p.len(), parts);
                    assert_eq!(p.iter().sum::<usize>(), total);
                    assert!(p.iter().all(|x| x % 2 == 1));
                    assert!(p.windows(2).all(|w| w[0] >= w[1]));
                }
            }
        }
        assert_eq!(odd_partitions(7, 3), vec![vec![5, 1, 1], vec![3, 3, 1]]);
        assert_eq!(odd_partitions(5, 5), vec![vec![1, 1, 1, 1, 1]]);
        assert!(odd_partitions(5, 7).is_empty());
    }

    #[test]
    fn partition_counts_match_brute_force() {
        // brute force over ordered tuples of odd parts, deduplicated by sorting
        fn brute(total: usize, parts: usize) -> usize {
            let mut seen = std::collections::BTreeSet::new();
            let mut stack = vec![(Vec::new(), 0usize)];
            while let Some((cur, sum)) = stack.pop() {
                if cur.len() == parts {
                    if sum == total {
                        let mut s: Vec<usize> = cur.clone();
                        s.sort_unstable();
                        seen.insert(s);
                    }
                    continue;
                }
                for p in (1..=total).step_by(2) {
                    if sum + p <= total {
                        let mut next = cur.clone();
                        next.push(p);
                        stack.push((next, sum + p));
                    }
                }
            }
            seen.len()
        }
        for total in (3..=13).step_by(2) {
            for parts in (3..=total).step_by(2) {
                assert_eq!(odd_partitions(total, parts).len(), brute(total, parts), "{total} {parts}");
            }
        }
    }

    #[test]
    fn permutation_counts() {
        assert_eq!(permutation_count(&[1, 1, 1]), BigInt::from(1));
        assert_eq!(permutation_count(&[3, 1, 1]), BigInt::from(3));
        assert_eq!(permutation_count(&[3, 1, 1, 1, 1]), BigInt::from(5));
        assert_eq!(permutation_count(&[5, 3, 1]), BigInt::from(6));
    }

    #[test]
    fn low_order_coefficients() {
        let t = symbolic_terms(7).unwrap();
        assert_eq!(t.len(), 4);
        assert!(!t[0].projected);
        assert_eq!(t[1].summands.len(), 1);
        assert_eq!(coeff_of(&t[1], &[1, 1, 1]), rat(1, 6));
        // ordered tuples (3,1,1),(1,3,1),(1,1,3) each weighted 1/6
        assert_eq!(coeff_of(&t[2], &[3, 1, 1]), rat(1, 2));
        assert_eq!(coeff_of(&t[2], &[1, 1, 1, 1, 1]), rat(3, 40));
        assert_eq!(t[3].summands.len(), 4);
        assert_eq!(coeff_of(&t[3], &[1; 7]), rat(5, 112));
        assert_eq!(coeff_of(&t[3], &[3, 1, 1, 1, 1]), rat(3, 8));
        assert_eq!(coeff_of(&t[3], &[3, 3, 1]), rat(1, 2));
        assert_eq!(coeff_of(&t[3], &[5, 1, 1]), rat(1, 2));
    }

    #[test]
    fn order_validation() {
        assert_eq!(symbolic_terms(4), Err(Error::InvalidOrder(4)));
        assert!(matches!(symbolic_terms(43), Err(Error::OrderTooLarge { .. })));
        assert_eq!(symbolic_terms(41).unwrap().len(), 21);
    }

    #[test]
    fn text_output() {
        let text = format_text(&symbolic_terms(5).unwrap());
        assert!(text.contains("A1 = eta"));
        assert!(text.contains("A3 = -Pcyc( 1/6 eta^3 )"));
        assert!(text.contains("A5 = -Pcyc( 3/40 eta^5 + 1/2 A3 o eta^2 )"));
        let csv = format_csv(&symbolic_terms(3).unwrap());
        assert!(csv.lines().nth(2).unwrap().starts_with("3,1,6,"));
        assert!(format_latex(&symbolic_terms(3).unwrap()).contains("\\frac{1}{6} \\eta^{\\circ 3}"));
    }
}
