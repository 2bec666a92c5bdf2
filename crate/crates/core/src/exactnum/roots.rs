use num_traits::{Signed, Zero};

use super::{abs, int, pow2, to_f64, Rational};
use crate::weylops::Polynomial;

/// An isolated real root: the unique root of `factor` in `[lo, hi]`.
///
/// `lo == hi` means the root is exactly rational and known.
#[derive(Debug, Clone, PartialEq)]
pub struct RealRoot {
    pub lo: Rational,
    pub hi: Rational,
    pub multiplicity: usize,
    factor: Polynomial<Rational>,
}

impl RealRoot {
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / int(2)
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn approx(&self) -> f64 {
        to_f64(&self.midpoint())
    }

    /// Squarefree factor whose simple root this is.
    pub fn factor(&self) -> &Polynomial<Rational> {
        &self.factor
    }

    /// Bisects until the enclosing interval is no wider than `tol`.
    pub fn refine(&mut self, tol: &Rational) {
        if self.is_exact() {
            return;
        }
        let mut sign_lo = self.factor.eval(&self.lo).is_positive();
        while &self.width() > tol {
            let mid = self.midpoint();
            let v = self.factor.eval(&mid);
            if v.is_zero() {
                self.lo = mid.clone();
                self.hi = mid;
                return;
            }
            if v.is_positive() == sign_lo {
                self.lo = mid;
                sign_lo = v.is_positive();
            } else {
                self.hi = mid;
            }
        }
    }

    fn halve(&mut self) {
        let w = self.width() / int(2);
        self.refine(&w);
    }
}

/// Yun's squarefree decomposition: `p = c · Π fᵢ^mᵢ` with `fᵢ` monic,
/// squarefree and pairwise coprime. Returns `(fᵢ, mᵢ)` for nonconstant `fᵢ`.
pub fn squarefree_factors(p: &Polynomial<Rational>) -> Vec<(Polynomial<Rational>, usize)> {
    let mut out = Vec::new();
    if p.degree().unwrap_or(0) == 0 {
        return out;
    }
    let f = p.monic();
    let df = f.derivative();
    let a0 = f.gcd(&df);
    let mut b = f.div_rem(&a0).0;
    let c = df.div_rem(&a0).0;
    let mut d = &c - &b.derivative();
    let mut mult = 1;
    while b.degree().unwrap_or(0) > 0 {
        let a = b.gcd(&d);
        let b_next = b.div_rem(&a).0;
        let c_next = d.div_rem(&a).0;
        if a.degree().unwrap_or(0) > 0 {
            out.push((a, mult));
        }
        d = &c_next - &b_next.derivative();
        b = b_next;
        mult += 1;
    }
    out
}

/// Sturm chain `p, p', -rem(p, p'), …`, each member scaled by a positive
/// constant to keep coefficients small.
pub fn sturm_sequence(p: &Polynomial<Rational>) -> Vec<Polynomial<Rational>> {
    let normalize = |q: Polynomial<Rational>| match q.leading() {
        Some(l) => {
            let s = int(1) / abs(l);
            q.scale(&s)
        }
        None => q,
    };
    let mut seq = vec![normalize(p.clone()), normalize(p.derivative())];
    while let Some(last) = seq.last() {
        if last.degree().unwrap_or(0) == 0 {
            break;
        }
        let prev = &seq[seq.len() - 2];
        let (_, r) = prev.div_rem(last);
        if r.is_zero() {
            break;
        }
        seq.push(normalize(-&r));
    }
    seq
}

fn sign_changes(seq: &[Polynomial<Rational>], x: &Rational) -> usize {
    let mut changes = 0;
    let mut last: Option<bool> = None;
    for q in seq {
        let v = q.eval(x);
        if v.is_zero() {
            continue;
        }
        let pos = v.is_positive();
        if last.is_some_and(|l| l != pos) {
            changes += 1;
        }
        last = Some(pos);
    }
    changes
}

/// Power of two strictly exceeding every root magnitude (Cauchy bound).
fn root_bound(p: &Polynomial<Rational>) -> Rational {
    let lead = abs(p.leading().expect("nonzero polynomial"));
    let max = p
        .coeffs()
        .iter()
        .take(p.coeffs().len() - 1)
        .map(|c| abs(c) / &lead)
        .fold(Rational::zero(), |a, b| if b > a { b } else { a });
    let bound = max + int(1);
    let mut k = 0;
    while pow2(k) <= bound {
        k += 1;
    }
    pow2(k)
}

fn isolate_squarefree(f: &Polynomial<Rational>, mult: usize, out: &mut Vec<RealRoot>) {
    let seq = sturm_sequence(f);
    let bound = root_bound(f);
    let mut stack = vec![(-bound.clone(), bound)];
    while let Some((lo, hi)) = stack.pop() {
        let count = sign_changes(&seq, &lo) - sign_changes(&seq, &hi);
        if count == 0 {
            continue;
        }
        if count == 1 {
            out.push(RealRoot { lo, hi, multiplicity: mult, factor: f.clone() });
            continue;
        }
        let mid = (&lo + &hi) / int(2);
        if f.eval(&mid).is_zero() {
            let mut eps = (&hi - &lo) / int(4);
            loop {
                let (a, b) = (&mid - &eps, &mid + &eps);
                if !f.eval(&a).is_zero()
                    && !f.eval(&b).is_zero()
                    && sign_changes(&seq, &a) - sign_changes(&seq, &b) == 1
                {
                    out.push(RealRoot {
                        lo: mid.clone(),
                        hi: mid.clone(),
                        multiplicity: mult,
                        factor: f.clone(),
                    });
                    stack.push((lo, a));
                    stack.push((b, hi));
                    break;
                }
                eps /= int(2);
            }
        } else {
            stack.push((lo, mid.clone()));
            stack.push((mid, hi));
        }
    }
}

/// All real roots of `p` with multiplicities, in ascending order, each in a
/// disjoint isolating interval.
pub fn isolate_real_roots(p: &Polynomial<Rational>) -> Vec<RealRoot> {
    let mut roots = Vec::new();
    for (f, mult) in squarefree_factors(p) {
        isolate_squarefree(&f, mult, &mut roots);
    }
    // Roots of distinct factors are distinct; shrink until intervals separate.
    loop {
        roots.sort_by(|a, b| a.lo.cmp(&b.lo).then(a.hi.cmp(&b.hi)));
        let overlap = roots.windows(2).position(|w| w[0].hi >= w[1].lo);
        match overlap {
            Some(i) => {
                roots[i].halve();
                roots[i + 1].halve();
            }
            None => break,
        }
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    fn from_roots(roots: &[Rational]) -> Polynomial<Rational> {
        roots.iter().fold(Polynomial::one(), |acc, r| {
            &acc * &Polynomial::new(vec![-r.clone(), int(1)])
        })
    }

    #[test]
    fn squarefree_decomposition() {
        // (x-1)^3 (x+2)^2 (x-5)
        let p = from_roots(&[int(1), int(1), int(1), int(-2), int(-2), int(5)]);
        let mut f = squarefree_factors(&p);
        f.sort_by_key(|(_, m)| *m);
        assert_eq!(f.len(), 3);
        assert_eq!(f[0], (from_roots(&[int(5)]), 1));
        assert_eq!(f[1], (from_roots(&[int(-2)]), 2));
        assert_eq!(f[2], (from_roots(&[int(1)]), 3));
    }

    #[test]
    fn isolates_rational_and_irrational_roots() {
        // (x^2 - 2)(x - 1/3)^2 (x^2 + 1)
        let p = &(&Polynomial::new(vec![int(-2), int(0), int(1)]) * &from_roots(&[rat(1, 3), rat(1, 3)]))
            * &Polynomial::new(vec![int(1), int(0), int(1)]);
        let mut roots = isolate_real_roots(&p);
        assert_eq!(roots.len(), 3);
        assert_eq!(roots.iter().map(|r| r.multiplicity).collect::<Vec<_>>(), vec![1, 2, 1]);
        for r in &mut roots {
            r.refine(&pow2(-60));
        }
        assert!((roots[0].approx() + 2f64.sqrt()).abs() < 1e-15);
        assert!((roots[1].approx() - 1.0 / 3.0).abs() < 1e-15);
        assert!((roots[2].approx() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn close_roots_separate() {
        let p = from_roots(&[rat(1, 1000), rat(2, 1000), int(0), int(7)]);
        let roots = isolate_real_roots(&p);
        assert_eq!(roots.len(), 4);
        for w in roots.windows(2) {
            assert!(w[0].hi < w[1].lo);
        }
    }

    #[test]
    fn exact_roots_found_at_bisection_points() {
        let p = from_roots(&[int(0), int(4), int(-4)]);
        let mut roots = isolate_real_roots(&p);
        assert_eq!(roots.len(), 3);
        assert!(roots[1].is_exact());
        assert_eq!(roots[1].lo, int(0));
        for (r, want) in roots.iter_mut().zip([-4.0, 0.0, 4.0]) {
            r.refine(&pow2(-40));
            assert!((r.approx() - want).abs() < 1e-11);
        }
    }
}
