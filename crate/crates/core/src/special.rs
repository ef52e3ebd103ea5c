//! Absolute nilpotents (`xx = 0`) and idempotents (`xx = x`).

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::{Float, One};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Element, EvolutionAlgebra};
use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{ComplexF, Field, Rational, DEFAULT_TOL};

pub const DEFAULT_ATTEMPTS: usize = 200;

/// Distinct idempotents are at least this far apart in the max norm.
const DEDUP_GAP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct NilpotentReport {
    pub exists_nontrivial: bool,
    pub witness: Option<Element<ComplexF>>,
    pub residual: f64,
}

/// Decides whether a nonzero `x` with `xx = 0` exists and builds one.
///
/// `xx = Σ x_i² A_i`, so the squared coordinates must form a left null
/// vector `y` of `A`; the witness takes principal square roots of `y`.
pub fn absolute_nilpotent<F: Field>(e: &EvolutionAlgebra<F>, tol: f64) -> NilpotentReport {
    let a = e.structure();
    let singular = if F::DOMAIN.is_exact() {
        F::determinant(a).is_zero()
    } else {
        linalg::rank(a, tol) < e.dim()
    };
    if !singular {
        return NilpotentReport {
            exists_nontrivial: false,
            witness: None,
            residual: 0.0,
        };
    }
    let y = linalg::solve_kernel(&a.transpose(), tol)
        .into_iter()
        .next()
        .expect("singular matrix has a left null vector");
    // scale by the largest entry so the witness has unit max norm
    let pivot = y
        .iter()
        .max_by(|p, q| p.magnitude().total_cmp(&q.magnitude()))
        .expect("nonempty")
        .clone();
    let x = Element::new(y.iter().map(|v| (v.clone() / pivot.clone()).to_complex().sqrt()).collect());
    let ec = e.to_complex();
    let residual = ec.square(&x).expect("same dimension").max_abs();
    NilpotentReport {
        exists_nontrivial: true,
        witness: Some(x),
        residual,
    }
}

/// Brute-force confirmation that a real Markov algebra has no nonzero real
/// absolute nilpotent. Row sums of one give `Σ_k (xx)_k = Σ x_i²`, so the
/// answer is always `true`; for `n ≤ 3` a grid and a random search look for
/// a counterexample with `‖x‖∞ ∈ [0.1, 10]` and `‖xx‖∞ < 1e-8`.
pub fn markov_real_nilpotent_check(e: &EvolutionAlgebra<Rational>, seed: u64) -> Result<bool> {
    if !e.is_markov() {
        return Err(Error::PreconditionFailed("algebra is not Markov".into()));
    }
    let n = e.dim();
    if n > 3 {
        return Ok(true);
    }
    let a: Vec<Vec<f64>> = e
        .structure()
        .row_vecs()
        .into_iter()
        .map(|r| r.iter().map(|q| q.to_complex().re).collect())
        .collect();
    let is_counterexample = |x: &[f64]| {
        let norm = x.iter().fold(0.0f64, |m, v| m.max(Float::abs(*v)));
        if !(0.1..=10.0).contains(&norm) {
            return false;
        }
        (0..n).all(|k| Float::abs((0..n).map(|i| x[i] * x[i] * a[i][k]).sum::<f64>()) < 1e-8)
    };
    let steps = 41usize;
    let mut x = alloc::vec![0.0; n];
    for idx in 0..steps.pow(n as u32) {
        let mut rest = idx;
        for v in x.iter_mut() {
            *v = -10.0 + 0.5 * (rest % steps) as f64;
            rest /= steps;
        }
        if is_counterexample(&x) {
            return Ok(false);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..20_000 {
        for v in x.iter_mut() {
            *v = rng.gen_range(-10.0..=10.0);
        }
        if is_counterexample(&x) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdempotentMethod {
    ClosedForm,
    NumericMultistart,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdempotentSet {
    pub elements: Vec<Element<ComplexF>>,
    pub method: IdempotentMethod,
}

/// Exponents `(k·2^{i}) mod (2^n−1)`: the idempotent of `CYC_n` indexed by
/// `k` has coordinate `i` equal to `ω^{exponent}` with `ω = e^{2πi/(2^n−1)}`.
pub fn cyc_idempotent_exponents(n: usize) -> Vec<Vec<u64>> {
    assert!((1..63).contains(&n), "cycle length out of range");
    let m = (1u64 << n) - 1;
    (0..m)
        .map(|k| {
            let mut e = Vec::with_capacity(n);
            let mut cur = k;
            for _ in 0..n {
                e.push(cur);
                cur = (2 * cur) % m;
            }
            e
        })
        .collect()
}

/// All `2^n − 1` nonzero idempotents of `CYC_n`.
pub fn idempotents_cyc(n: usize) -> Result<IdempotentSet> {
    if n == 0 || n > 20 {
        return Err(Error::InvalidParameters(alloc::format!("cycle length {n} outside 1..=20")));
    }
    let m = ((1u64 << n) - 1) as f64;
    let elements = cyc_idempotent_exponents(n)
        .into_iter()
        .map(|exps| Element::new(exps.into_iter().map(|t| ComplexF::from_polar(1.0, 2.0 * PI * t as f64 / m)).collect()))
        .collect();
    Ok(IdempotentSet {
        elements,
        method: IdempotentMethod::ClosedForm,
    })
}

fn idempotent_defect(e: &EvolutionAlgebra<ComplexF>, x: &Element<ComplexF>) -> Element<ComplexF> {
    e.square(x).expect("same dimension").sub(x)
}

/// Damped Newton on `x·x − x = 0`; the derivative at `x` acts on row vectors
/// as `2R_x − I`.
fn newton(e: &EvolutionAlgebra<ComplexF>, mut x: Element<ComplexF>) -> Option<Element<ComplexF>> {
    let n = e.dim();
    let mut defect = idempotent_defect(e, &x);
    for _ in 0..100 {
        let size = defect.max_abs();
        if size < 1e-14 * (1.0 + x.max_abs()) {
            break;
        }
        let mut jac = e.right_mult_matrix(&x).ok()?.scale(&ComplexF::new(2.0, 0.0));
        for i in 0..n {
            jac[(i, i)] -= ComplexF::one();
        }
        let step = Element::new(linalg::invert(&jac, 1e-12).ok()?.left_apply(defect.coords()));
        let mut lambda = 1.0;
        loop {
            let trial = x.sub(&step.scale(&ComplexF::new(lambda, 0.0)));
            let trial_defect = idempotent_defect(e, &trial);
            if trial_defect.max_abs() < size || lambda < 1e-4 {
                x = trial;
                defect = trial_defect;
                break;
            }
            lambda /= 2.0;
        }
        if !x.max_abs().is_finite() || x.max_abs() > 1e8 {
            return None;
        }
    }
    (defect.max_abs() < 1e-10).then_some(x)
}

fn rounded_key(x: &Element<ComplexF>) -> Vec<(i64, i64)> {
    let r = |v: f64| Float::round(v / DEDUP_GAP) as i64;
    x.coords().iter().map(|z| (r(z.re), r(z.im))).collect()
}

/// Nonzero idempotents found by Newton iteration from `attempts` random
/// starts in the disk of radius 2. No completeness claim.
pub fn idempotents_numeric(e: &EvolutionAlgebra<ComplexF>, attempts: usize, seed: u64) -> IdempotentSet {
    let n = e.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts: Vec<Element<ComplexF>> = (0..attempts)
        .map(|_| {
            Element::new(
                (0..n)
                    .map(|_| {
                        let r = 2.0 * Float::sqrt(rng.gen::<f64>());
                        ComplexF::from_polar(r, 2.0 * PI * rng.gen::<f64>())
                    })
                    .collect(),
            )
        })
        .collect();
    merge_idempotents(e, starts.into_iter().filter_map(|s| newton(e, s)))
}

/// Filters zero, deduplicates and sorts Newton roots; order-independent.
pub fn merge_idempotents(e: &EvolutionAlgebra<ComplexF>, roots: impl IntoIterator<Item = Element<ComplexF>>) -> IdempotentSet {
    let mut found: Vec<Element<ComplexF>> = Vec::new();
    let mut candidates: Vec<Element<ComplexF>> = roots
        .into_iter()
        .filter(|x| x.max_abs() > DEDUP_GAP && idempotent_defect(e, x).max_abs() < DEFAULT_TOL)
        .collect();
    candidates.sort_by(|a, b| rounded_key(a).cmp(&rounded_key(b)));
    for x in candidates {
        if found.iter().all(|y| y.sub(&x).max_abs() > DEDUP_GAP) {
            found.push(x);
        }
    }
    IdempotentSet {
        elements: found,
        method: IdempotentMethod::NumericMultistart,
    }
}

/// `true` when `x` is nonzero with all coordinates of `x·x − x` below `tol`.
pub fn is_idempotent<F: Field>(e: &EvolutionAlgebra<F>, x: &Element<F>, tol: f64) -> bool {
    !x.is_zero()
        && e
            .square(x)
            .map(|s| s.sub(x).coords().iter().all(|v| v.negligible(tol)))
            .unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;
    use crate::normal_form::{canonical_table, Component};
    use alloc::vec;
    use num_traits::Zero;
    use proptest::prelude::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn qf(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn alg(rows: &[&[i64]]) -> EvolutionAlgebra<Rational> {
        EvolutionAlgebra::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()).unwrap()
    }

    fn c(re: f64) -> ComplexF {
        ComplexF::new(re, 0.0)
    }

    #[test]
    fn nilpotent_examples() {
        let r = absolute_nilpotent(&alg(&[&[1, 0], &[0, 1]]), 0.0);
        assert!(!r.exists_nontrivial && r.witness.is_none());

        let r = absolute_nilpotent(&alg(&[&[1, 1], &[-1, -1]]), 0.0);
        assert_eq!(r.witness, Some(Element::new(vec![c(1.0), c(1.0)])));
        assert_eq!(r.residual, 0.0);

        let r = absolute_nilpotent(&alg(&[&[0, 1], &[0, 0]]), 0.0);
        assert_eq!(r.witness, Some(Element::new(vec![c(0.0), c(1.0)])));
        assert_eq!(r.residual, 0.0);
    }

    #[test]
    fn markov_examples() {
        assert_eq!(markov_real_nilpotent_check(&alg(&[&[1, 0], &[0, 1]]), 1), Ok(true));
        let m = EvolutionAlgebra::from_rows(vec![vec![qf(1, 2), qf(1, 2)], vec![qf(1, 3), qf(2, 3)]]).unwrap();
        assert_eq!(markov_real_nilpotent_check(&m, 2), Ok(true));
        assert_eq!(markov_real_nilpotent_check(&alg(&[&[0, 1], &[1, 0]]), 3), Ok(true));
        assert!(matches!(markov_real_nilpotent_check(&alg(&[&[1, 1], &[-1, -1]]), 0), Err(Error::PreconditionFailed(_))));
    }

    #[test]
    fn cyc_idempotents_closed_form() {
        let one = idempotents_cyc(1).unwrap();
        assert_eq!(one.elements, vec![Element::new(vec![c(1.0)])]);
        for n in 1..=4 {
            let exps = cyc_idempotent_exponents(n);
            let m = (1u64 << n) - 1;
            assert_eq!(exps.len() as u64, m);
            for e in &exps {
                // squaring doubles the exponent and moves one step round the cycle
                for i in 0..n {
                    assert_eq!((2 * e[i]) % m, e[(i + 1) % n]);
                }
            }
            let cyc = EvolutionAlgebra::new(canonical_table::<ComplexF>(&[Component::Cyc(n)])).unwrap();
            let set = idempotents_cyc(n).unwrap();
            assert_eq!(set.elements.len() as u64, m);
            for x in &set.elements {
                assert!(idempotent_defect(&cyc, x).max_abs() < 1e-12);
            }
        }
        assert_eq!(idempotents_cyc(2).unwrap().elements.len(), 3);
        assert_eq!(idempotents_cyc(3).unwrap().elements.len(), 7);
    }

    #[test]
    fn numeric_examples() {
        let e1 = alg(&[&[1, 0], &[0, 0]]).to_complex();
        let set = idempotents_numeric(&e1, DEFAULT_ATTEMPTS, 7);
        assert_eq!(set.elements.len(), 1);
        assert!(set.elements[0].sub(&Element::new(vec![c(1.0), c(0.0)])).max_abs() < 1e-9);

        let cyc2 = EvolutionAlgebra::new(canonical_table::<ComplexF>(&[Component::Cyc(2)])).unwrap();
        let set = idempotents_numeric(&cyc2, DEFAULT_ATTEMPTS, 7);
        let closed = idempotents_cyc(2).unwrap();
        assert_eq!(set.elements.len(), 3);
        for x in &closed.elements {
            assert!(set.elements.iter().any(|y| y.sub(x).max_abs() < 1e-9));
        }

        let zero = EvolutionAlgebra::<ComplexF>::zero(3);
        assert!(idempotents_numeric(&zero, 50, 1).elements.is_empty());
    }

    #[test]
    fn numeric_search_is_deterministic_per_seed() {
        let e = alg(&[&[1, 2], &[3, -1]]).to_complex();
        assert_eq!(idempotents_numeric(&e, 100, 42), idempotents_numeric(&e, 100, 42));
    }

    /// `x·x − x` evaluated exactly over Gaussian rationals built from the
    /// float coordinates.
    fn exact_defect(a: &Matrix<Rational>, x: &Element<ComplexF>) -> f64 {
        let g: Vec<(Rational, Rational)> = x
            .coords()
            .iter()
            .map(|z| (Rational::from_float(z.re).unwrap(), Rational::from_float(z.im).unwrap()))
            .collect();
        let n = g.len();
        let mut worst = 0.0f64;
        for k in 0..n {
            let (mut re, mut im) = (-g[k].0.clone(), -g[k].1.clone());
            for (i, (xr, xi)) in g.iter().enumerate() {
                let sq_re = xr * xr - xi * xi;
                let sq_im = q(2) * (xr * xi);
                re += &sq_re * &a[(i, k)];
                im += &sq_im * &a[(i, k)];
            }
            worst = worst.max(re.magnitude().hypot(im.magnitude()));
        }
        worst
    }

    fn small_rational_matrix(n: usize) -> impl Strategy<Value = Matrix<Rational>> {
        proptest::collection::vec(-3i64..=3, n * n).prop_map(move |v| Matrix::new(n, n, v.into_iter().map(q).collect()).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn nilpotent_exists_iff_singular(
            (m, force, mix) in (1usize..=4).prop_flat_map(|n| (small_rational_matrix(n), any::<bool>(), proptest::collection::vec(-2i64..=2, n)))
        ) {
            let n = m.rows();
            let mut m = m;
            if force && n > 1 {
                // last row a combination of the others
                let mut row = vec![q(0); n];
                for i in 0..n - 1 {
                    for k in 0..n {
                        row[k] += q(mix[i]) * &m[(i, k)];
                    }
                }
                m.set_row(n - 1, &row);
            }
            let e = EvolutionAlgebra::new(m.clone()).unwrap();
            let r = absolute_nilpotent(&e, 0.0);
            prop_assert_eq!(r.exists_nontrivial, linalg::det(&m).unwrap().is_zero());
            if let Some(x) = &r.witness {
                prop_assert!(x.max_abs() > 0.0);
                prop_assert!(r.residual < 1e-10);
            }
            let rc = absolute_nilpotent(&e.to_complex(), DEFAULT_TOL);
            prop_assert_eq!(rc.exists_nontrivial, r.exists_nontrivial);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn numeric_idempotents_reverify_exactly(m in (1usize..=3).prop_flat_map(small_rational_matrix), seed in any::<u64>()) {
            let e = EvolutionAlgebra::new(m.to_complex()).unwrap();
            let set = idempotents_numeric(&e, 40, seed);
            for (i, x) in set.elements.iter().enumerate() {
                prop_assert!(exact_defect(&m, x) < 1e-9);
                for y in &set.elements[i + 1..] {
                    prop_assert!(x.sub(y).max_abs() > DEDUP_GAP);
                }
            }
        }
    }
}
