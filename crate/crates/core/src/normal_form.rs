//! Permutation evolution algebras `e_i e_i = a_i e_{π(i)}` and their
//! decomposition into cyclic pieces `CYC_p` and nilpotent chains `NIL_k`.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use num_traits::Float;

use crate::algebra::{AnyChangeOfBasis, ChangeOfBasis, EvolutionAlgebra};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::permutation::{cycle_decomposition, Permutation};
use crate::scalar::{ComplexF, Domain, Field, Rational, Scalar};

/// Exact roots are only attempted while the radicand stays this small.
const EXACT_ROOT_BIT_LIMIT: u64 = 1 << 18;

#[derive(Debug, Clone, PartialEq)]
pub struct PermutationEvolutionAlgebra<F> {
    perm: Permutation,
    coeffs: Vec<F>,
}

impl<F: Field> PermutationEvolutionAlgebra<F> {
    pub fn new(perm: Permutation, coeffs: Vec<F>) -> Result<Self> {
        if perm.len() != coeffs.len() {
            return Err(Error::DimensionMismatch {
                expected: perm.len(),
                found: coeffs.len(),
            });
        }
        if perm.is_empty() {
            return Err(Error::InvalidParameters("dimension must be at least 1".into()));
        }
        Ok(PermutationEvolutionAlgebra { perm, coeffs })
    }

    pub fn perm(&self) -> &Permutation {
        &self.perm
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    /// Row `i` is `a_i` at column `π(i)`.
    pub fn algebra(&self) -> EvolutionAlgebra<F> {
        let n = self.dim();
        let mut a = Matrix::zeros(n, n);
        for (i, c) in self.coeffs.iter().enumerate() {
            a[(i, self.perm.apply(i))] = c.clone();
        }
        EvolutionAlgebra::new(a).expect("square and nonempty")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    Cyc(usize),
    Nil(usize),
}

impl Component {
    pub fn size(self) -> usize {
        match self {
            Component::Cyc(p) | Component::Nil(p) => p,
        }
    }

    fn order_key(self) -> (u8, core::cmp::Reverse<usize>) {
        match self {
            Component::Cyc(p) => (0, core::cmp::Reverse(p)),
            Component::Nil(k) => (1, core::cmp::Reverse(k)),
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Component::Cyc(p) => write!(f, "CYC_{p}"),
            Component::Nil(k) => write!(f, "NIL_{k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalFormReport {
    /// Components in canonical order: cyclic by decreasing size, then chains.
    pub components: Vec<Component>,
    pub witness: AnyChangeOfBasis,
    pub residual: f64,
}

impl NormalFormReport {
    /// `(component, multiplicity)` pairs in canonical order.
    pub fn multiset(&self) -> Vec<(Component, usize)> {
        let mut out: Vec<(Component, usize)> = Vec::new();
        for &c in &self.components {
            match out.last_mut() {
                Some((last, m)) if *last == c => *m += 1,
                _ => out.push((c, 1)),
            }
        }
        out
    }
}

/// Block-diagonal table of the direct sum, blocks in the given order.
pub fn canonical_table<F: Field>(components: &[Component]) -> Matrix<F> {
    let n = components.iter().map(|c| c.size()).sum();
    let mut a = Matrix::zeros(n, n);
    let mut offset = 0;
    for c in components {
        match *c {
            Component::Cyc(p) => {
                for i in 0..p {
                    a[(offset + i, offset + (i + 1) % p)] = F::one();
                }
            }
            Component::Nil(k) => {
                for i in 0..k - 1 {
                    a[(offset + i, offset + i + 1)] = F::one();
                }
            }
        }
        offset += c.size();
    }
    a
}

/// `e_i e_i = a_i e_{i+1}` cyclically.
pub fn weighted_cycle<F: Field>(a: &[F]) -> Result<EvolutionAlgebra<F>> {
    let n = a.len();
    let perm = Permutation::new((0..n).map(|i| (i + 1) % n).collect())?;
    Ok(PermutationEvolutionAlgebra::new(perm, a.to_vec())?.algebra())
}

/// `e_i e_i = a_i e_{i+1}` for `i < k`, `e_k e_k = 0`, with `k = a.len() + 1`.
pub fn weighted_chain<F: Field>(a: &[F]) -> EvolutionAlgebra<F> {
    let k = a.len() + 1;
    let mut m = Matrix::zeros(k, k);
    for (i, c) in a.iter().enumerate() {
        m[(i, i + 1)] = c.clone();
    }
    EvolutionAlgebra::new(m).expect("square and nonempty")
}

enum Scales<F> {
    Same(Vec<F>),
    Complex(Vec<ComplexF>),
}

/// Diagonal scaling turning a weighted cycle into `CYC_n`.
///
/// `A_1` is a `(2^n−1)`-th root of `1/Π a_j^{2^{n-j}}` and the rest follow
/// from `A_{i+1} = A_i² a_i`. Rational input gets an exact rational root
/// when one exists.
fn cyc_scales<F: Field>(a: &[F]) -> Result<Scales<F>> {
    if let Some(index) = a.iter().position(num_traits::Zero::is_zero) {
        return Err(Error::ZeroCoefficient { index });
    }
    let n = a.len();
    if F::DOMAIN.is_exact() && n < 32 {
        let estimate: u64 = a.iter().enumerate().map(|(j, x)| x.bit_size() << (n - 1 - j)).sum();
        if estimate <= EXACT_ROOT_BIT_LIMIT {
            let product = a
                .iter()
                .enumerate()
                .fold(F::one(), |acc, (j, x)| acc * x.powi(1 << (n - 1 - j)));
            let m = (1u32 << n) - 1;
            if let Some(first) = (F::one() / product).root(m) {
                let mut scales = Vec::with_capacity(n);
                scales.push(first);
                for i in 0..n - 1 {
                    let prev = scales[i].clone();
                    scales.push(prev.clone() * prev * a[i].clone());
                }
                return Ok(Scales::Same(scales));
            }
        }
    }
    Ok(Scales::Complex(complex_cyc_scales(&a.iter().map(Field::to_complex).collect::<Vec<_>>())))
}

/// Principal root of `1/Π_j a_{i+j}^{2^{n-1-j}}` taken through logarithms.
fn principal_cycle_root(a: &[ComplexF], start: usize) -> ComplexF {
    let n = a.len();
    let m = Float::powi(2f64, n as i32) - 1.0;
    let mut log_mod = 0.0;
    let mut arg = 0.0;
    for j in 0..n {
        let x = a[(start + j) % n];
        let w = Float::powi(2f64, (n - 1 - j) as i32);
        log_mod -= w * Float::ln(x.norm());
        arg = reduce_angle(arg - reduce_angle(w * x.arg()));
    }
    ComplexF::from_polar(Float::exp(log_mod / m), arg / m)
}

/// Into `(−π, π]`.
fn reduce_angle(t: f64) -> f64 {
    let r = t - 2.0 * PI * Float::round(t / (2.0 * PI));
    if r <= -PI {
        r + 2.0 * PI
    } else {
        r
    }
}

fn complex_cyc_scales(a: &[ComplexF]) -> Vec<ComplexF> {
    let n = a.len();
    let m = Float::powi(2f64, n as i32) - 1.0;
    let mut scales = Vec::with_capacity(n);
    scales.push(principal_cycle_root(a, 0));
    for i in 1..n {
        // every A_i is some root of its own radicand; pick the branch the
        // recurrence asks for, recomputed to full precision
        let target = scales[i - 1] * scales[i - 1] * a[i - 1];
        let root = principal_cycle_root(a, i);
        let k = Float::round(reduce_angle(target.arg() - root.arg()) * m / (2.0 * PI));
        let candidate = root * ComplexF::from_polar(1.0, 2.0 * PI * k / m);
        scales.push(if (candidate - target).norm() <= 1e-6 * target.norm() { candidate } else { target });
    }
    scales
}

/// Witness from the weighted cycle `e_i e_i = a_i e_{i+1}` onto `CYC_n`.
pub fn cyc_scaling_witness<F: Field>(a: &[F]) -> Result<AnyChangeOfBasis> {
    Ok(match cyc_scales(a)? {
        Scales::Same(d) => AnyChangeOfBasis::from_field(ChangeOfBasis::diagonal(&d)?),
        Scales::Complex(d) => AnyChangeOfBasis::Complex(ChangeOfBasis::diagonal(&d)?),
    })
}

fn chain_scales<F: Field>(a: &[F]) -> Result<Vec<F>> {
    if let Some(index) = a.iter().position(num_traits::Zero::is_zero) {
        return Err(Error::ZeroCoefficient { index });
    }
    let mut c = Vec::with_capacity(a.len() + 1);
    c.push(F::one());
    for (j, x) in a.iter().enumerate() {
        let prev = c[j].clone();
        c.push(prev.clone() * prev * x.clone());
    }
    Ok(c)
}

/// Witness from the weighted chain onto `NIL_k`: `diag(1, a_1, a_1² a_2, …)`.
pub fn nil_chain_scaling_witness<F: Field>(a: &[F]) -> Result<ChangeOfBasis<F>> {
    ChangeOfBasis::diagonal(&chain_scales(a)?)
}

/// The isomorphism `e_i ↦ e_{g(i)}` onto `E_{n, gπg⁻¹}`, whose coefficients
/// satisfy `b_{g(i)} = a_i`.
pub fn conjugation_isomorphism<F: Field>(
    source: &PermutationEvolutionAlgebra<F>,
    g: &Permutation,
) -> Result<(PermutationEvolutionAlgebra<F>, ChangeOfBasis<F>)> {
    if g.len() != source.dim() {
        return Err(Error::DimensionMismatch {
            expected: source.dim(),
            found: g.len(),
        });
    }
    let perm = source.perm.conjugate_by(g);
    let mut coeffs = alloc::vec![F::zero(); source.dim()];
    for (i, c) in source.coeffs.iter().enumerate() {
        coeffs[g.apply(i)] = c.clone();
    }
    let witness = ChangeOfBasis::relabel(g.inverse().image());
    Ok((PermutationEvolutionAlgebra::new(perm, coeffs)?, witness))
}

struct Block<F> {
    component: Component,
    sources: Vec<usize>,
    scales: Scales<F>,
}

/// Splits the algebra into cyclic and chain blocks, scales each one and
/// verifies the assembled witness against the canonical direct sum.
pub fn normal_form<F: Field>(p: &PermutationEvolutionAlgebra<F>) -> Result<NormalFormReport> {
    let mut blocks = Vec::new();
    for cycle in cycle_decomposition(&p.perm).cycles() {
        let zero_at = |x: usize| p.coeffs[x].is_zero();
        let Some(first_zero) = cycle.iter().copied().filter(|&x| zero_at(x)).min() else {
            let a: Vec<F> = cycle.iter().map(|&x| p.coeffs[x].clone()).collect();
            blocks.push(Block {
                component: Component::Cyc(cycle.len()),
                sources: cycle.clone(),
                scales: cyc_scales(&a)?,
            });
            continue;
        };
        let t = cycle.len();
        let pos = cycle.iter().position(|&x| x == first_zero).expect("on the cycle");
        let mut segment = Vec::new();
        for step in 1..=t {
            let x = cycle[(pos + step) % t];
            segment.push(x);
            if zero_at(x) {
                let weights: Vec<F> = segment[..segment.len() - 1].iter().map(|&y| p.coeffs[y].clone()).collect();
                blocks.push(Block {
                    component: Component::Nil(segment.len()),
                    sources: core::mem::take(&mut segment),
                    scales: Scales::Same(chain_scales(&weights)?),
                });
            }
        }
    }
    blocks.sort_by_key(|b| b.component.order_key());

    let components: Vec<Component> = blocks.iter().map(|b| b.component).collect();
    let sources: Vec<usize> = blocks.iter().flat_map(|b| b.sources.iter().copied()).collect();
    let exact = blocks.iter().all(|b| matches!(b.scales, Scales::Same(_)));
    let algebra = p.algebra();
    let witness = if exact {
        let scales: Vec<F> = blocks
            .into_iter()
            .flat_map(|b| match b.scales {
                Scales::Same(v) => v,
                Scales::Complex(_) => unreachable!(),
            })
            .collect();
        AnyChangeOfBasis::from_field(ChangeOfBasis::monomial(&sources, &scales)?)
    } else {
        let scales: Vec<ComplexF> = blocks
            .into_iter()
            .flat_map(|b| match b.scales {
                Scales::Same(v) => v.iter().map(Field::to_complex).collect(),
                Scales::Complex(v) => v,
            })
            .collect();
        AnyChangeOfBasis::Complex(ChangeOfBasis::monomial(&sources, &scales)?)
    };
    let residual = witness.verify(&algebra, &canonical_table(&components))?;
    Ok(NormalFormReport {
        components,
        witness,
        residual,
    })
}

/// A permutation algebra with runtime-chosen domain.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyPermutationAlgebra {
    Rational(PermutationEvolutionAlgebra<Rational>),
    Complex(PermutationEvolutionAlgebra<ComplexF>),
}

impl AnyPermutationAlgebra {
    pub fn from_scalars(perm: Permutation, coeffs: &[Scalar], domain: Domain) -> Result<Self> {
        fn convert<F: Field>(perm: Permutation, coeffs: &[Scalar]) -> Result<PermutationEvolutionAlgebra<F>> {
            let c = coeffs.iter().map(F::from_scalar).collect::<Result<Vec<F>>>()?;
            PermutationEvolutionAlgebra::new(perm, c)
        }
        match domain {
            Domain::Rational => convert(perm, coeffs).map(AnyPermutationAlgebra::Rational),
            Domain::Complex => convert(perm, coeffs).map(AnyPermutationAlgebra::Complex),
        }
    }

    pub fn normal_form(&self) -> Result<NormalFormReport> {
        match self {
            AnyPermutationAlgebra::Rational(p) => normal_form(p),
            AnyPermutationAlgebra::Complex(p) => normal_form(p),
        }
    }

    pub fn describe(&self) -> alloc::string::String {
        match self {
            AnyPermutationAlgebra::Rational(p) => format!("{} {:?}", p.perm, p.coeffs),
            AnyPermutationAlgebra::Complex(p) => format!("{} {:?}", p.perm, p.coeffs),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::isomorphism_residual;
    use crate::algebra::Element;
    use alloc::vec;
    use num_traits::{One, Zero};
    use proptest::prelude::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn perm_alg(image: &[usize], a: &[i64]) -> PermutationEvolutionAlgebra<Rational> {
        PermutationEvolutionAlgebra::new(Permutation::from_one_based(image).unwrap(), a.iter().map(|&x| q(x)).collect()).unwrap()
    }

    #[test]
    fn cycle_scaling_examples() {
        let w = cyc_scaling_witness(&[q(1), q(1), q(1)]).unwrap();
        assert_eq!(w, AnyChangeOfBasis::Rational(ChangeOfBasis::identity(3)));

        let w = cyc_scaling_witness(&[q(1), q(8)]).unwrap();
        let AnyChangeOfBasis::Rational(cb) = &w else { panic!("expected an exact witness") };
        assert_eq!(cb.basis(), &Matrix::diagonal(&[Rational::new(1.into(), 2.into()), Rational::new(1.into(), 4.into())]));
        let cyc = weighted_cycle(&[q(1), q(8)]).unwrap();
        assert_eq!(w.verify(&cyc, &canonical_table(&[Component::Cyc(2)])).unwrap(), 0.0);

        // no rational cube root: falls back to complex radicals
        let w = cyc_scaling_witness(&[q(1), q(2)]).unwrap();
        assert_eq!(w.domain(), Domain::Complex);
        let cyc = weighted_cycle(&[q(1), q(2)]).unwrap();
        assert!(w.verify(&cyc, &canonical_table(&[Component::Cyc(2)])).unwrap() < 1e-12);

        assert_eq!(cyc_scaling_witness(&[q(1), q(0)]), Err(Error::ZeroCoefficient { index: 1 }));
    }

    #[test]
    fn complex_cycle_scaling() {
        let a = vec![ComplexF::new(0.3, -1.7), ComplexF::new(-2.5, 0.4), ComplexF::new(1.1, 3.0)];
        let w = cyc_scaling_witness(&a).unwrap();
        let res = w.verify(&weighted_cycle(&a).unwrap(), &canonical_table(&[Component::Cyc(3)])).unwrap();
        assert!(res < 1e-8, "{res}");
    }

    #[test]
    fn chain_scaling_examples() {
        assert_eq!(nil_chain_scaling_witness(&[q(1), q(1)]).unwrap(), ChangeOfBasis::identity(3));
        let w = nil_chain_scaling_witness(&[q(2), q(3)]).unwrap();
        assert_eq!(w.basis(), &Matrix::diagonal(&[q(1), q(2), q(12)]));
        let res = isomorphism_residual(&weighted_chain(&[q(2), q(3)]), &w, &canonical_table(&[Component::Nil(3)])).unwrap();
        assert_eq!(res, 0.0);
        assert_eq!(nil_chain_scaling_witness(&[q(5)]).unwrap().basis(), &Matrix::diagonal(&[q(1), q(5)]));
    }

    #[test]
    fn conjugation_examples() {
        let p = perm_alg(&[2, 1, 3], &[1, 1, 1]);
        let (same, w) = conjugation_isomorphism(&p, &Permutation::identity(3)).unwrap();
        assert_eq!((&same, &w), (&p, &ChangeOfBasis::identity(3)));

        let p = perm_alg(&[2, 1, 3], &[1, 5, 7]);
        let g = Permutation::from_cycles(3, &[&[0, 2]]).unwrap();
        let (target, w) = conjugation_isomorphism(&p, &g).unwrap();
        assert_eq!(target.perm(), &Permutation::from_cycles(3, &[&[2, 1]]).unwrap());
        assert_eq!(target.coeffs(), &[q(7), q(5), q(1)]);
        assert_eq!(isomorphism_residual(&p.algebra(), &w, target.algebra().structure()).unwrap(), 0.0);

        let p = perm_alg(&[2, 3, 1], &[1, 2, 3]);
        let g = Permutation::from_cycles(3, &[&[1, 2]]).unwrap();
        let (target, _) = conjugation_isomorphism(&p, &g).unwrap();
        assert_eq!(target.perm(), &Permutation::from_cycles(3, &[&[0, 2, 1]]).unwrap());
    }

    #[test]
    fn normal_form_examples() {
        let r = normal_form(&perm_alg(&[2, 1, 4, 3], &[1, 1, 1, 0])).unwrap();
        assert_eq!(r.components, vec![Component::Cyc(2), Component::Nil(2)]);
        assert_eq!(r.residual, 0.0);

        let r = normal_form(&perm_alg(&[2, 3, 4, 5, 1], &[3, -2, 5, 7, 11])).unwrap();
        assert_eq!(r.components, vec![Component::Cyc(5)]);
        assert!(r.residual < 1e-8);

        let r = normal_form(&perm_alg(&[2, 3, 4, 5, 1], &[3, -2, 0, 7, 11])).unwrap();
        assert_eq!(r.components, vec![Component::Nil(5)]);
        assert_eq!(r.residual, 0.0);

        let r = normal_form(&perm_alg(&[1, 2], &[4, 0])).unwrap();
        assert_eq!(r.components, vec![Component::Cyc(1), Component::Nil(1)]);
        assert_eq!(r.witness.domain(), Domain::Rational);
        assert_eq!(r.residual, 0.0);
    }

    #[test]
    fn two_zeros_split_a_cycle_into_gaps() {
        // cycle (1 2 3 4 5 6) with zeros at 2 and 6: chains 3→4→5→6 and 1→2
        let r = normal_form(&perm_alg(&[2, 3, 4, 5, 6, 1], &[1, 0, 2, 3, 4, 0])).unwrap();
        assert_eq!(r.multiset(), vec![(Component::Nil(4), 1), (Component::Nil(2), 1)]);
        assert_eq!(r.residual, 0.0);
    }

    fn all_perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = vec![];
        for p in all_perms(n - 1) {
            for pos in 0..=p.len() {
                let mut v = p.clone();
                v.insert(pos, n - 1);
                out.push(v);
            }
        }
        out
    }

    #[test]
    fn every_permutation_and_zero_pattern_up_to_five() {
        for n in 1..=5 {
            for image in all_perms(n) {
                let perm = Permutation::new(image).unwrap();
                let cycles = cycle_decomposition(&perm);
                for mask in 0u32..(1 << n) {
                    let coeffs: Vec<Rational> = (0..n).map(|i| if mask >> i & 1 == 1 { q(i as i64 + 2) } else { q(0) }).collect();
                    let p = PermutationEvolutionAlgebra::new(perm.clone(), coeffs.clone()).unwrap();
                    let r = normal_form(&p).unwrap();
                    assert_eq!(r.components.iter().map(|c| c.size()).sum::<usize>(), n);
                    assert!(r.residual < 1e-8, "{perm} {coeffs:?}: {}", r.residual);
                    let mut expected_cyc: Vec<usize> = cycles
                        .cycles()
                        .iter()
                        .filter(|c| c.iter().all(|&x| !coeffs[x].is_zero()))
                        .map(Vec::len)
                        .collect();
                    expected_cyc.sort_unstable_by(|a, b| b.cmp(a));
                    let got: Vec<usize> = r.components.iter().filter_map(|c| match c {
                        Component::Cyc(p) => Some(*p),
                        Component::Nil(_) => None,
                    }).collect();
                    assert_eq!(got, expected_cyc);
                }
            }
        }
    }

    #[test]
    fn unit_weights_give_exact_witnesses() {
        let r = normal_form(&perm_alg(&[2, 3, 1, 5, 4], &[1, 1, 1, 1, 1])).unwrap();
        assert_eq!(r.witness.domain(), Domain::Rational);
        assert_eq!(r.residual, 0.0);
    }

    fn perm_algebra_and_conjugator() -> impl Strategy<Value = (Permutation, Vec<(i64, i64)>, Permutation, Vec<bool>)> {
        (1usize..=6).prop_flat_map(|n| {
            let s = Just((0..n).collect::<Vec<_>>());
            (
                s.clone().prop_shuffle().prop_map(|v| Permutation::new(v).unwrap()),
                proptest::collection::vec((-4i64..=4, -4i64..=4), n),
                s.prop_shuffle().prop_map(|v| Permutation::new(v).unwrap()),
                proptest::collection::vec(any::<bool>(), n),
            )
        })
    }

    proptest! {
        #[test]
        fn normal_form_is_conjugation_invariant((perm, raw, g, zero) in perm_algebra_and_conjugator()) {
            let coeffs: Vec<ComplexF> = raw.iter().zip(&zero).map(|(&(re, im), &z)| {
                if z { ComplexF::zero() } else { ComplexF::new(re as f64 + 0.5, im as f64) }
            }).collect();
            let p = PermutationEvolutionAlgebra::new(perm, coeffs).unwrap();
            let r = normal_form(&p).unwrap();
            prop_assert!(r.residual < 1e-8, "residual {}", r.residual);
            let (target, w) = conjugation_isomorphism(&p, &g).unwrap();
            prop_assert!(isomorphism_residual(&p.algebra(), &w, target.algebra().structure()).unwrap() == 0.0);
            let r2 = normal_form(&target).unwrap();
            prop_assert_eq!(r.components, r2.components);
        }

        #[test]
        fn witness_conjugates_right_multiplications((perm, raw, _g, zero) in perm_algebra_and_conjugator()) {
            let coeffs: Vec<Rational> = raw.iter().zip(&zero).map(|(&(a, _), &z)| if z { q(0) } else { q(if a == 0 { 1 } else { a }) }).collect();
            let p = PermutationEvolutionAlgebra::new(perm, coeffs).unwrap();
            let r = normal_form(&p).unwrap();
            let cb = r.witness.to_complex();
            let original = p.algebra().to_complex();
            let canonical = EvolutionAlgebra::new(canonical_table::<ComplexF>(&r.components)).unwrap();
            let n = p.dim();
            for j in 0..n {
                // R_{w_j} in new coordinates is W R_{w_j} W⁻¹
                let wj = Element::new(cb.basis().row(j).to_vec());
                let conj = &(cb.basis() * &original.right_mult_matrix(&wj).unwrap()) * cb.inverse();
                let expected = canonical.right_mult_matrix(&Element::basis(n, j)).unwrap();
                prop_assert!(conj.sub(&expected).max_abs() < 1e-8);
            }
        }
    }

    #[test]
    fn unit_cycle_is_idempotent_line() {
        let r = normal_form(&perm_alg(&[1], &[3])).unwrap();
        assert_eq!(r.components, vec![Component::Cyc(1)]);
        let AnyChangeOfBasis::Rational(cb) = r.witness else { panic!() };
        assert_eq!(cb.basis()[(0, 0)], Rational::one() / q(3));
    }
}
