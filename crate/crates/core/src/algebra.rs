//! Evolution algebras given by their structural constants.
//!
//! Row `i` of the structure matrix holds the coordinates of `e_i · e_i`;
//! products of distinct basis vectors vanish.

use alloc::string::ToString;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::{vec_max_abs, Matrix};
use crate::scalar::{ComplexF, Domain, Field, Rational, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionAlgebra<F> {
    structure: Matrix<F>,
}

/// An element in evolution-basis coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Element<F> {
    coords: Vec<F>,
}

impl<F: Field> Element<F> {
    pub fn new(coords: Vec<F>) -> Self {
        Element { coords }
    }

    pub fn zero(n: usize) -> Self {
        Element {
            coords: alloc::vec![F::zero(); n],
        }
    }

    /// The basis vector `e_i` (0-based).
    pub fn basis(n: usize, i: usize) -> Self {
        let mut e = Self::zero(n);
        e.coords[i] = F::one();
        e
    }

    pub fn coords(&self) -> &[F] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<F> {
        self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(num_traits::Zero::is_zero)
    }

    pub fn max_abs(&self) -> f64 {
        vec_max_abs(&self.coords)
    }

    pub fn scale(&self, s: &F) -> Self {
        Element::new(self.coords.iter().map(|x| x.clone() * s.clone()).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        Element::new(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        Element::new(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        )
    }

    pub fn to_complex(&self) -> Element<ComplexF> {
        Element::new(self.coords.iter().map(Field::to_complex).collect())
    }
}

impl<F: Field> EvolutionAlgebra<F> {
    pub fn new(structure: Matrix<F>) -> Result<Self> {
        if !structure.is_square() {
            return Err(Error::DimensionMismatch {
                expected: structure.rows(),
                found: structure.cols(),
            });
        }
        if structure.rows() == 0 {
            return Err(Error::InvalidParameters("dimension must be at least 1".to_string()));
        }
        Ok(EvolutionAlgebra { structure })
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Result<Self> {
        Self::new(Matrix::from_rows(rows)?)
    }

    /// The algebra with `A = 0`.
    pub fn zero(n: usize) -> Self {
        EvolutionAlgebra {
            structure: Matrix::zeros(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.structure.rows()
    }

    pub fn structure(&self) -> &Matrix<F> {
        &self.structure
    }

    /// Structural constant `a_{i,k}` (0-based).
    pub fn constant(&self, i: usize, k: usize) -> &F {
        &self.structure[(i, k)]
    }

    fn check(&self, x: &Element<F>) -> Result<()> {
        if x.dim() == self.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.dim(),
            })
        }
    }

    /// `x · y`: coordinate `k` is `Σ_i x_i y_i a_{i,k}`.
    pub fn multiply(&self, x: &Element<F>, y: &Element<F>) -> Result<Element<F>> {
        self.check(x)?;
        self.check(y)?;
        let weights: Vec<F> = x
            .coords
            .iter()
            .zip(&y.coords)
            .map(|(a, b)| a.clone() * b.clone())
            .collect();
        Ok(Element::new(self.structure.left_apply(&weights)))
    }

    pub fn square(&self, x: &Element<F>) -> Result<Element<F>> {
        self.multiply(x, x)
    }

    /// `x^[k]`: `x^[1] = x`, `x^[k+1] = x^[k] · x^[k]`.
    pub fn plenary_power(&self, x: &Element<F>, k: usize) -> Result<Element<F>> {
        if k == 0 {
            return Err(Error::PreconditionFailed("plenary power index must be at least 1".to_string()));
        }
        self.check(x)?;
        let mut p = x.clone();
        for _ in 1..k {
            p = self.square(&p)?;
        }
        Ok(p)
    }

    /// Matrix of `y ↦ y · x` acting on row vectors.
    pub fn right_mult_matrix(&self, x: &Element<F>) -> Result<Matrix<F>> {
        self.check(x)?;
        let n = self.dim();
        let mut r = Matrix::zeros(n, n);
        for (i, xi) in x.coords.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for k in 0..n {
                r[(i, k)] = xi.clone() * self.structure[(i, k)].clone();
            }
        }
        Ok(r)
    }

    /// `R_{e_i}`: row `i` of `A`, zeros elsewhere.
    pub fn basis_right_mult(&self, i: usize) -> Matrix<F> {
        self.right_mult_matrix(&Element::basis(self.dim(), i))
            .expect("basis vector has the right length")
    }

    /// Every row of `A` sums to one (exactly, or within `1e-12` for floats).
    pub fn is_markov(&self) -> bool {
        (0..self.dim()).all(|i| {
            let s = self
                .structure
                .row(i)
                .iter()
                .fold(F::zero(), |acc, x| acc + x.clone());
            (s - F::one()).negligible(1e-12)
        })
    }

    /// `dim E² = rank A`.
    pub fn square_dim(&self, tol: f64) -> usize {
        linalg::rank(&self.structure, tol)
    }

    /// Rewrites the algebra in the basis given by the rows of `cb`.
    ///
    /// Returns the structure matrix read off the diagonal products together
    /// with the largest off-diagonal product `max_{i≠j} ‖e'_i·e'_j‖∞`; a
    /// nonzero residual means the new basis is not an evolution basis.
    pub fn apply_change_of_basis(&self, cb: &ChangeOfBasis<F>) -> Result<(EvolutionAlgebra<F>, f64)> {
        let n = self.dim();
        if cb.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: cb.dim(),
            });
        }
        let w = &cb.basis;
        let product_in_new_coords = |i: usize, j: usize| -> Vec<F> {
            let weights: Vec<F> = w
                .row(i)
                .iter()
                .zip(w.row(j))
                .map(|(a, b)| a.clone() * b.clone())
                .collect();
            cb.inverse.left_apply(&self.structure.left_apply(&weights))
        };
        let mut structure = Matrix::zeros(n, n);
        let mut residual: f64 = 0.0;
        for i in 0..n {
            structure.set_row(i, &product_in_new_coords(i, i));
            for j in i + 1..n {
                residual = residual.max(vec_max_abs(&product_in_new_coords(i, j)));
            }
        }
        Ok((EvolutionAlgebra { structure }, residual))
    }

    pub fn to_complex(&self) -> EvolutionAlgebra<ComplexF> {
        EvolutionAlgebra {
            structure: self.structure.to_complex(),
        }
    }
}

/// An invertible change of basis: row `j` of `basis` holds the old
/// coordinates of the new basis vector `e'_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChangeOfBasis<F> {
    basis: Matrix<F>,
    inverse: Matrix<F>,
    residual: f64,
}

impl<F: Field> ChangeOfBasis<F> {
    /// Inverts `basis` and records `‖W·W⁻¹ − I‖∞`.
    pub fn new(basis: Matrix<F>, tol: f64) -> Result<Self> {
        let inverse = linalg::invert(&basis, tol)?;
        let residual = (&basis * &inverse).sub(&Matrix::identity(basis.rows())).max_abs();
        Ok(ChangeOfBasis {
            basis,
            inverse,
            residual,
        })
    }

    pub fn identity(n: usize) -> Self {
        ChangeOfBasis {
            basis: Matrix::identity(n),
            inverse: Matrix::identity(n),
            residual: 0.0,
        }
    }

    /// `e'_j = d_j e_j`; every `d_j` must be nonzero.
    pub fn diagonal(d: &[F]) -> Result<Self> {
        if let Some(index) = d.iter().position(num_traits::Zero::is_zero) {
            return Err(Error::ZeroCoefficient { index });
        }
        let inv: Vec<F> = d.iter().map(|x| F::one() / x.clone()).collect();
        let basis = Matrix::diagonal(d);
        let inverse = Matrix::diagonal(&inv);
        let residual = (&basis * &inverse).sub(&Matrix::identity(d.len())).max_abs();
        Ok(ChangeOfBasis {
            basis,
            inverse,
            residual,
        })
    }

    /// Relabeling `e'_j = e_{source[j]}` (0-based; `source` must be a bijection).
    pub fn relabel(source: &[usize]) -> Self {
        let n = source.len();
        let mut basis = Matrix::zeros(n, n);
        for (j, &s) in source.iter().enumerate() {
            basis[(j, s)] = F::one();
        }
        ChangeOfBasis {
            inverse: basis.transpose(),
            basis,
            residual: 0.0,
        }
    }

    /// `e'_j = scale[j] · e_{source[j]}`; `source` must be a bijection.
    pub fn monomial(source: &[usize], scale: &[F]) -> Result<Self> {
        let n = source.len();
        if scale.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: scale.len(),
            });
        }
        let mut seen = alloc::vec![false; n];
        for &s in source {
            if s >= n || core::mem::replace(&mut seen[s], true) {
                return Err(Error::InvalidPermutation(alloc::format!("{source:?}")));
            }
        }
        if let Some(index) = scale.iter().position(num_traits::Zero::is_zero) {
            return Err(Error::ZeroCoefficient { index });
        }
        let mut basis = Matrix::zeros(n, n);
        let mut inverse = Matrix::zeros(n, n);
        for (j, (&s, c)) in source.iter().zip(scale).enumerate() {
            basis[(j, s)] = c.clone();
            inverse[(s, j)] = F::one() / c.clone();
        }
        let residual = (&basis * &inverse).sub(&Matrix::identity(n)).max_abs();
        Ok(ChangeOfBasis {
            basis,
            inverse,
            residual,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &Matrix<F> {
        &self.basis
    }

    pub fn inverse(&self) -> &Matrix<F> {
        &self.inverse
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Apply `self`, then `next` (expressed in the basis produced by `self`).
    pub fn then(&self, next: &ChangeOfBasis<F>) -> Self {
        let basis = &next.basis * &self.basis;
        let inverse = &self.inverse * &next.inverse;
        let residual = (&basis * &inverse).sub(&Matrix::identity(basis.rows())).max_abs();
        ChangeOfBasis {
            basis,
            inverse,
            residual,
        }
    }

    /// Swaps the direction of the isomorphism.
    pub fn inverted(&self) -> Self {
        ChangeOfBasis {
            basis: self.inverse.clone(),
            inverse: self.basis.clone(),
            residual: self.residual,
        }
    }

    pub fn to_complex(&self) -> ChangeOfBasis<ComplexF> {
        let basis = self.basis.to_complex();
        let inverse = self.inverse.to_complex();
        let residual = (&basis * &inverse).sub(&Matrix::identity(basis.rows())).max_abs();
        ChangeOfBasis {
            basis,
            inverse,
            residual,
        }
    }
}

/// Largest deviation between `cb` applied to `source` and `target`,
/// including the off-diagonal products.
pub fn isomorphism_residual<F: Field>(
    source: &EvolutionAlgebra<F>,
    cb: &ChangeOfBasis<F>,
    target: &Matrix<F>,
) -> Result<f64> {
    let (image, offdiag) = source.apply_change_of_basis(cb)?;
    Ok(offdiag.max(image.structure().sub(target).max_abs()))
}

/// A witness whose scalar domain is decided at runtime.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyChangeOfBasis {
    Rational(ChangeOfBasis<Rational>),
    Complex(ChangeOfBasis<ComplexF>),
}

impl AnyChangeOfBasis {
    /// Wraps a witness over any field, keeping exact witnesses exact.
    pub fn from_field<F: Field>(cb: ChangeOfBasis<F>) -> Self {
        fn convert<F: Field, G: Field>(cb: &ChangeOfBasis<F>) -> ChangeOfBasis<G> {
            let conv = |m: &Matrix<F>| m.map(|x| G::from_scalar(&x.clone().into_scalar()).expect("same domain"));
            ChangeOfBasis {
                basis: conv(&cb.basis),
                inverse: conv(&cb.inverse),
                residual: cb.residual,
            }
        }
        match F::DOMAIN {
            Domain::Rational => AnyChangeOfBasis::Rational(convert(&cb)),
            Domain::Complex => AnyChangeOfBasis::Complex(convert(&cb)),
        }
    }

    pub fn domain(&self) -> Domain {
        match self {
            AnyChangeOfBasis::Rational(_) => Domain::Rational,
            AnyChangeOfBasis::Complex(_) => Domain::Complex,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            AnyChangeOfBasis::Rational(cb) => cb.dim(),
            AnyChangeOfBasis::Complex(cb) => cb.dim(),
        }
    }

    pub fn residual(&self) -> f64 {
        match self {
            AnyChangeOfBasis::Rational(cb) => cb.residual(),
            AnyChangeOfBasis::Complex(cb) => cb.residual(),
        }
    }

    pub fn basis_rows(&self) -> Vec<Vec<Scalar>> {
        fn rows<F: Field>(m: &Matrix<F>) -> Vec<Vec<Scalar>> {
            m.row_vecs()
                .into_iter()
                .map(|r| r.into_iter().map(Field::into_scalar).collect())
                .collect()
        }
        match self {
            AnyChangeOfBasis::Rational(cb) => rows(cb.basis()),
            AnyChangeOfBasis::Complex(cb) => rows(cb.basis()),
        }
    }

    pub fn to_complex(&self) -> ChangeOfBasis<ComplexF> {
        match self {
            AnyChangeOfBasis::Rational(cb) => cb.to_complex(),
            AnyChangeOfBasis::Complex(cb) => cb.clone(),
        }
    }

    /// `isomorphism_residual` of `source` (promoted if needed) onto `target`.
    pub fn verify<F: Field>(&self, source: &EvolutionAlgebra<F>, target: &Matrix<F>) -> Result<f64> {
        match (self, F::DOMAIN) {
            (AnyChangeOfBasis::Rational(cb), Domain::Rational) => {
                let conv = |m: &Matrix<F>| m.map(|x| Rational::from_scalar(&x.clone().into_scalar()).expect("same domain"));
                let src = EvolutionAlgebra::new(conv(source.structure()))?;
                isomorphism_residual(&src, cb, &conv(target))
            }
            _ => isomorphism_residual(&source.to_complex(), &self.to_complex(), &target.to_complex()),
        }
    }
}

/// An algebra whose scalar domain is decided at runtime.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyAlgebra {
    Rational(EvolutionAlgebra<Rational>),
    Complex(EvolutionAlgebra<ComplexF>),
}

impl AnyAlgebra {
    pub fn from_scalars(rows: &[Vec<Scalar>], domain: Domain) -> Result<Self> {
        fn convert<F: Field>(rows: &[Vec<Scalar>]) -> Result<EvolutionAlgebra<F>> {
            let rows = rows
                .iter()
                .map(|r| r.iter().map(F::from_scalar).collect::<Result<Vec<F>>>())
                .collect::<Result<Vec<_>>>()?;
            EvolutionAlgebra::from_rows(rows)
        }
        match domain {
            Domain::Rational => convert(rows).map(AnyAlgebra::Rational),
            Domain::Complex => convert(rows).map(AnyAlgebra::Complex),
        }
    }

    pub fn domain(&self) -> Domain {
        match self {
            AnyAlgebra::Rational(_) => Domain::Rational,
            AnyAlgebra::Complex(_) => Domain::Complex,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            AnyAlgebra::Rational(e) => e.dim(),
            AnyAlgebra::Complex(e) => e.dim(),
        }
    }

    pub fn rows(&self) -> Vec<Vec<Scalar>> {
        fn rows<F: Field>(e: &EvolutionAlgebra<F>) -> Vec<Vec<Scalar>> {
            e.structure()
                .row_vecs()
                .into_iter()
                .map(|r| r.into_iter().map(Field::into_scalar).collect())
                .collect()
        }
        match self {
            AnyAlgebra::Rational(e) => rows(e),
            AnyAlgebra::Complex(e) => rows(e),
        }
    }

    pub fn to_complex(&self) -> EvolutionAlgebra<ComplexF> {
        match self {
            AnyAlgebra::Rational(e) => e.to_complex(),
            AnyAlgebra::Complex(e) => e.clone(),
        }
    }

    /// Product of tagged elements; every scalar must share the algebra's domain.
    pub fn multiply(&self, x: &[Scalar], y: &[Scalar]) -> Result<Vec<Scalar>> {
        fn run<F: Field>(e: &EvolutionAlgebra<F>, x: &[Scalar], y: &[Scalar]) -> Result<Vec<Scalar>> {
            let x = Element::new(x.iter().map(F::from_scalar).collect::<Result<_>>()?);
            let y = Element::new(y.iter().map(F::from_scalar).collect::<Result<_>>()?);
            Ok(e.multiply(&x, &y)?.into_coords().into_iter().map(Field::into_scalar).collect())
        }
        match self {
            AnyAlgebra::Rational(e) => run(e, x, y),
            AnyAlgebra::Complex(e) => run(e, x, y),
        }
    }

    pub fn plenary_power(&self, x: &[Scalar], k: usize) -> Result<Vec<Scalar>> {
        fn run<F: Field>(e: &EvolutionAlgebra<F>, x: &[Scalar], k: usize) -> Result<Vec<Scalar>> {
            let x = Element::new(x.iter().map(F::from_scalar).collect::<Result<_>>()?);
            Ok(e.plenary_power(&x, k)?.into_coords().into_iter().map(Field::into_scalar).collect())
        }
        match self {
            AnyAlgebra::Rational(e) => run(e, x, k),
            AnyAlgebra::Complex(e) => run(e, x, k),
        }
    }
}
