//! The associative enveloping algebra `M(E)`: the matrix algebra generated
//! by the right multiplications `R_{e_i}`.
//!
//! Operators act on row vectors, so `R_x R_y` applies `R_x` first and is the
//! plain matrix product; matrix units multiply as `e_{ij} e_{kl} = δ_{jk} e_{il}`.

use alloc::vec::Vec;
use core::fmt;

use crate::algebra::{ChangeOfBasis, EvolutionAlgebra};
use crate::classify2::TwoDimForm;
use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::Matrix;
use crate::scalar::Field;

/// Multiplication table `x_i x_j = Σ_k c[i][j][k] x_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct AssocTable<F> {
    dim: usize,
    data: Vec<F>,
}

impl<F: Field> AssocTable<F> {
    pub fn zeros(dim: usize) -> Self {
        AssocTable {
            dim,
            data: alloc::vec![F::zero(); dim * dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &F {
        &self.data[(i * self.dim + j) * self.dim + k]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: F) {
        self.data[(i * self.dim + j) * self.dim + k] = v;
    }

    /// Coordinates of `x_i x_j`.
    pub fn product(&self, i: usize, j: usize) -> &[F] {
        let start = (i * self.dim + j) * self.dim;
        &self.data[start..start + self.dim]
    }

    /// Sets `x_i x_j = x_k`.
    fn unit(&mut self, i: usize, j: usize, k: usize) {
        self.set(i, j, k, F::one());
    }

    /// Table of the matrix units `e_{11}, e_{12}, …` of `M_m`, row-major.
    pub fn matrix_units(m: usize) -> Self {
        let mut t = Self::zeros(m * m);
        for i in 0..m {
            for j in 0..m {
                for l in 0..m {
                    t.unit(i * m + j, j * m + l, i * m + l);
                }
            }
        }
        t
    }

    /// `x_i x_j = x_i` for `j < s`, all other products zero.
    pub fn ms(n: usize, s: usize) -> Self {
        let mut t = Self::zeros(n);
        for i in 0..n {
            for j in 0..s {
                t.unit(i, j, i);
            }
        }
        t
    }

    /// `x_i x_i = x_i`.
    pub fn m1(n: usize) -> Self {
        let mut t = Self::zeros(n);
        for i in 0..n {
            t.unit(i, i, i);
        }
        t
    }

    /// `M1` plus `x_1 x_n = x_1`, `x_n x_1 = x_n`.
    pub fn m2(n: usize) -> Self {
        let mut t = Self::m1(n);
        t.unit(0, n - 1, 0);
        t.unit(n - 1, 0, n - 1);
        t
    }

    /// `x_i x_i = x_i` for `i < n`, `x_n x_1 = x_n`.
    pub fn m3(n: usize) -> Self {
        let mut t = Self::zeros(n);
        for i in 0..n - 1 {
            t.unit(i, i, i);
        }
        t.unit(n - 1, 0, n - 1);
        t
    }

    /// `x_i x_i = x_i` for `i < n`, `x_1 x_2 = x_n`, `x_1 x_n = x_n`, `x_n x_2 = x_n`.
    pub fn m4(n: usize) -> Self {
        let mut t = Self::zeros(n);
        for i in 0..n - 1 {
            t.unit(i, i, i);
        }
        t.unit(0, 1, n - 1);
        t.unit(0, n - 1, n - 1);
        t.unit(n - 1, 1, n - 1);
        t
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a.clone() - b.clone()).magnitude())
            .fold(0.0, f64::max)
    }
}

/// Growing echelon basis of a subspace of `F^len`, kept fully reduced.
#[derive(Debug, Clone)]
struct Span<F> {
    rows: Vec<Vec<F>>,
    pivots: Vec<usize>,
    threshold: f64,
}

impl<F: Field> Span<F> {
    fn new(threshold: f64) -> Self {
        Span {
            rows: Vec::new(),
            pivots: Vec::new(),
            threshold,
        }
    }

    fn reduce(&self, v: &mut [F]) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = v[p].clone();
            if c.is_zero() {
                continue;
            }
            for (x, r) in v.iter_mut().zip(row) {
                *x = x.clone() - c.clone() * r.clone();
            }
            v[p] = F::zero();
        }
    }

    /// Adds `v` if it is independent; returns whether it was added.
    fn insert(&mut self, v: &[F]) -> bool {
        let mut v = v.to_vec();
        self.reduce(&mut v);
        let pivot = if F::DOMAIN.is_exact() {
            v.iter().position(|x| !x.is_zero())
        } else {
            v.iter()
                .enumerate()
                .filter(|(_, x)| !x.negligible(self.threshold))
                .max_by(|a, b| a.1.magnitude().total_cmp(&b.1.magnitude()))
                .map(|(i, _)| i)
        };
        let Some(p) = pivot else { return false };
        let inv = F::one() / v[p].clone();
        for x in v.iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for &q in &self.pivots {
            v[q] = F::zero();
        }
        v[p] = F::one();
        for row in self.rows.iter_mut() {
            let c = row[p].clone();
            if c.is_zero() {
                continue;
            }
            for (x, r) in row.iter_mut().zip(&v) {
                *x = x.clone() - c.clone() * r.clone();
            }
            row[p] = F::zero();
        }
        self.rows.push(v);
        self.pivots.push(p);
        true
    }

    fn sort_by_pivot(&mut self) {
        let mut order: Vec<usize> = (0..self.rows.len()).collect();
        order.sort_by_key(|&i| self.pivots[i]);
        self.rows = order.iter().map(|&i| self.rows[i].clone()).collect();
        self.pivots = order.iter().map(|&i| self.pivots[i]).collect();
    }

    /// Coordinates of `v` read off the pivot columns, and how far `v` is
    /// from their combination.
    fn express(&self, v: &[F]) -> (Vec<F>, f64) {
        let coords: Vec<F> = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let mut rest = v.to_vec();
        for (c, row) in coords.iter().zip(&self.rows) {
            for (x, r) in rest.iter_mut().zip(row) {
                *x = x.clone() - c.clone() * r.clone();
            }
        }
        (coords, crate::matrix::vec_max_abs(&rest))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopingReport<F> {
    /// Echelon basis of `M(E)`, sorted by pivot position in the row-major
    /// flattening.
    pub basis: Vec<Matrix<F>>,
    pub dim: usize,
    pub assoc_constants: AssocTable<F>,
    pub per_row_ranks: Vec<usize>,
    pub sum_ranks: usize,
    pub formula_agrees: bool,
    /// Largest distance of a basis product from the span.
    pub closure_residual: f64,
    pivots: Vec<usize>,
    threshold: f64,
}

impl<F: Field> EnvelopingReport<F> {
    /// Coordinates of `m` in the echelon basis and the distance from the span.
    pub fn express(&self, m: &Matrix<F>) -> (Vec<F>, f64) {
        let span = Span {
            rows: self.basis.iter().map(|b| b.as_slice().to_vec()).collect(),
            pivots: self.pivots.clone(),
            threshold: self.threshold,
        };
        span.express(m.as_slice())
    }

    fn in_span(&self, residual: f64) -> bool {
        if F::DOMAIN.is_exact() {
            residual == 0.0
        } else {
            residual <= self.threshold
        }
    }
}

/// `R_{e_i} R_{e_j} = a_{ij} · (row j of A placed in row i)`.
pub fn generator_product<F: Field>(e: &EvolutionAlgebra<F>, i: usize, j: usize) -> Matrix<F> {
    let n = e.dim();
    let mut m = Matrix::zeros(n, n);
    let aij = e.constant(i, j).clone();
    if !aij.is_zero() {
        for k in 0..n {
            m[(i, k)] = aij.clone() * e.constant(j, k).clone();
        }
    }
    m
}

/// `r_i = rank` of the matrix with rows `a_{ij} · (row j of A)`.
pub fn per_row_rank<F: Field>(e: &EvolutionAlgebra<F>, i: usize, tol: f64) -> usize {
    let n = e.dim();
    let rows: Vec<Vec<F>> = (0..n)
        .map(|j| (0..n).map(|k| e.constant(i, j).clone() * e.constant(j, k).clone()).collect())
        .collect();
    linalg::rank(&linalg::matrix_from_vectors(&rows, n), tol)
}

fn threshold<F: Field>(e: &EvolutionAlgebra<F>, tol: f64) -> f64 {
    let scale = e.structure().max_abs().max(1.0);
    tol * scale * scale
}

/// Span closure of the right multiplications under multiplication by the
/// generators on both sides.
pub fn enveloping_closure<F: Field>(e: &EvolutionAlgebra<F>, tol: f64) -> EnvelopingReport<F> {
    let n = e.dim();
    let threshold = threshold(e, tol);
    let generators: Vec<Matrix<F>> = (0..n)
        .map(|i| e.basis_right_mult(i))
        .filter(|g| g.as_slice().iter().any(|x| !x.negligible(threshold)))
        .collect();
    let mut span = Span::new(threshold);
    let mut queue: Vec<Matrix<F>> = Vec::new();
    for g in &generators {
        if span.insert(g.as_slice()) {
            queue.push(g.clone());
        }
    }
    let mut next = 0;
    while next < queue.len() {
        let b = queue[next].clone();
        next += 1;
        for g in &generators {
            for p in [&b * g, g * &b] {
                if span.insert(p.as_slice()) {
                    queue.push(p);
                }
            }
        }
    }
    span.sort_by_pivot();

    let dim = span.rows.len();
    let basis: Vec<Matrix<F>> = span
        .rows
        .iter()
        .map(|r| Matrix::new(n, n, r.clone()).expect("n*n entries"))
        .collect();
    let mut assoc_constants = AssocTable::zeros(dim);
    let mut closure_residual: f64 = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let (coords, res) = span.express((&basis[i] * &basis[j]).as_slice());
            closure_residual = closure_residual.max(res);
            for (k, c) in coords.into_iter().enumerate() {
                assoc_constants.set(i, j, k, c);
            }
        }
    }
    let per_row_ranks: Vec<usize> = (0..n).map(|i| per_row_rank(e, i, tol)).collect();
    let sum_ranks = per_row_ranks.iter().sum();
    EnvelopingReport {
        basis,
        dim,
        assoc_constants,
        per_row_ranks,
        sum_ranks,
        formula_agrees: dim == sum_ranks,
        closure_residual,
        pivots: span.pivots,
        threshold,
    }
}

/// The enveloping algebra of a canonical two-dimensional form: a basis of
/// matrices inside `M(E)` and the table they satisfy.
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogEntry<F> {
    pub dim: usize,
    pub basis: Vec<Matrix<F>>,
    pub table: AssocTable<F>,
    /// Closure gives `yx = y` here; the variant with `yx = x` is not the envelope.
    pub corrected: bool,
}

fn mu<F: Field>(i: usize, j: usize) -> Matrix<F> {
    Matrix::unit(2, i, j)
}

pub fn catalog_2d<F: Field>(form: &TwoDimForm<F>) -> Result<CatalogEntry<F>> {
    form.validate()?;
    let e = EvolutionAlgebra::new(form.structure())?;
    let r = |i| e.basis_right_mult(i);
    let entry = |basis: Vec<Matrix<F>>, table: AssocTable<F>| CatalogEntry {
        dim: basis.len(),
        basis,
        table,
        corrected: false,
    };
    let upper_triangular = || {
        let mut t = AssocTable::zeros(3);
        // b1 = e11, b2 = e12, b3 = e22
        t.unit(0, 0, 0);
        t.unit(0, 1, 1);
        t.unit(1, 2, 1);
        t.unit(2, 2, 2);
        t
    };
    let zero = |x: &F| x.is_zero();
    Ok(match form {
        TwoDimForm::Abelian => {
            return Err(Error::InvalidParameters("the abelian algebra is not in the list".into()));
        }
        TwoDimForm::E1 => entry(alloc::vec![r(0)], AssocTable::m1(1)),
        TwoDimForm::E2 => {
            let mut t = AssocTable::zeros(2);
            t.unit(0, 0, 0);
            t.unit(1, 0, 1);
            CatalogEntry {
                corrected: true,
                ..entry(alloc::vec![r(0), r(1)], t)
            }
        }
        TwoDimForm::E3 => {
            let mut t = AssocTable::zeros(2);
            t.unit(0, 0, 0);
            t.set(0, 1, 0, -F::one());
            t.unit(1, 0, 1);
            t.set(1, 1, 1, -F::one());
            entry(alloc::vec![r(0), r(1)], t)
        }
        TwoDimForm::E4 => entry(alloc::vec![r(0)], AssocTable::zeros(1)),
        TwoDimForm::E5(a2, a3) if zero(a2) && zero(a3) => entry(alloc::vec![r(0), r(1)], AssocTable::m1(2)),
        TwoDimForm::E5(a2, _) if zero(a2) => {
            // lower triangular; conjugating by the swap makes it upper
            entry(alloc::vec![mu(1, 1), mu(1, 0), mu(0, 0)], upper_triangular())
        }
        TwoDimForm::E5(_, a3) if zero(a3) => entry(alloc::vec![mu(0, 0), mu(0, 1), mu(1, 1)], upper_triangular()),
        TwoDimForm::E5(..) | TwoDimForm::E6(_) => entry(
            alloc::vec![mu(0, 0), mu(0, 1), mu(1, 0), mu(1, 1)],
            AssocTable::matrix_units(2),
        ),
    })
}

/// Checks that the catalog basis lies in and spans the closure and that its
/// products follow the catalog table. Returns the worst deviation.
pub fn catalog_agrees<F: Field>(entry: &CatalogEntry<F>, report: &EnvelopingReport<F>) -> f64 {
    if entry.dim != report.dim {
        return f64::INFINITY;
    }
    match verify_basis(report, &entry.basis, &entry.table) {
        Some((_, res)) => res,
        None => f64::INFINITY,
    }
}

/// Coordinates of `xs` in the report's basis as a change of basis, and the
/// worst deviation of their products from `table`.
fn verify_basis<F: Field>(report: &EnvelopingReport<F>, xs: &[Matrix<F>], table: &AssocTable<F>) -> Option<(ChangeOfBasis<F>, f64)> {
    let d = report.dim;
    if xs.len() != d || table.dim() != d {
        return None;
    }
    let mut rows = Vec::with_capacity(d);
    for x in xs {
        let (coords, res) = report.express(x);
        if !report.in_span(res) {
            return None;
        }
        rows.push(coords);
    }
    let cb = ChangeOfBasis::new(linalg::matrix_from_vectors(&rows, d), report.threshold.max(1e-12)).ok()?;
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let (coords, res) = report.express(&(&xs[i] * &xs[j]));
            worst = worst.max(res);
            let in_x = cb.inverse().left_apply(&coords);
            for (k, c) in in_x.into_iter().enumerate() {
                worst = worst.max((c - table.get(i, j, k).clone()).magnitude());
            }
        }
    }
    Some((cb, worst))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankCaseLabel {
    Ms(usize),
    M1,
    M2,
    M3,
    M4,
    NotApplicable,
}

impl fmt::Display for RankCaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RankCaseLabel::Ms(s) => write!(f, "M^{s}"),
            RankCaseLabel::M1 => f.write_str("M1"),
            RankCaseLabel::M2 => f.write_str("M2"),
            RankCaseLabel::M3 => f.write_str("M3"),
            RankCaseLabel::M4 => f.write_str("M4"),
            RankCaseLabel::NotApplicable => f.write_str("not applicable"),
        }
    }
}

/// Why the rank-case analysis did not apply.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Premise {
    /// `dim M(E) ≠ n`.
    EnvelopingDim { expected: usize, found: usize },
    /// `rank A ∉ {1, n−1, n}`.
    Rank(usize),
    /// Premises hold but no construction reproduced a listed table.
    NoConstruction,
}

impl fmt::Display for Premise {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Premise::EnvelopingDim { expected, found } => write!(f, "dim M(E) = {found}, expected {expected}"),
            Premise::Rank(r) => write!(f, "rank A = {r} is not 1, n-1 or n"),
            Premise::NoConstruction => f.write_str("no listed table matches"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankCaseAnalysis<F> {
    pub label: RankCaseLabel,
    pub premise_failure: Option<Premise>,
    /// Rows are the new basis `x_1..x_n` in the echelon basis of `M(E)`.
    pub witness: Option<ChangeOfBasis<F>>,
    pub residual: f64,
}

struct Generators<'a, F> {
    e: &'a EvolutionAlgebra<F>,
    threshold: f64,
}

impl<F: Field> Generators<'_, F> {
    fn r(&self, i: usize) -> Matrix<F> {
        self.e.basis_right_mult(i)
    }

    fn a(&self, i: usize, j: usize) -> F {
        self.e.constant(i, j).clone()
    }

    fn nonzero(&self, x: &F) -> bool {
        !x.negligible(self.threshold)
    }

    /// `R_i / a_ii`.
    fn normalized(&self, i: usize) -> Option<Matrix<F>> {
        let d = self.a(i, i);
        self.nonzero(&d).then(|| self.r(i).scale(&(F::one() / d)))
    }
}

/// Labels `M(E)` as one of the tables `M^s`, `M1` to `M4` when `dim M(E) = n`
/// and `rank A ∈ {1, n−1, n}`, with a verified change of basis.
pub fn classify_rank_cases<F: Field>(e: &EvolutionAlgebra<F>, tol: f64) -> RankCaseAnalysis<F> {
    let n = e.dim();
    let report = enveloping_closure(e, tol);
    let not_applicable = |p: Premise| RankCaseAnalysis {
        label: RankCaseLabel::NotApplicable,
        premise_failure: Some(p),
        witness: None,
        residual: 0.0,
    };
    if report.dim != n {
        return not_applicable(Premise::EnvelopingDim {
            expected: n,
            found: report.dim,
        });
    }
    let g = Generators {
        e,
        threshold: report.threshold,
    };
    let rank = linalg::rank(e.structure(), tol);
    let mut candidates: Vec<(RankCaseLabel, Vec<Matrix<F>>)> = Vec::new();
    if rank == n {
        if let Some(xs) = (0..n).map(|i| g.normalized(i)).collect::<Option<Vec<_>>>() {
            candidates.push((RankCaseLabel::M1, xs));
        }
    } else if rank == 1 {
        candidates.extend(ms_candidate(&g));
    } else if rank + 1 == n {
        candidates.extend(corank_one_candidates(&g, tol));
    } else {
        return not_applicable(Premise::Rank(rank));
    }
    for (label, xs) in candidates {
        let table = match label {
            RankCaseLabel::Ms(s) => AssocTable::ms(n, s),
            RankCaseLabel::M1 => AssocTable::m1(n),
            RankCaseLabel::M2 => AssocTable::m2(n),
            RankCaseLabel::M3 => AssocTable::m3(n),
            RankCaseLabel::M4 => AssocTable::m4(n),
            RankCaseLabel::NotApplicable => unreachable!(),
        };
        if let Some((cb, residual)) = verify_basis(&report, &xs, &table) {
            let ok = if F::DOMAIN.is_exact() { residual == 0.0 } else { residual < 1e-8 };
            if ok {
                return RankCaseAnalysis {
                    label,
                    premise_failure: None,
                    witness: Some(cb),
                    residual,
                };
            }
        }
    }
    not_applicable(Premise::NoConstruction)
}

/// Rank one: `R_i R_j = a_jj R_i`, so `x_j = R_j / a_jj` for the `s` indices
/// with `a_jj ≠ 0` (listed first) and `x_j = R_j` otherwise.
fn ms_candidate<F: Field>(g: &Generators<'_, F>) -> Option<(RankCaseLabel, Vec<Matrix<F>>)> {
    let n = g.e.dim();
    let (first, rest): (Vec<usize>, Vec<usize>) = (0..n).partition(|&j| g.nonzero(&g.a(j, j)));
    let s = first.len();
    let mut xs: Vec<Matrix<F>> = first.iter().map(|&j| g.normalized(j)).collect::<Option<_>>()?;
    xs.extend(rest.iter().map(|&j| g.r(j)));
    Some((RankCaseLabel::Ms(s), xs))
}

/// Rank `n−1`. A zero row `d` leads to `M4`; otherwise each row `d` that
/// depends on exactly one other row `p` is tried as the dependent one.
fn corank_one_candidates<F: Field>(g: &Generators<'_, F>, tol: f64) -> Vec<(RankCaseLabel, Vec<Matrix<F>>)> {
    let n = g.e.dim();
    let mut out = Vec::new();
    let zero_row = (0..n).find(|&i| (0..n).all(|k| !g.nonzero(&g.a(i, k))));
    if let Some(d) = zero_row {
        let off: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j && i != d && j != d && g.nonzero(&g.a(i, j)))
            .collect();
        if let [(i0, j0)] = off[..] {
            let others: Vec<usize> = (0..n).filter(|&i| i != i0 && i != j0 && i != d).collect();
            let mut xs = Vec::with_capacity(n);
            for i in [i0, j0].into_iter().chain(others) {
                match g.normalized(i) {
                    Some(x) => xs.push(x),
                    None => return out,
                }
            }
            let c = F::one() / (g.a(i0, i0) * g.a(j0, j0));
            xs.push((&g.r(i0) * &g.r(j0)).scale(&c));
            out.push((RankCaseLabel::M4, xs));
        }
        return out;
    }
    let Some(y) = linalg::solve_kernel(&g.e.structure().transpose(), tol).into_iter().next() else {
        return out;
    };
    for d in (0..n).filter(|&d| g.nonzero(&y[d])) {
        let partners: Vec<usize> = (0..n).filter(|&k| k != d && g.nonzero(&y[k])).collect();
        let [p] = partners[..] else { continue };
        let others: Vec<usize> = (0..n).filter(|&i| i != p && i != d).collect();
        let Some(middle) = others.iter().map(|&i| g.normalized(i)).collect::<Option<Vec<_>>>() else {
            continue;
        };
        let (app, apd) = (g.a(p, p), g.a(p, d));
        let (label, first, last) = if g.nonzero(&app) && g.nonzero(&apd) {
            match g.normalized(d) {
                Some(xd) => (RankCaseLabel::M2, g.normalized(p).expect("checked"), xd),
                None => continue,
            }
        } else if g.nonzero(&app) {
            (RankCaseLabel::M3, g.normalized(p).expect("checked"), g.r(d))
        } else {
            match g.normalized(d) {
                Some(xd) => (RankCaseLabel::M3, xd, g.r(p)),
                None => continue,
            }
        };
        let mut xs = Vec::with_capacity(n);
        xs.push(first);
        xs.extend(middle);
        xs.push(last);
        out.push((label, xs));
    }
    out
}
