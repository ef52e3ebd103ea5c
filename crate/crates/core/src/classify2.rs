//! Two-dimensional evolution algebras up to isomorphism.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{isomorphism_residual, ChangeOfBasis, EvolutionAlgebra};
use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::Matrix;
use crate::scalar::{format_field, ComplexF, Field, DEFAULT_TOL};

/// Witnesses must reproduce the canonical table to this accuracy.
pub const WITNESS_TOL: f64 = 1e-8;

/// The canonical two-dimensional forms, plus the abelian (zero) algebra.
#[derive(Debug, Clone, PartialEq)]
pub enum TwoDimForm<F> {
    Abelian,
    E1,
    E2,
    E3,
    E4,
    E5(F, F),
    E6(F),
}

impl<F: Field> TwoDimForm<F> {
    pub fn name(&self) -> &'static str {
        match self {
            TwoDimForm::Abelian => "Abelian",
            TwoDimForm::E1 => "E1",
            TwoDimForm::E2 => "E2",
            TwoDimForm::E3 => "E3",
            TwoDimForm::E4 => "E4",
            TwoDimForm::E5(..) => "E5",
            TwoDimForm::E6(_) => "E6",
        }
    }

    /// Rejects `E5(a2, a3)` with `a2·a3 = 1`.
    pub fn validate(&self) -> Result<()> {
        if let TwoDimForm::E5(a2, a3) = self {
            if (F::one() - a2.clone() * a3.clone()).negligible(1e-12) {
                return Err(Error::InvalidParameters("E5 needs 1 - a2*a3 != 0".into()));
            }
        }
        Ok(())
    }

    pub fn params(&self) -> Vec<F> {
        match self {
            TwoDimForm::E5(a2, a3) => vec![a2.clone(), a3.clone()],
            TwoDimForm::E6(a4) => vec![a4.clone()],
            _ => Vec::new(),
        }
    }

    pub fn structure(&self) -> Matrix<F> {
        let (o, z) = (F::one, F::zero);
        let rows = match self {
            TwoDimForm::Abelian => [[z(), z()], [z(), z()]],
            TwoDimForm::E1 => [[o(), z()], [z(), z()]],
            TwoDimForm::E2 => [[o(), z()], [o(), z()]],
            TwoDimForm::E3 => [[o(), o()], [-o(), -o()]],
            TwoDimForm::E4 => [[z(), o()], [z(), z()]],
            TwoDimForm::E5(a2, a3) => [[o(), a2.clone()], [a3.clone(), o()]],
            TwoDimForm::E6(a4) => [[z(), o()], [o(), a4.clone()]],
        };
        Matrix::from_rows(rows.into_iter().map(|r| r.to_vec()).collect()).expect("2x2")
    }
}

impl<F: Field> fmt::Display for TwoDimForm<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TwoDimForm::E5(a2, a3) => write!(f, "E5({}, {})", format_field(a2), format_field(a3)),
            TwoDimForm::E6(a4) => write!(f, "E6({})", format_field(a4)),
            other => f.write_str(other.name()),
        }
    }
}

pub type ClassLabel2D = TwoDimForm<ComplexF>;

impl ClassLabel2D {
    /// Same variant and parameters within `tol`.
    pub fn matches(&self, other: &ClassLabel2D, tol: f64) -> bool {
        self.name() == other.name()
            && self
                .params()
                .iter()
                .zip(other.params())
                .all(|(a, b)| (a - b).norm() <= tol * a.norm().max(1.0))
    }
}

/// What separates the four forms with `dim E² = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RankOneInvariants {
    pub has_idempotent: bool,
    pub annihilator_dim: usize,
    /// `E·E² ≠ 0`.
    pub acts_on_square: bool,
}

impl RankOneInvariants {
    pub fn form(&self) -> TwoDimForm<ComplexF> {
        match (self.has_idempotent, self.annihilator_dim, self.acts_on_square) {
            (true, 1, _) => TwoDimForm::E1,
            (true, _, _) => TwoDimForm::E2,
            (false, _, true) => TwoDimForm::E3,
            (false, _, false) => TwoDimForm::E4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification2D {
    pub label: ClassLabel2D,
    /// New basis in which the input has the canonical table of `label`.
    pub witness: ChangeOfBasis<ComplexF>,
    pub residual: f64,
    pub invariants: Option<RankOneInvariants>,
}

/// `A = t uᵀ` for a rank-one structure matrix, `u` being its largest row.
struct RankOne {
    t: [ComplexF; 2],
    u: [ComplexF; 2],
    /// `u² = κ u`.
    kappa: ComplexF,
    zero_row: Option<usize>,
    /// Some `i` with `u_i t_i ≠ 0`.
    active: Option<usize>,
}

fn rank_one(a: &Matrix<ComplexF>) -> RankOne {
    let norm = |i: usize| a[(i, 0)].norm().max(a[(i, 1)].norm());
    let top = if norm(0) >= norm(1) { 0 } else { 1 };
    let u = [a[(top, 0)], a[(top, 1)]];
    let k = if u[0].norm() >= u[1].norm() { 0 } else { 1 };
    let t = [a[(0, k)] / u[k], a[(1, k)] / u[k]];
    let kappa = u[0] * u[0] * t[0] + u[1] * u[1] * t[1];
    let kappa_scale = u[0].norm_sqr() * t[0].norm() + u[1].norm_sqr() * t[1].norm();
    let tmax = t[0].norm().max(t[1].norm());
    let umax = u[0].norm().max(u[1].norm());
    let zero_row = (0..2).find(|&i| t[i].norm() <= DEFAULT_TOL * tmax);
    let active = (0..2).find(|&i| (u[i] * t[i]).norm() > DEFAULT_TOL * tmax * umax);
    RankOne {
        t,
        u,
        kappa: if kappa.norm() <= DEFAULT_TOL * kappa_scale { ComplexF::zero() } else { kappa },
        zero_row,
        active,
    }
}

impl RankOne {
    fn invariants(&self) -> RankOneInvariants {
        RankOneInvariants {
            has_idempotent: !self.kappa.is_zero(),
            annihilator_dim: usize::from(self.zero_row.is_some()),
            acts_on_square: self.active.is_some(),
        }
    }

    fn basis(&self) -> [[ComplexF; 2]; 2] {
        let (t, u, kappa) = (self.t, self.u, self.kappa);
        let one = ComplexF::new(1.0, 0.0);
        let unit = |i: usize, s: ComplexF| if i == 0 { [s, ComplexF::zero()] } else { [ComplexF::zero(), s] };
        let scaled = |s: ComplexF| [u[0] * s, u[1] * s];
        match self.invariants().form() {
            TwoDimForm::E1 => [scaled(one / kappa), unit(self.zero_row.expect("zero row"), one)],
            TwoDimForm::E2 => {
                let lambda = one / (kappa * (t[0] * t[1]).sqrt());
                [scaled(one / kappa), [u[1] * t[1] * lambda, -u[0] * t[0] * lambda]]
            }
            TwoDimForm::E3 => {
                let i = self.active.expect("active index");
                let f1 = unit(i, one / (u[i] * t[i]));
                let c = one / (u[i] * u[i] * t[i]);
                [f1, [u[0] * c - f1[0], u[1] * c - f1[1]]]
            }
            _ => {
                let i = if t[0].norm() >= t[1].norm() { 0 } else { 1 };
                [unit(i, one), scaled(t[i])]
            }
        }
    }
}

/// Argument in `[0, 2π)`, with values just below `2π` snapped to 0.
fn arg_key(z: ComplexF) -> f64 {
    let mut a = z.arg();
    if a < 0.0 {
        a += 2.0 * PI;
    }
    if a > 2.0 * PI - 1e-9 {
        a = 0.0;
    }
    a
}

/// `x ≤ y` ordering complex numbers by modulus, then argument.
fn complex_le(x: ComplexF, y: ComplexF) -> bool {
    let (mx, my) = (x.norm(), y.norm());
    if (mx - my).abs() > 1e-9 * mx.max(my).max(1.0) {
        return mx < my;
    }
    arg_key(x) <= arg_key(y) + 1e-9
}

fn cb(rows: [[ComplexF; 2]; 2]) -> Result<ChangeOfBasis<ComplexF>> {
    let m = Matrix::from_rows(rows.iter().map(|r| r.to_vec()).collect())?;
    ChangeOfBasis::new(m, DEFAULT_TOL)
}

/// Canonical form of a two-dimensional algebra over `ℂ`, with the change of
/// basis that realizes it. Rank and zero tests run in the input field, so
/// rational inputs are decided exactly.
pub fn classify_2d<F: Field>(e: &EvolutionAlgebra<F>) -> Result<Classification2D> {
    if e.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: e.dim(),
        });
    }
    let exact = e.structure();
    let scale = exact.max_abs().max(f64::MIN_POSITIVE);
    let vanishes = |i: usize, k: usize| exact[(i, k)].negligible(DEFAULT_TOL * scale);
    let complex = e.to_complex();
    let a = complex.structure();
    let one = ComplexF::new(1.0, 0.0);
    let zero = ComplexF::zero();
    let mut invariants = None;
    let (label, rows) = match e.square_dim(DEFAULT_TOL) {
        0 => (TwoDimForm::Abelian, [[one, zero], [zero, one]]),
        1 => {
            let r = rank_one(a);
            let inv = r.invariants();
            invariants = Some(inv);
            (inv.form(), r.basis())
        }
        _ if !vanishes(0, 0) && !vanishes(1, 1) => {
            let (p, q, r, s) = (a[(0, 0)], a[(0, 1)], a[(1, 0)], a[(1, 1)]);
            let (a2, a3) = (q * s / (p * p), r * p / (s * s));
            let (lambda, mu) = (one / p, one / s);
            if complex_le(a2, a3) {
                (TwoDimForm::E5(a2, a3), [[lambda, zero], [zero, mu]])
            } else {
                (TwoDimForm::E5(a3, a2), [[zero, mu], [lambda, zero]])
            }
        }
        _ => {
            // the zero diagonal entry goes first
            let z = if vanishes(0, 0) { 0 } else { 1 };
            let o = 1 - z;
            let (q, r, s) = (a[(z, o)], a[(o, z)], a[(o, o)]);
            let base = (one / (q * q * r)).root(3).expect("complex roots exist");
            let best = (0..3)
                .map(|k| {
                    let lambda = base * ComplexF::from_polar(1.0, 2.0 * PI * k as f64 / 3.0);
                    let mu = lambda * lambda * q;
                    (lambda, mu, mu * s)
                })
                .min_by(|x, y| arg_key(x.2).partial_cmp(&arg_key(y.2)).expect("finite"))
                .expect("three candidates");
            let (lambda, mu, a4) = best;
            let a4 = if a4.norm() <= DEFAULT_TOL * scale { zero } else { a4 };
            let mut rows = [[zero; 2]; 2];
            rows[0][z] = lambda;
            rows[1][o] = mu;
            (TwoDimForm::E6(a4), rows)
        }
    };
    let witness = cb(rows)?;
    let residual = isomorphism_residual(&complex, &witness, &label.structure())?;
    Ok(Classification2D {
        label,
        witness,
        residual,
        invariants,
    })
}

/// Isomorphism between two algebras read off their classifications:
/// `source` in the returned basis has the table of `target`.
pub fn isomorphism_2d<F: Field>(source: &EvolutionAlgebra<F>, target: &EvolutionAlgebra<F>) -> Result<Option<ChangeOfBasis<ComplexF>>> {
    let (s, t) = (classify_2d(source)?, classify_2d(target)?);
    if !s.label.matches(&t.label, WITNESS_TOL) {
        return Ok(None);
    }
    Ok(Some(s.witness.then(&t.witness.inverted())))
}

fn oracle_residual(a: &Matrix<ComplexF>, b: &Matrix<ComplexF>, w: &[ComplexF; 4]) -> [ComplexF; 6] {
    let mut r = [ComplexF::zero(); 6];
    for (slot, (i, j)) in [(0, 0), (0, 1), (1, 1)].into_iter().enumerate() {
        for c in 0..2 {
            let mut v = (0..2).map(|k| w[2 * i + k] * w[2 * j + k] * a[(k, c)]).sum::<ComplexF>();
            if i == j {
                v -= (0..2).map(|m| b[(i, m)] * w[2 * m + c]).sum::<ComplexF>();
            }
            r[2 * slot + c] = v;
        }
    }
    r
}

fn oracle_jacobian(a: &Matrix<ComplexF>, b: &Matrix<ComplexF>, w: &[ComplexF; 4]) -> Matrix<ComplexF> {
    let mut jac = Matrix::zeros(6, 4);
    for (slot, (i, j)) in [(0, 0), (0, 1), (1, 1)].into_iter().enumerate() {
        for c in 0..2 {
            for p in 0..2 {
                for k in 0..2 {
                    let mut d = ComplexF::zero();
                    if p == i {
                        d += w[2 * j + k] * a[(k, c)];
                    }
                    if p == j {
                        d += w[2 * i + k] * a[(k, c)];
                    }
                    if i == j && k == c {
                        d -= b[(i, p)];
                    }
                    jac[(2 * slot + c, 2 * p + k)] = d;
                }
            }
        }
    }
    jac
}

fn norm2(r: &[ComplexF]) -> f64 {
    r.iter().map(ComplexF::norm_sqr).sum()
}

/// Levenberg-Marquardt on the six product equations from one start.
fn oracle_descent(a: &Matrix<ComplexF>, b: &Matrix<ComplexF>, mut w: [ComplexF; 4]) -> [ComplexF; 4] {
    let mut r = oracle_residual(a, b, &w);
    let mut damping = 1e-3;
    for _ in 0..200 {
        let err = norm2(&r);
        if err < 1e-28 {
            break;
        }
        let jac = oracle_jacobian(a, b, &w);
        let jh = jac.transpose().map(|z| z.conj());
        let normal = &jh * &jac;
        let rhs = jh.transpose().left_apply(&r);
        let mut accepted = false;
        for _ in 0..12 {
            let damped = normal.add(&Matrix::identity(4).scale(&ComplexF::new(damping, 0.0)));
            let Ok(inv) = linalg::invert(&damped, 1e-14) else {
                damping *= 10.0;
                continue;
            };
            let step = inv.transpose().left_apply(&rhs);
            let trial: [ComplexF; 4] = core::array::from_fn(|k| w[k] - step[k]);
            let tr = oracle_residual(a, b, &trial);
            if norm2(&tr) < err {
                w = trial;
                r = tr;
                damping = (damping / 3.0).max(1e-15);
                accepted = true;
                break;
            }
            damping *= 4.0;
        }
        if !accepted {
            break;
        }
    }
    w
}

/// Searches for any invertible `W`, evolution basis or not, carrying `e` to
/// `f`. Each restart draws its start from its own seeded stream, so the
/// answer does not depend on evaluation order. `None` is evidence, not
/// proof, of non-isomorphism.
pub fn oracle_iso_2d<F: Field>(e: &EvolutionAlgebra<F>, f: &EvolutionAlgebra<F>, attempts: usize, seed: u64) -> Result<Option<ChangeOfBasis<ComplexF>>> {
    for alg in [e, f] {
        if alg.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: alg.dim(),
            });
        }
    }
    let (ec, fc) = (e.to_complex(), f.to_complex());
    let (a, b) = (ec.structure(), fc.structure());
    for attempt in 0..attempts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (attempt as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let start = core::array::from_fn(|_| ComplexF::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)));
        let w = oracle_descent(a, b, start);
        if w.iter().any(|z| !z.is_finite()) {
            continue;
        }
        let det = w[0] * w[3] - w[1] * w[2];
        let size = w.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if det.norm() <= 1e-6 * size * size {
            continue;
        }
        let Ok(witness) = cb([[w[0], w[1]], [w[2], w[3]]]) else {
            continue;
        };
        // near-singular W admits spurious approximate solutions, so the
        // residual is weighted by the condition number
        let cond = witness.basis().max_abs() * witness.inverse().max_abs() * 2.0;
        if isomorphism_residual(&ec, &witness, b)? * cond.max(1.0) < WITNESS_TOL {
            return Ok(Some(witness));
        }
    }
    Ok(None)
}
