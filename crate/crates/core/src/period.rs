//! Plenary-power recurrence and infinite periods, with the three-dimensional
//! family `e_1e_1 = a_2e_2 + a_3e_3`, `e_2e_2 = b_1e_1 + b_3e_3`,
//! `e_3e_3 = c_1e_1 + c_2e_2`.

use alloc::vec::Vec;
use core::fmt;

use crate::algebra::{ChangeOfBasis, Element, EvolutionAlgebra};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Field;

pub const DEFAULT_DEPTH: usize = 12;
pub const DEFAULT_BITCAP: u64 = 1_000_000;

/// Occurrences of `e_j` in its own plenary powers up to a depth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodReport {
    pub generator: usize,
    pub depth: usize,
    /// `m ∈ [2, depth]` with a nonzero `e_j` coefficient in `e_j^[m]`.
    pub recurrence_set: Vec<usize>,
    pub infinite_up_to_depth: bool,
    /// Set when the bit-size cap stopped the iteration; holds the last
    /// depth actually examined.
    pub truncated_at: Option<usize>,
}

fn total_bits<F: Field>(x: &Element<F>) -> u64 {
    x.coords().iter().map(Field::bit_size).sum()
}

/// `j` is 0-based. Rational coefficients are tested exactly; complex ones
/// against `1e-12` times the largest coordinate of the same power.
pub fn recurrence_report<F: Field>(e: &EvolutionAlgebra<F>, j: usize, depth: usize, bitcap: u64) -> Result<PeriodReport> {
    if depth < 2 {
        return Err(Error::PreconditionFailed("depth must be at least 2".into()));
    }
    let n = e.dim();
    if j >= n {
        return Err(Error::InvalidParameters(alloc::format!("generator {} out of range 1..={n}", j + 1)));
    }
    let mut x = Element::basis(n, j);
    let mut recurrence_set = Vec::new();
    let mut truncated_at = None;
    for m in 2..=depth {
        x = e.square(&x)?;
        let scale = x.max_abs();
        if !scale.is_finite() || total_bits(&x) > bitcap {
            truncated_at = Some(m - 1);
            break;
        }
        if !x.coords()[j].negligible(1e-12 * scale) {
            recurrence_set.push(m);
        }
        if x.is_zero() {
            break;
        }
    }
    Ok(PeriodReport {
        generator: j,
        depth,
        infinite_up_to_depth: recurrence_set.is_empty(),
        recurrence_set,
        truncated_at,
    })
}

/// The nine structural constants of a three-dimensional algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeDimCoefficients<F> {
    pub a1: F,
    pub a2: F,
    pub a3: F,
    pub b1: F,
    pub b2: F,
    pub b3: F,
    pub c1: F,
    pub c2: F,
    pub c3: F,
}

impl<F: Field> ThreeDimCoefficients<F> {
    pub fn from_algebra(e: &EvolutionAlgebra<F>) -> Result<Self> {
        if e.dim() != 3 {
            return Err(Error::DimensionMismatch {
                expected: 3,
                found: e.dim(),
            });
        }
        let a = |i, k| e.constant(i, k).clone();
        Ok(ThreeDimCoefficients {
            a1: a(0, 0),
            a2: a(0, 1),
            a3: a(0, 2),
            b1: a(1, 0),
            b2: a(1, 1),
            b3: a(1, 2),
            c1: a(2, 0),
            c2: a(2, 1),
            c3: a(2, 2),
        })
    }

    /// Zero diagonal with the given `(a2, a3, b1, b3, c1, c2)`.
    pub fn off_diagonal(a2: F, a3: F, b1: F, b3: F, c1: F, c2: F) -> Self {
        ThreeDimCoefficients {
            a1: F::zero(),
            a2,
            a3,
            b1,
            b2: F::zero(),
            b3,
            c1,
            c2,
            c3: F::zero(),
        }
    }

    pub fn algebra(&self) -> EvolutionAlgebra<F> {
        let rows = alloc::vec![
            alloc::vec![self.a1.clone(), self.a2.clone(), self.a3.clone()],
            alloc::vec![self.b1.clone(), self.b2.clone(), self.b3.clone()],
            alloc::vec![self.c1.clone(), self.c2.clone(), self.c3.clone()],
        ];
        EvolutionAlgebra::from_rows(rows).expect("3x3")
    }

    fn require_zero_diagonal(&self) -> Result<()> {
        if [&self.a1, &self.b2, &self.c3].iter().all(|x| x.is_zero()) {
            Ok(())
        } else {
            Err(Error::DiagonalNotZero)
        }
    }

    fn off_diagonal_values(&self) -> [&F; 6] {
        [&self.a2, &self.a3, &self.b1, &self.b3, &self.c1, &self.c2]
    }

    fn all_off_diagonal_nonzero(&self) -> bool {
        self.off_diagonal_values().iter().all(|x| !x.is_zero())
    }
}

/// Three polynomial identities with their residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub holds: [bool; 3],
    pub residuals: [f64; 3],
}

impl IdentityCheck {
    pub fn all(&self) -> bool {
        self.holds.iter().all(|&h| h)
    }

    fn from_values<F: Field>(values: [F; 3]) -> Self {
        let residuals = values.clone().map(|v| v.magnitude());
        let holds = values.map(|v| v.negligible(1e-10));
        IdentityCheck { holds, residuals }
    }
}

fn sq<F: Field>(x: &F) -> F {
    x.clone() * x.clone()
}

fn pw<F: Field>(x: &F, e: u32) -> F {
    x.powi(e)
}

/// The `e_i` coefficient of `e_i^[3]` vanishes for each `i`:
/// `a2²b1 + a3²c1`, `b1²a2 + b3²c2`, `c1²a3 + c2²b3`.
pub fn check_third_power<F: Field>(c: &ThreeDimCoefficients<F>) -> Result<IdentityCheck> {
    c.require_zero_diagonal()?;
    let ThreeDimCoefficients { a2, a3, b1, b3, c1, c2, .. } = c;
    Ok(IdentityCheck::from_values([
        sq(a2) * b1.clone() + sq(a3) * c1.clone(),
        sq(b1) * a2.clone() + sq(b3) * c2.clone(),
        sq(c1) * a3.clone() + sq(c2) * b3.clone(),
    ]))
}

/// The `e_i` coefficient of `e_i^[4]` vanishes for each `i`.
pub fn check_fourth_power<F: Field>(c: &ThreeDimCoefficients<F>) -> Result<IdentityCheck> {
    c.require_zero_diagonal()?;
    let ThreeDimCoefficients { a2, a3, b1, b3, c1, c2, .. } = c;
    Ok(IdentityCheck::from_values([
        pw(a3, 4) * sq(c2) * b1.clone() + pw(a2, 4) * sq(b3) * c1.clone(),
        pw(b3, 4) * sq(c1) * a2.clone() + pw(b1, 4) * sq(a3) * c2.clone(),
        pw(c2, 4) * sq(b1) * a3.clone() + pw(c1, 4) * sq(a2) * b3.clone(),
    ]))
}

/// `b3²c1³ + b1³c2²`, `a3²c2³ + a2³c1²`, `a2²b3³ + a3³b1²`.
pub fn check_derived_identities<F: Field>(c: &ThreeDimCoefficients<F>) -> Result<IdentityCheck> {
    c.require_zero_diagonal()?;
    let ThreeDimCoefficients { a2, a3, b1, b3, c1, c2, .. } = c;
    Ok(IdentityCheck::from_values([
        sq(b3) * pw(c1, 3) + pw(b1, 3) * sq(c2),
        sq(a3) * pw(c2, 3) + pw(a2, 3) * sq(c1),
        sq(a2) * pw(b3, 3) + pw(a3, 3) * sq(b1),
    ]))
}

/// `e_1e_1 = a2 e_2 + a3 e_3`, `e_2e_2 = b3 e_3`, `e_3e_3 = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct UpperForm<F> {
    pub a2: F,
    pub a3: F,
    pub b3: F,
}

impl<F: Field> UpperForm<F> {
    pub fn coefficients(&self) -> ThreeDimCoefficients<F> {
        ThreeDimCoefficients::off_diagonal(self.a2.clone(), self.a3.clone(), F::zero(), self.b3.clone(), F::zero(), F::zero())
    }
}

/// Reduces a zero-diagonal algebra with a vanishing off-diagonal constant
/// (and both power identities holding) to the strictly upper triangular
/// form by relabeling the basis.
pub fn classify_3d_zero_case<F: Field>(c: &ThreeDimCoefficients<F>) -> Result<(UpperForm<F>, ChangeOfBasis<F>)> {
    if !check_third_power(c)?.all() {
        return Err(Error::PreconditionFailed("e_i^[3] has a nonzero e_i component".into()));
    }
    if !check_fourth_power(c)?.all() {
        return Err(Error::PreconditionFailed("e_i^[4] has a nonzero e_i component".into()));
    }
    if c.all_off_diagonal_nonzero() {
        return Err(Error::PreconditionFailed("no off-diagonal structural constant vanishes".into()));
    }
    let e = c.algebra();
    // move the first vanishing constant (b1, then row by row) into the b1 slot
    let order = [(1, 0), (0, 1), (0, 2), (1, 2), (2, 0), (2, 1)];
    let (i, j) = order
        .into_iter()
        .find(|&(i, j)| e.constant(i, j).is_zero())
        .expect("some constant vanishes");
    let first = ChangeOfBasis::relabel(&[j, i, 3 - i - j]);
    let (e1, _) = e.apply_change_of_basis(&first)?;
    let k = ThreeDimCoefficients::from_algebra(&e1)?;
    let second = match (k.a3.is_zero(), k.b3.is_zero(), k.a2.is_zero()) {
        (true, true, _) => ChangeOfBasis::relabel(&[2, 0, 1]),
        (true, false, false) => ChangeOfBasis::identity(3),
        (true, false, true) => ChangeOfBasis::relabel(&[1, 2, 0]),
        (false, false, _) => ChangeOfBasis::identity(3),
        (false, true, _) => ChangeOfBasis::relabel(&[0, 2, 1]),
    };
    let witness = first.then(&second);
    let (target, residual) = e.apply_change_of_basis(&witness)?;
    let t = ThreeDimCoefficients::from_algebra(&target)?;
    let upper = [&t.a1, &t.b1, &t.b2, &t.c1, &t.c2, &t.c3].iter().all(|x| x.is_zero());
    if residual != 0.0 || !upper {
        return Err(Error::PreconditionFailed("relabeling did not reach the upper triangular form".into()));
    }
    Ok((
        UpperForm {
            a2: t.a2,
            a3: t.a3,
            b3: t.b3,
        },
        witness,
    ))
}

/// Coefficients of `e_1^[k]`, `e_2^[k]`, `e_3^[k]` in the two other basis
/// vectors, together with the checks made at step `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceState<F> {
    pub k: usize,
    /// `(A_{k,2}, A_{k,3})`
    pub a: (F, F),
    /// `(B_{k,1}, B_{k,3})`
    pub b: (F, F),
    /// `(C_{k,1}, C_{k,2})`
    pub c: (F, F),
    /// `A_{k-1,2}²b1 + A_{k-1,3}²c1 = 0` and its two analogues (vacuous at `k = 2`).
    pub side_conditions: [bool; 3],
    /// The state reproduces `e_j^[k]` computed by repeated squaring.
    pub matches_plenary: bool,
}

impl<F: Field> RecurrenceState<F> {
    pub fn passes(&self) -> bool {
        self.matches_plenary && self.side_conditions.iter().all(|&s| s)
    }

    fn vectors(&self) -> [[F; 3]; 3] {
        let z = F::zero;
        [
            [z(), self.a.0.clone(), self.a.1.clone()],
            [self.b.0.clone(), z(), self.b.1.clone()],
            [self.c.0.clone(), self.c.1.clone(), z()],
        ]
    }
}

/// `x + y = 0` exactly, or within `1e-9` of `|x| + |y|`.
fn cancels<F: Field>(x: F, y: F) -> bool {
    let scale = x.magnitude() + y.magnitude();
    (x + y).negligible(1e-9 * scale)
}

fn close<F: Field>(x: &[F], y: &[F]) -> bool {
    let scale = x.iter().chain(y).map(Field::magnitude).fold(0.0, f64::max);
    x.iter().zip(y).all(|(p, q)| (p.clone() - q.clone()).negligible(1e-9 * scale))
}

/// Runs the coefficient recurrence `A_{k,2} = A_{k-1,3}² c2`, `A_{k,3} =
/// A_{k-1,2}² b3` (and its analogues for `B`, `C`) from step 2 to `depth`,
/// checking each step against the plenary powers.
pub fn verify_recurrences<F: Field>(c: &ThreeDimCoefficients<F>, depth: usize, bitcap: u64) -> Result<Vec<RecurrenceState<F>>> {
    c.require_zero_diagonal()?;
    if !c.all_off_diagonal_nonzero() {
        return Err(Error::PreconditionFailed("every off-diagonal structural constant must be nonzero".into()));
    }
    if depth < 2 {
        return Err(Error::PreconditionFailed("depth must be at least 2".into()));
    }
    let ThreeDimCoefficients { a2, a3, b1, b3, c1, c2, .. } = c;
    let e = c.algebra();
    let mut powers: Vec<Element<F>> = (0..3).map(|j| e.square(&Element::basis(3, j)).expect("dim 3")).collect();
    let mut state = RecurrenceState {
        k: 2,
        a: (a2.clone(), a3.clone()),
        b: (b1.clone(), b3.clone()),
        c: (c1.clone(), c2.clone()),
        side_conditions: [true; 3],
        matches_plenary: true,
    };
    let check = |s: &mut RecurrenceState<F>, powers: &[Element<F>]| {
        s.matches_plenary = s.vectors().iter().zip(powers).all(|(v, p)| close(v, p.coords()));
    };
    check(&mut state, &powers);
    let mut states = alloc::vec![state];
    for k in 3..=depth {
        let prev = states.last().expect("nonempty");
        let (pa, pb, pc) = (&prev.a, &prev.b, &prev.c);
        let side_conditions = [
            cancels(sq(&pa.0) * b1.clone(), sq(&pa.1) * c1.clone()),
            cancels(sq(&pb.0) * a2.clone(), sq(&pb.1) * c2.clone()),
            cancels(sq(&pc.0) * a3.clone(), sq(&pc.1) * b3.clone()),
        ];
        let mut next = RecurrenceState {
            k,
            a: (sq(&pa.1) * c2.clone(), sq(&pa.0) * b3.clone()),
            b: (sq(&pb.1) * c1.clone(), sq(&pb.0) * a3.clone()),
            c: (sq(&pc.1) * b1.clone(), sq(&pc.0) * a2.clone()),
            side_conditions,
            matches_plenary: false,
        };
        for p in powers.iter_mut() {
            *p = e.square(p)?;
        }
        check(&mut next, &powers);
        let bits: u64 = powers.iter().map(total_bits).sum();
        let finite = powers.iter().all(|p| p.max_abs().is_finite());
        states.push(next);
        if bits > bitcap || !finite {
            break;
        }
    }
    Ok(states)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeriodVerdict {
    /// Identities hold and no generator recurs.
    AgreeInfinite,
    /// Identities fail and some generator recurs.
    AgreeFinite,
    /// Identities fail yet nothing recurs within the depth.
    InconclusiveDepth,
    /// Identities hold but a generator recurs: contradicts the criterion.
    Critical,
}

impl fmt::Display for PeriodVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PeriodVerdict::AgreeInfinite => "agree (infinite)",
            PeriodVerdict::AgreeFinite => "agree (finite)",
            PeriodVerdict::InconclusiveDepth => "inconclusive at this depth",
            PeriodVerdict::Critical => "CRITICAL: identities hold but a generator recurs",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodCriterionReport {
    pub identities: IdentityCheck,
    pub reports: Vec<PeriodReport>,
    pub verdict: PeriodVerdict,
}

/// With every off-diagonal constant nonzero, all three generators have
/// infinite period exactly when the third-power identities hold. Both sides
/// are evaluated at the given depth.
pub fn period_criterion_test<F: Field>(c: &ThreeDimCoefficients<F>, depth: usize, bitcap: u64) -> Result<PeriodCriterionReport> {
    c.require_zero_diagonal()?;
    if !c.all_off_diagonal_nonzero() {
        return Err(Error::PreconditionFailed("every off-diagonal structural constant must be nonzero".into()));
    }
    let identities = check_third_power(c)?;
    let e = c.algebra();
    let reports = (0..3)
        .map(|j| recurrence_report(&e, j, depth, bitcap))
        .collect::<Result<Vec<_>>>()?;
    let infinite = reports.iter().all(|r| r.infinite_up_to_depth);
    let verdict = match (identities.all(), infinite) {
        (true, true) => PeriodVerdict::AgreeInfinite,
        (false, false) => PeriodVerdict::AgreeFinite,
        (false, true) => PeriodVerdict::InconclusiveDepth,
        (true, false) => PeriodVerdict::Critical,
    };
    Ok(PeriodCriterionReport {
        identities,
        reports,
        verdict,
    })
}

/// The structure matrix of `c` as a plain matrix.
pub fn coefficient_matrix<F: Field>(c: &ThreeDimCoefficients<F>) -> Matrix<F> {
    c.algebra().structure().clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permutation::Permutation;
    use crate::scalar::{ComplexF, Rational};
    use alloc::vec;
    use proptest::prelude::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn alg(rows: &[&[i64]]) -> EvolutionAlgebra<Rational> {
        EvolutionAlgebra::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()).unwrap()
    }

    fn six(v: [i64; 6]) -> ThreeDimCoefficients<Rational> {
        let [a2, a3, b1, b3, c1, c2] = v.map(q);
        ThreeDimCoefficients::off_diagonal(a2, a3, b1, b3, c1, c2)
    }

    fn w0() -> ThreeDimCoefficients<Rational> {
        six([-1, -1, 1, 1, -1, 1])
    }

    #[test]
    fn recurrence_examples() {
        let e1 = alg(&[&[1, 0], &[0, 0]]);
        assert_eq!(recurrence_report(&e1, 0, 6, DEFAULT_BITCAP).unwrap().recurrence_set, vec![2, 3, 4, 5, 6]);
        let e4 = alg(&[&[0, 1], &[0, 0]]);
        let r = recurrence_report(&e4, 0, 6, DEFAULT_BITCAP).unwrap();
        assert!(r.recurrence_set.is_empty() && r.infinite_up_to_depth);
        let w = w0().algebra();
        for j in 0..3 {
            let r = recurrence_report(&w, j, 12, DEFAULT_BITCAP).unwrap();
            assert!(r.infinite_up_to_depth, "{r:?}");
            assert_eq!(r.truncated_at, None);
        }
        assert!(recurrence_report(&w, 0, 1, DEFAULT_BITCAP).is_err());
    }

    #[test]
    fn bit_cap_truncates() {
        let e = alg(&[&[3, 1], &[1, 3]]);
        let r = recurrence_report(&e, 0, 40, 10_000).unwrap();
        let t = r.truncated_at.unwrap();
        assert!(t < 40);
        assert_eq!(r.recurrence_set, (2..=t).collect::<Vec<_>>());
    }

    #[test]
    fn third_power_examples() {
        assert!(check_third_power(&w0()).unwrap().all());
        assert!(!check_third_power(&six([1; 6])).unwrap().all());
        assert!(check_third_power(&six([0; 6])).unwrap().all());
        let mut bad = w0();
        bad.b2 = q(1);
        assert_eq!(check_third_power(&bad), Err(Error::DiagonalNotZero));
    }

    #[test]
    fn fourth_power_and_derived_examples() {
        assert!(check_fourth_power(&w0()).unwrap().all());
        assert!(check_derived_identities(&w0()).unwrap().all());
        assert!(check_fourth_power(&six([0; 6])).unwrap().all());
        assert!(check_derived_identities(&six([0; 6])).unwrap().all());
        let random = six([2, 3, 5, 7, 11, 13]);
        assert!(!check_third_power(&random).unwrap().all());
        assert!(!check_derived_identities(&random).unwrap().holds.iter().any(|&h| h));
    }

    #[test]
    fn zero_case_examples() {
        // b1 = a3 = b3 = 0
        let c = six([2, 0, 0, 0, 3, 5]);
        let (form, w) = classify_3d_zero_case(&c).unwrap();
        assert_eq!(form, UpperForm { a2: q(3), a3: q(5), b3: q(2) });
        assert_eq!(w, ChangeOfBasis::relabel(&[2, 0, 1]));

        let c = six([2, 0, 0, 7, 0, 0]);
        let (form, w) = classify_3d_zero_case(&c).unwrap();
        assert_eq!(form, UpperForm { a2: q(2), a3: q(0), b3: q(7) });
        assert_eq!(w, ChangeOfBasis::identity(3));

        let c = six([0, 0, 0, 7, 3, 0]);
        let (form, w) = classify_3d_zero_case(&c).unwrap();
        assert_eq!(form, UpperForm { a2: q(7), a3: q(0), b3: q(3) });
        assert_eq!(w, ChangeOfBasis::relabel(&[1, 2, 0]));

        assert!(matches!(classify_3d_zero_case(&w0()), Err(Error::PreconditionFailed(_))));
        assert!(matches!(classify_3d_zero_case(&six([1, 0, 1, 0, 0, 0])), Err(Error::PreconditionFailed(_))));
    }

    #[test]
    fn recurrence_state_examples() {
        let states = verify_recurrences(&w0(), 8, DEFAULT_BITCAP).unwrap();
        assert_eq!(states.len(), 7);
        assert!(states.iter().all(RecurrenceState::passes));
        for s in &states {
            for v in [&s.a.0, &s.a.1, &s.b.0, &s.b.1, &s.c.0, &s.c.1] {
                assert!(v == &q(1) || v == &q(-1));
            }
        }

        let c = six([2, 3, 5, 7, 11, 13]);
        let states = verify_recurrences(&c, 3, DEFAULT_BITCAP).unwrap();
        assert_eq!(states[1].a, (q(9 * 13), q(4 * 7)));
        assert_eq!(states[1].side_conditions, [false; 3]);
        assert!(!states[1].matches_plenary);
        assert!(states[0].passes());

        assert!(matches!(verify_recurrences(&six([1, 0, 1, 1, 1, 1]), 4, DEFAULT_BITCAP), Err(Error::PreconditionFailed(_))));
    }

    #[test]
    fn criterion_examples() {
        let r = period_criterion_test(&w0(), 12, DEFAULT_BITCAP).unwrap();
        assert_eq!(r.verdict, PeriodVerdict::AgreeInfinite);
        let r = period_criterion_test(&six([1; 6]), 4, DEFAULT_BITCAP).unwrap();
        assert_eq!(r.verdict, PeriodVerdict::AgreeFinite);
        assert_eq!(r.reports[0].recurrence_set.first(), Some(&3));
        // b1 = b3 = 1, c1 = c2 = -1, a2 = -b3²c2/b1², a3 = -c2²b3/c1²
        let c = six([1, -1, 1, 1, -1, -1]);
        assert!(check_third_power(&c).unwrap().all());
        assert_eq!(period_criterion_test(&c, 12, DEFAULT_BITCAP).unwrap().verdict, PeriodVerdict::AgreeInfinite);
    }

    /// Solutions of the third-power identities: `c1 = -b1 v²`, `c2 = ±b3 v³`,
    /// then `a2 = -b3²c2/b1²`, `a3 = -c2²b3/c1²`.
    fn sampled_solution(b1: i64, b3: i64, v: (i64, i64), sign: bool) -> ThreeDimCoefficients<Rational> {
        let (b1, b3) = (q(b1), q(b3));
        let v = Rational::new(v.0.into(), v.1.into());
        let c1 = -b1.clone() * &v * &v;
        let c2 = b3.clone() * &v * &v * &v * q(if sign { 1 } else { -1 });
        let a2 = -(&b3 * &b3 * &c2) / (&b1 * &b1);
        let a3 = -(&c2 * &c2 * &b3) / (&c1 * &c1);
        ThreeDimCoefficients::off_diagonal(a2, a3, b1, b3, c1, c2)
    }

    fn nonzero() -> impl Strategy<Value = i64> {
        prop_oneof![-5i64..=-1, 1i64..=5]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn sampled_solutions_satisfy_everything(b1 in nonzero(), b3 in nonzero(), vn in nonzero(), vd in 1i64..=3, sign in any::<bool>()) {
            let c = sampled_solution(b1, b3, (vn, vd), sign);
            prop_assert!(check_third_power(&c).unwrap().all());
            prop_assert!(check_fourth_power(&c).unwrap().all());
            prop_assert!(check_derived_identities(&c).unwrap().all());
            let states = verify_recurrences(&c, 7, DEFAULT_BITCAP).unwrap();
            prop_assert!(states.iter().all(RecurrenceState::passes));
            let r = period_criterion_test(&c, 8, DEFAULT_BITCAP).unwrap();
            prop_assert_eq!(r.verdict, PeriodVerdict::AgreeInfinite);
        }

        #[test]
        fn states_track_plenary_powers_for_any_coefficients(v in proptest::array::uniform6(nonzero())) {
            let c = six(v);
            let states = verify_recurrences(&c, 6, DEFAULT_BITCAP).unwrap();
            // the recurrence only describes the powers while the identities hold
            prop_assert_eq!(states[1].matches_plenary, check_third_power(&c).unwrap().all());
        }

        #[test]
        fn reports_follow_basis_relabeling(
            (m, perm) in (1usize..=4).prop_flat_map(|n| (
                proptest::collection::vec(-2i64..=2, n * n),
                Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
            ))
        ) {
            let n = perm.len();
            let e = EvolutionAlgebra::new(Matrix::new(n, n, m.into_iter().map(q).collect()).unwrap()).unwrap();
            let g = Permutation::new(perm).unwrap();
            let (relabeled, _) = e.apply_change_of_basis(&ChangeOfBasis::relabel(g.image())).unwrap();
            for j in 0..n {
                // new e'_j is old e_{g(j)}
                let mut a = recurrence_report(&relabeled, j, 8, DEFAULT_BITCAP).unwrap();
                let b = recurrence_report(&e, g.apply(j), 8, DEFAULT_BITCAP).unwrap();
                a.generator = b.generator;
                prop_assert_eq!(a, b);
            }
        }

        #[test]
        fn zero_case_witness_is_exact(a2 in -3i64..=3, b3 in -3i64..=3, a3 in -3i64..=3, pick in 0usize..6) {
            // start from the upper form and scramble it by a relabeling
            let c = six([a2, a3, 0, b3, 0, 0]);
            let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
            let (scrambled, _) = c.algebra().apply_change_of_basis(&ChangeOfBasis::relabel(&perms[pick])).unwrap();
            let s = ThreeDimCoefficients::from_algebra(&scrambled).unwrap();
            let (form, w) = classify_3d_zero_case(&s).unwrap();
            let (image, res) = scrambled.apply_change_of_basis(&w).unwrap();
            prop_assert_eq!(res, 0.0);
            prop_assert_eq!(image, form.coefficients().algebra());
        }
    }

    #[test]
    fn complex_states_compare_after_normalizing() {
        let c = sampled_solution(2, -3, (3, 2), true);
        let cc = ThreeDimCoefficients::from_algebra(&c.algebra().to_complex()).unwrap();
        let states = verify_recurrences::<ComplexF>(&cc, 9, DEFAULT_BITCAP).unwrap();
        assert!(states.iter().all(RecurrenceState::passes));
    }
}
