//! Kempf-Ness function of the `(prod G_i) x G` action on `G^m x G^n`,
//! `(a, b) . (f, g) = (b f_i a_i^{-1}, b g_j b^{-1})`, in the defining
//! representation with the Frobenius norm.
//!
//! A tuple with orbit components `y_i = f_i h_i f_i^{-1}` is represented by
//! the `f_i`; the centralizer `G_i` of `h_i` acts on the right.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix_core::{exp_hermitian, ComplexMatrix, GroupElement, HermitianDirection};
use crate::retraction::{orbit_solve, ParabolicData, RepTuple};

/// Convergence threshold used by [`closed_orbit_probe`].
pub const PROBE_TOL: f64 = 1e-6;
/// Iteration budget used by [`closed_orbit_probe`].
pub const PROBE_MAX_ITER: usize = 10_000;
/// Window length of the stall test.
pub const STALL_WINDOW: usize = 500;
/// Minimal mean relative residual decrease per iteration before a stall.
pub const STALL_RATE: f64 = 1e-3;
/// Determinant drift that triggers renormalization.
pub const DET_RENORM_TOL: f64 = 1e-10;

const ARMIJO_SIGMA: f64 = 1e-4;
const ARMIJO_SHRINK: f64 = 0.5;
const MIN_STEP: f64 = 1e-30;
/// Extra halvings tried after a step size is accepted.
pub const MAX_REFINEMENTS: usize = 8;

/// Point `(f_1, .., f_m; g_1, .., g_n)` of `G^m x G^n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KnPoint {
    pub f: Vec<GroupElement>,
    pub g: Vec<GroupElement>,
}

impl KnPoint {
    pub fn new(f: Vec<GroupElement>, g: Vec<GroupElement>) -> Self {
        Self { f, g }
    }

    /// Lifts orbit components through [`orbit_solve`].
    pub fn from_tuple(tuple: &RepTuple) -> Result<Self> {
        let f = tuple
            .orbit()
            .iter()
            .zip(tuple.pardata().h())
            .map(|(y, h)| orbit_solve(y, h))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            f,
            g: tuple.free().to_vec(),
        })
    }

    /// Orbit components `f_i h_i f_i^{-1}` and the free components.
    pub fn to_tuple(&self, pardata: &std::sync::Arc<ParabolicData>) -> Result<RepTuple> {
        let orbit = self
            .f
            .iter()
            .zip(pardata.h())
            .map(|(f, h)| f.conjugate(&h.as_group()))
            .collect();
        RepTuple::new(std::sync::Arc::clone(pardata), orbit, self.g.clone())
    }

    fn elements(&self) -> impl Iterator<Item = &GroupElement> {
        self.f.iter().chain(&self.g)
    }

    /// Largest `|det - 1|` over all components.
    pub fn det_defect(&self) -> f64 {
        self.elements()
            .map(GroupElement::det_defect)
            .fold(0.0, f64::max)
    }
}

/// Gradient of the Kempf-Ness function at the identity of the acting group.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KNResidual {
    pub xi: HermitianDirection,
    pub etas: Vec<HermitianDirection>,
}

impl KNResidual {
    /// `sqrt(|xi|^2 + sum |eta_i|^2)`.
    pub fn norm(&self) -> f64 {
        (self.xi.norm().powi(2) + self.etas.iter().map(|e| e.norm().powi(2)).sum::<f64>()).sqrt()
    }
}

/// Outcome of a flow run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    Converged,
    MaxIterations,
    NonClosedOrbitSuspected,
}

/// Trace of a flow run. `f_trace[0]` is the starting value, followed by one
/// entry per accepted step.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KNReport {
    #[serde(rename = "F")]
    pub f_trace: Vec<f64>,
    #[serde(rename = "residual")]
    pub residual_norm: f64,
    #[serde(rename = "iters")]
    pub iterations: usize,
    pub status: Status,
}

/// Verdict of [`closed_orbit_probe`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OrbitStatus {
    Closed,
    NotClosed,
    Inconclusive,
}

/// `F = sum |f_i|^2 + sum |g_j|^2` (squared Frobenius norms).
pub fn kn_function(f: &[GroupElement], g: &[GroupElement]) -> f64 {
    f.iter()
        .chain(g)
        .map(|x| x.mat().frobenius_norm_sqr())
        .sum()
}

fn check_shape(point: &KnPoint, pardata: &ParabolicData) -> Result<()> {
    if point.f.len() != pardata.m() {
        return Err(Error::DimensionMismatch(format!(
            "{} orbit factors for {} parabolic factors",
            point.f.len(),
            pardata.m()
        )));
    }
    let n = pardata.n_dim();
    if point.elements().any(|x| x.dim() != n) {
        return Err(Error::DimensionMismatch(format!(
            "components must be {n}x{n}"
        )));
    }
    Ok(())
}

/// Orthogonal projection onto the real span of an orthonormal basis.
fn project(m: &ComplexMatrix, basis: &[ComplexMatrix], n: usize) -> ComplexMatrix {
    basis.iter().fold(ComplexMatrix::zeros(n), |acc, b| {
        acc + b.scale_real(b.inner(m))
    })
}

/// `xi = traceless Hermitian part of (sum f_i f_i^H + sum [g_j, g_j^H])` and
/// `eta_i = projection of f_i^H f_i onto i Lie(K_i)`.
///
/// The derivative of `F` along `(exp(s xi) f_i exp(s eta_i), exp(s xi) g_j
/// exp(-s xi))` at `s = 0` is `2 (|xi|^2 + sum |eta_i|^2)`.
pub fn kn_residual(point: &KnPoint, pardata: &ParabolicData) -> Result<KNResidual> {
    check_shape(point, pardata)?;
    let n = pardata.n_dim();
    let mut acc = ComplexMatrix::zeros(n);
    for f in &point.f {
        acc = acc + *f.mat() * f.mat().adjoint();
    }
    for g in &point.g {
        acc = acc + g.mat().commutator(&g.mat().adjoint());
    }
    let xi = HermitianDirection::project(&acc);
    let etas = point
        .f
        .iter()
        .zip(pardata.hermitian_bases())
        .map(|(f, basis)| {
            let gram = (f.mat().adjoint() * *f.mat()).hermitian_part();
            HermitianDirection::project(&project(&gram, basis, n))
        })
        .collect();
    Ok(KNResidual { xi, etas })
}

/// Moves along the curve `(exp(s xi) f_i exp(s eta_i), exp(s xi) g_j exp(-s xi))`.
pub fn move_along(point: &KnPoint, r: &KNResidual, s: f64) -> KnPoint {
    let left = exp_hermitian(&r.xi.mat().scale_real(s));
    let left_inv = exp_hermitian(&r.xi.mat().scale_real(-s));
    let f = point
        .f
        .iter()
        .zip(&r.etas)
        .map(|(f, eta)| {
            let right = exp_hermitian(&eta.mat().scale_real(s));
            GroupElement::new_unchecked(left * *f.mat() * right)
        })
        .collect();
    let g = point
        .g
        .iter()
        .map(|g| GroupElement::new_unchecked(left * *g.mat() * left_inv))
        .collect();
    KnPoint { f, g }
}

fn renormalize(point: &mut KnPoint) {
    for x in point.f.iter_mut().chain(point.g.iter_mut()) {
        if x.det_defect() > DET_RENORM_TOL {
            *x = GroupElement::normalized(*x.mat());
        }
    }
}

/// True when the residual fell by less than `STALL_RATE` per iteration on
/// average (geometric mean) over the last `STALL_WINDOW` iterations.
fn stalled(history: &[f64]) -> bool {
    let k = history.len();
    if k <= STALL_WINDOW {
        return false;
    }
    let old = history[k - 1 - STALL_WINDOW];
    let new = history[k - 1];
    new >= old * (1.0 - STALL_RATE).powi(STALL_WINDOW as i32)
}

/// Gradient descent with Armijo backtracking: `f_i <- exp(-s xi) f_i
/// exp(-s eta_i)`, `g_j <- exp(-s xi) g_j exp(s xi)`, starting from
/// `s = 1 / (1 + |r|)`. The accepted step is then halved up to
/// [`MAX_REFINEMENTS`] more times while `F` keeps decreasing.
///
/// Stops with `Converged` once the residual norm is at most `tol`, with
/// `NonClosedOrbitSuspected` when the residual stalls or no step decreases
/// `F`, and with `MaxIterations` when the budget runs out.
pub fn kn_flow(
    point: &KnPoint,
    pardata: &ParabolicData,
    tol: f64,
    max_iter: usize,
) -> Result<(KnPoint, KNReport)> {
    let mut x = point.clone();
    let mut value = kn_function(&x.f, &x.g);
    let mut f_trace = vec![value];
    let mut history = Vec::new();
    let mut iterations = 0;
    loop {
        let r = kn_residual(&x, pardata)?;
        let rn = r.norm();
        history.push(rn);
        let finish = |status, f_trace| KNReport {
            f_trace,
            residual_norm: rn,
            iterations,
            status,
        };
        if rn <= tol {
            return Ok((x, finish(Status::Converged, f_trace)));
        }
        if stalled(&history) {
            return Ok((x, finish(Status::NonClosedOrbitSuspected, f_trace)));
        }
        if iterations >= max_iter {
            return Ok((x, finish(Status::MaxIterations, f_trace)));
        }
        let slope = 2.0 * rn * rn;
        let mut s = 1.0 / (1.0 + rn);
        let trial = |s: f64| {
            let mut cand = move_along(&x, &r, -s);
            renormalize(&mut cand);
            let v = kn_function(&cand.f, &cand.g);
            let ok = v <= value - ARMIJO_SIGMA * s * slope && v < value;
            (cand, v, ok)
        };
        let mut accepted = loop {
            let (cand, v, ok) = trial(s);
            if ok {
                break Some((cand, v));
            }
            s *= ARMIJO_SHRINK;
            if s < MIN_STEP {
                break None;
            }
        };
        if let Some((_, mut best)) = accepted {
            // keep halving while F improves; each such step still satisfies
            // the Armijo condition of the accepted one
            for _ in 0..MAX_REFINEMENTS {
                s *= ARMIJO_SHRINK;
                let (cand, v, _) = trial(s);
                if v >= best {
                    break;
                }
                best = v;
                accepted = Some((cand, v));
            }
        }
        match accepted {
            Some((cand, v)) => {
                x = cand;
                value = v;
                f_trace.push(v);
                iterations += 1;
            }
            None => return Ok((x, finish(Status::NonClosedOrbitSuspected, f_trace))),
        }
    }
}

/// Runs [`kn_flow`] with [`PROBE_TOL`] and [`PROBE_MAX_ITER`].
pub fn closed_orbit_probe(point: &KnPoint, pardata: &ParabolicData) -> Result<OrbitStatus> {
    let (_, report) = kn_flow(point, pardata, PROBE_TOL, PROBE_MAX_ITER)?;
    Ok(match report.status {
        Status::Converged => OrbitStatus::Closed,
        Status::NonClosedOrbitSuspected => OrbitStatus::NotClosed,
        Status::MaxIterations => OrbitStatus::Inconclusive,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use rand::Rng;

    use super::*;
    use crate::matrix_core::{
        random_group_element, random_hermitian_direction, random_unitary, stream_rng,
        UnitaryElement, C64,
    };
    use crate::retraction::random_rep_tuple;

    fn pardata(seed: u64, n_dim: usize, m: usize) -> Arc<ParabolicData> {
        Arc::new(ParabolicData::random_regular(&mut stream_rng(seed, 0), n_dim, m).unwrap())
    }

    fn unitary_point<R: Rng>(rng: &mut R, n_dim: usize, m: usize, n: usize) -> KnPoint {
        let mut draw = |k| {
            (0..k)
                .map(|_| random_unitary(rng, n_dim).as_group())
                .collect()
        };
        let f = draw(m);
        let g = draw(n);
        KnPoint::new(f, g)
    }

    #[test]
    fn function_values() {
        let mut rng = stream_rng(1, 0);
        let p = unitary_point(&mut rng, 2, 1, 1);
        assert!((kn_function(&p.f, &p.g) - 4.0).abs() < 1e-12);
        let d = GroupElement::new(ComplexMatrix::diag_real(&[2.0, 0.5])).unwrap();
        assert!((kn_function(&[d], &[]) - 4.25).abs() < 1e-15);
    }

    #[test]
    fn function_dominates_unitary_part() {
        let mut rng = stream_rng(2, 0);
        for n_dim in [2, 3] {
            for _ in 0..300 {
                let f: Vec<GroupElement> = (0..2)
                    .map(|_| random_group_element(&mut rng, n_dim, 1.0))
                    .collect();
                let g: Vec<GroupElement> = (0..1)
                    .map(|_| random_group_element(&mut rng, n_dim, 1.0))
                    .collect();
                let v = kn_function(&f, &g);
                assert!(v >= 3.0 * n_dim as f64 - 1e-12);
                let unitarize = |x: &GroupElement| crate::retraction::phi(x, 0.0);
                let fu: Vec<_> = f.iter().map(unitarize).collect();
                let gu: Vec<_> = g.iter().map(unitarize).collect();
                assert!(v >= kn_function(&fu, &gu) - 1e-12);
            }
        }
    }

    #[test]
    fn residual_vanishes_on_unitary_points() {
        let mut rng = stream_rng(3, 0);
        for (n_dim, m, n) in [(2, 2, 1), (3, 1, 2)] {
            let pd = pardata(4, n_dim, m);
            for _ in 0..200 {
                let p = unitary_point(&mut rng, n_dim, m, n);
                assert!(kn_residual(&p, &pd).unwrap().norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn residual_rejects_wrong_shape() {
        let pd = pardata(5, 2, 2);
        let p = KnPoint::new(vec![GroupElement::identity(2)], vec![]);
        assert!(matches!(
            kn_residual(&p, &pd),
            Err(Error::DimensionMismatch(_))
        ));
    }

    /// Central difference of `s -> F(curve(s))` at 0.
    fn fd_slope(p: &KnPoint, r: &KNResidual, h: f64) -> f64 {
        let plus = move_along(p, r, h);
        let minus = move_along(p, r, -h);
        (kn_function(&plus.f, &plus.g) - kn_function(&minus.f, &minus.g)) / (2.0 * h)
    }

    #[test]
    fn unipotent_residual_matches_finite_difference() {
        let pd = ParabolicData::new(2, vec![]).unwrap();
        let g = GroupElement::new(ComplexMatrix::from_real(&[&[1.0, 1.0], &[0.0, 1.0]])).unwrap();
        let p = KnPoint::new(vec![], vec![g]);
        let r = kn_residual(&p, &pd).unwrap();
        assert!(r.xi.mat().dist(&ComplexMatrix::diag_real(&[1.0, -1.0])) < 1e-15);
        let expect = 2.0 * r.norm().powi(2);
        assert!((fd_slope(&p, &r, 1e-5) - expect).abs() <= 1e-6 * expect);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = stream_rng(6, 0);
        for (n_dim, m, n) in [(2, 2, 1), (3, 1, 1)] {
            let pd = pardata(7 + n_dim as u64, n_dim, m);
            for _ in 0..50 {
                let tuple = random_rep_tuple(&mut rng, &pd, n, 0.8);
                let p = KnPoint::from_tuple(&tuple).unwrap();
                let r = kn_residual(&p, &pd).unwrap();
                let expect = 2.0 * r.norm().powi(2);
                let got = fd_slope(&p, &r, 1e-5);
                assert!((got - expect).abs() <= 1e-5 * expect, "{got} vs {expect}");
            }
        }
    }

    #[test]
    fn residual_is_linear_near_the_compact_locus() {
        let h = UnitaryElement::diagonal(&[0.6, 0.0]);
        let pd = ParabolicData::new(2, vec![h]).unwrap();
        let mut rng = stream_rng(8, 0);
        let dir = random_hermitian_direction(&mut rng, 2);
        let mut slopes = Vec::new();
        for eps in [1e-3, 1e-4, 1e-5] {
            let f =
                GroupElement::new_unchecked(exp_hermitian(&dir.mat().scale_real(eps)) * *h.mat());
            let r = kn_residual(&KnPoint::new(vec![f], vec![]), &pd).unwrap();
            slopes.push(r.norm() / eps);
        }
        assert!(slopes[0] > 0.1);
        assert!((slopes[0] - slopes[2]).abs() < 1e-2 * slopes[2]);
    }

    #[test]
    fn residual_norm_is_compact_invariant() {
        let mut rng = stream_rng(9, 0);
        let pd = pardata(10, 3, 2);
        for _ in 0..50 {
            let tuple = random_rep_tuple(&mut rng, &pd, 1, 0.8);
            let p = KnPoint::from_tuple(&tuple).unwrap();
            let u = random_unitary(&mut rng, 3);
            let f =
                p.f.iter()
                    .zip(pd.compact_centralizers())
                    .map(|(f, k)| {
                        let a = k.elements().iter().fold(ComplexMatrix::zeros(3), |acc, b| {
                            acc + b.scale_real(rng.random_range(-2.0..2.0))
                        });
                        let ki = crate::matrix_core::exp_i_hermitian(&a.scale(C64::new(0.0, -1.0)));
                        GroupElement::new_unchecked(*u.mat() * *f.mat() * ki)
                    })
                    .collect();
            let g = p.g.iter().map(|g| u.as_group().conjugate(g)).collect();
            let q = KnPoint::new(f, g);
            let a = kn_residual(&p, &pd).unwrap().norm();
            let b = kn_residual(&q, &pd).unwrap().norm();
            assert!((a - b).abs() <= 1e-8 * (1.0 + a));
        }
    }

    #[test]
    fn flow_from_unitary_point_is_immediate() {
        let pd = pardata(11, 2, 1);
        let p = unitary_point(&mut stream_rng(12, 0), 2, 1, 2);
        let (out, rep) = kn_flow(&p, &pd, 1e-8, 100).unwrap();
        assert_eq!(rep.status, Status::Converged);
        assert_eq!(rep.iterations, 0);
        assert_eq!(out, p);
    }

    #[test]
    fn flow_converges_on_conjugated_unitary_pairs() {
        let pd = ParabolicData::new(2, vec![]).unwrap();
        let mut rng = stream_rng(13, 0);
        for _ in 0..10 {
            let g = random_group_element(&mut rng, 2, 1.0);
            let a = g.conjugate(&random_unitary(&mut rng, 2).as_group());
            let b = g.conjugate(&random_unitary(&mut rng, 2).as_group());
            let p = KnPoint::new(vec![], vec![a, b]);
            let (out, rep) = kn_flow(&p, &pd, 1e-6, 10_000).unwrap();
            assert_eq!(rep.status, Status::Converged);
            assert!(rep.residual_norm <= 1e-6);
            assert!(rep.f_trace.windows(2).all(|w| w[1] <= w[0]));
            assert!(out.det_defect() <= 1e-9);
        }
    }

    #[test]
    fn unipotent_flow_is_flagged() {
        let pd = ParabolicData::new(2, vec![]).unwrap();
        let g = GroupElement::new(ComplexMatrix::from_real(&[&[1.0, 1.0], &[0.0, 1.0]])).unwrap();
        let p = KnPoint::new(vec![], vec![g]);
        let (out, rep) = kn_flow(&p, &pd, 1e-6, 10_000).unwrap();
        assert_eq!(rep.status, Status::NonClosedOrbitSuspected);
        assert!(rep.f_trace.windows(2).all(|w| w[1] < w[0]));
        assert!(*rep.f_trace.last().unwrap() >= 2.0);
        assert!(out.det_defect() <= 1e-9);
        assert_eq!(closed_orbit_probe(&p, &pd).unwrap(), OrbitStatus::NotClosed);
    }

    #[test]
    fn commuting_semisimple_pair_is_closed() {
        let pd = ParabolicData::new(2, vec![]).unwrap();
        let (l, mu) = (C64::new(1.7, 0.4), C64::new(0.3, -0.5));
        let a = GroupElement::new(ComplexMatrix::diag(&[l, l.inv()])).unwrap();
        let b = GroupElement::new(ComplexMatrix::diag(&[mu, mu.inv()])).unwrap();
        let p = KnPoint::new(vec![], vec![a, b]);
        assert_eq!(closed_orbit_probe(&p, &pd).unwrap(), OrbitStatus::Closed);
        let moved = KnPoint::new(
            vec![],
            vec![
                random_group_element(&mut stream_rng(14, 0), 2, 1.0).conjugate(&a),
                random_group_element(&mut stream_rng(14, 0), 2, 1.0).conjugate(&b),
            ],
        );
        assert_eq!(
            closed_orbit_probe(&moved, &pd).unwrap(),
            OrbitStatus::Closed
        );
    }

    #[test]
    fn report_json_layout() {
        let rep = KNReport {
            f_trace: vec![4.0],
            residual_norm: 0.0,
            iterations: 0,
            status: Status::Converged,
        };
        assert_eq!(
            serde_json::to_string(&rep).unwrap(),
            r#"{"F":[4.0],"residual":0.0,"iters":0,"status":"Converged"}"#
        );
    }
}
