//! Residue-driven root-locus tracing.
//!
//! Each closed-loop pole estimate is advanced along the gain grid by
//!
//! ```text
//! p_j <- p_j - [N(p_j) δk + Δ(p_j, k_i)] / (lead · Π_{h≠j} (p_j - p_h))
//! ```
//!
//! The first summand integrates the pole velocity (the negated residue);
//! the second is a stabilizing correction that pulls estimates back onto
//! the locus. The update is one simultaneous Weierstrass step for
//! `Δ(s, k_{i+1})`, so all branches are advanced from the same snapshot.
//!
//! The update is only valid away from branch points. A step is rejected
//! and replaced by an exact re-solve when
//!
//! * two estimates are closer than `branch_event_tol` times the pole scale,
//! * a branch's step exceeds `max_step_factor` times the median of its last
//!   ten steps, or
//! * the combined step of two branches exceeds `step_separation_ratio`
//!   times their distance, i.e. the pair is about to meet inside one step.
//!
//! Stabilized traces also check each sample before stepping from it: a
//! residual `|Δ(p_j, k)|` above `residual_guard` times the largest
//! coefficient, or (opt-in) an estimated error `|Δ(p_j, k)| / |lead Π|`
//! above `error_guard` times the pole scale, replaces the sample by exact
//! roots. Both quantities are by-products of the stabilizing term.
//!
//! Parameter sweeps use the same machinery on `Δ = A + φ(h) B`.

use crate::matching::align;
use crate::poly::{PolyError, Polynomial};
use crate::ratfun::{RationalTF, DEGREE_DROP_TOL};
use crate::scalar::{infinite_point, is_finite, projective_distance, Real};
use crate::sensitivity::{AffineSplit, ParamCharPoly, SensitivityError};
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::fmt;
use thiserror::Error;

/// Estimates closer than this cannot be updated.
pub const COLLISION_TOL: f64 = 1e-12;
/// Trailing window used by the step-size jump detector.
pub const STEP_HISTORY: usize = 10;

#[derive(Debug, Error)]
pub enum TraceError<T: Real> {
    #[error("k_end must differ from k_start")]
    EmptyRange,
    #[error("step {dk} must be nonzero, finite and no larger than the range {range}")]
    InvalidStep { dk: f64, range: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("estimates {0} and {1} collide at k = {2}; re-anchor before stepping")]
    CollidingEstimates(usize, usize, f64),
    #[error("leading coefficient of the characteristic polynomial vanishes at k = {0}")]
    DegreeDropAtK(f64),
    #[error("loci are sampled on different grids or have different branch counts")]
    GridMismatch,
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Sensitivity(#[from] SensitivityError),
    #[error("trace interrupted at k = {k}: {source}")]
    Interrupted {
        k: f64,
        partial: Box<Locus<T>>,
        source: PolyError,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceConfig<T> {
    pub k_start: T,
    pub k_end: T,
    /// Step magnitude; the direction follows `k_end - k_start`.
    pub dk: T,
    pub stabilizer_on: bool,
    /// Exact re-solve every this many steps; 0 disables it.
    pub reanchor_every: usize,
    /// Relative to the pole scale `max(1, max|p|)`.
    pub branch_event_tol: T,
    pub max_step_factor: T,
    pub step_separation_ratio: T,
    /// Stabilized traces re-solve a sample whose residual `|Δ(p, k)|`
    /// exceeds this times the largest coefficient of `Δ(·, k)`; 0 disables.
    pub residual_guard: T,
    /// Stabilized traces re-solve a sample whose estimated error exceeds
    /// this times the pole scale; 0 (the default) disables it.
    pub error_guard: T,
}

impl<T: Real> TraceConfig<T> {
    pub fn new(k_start: T, k_end: T, dk: T) -> Self {
        TraceConfig {
            k_start,
            k_end,
            dk,
            stabilizer_on: true,
            reanchor_every: 0,
            branch_event_tol: T::lit(1e-3),
            max_step_factor: T::lit(50.0),
            step_separation_ratio: T::lit(0.25),
            residual_guard: T::lit(1e-3),
            error_guard: T::zero(),
        }
    }

    pub fn with_stabilizer(mut self, on: bool) -> Self {
        self.stabilizer_on = on;
        self
    }

    pub fn with_reanchor(mut self, every: usize) -> Self {
        self.reanchor_every = every;
        self
    }

    pub fn with_error_guard(mut self, guard: T) -> Self {
        self.error_guard = guard;
        self
    }

    pub fn validate(&self) -> Result<(), TraceError<T>> {
        let range = self.k_end - self.k_start;
        if !self.k_start.is_finite() || !self.k_end.is_finite() {
            return Err(TraceError::InvalidConfig("gain bounds must be finite".into()));
        }
        if range == T::zero() {
            return Err(TraceError::EmptyRange);
        }
        let dk = self.dk.abs();
        if !(dk > T::zero()) || !dk.is_finite() || dk > range.abs() {
            return Err(TraceError::InvalidStep {
                dk: self.dk.to_f64_lossy(),
                range: range.to_f64_lossy(),
            });
        }
        for (name, v) in [
            ("branch_event_tol", self.branch_event_tol),
            ("max_step_factor", self.max_step_factor),
        ] {
            if !(v > T::zero()) {
                return Err(TraceError::InvalidConfig(format!("{name} must be positive")));
            }
        }
        for (name, v) in [
            ("step_separation_ratio", self.step_separation_ratio),
            ("residual_guard", self.residual_guard),
            ("error_guard", self.error_guard),
        ] {
            if !(v >= T::zero()) {
                return Err(TraceError::InvalidConfig(format!("{name} must be nonnegative")));
            }
        }
        Ok(())
    }

    /// Signed step.
    pub fn step(&self) -> T {
        let dk = self.dk.abs();
        if self.k_end < self.k_start {
            -dk
        } else {
            dk
        }
    }

    /// `k_start, k_start + δk, ...` up to and including `k_end` when it
    /// lies on the grid.
    pub fn grid(&self) -> Result<Vec<T>, TraceError<T>> {
        self.validate()?;
        let span = ((self.k_end - self.k_start) / self.dk.abs()).abs();
        let count = (span + T::tol(1e-9)).floor().to_usize().unwrap_or(0) + 1;
        let step = self.step();
        Ok((0..count)
            .map(|i| self.k_start + T::from_usize(i).unwrap() * step)
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocusSample<T> {
    pub k: T,
    pub pole: Complex<T>,
    pub velocity: Complex<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    BranchPointSuspected,
    Reanchored,
    DegreeDrop,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EventKind::BranchPointSuspected => "branch_point_suspected",
            EventKind::Reanchored => "reanchored",
            EventKind::DegreeDrop => "degree_drop",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocusEvent<T> {
    /// Grid value at which the exact re-solve happened.
    pub k: T,
    pub kind: EventKind,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceMethod {
    Tracer,
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Locus<T> {
    /// `branches[j][i]` is branch `j` at the `i`-th grid value.
    pub branches: Vec<Vec<LocusSample<T>>>,
    pub events: Vec<LocusEvent<T>>,
    pub config: TraceConfig<T>,
    pub method: TraceMethod,
}

impl<T: Real> Locus<T> {
    /// Number of grid values traced.
    pub fn len(&self) -> usize {
        self.branches.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn grid(&self) -> Vec<T> {
        self.branches.first().map_or_else(Vec::new, |b| b.iter().map(|s| s.k).collect())
    }

    /// Pole positions of all branches at the `i`-th grid value.
    pub fn poles_at(&self, i: usize) -> Vec<Complex<T>> {
        self.branches.iter().map(|b| b[i].pole).collect()
    }

    pub fn last_poles(&self) -> Vec<Complex<T>> {
        self.branches.iter().filter_map(|b| b.last().map(|s| s.pole)).collect()
    }

    pub fn count(&self, kind: EventKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }
}

/// `Δ(s, t) = a(s) + φ(t) b(s)` with `φ(t) = t` or `t²`.
#[derive(Debug, Clone)]
struct Pencil<T: Real> {
    a: Polynomial<Complex<T>>,
    b: Polynomial<Complex<T>>,
    squared: bool,
    degree: usize,
    scale: T,
}

impl<T: Real> Pencil<T> {
    fn new(a: Polynomial<Complex<T>>, b: Polynomial<Complex<T>>, squared: bool) -> Self {
        let degree = a.degree().unwrap_or(0).max(b.degree().unwrap_or(0));
        let scale = T::lit(a.max_modulus().max(b.max_modulus()));
        Pencil {
            a,
            b,
            squared,
            degree,
            scale,
        }
    }

    fn from_tf(g: &RationalTF<T>) -> Self {
        Pencil::new(g.den().clone(), g.num().clone(), false)
    }

    fn from_split(split: AffineSplit<T>) -> Self {
        Pencil::new(split.a, split.b, split.squared)
    }

    fn phi(&self, t: T) -> T {
        if self.squared {
            t * t
        } else {
            t
        }
    }

    fn dphi(&self, t: T) -> T {
        if self.squared {
            t + t
        } else {
            T::one()
        }
    }

    fn lead(&self, t: T) -> Complex<T> {
        self.a.coeff(self.degree) + self.b.coeff(self.degree) * self.phi(t)
    }

    fn drops_degree(&self, t: T) -> bool {
        let reference = T::one().max(self.scale * T::one().max(self.phi(t).abs()));
        self.lead(t).norm() <= T::lit(DEGREE_DROP_TOL) * reference
    }

    fn eval(&self, s: Complex<T>, t: T) -> Complex<T> {
        self.a.eval(&s) + self.b.eval(&s) * self.phi(t)
    }

    /// Largest coefficient modulus of `Δ(·, t)`.
    fn coeff_scale(&self, t: T) -> T {
        let phi = self.phi(t);
        (0..=self.degree).fold(T::zero(), |m, i| m.max((self.a.coeff(i) + self.b.coeff(i) * phi).norm()))
    }

    fn at(&self, t: T) -> Polynomial<Complex<T>> {
        let phi = Complex::new(self.phi(t), T::zero());
        let mut c: Vec<Complex<T>> = (0..=self.degree)
            .map(|i| self.a.coeff(i) + self.b.coeff(i) * phi)
            .collect();
        if self.drops_degree(t) {
            c[self.degree] = Complex::new(T::zero(), T::zero());
        }
        Polynomial::new(c)
    }

    /// All `degree` roots at `t`; branches lost to a degree drop are
    /// reported at infinity.
    fn solve(&self, t: T) -> Result<Vec<Complex<T>>, PolyError> {
        let p = self.at(t);
        let mut roots = match p.degree() {
            Some(d) if d > 0 => p.roots()?.expanded(),
            _ => Vec::new(),
        };
        roots.resize(self.degree, infinite_point());
        Ok(roots)
    }

    /// `lead(t) Π_{h≠j}(p_j - p_h)` for every j, or the first colliding
    /// pair. Factors are multiplied in a fixed order of the values so the
    /// result does not depend on how the estimates are listed.
    fn products(&self, p: &[Complex<T>], lead: Complex<T>) -> Result<Vec<Complex<T>>, (usize, usize)> {
        let tol = T::tol(COLLISION_TOL);
        let mut order: Vec<usize> = (0..p.len()).collect();
        order.sort_by(|&a, &b| {
            p[a].re
                .partial_cmp(&p[b].re)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(p[a].im.partial_cmp(&p[b].im).unwrap_or(std::cmp::Ordering::Equal))
        });
        let mut out = vec![lead; p.len()];
        for j in 0..p.len() {
            for &h in &order {
                if h == j {
                    continue;
                }
                let d = p[j] - p[h];
                if d.norm() < tol {
                    return Err((j.min(h), j.max(h)));
                }
                out[j] *= d;
            }
        }
        Ok(out)
    }

    /// Velocities `-φ'(t) b(p_j) / (lead Π)`; infinite where undefined.
    fn velocities(&self, p: &[Complex<T>], t: T, products: Option<&[Complex<T>]>) -> Vec<Complex<T>> {
        let owned;
        let prods = match products {
            Some(pr) => pr,
            None => {
                if p.iter().any(|z| !is_finite(*z)) {
                    return vec![infinite_point(); p.len()];
                }
                match self.products(p, self.lead(t)) {
                    Ok(v) => {
                        owned = v;
                        &owned
                    }
                    Err(_) => return vec![infinite_point(); p.len()],
                }
            }
        };
        let dphi = self.dphi(t);
        p.iter()
            .zip(prods)
            .map(|(&z, &pr)| {
                let v = -(self.b.eval(&z) * dphi) / pr;
                if is_finite(v) {
                    v
                } else {
                    infinite_point()
                }
            })
            .collect()
    }

    fn residuals(&self, p: &[Complex<T>], t: T) -> Vec<Complex<T>> {
        p.iter().map(|&z| self.eval(z, t)).collect()
    }

    /// One simultaneous update from `t` to `t + dt`, given the products at
    /// the current snapshot (computed with `lead(t + dt)`). Passing the
    /// residuals `Δ(p_j, t)` turns the stabilizer on.
    fn step(
        &self,
        p: &[Complex<T>],
        prods: &[Complex<T>],
        t: T,
        dt: T,
        residuals: Option<&[Complex<T>]>,
    ) -> Vec<Complex<T>> {
        let dphi = self.phi(t + dt) - self.phi(t);
        p.iter()
            .zip(prods)
            .enumerate()
            .map(|(j, (&z, &pr))| {
                let mut num = self.b.eval(&z) * dphi;
                if let Some(r) = residuals {
                    num += r[j];
                }
                z - num / pr
            })
            .collect()
    }
}

/// One update of all estimates from `k_i` to `k_i + dk`.
pub fn step_update<T: Real>(
    estimates: &[Complex<T>],
    g: &RationalTF<T>,
    k_i: T,
    dk: T,
    stabilizer_on: bool,
) -> Result<Vec<Complex<T>>, TraceError<T>> {
    let pencil = Pencil::from_tf(g);
    let k1 = k_i + dk;
    if pencil.drops_degree(k1) {
        return Err(TraceError::DegreeDropAtK(k1.to_f64_lossy()));
    }
    let prods = pencil
        .products(estimates, pencil.lead(k1))
        .map_err(|(a, b)| TraceError::CollidingEstimates(a, b, k_i.to_f64_lossy()))?;
    let residuals = stabilizer_on.then(|| pencil.residuals(estimates, k_i));
    Ok(pencil.step(estimates, &prods, k_i, dk, residuals.as_deref()))
}

/// Root locus of `1 + K G(s)` by the residue-driven difference equation.
pub fn trace_locus<T: Real>(g: &RationalTF<T>, cfg: &TraceConfig<T>) -> Result<Locus<T>, TraceError<T>> {
    run_tracer(&Pencil::from_tf(g), cfg)
}

/// Reference locus: exact roots at every grid value, matched to the
/// previous step by nearest neighbour.
pub fn exact_locus<T: Real>(g: &RationalTF<T>, cfg: &TraceConfig<T>) -> Result<Locus<T>, TraceError<T>> {
    run_exact(&Pencil::from_tf(g), cfg)
}

/// Contour locus over parameter `i`; the grid in `cfg` is in units of the
/// parameter.
pub fn trace_contour<T: Real>(
    model: &ParamCharPoly<T>,
    i: usize,
    cfg: &TraceConfig<T>,
) -> Result<Locus<T>, TraceError<T>> {
    run_tracer(&Pencil::from_split(model.affine_split(i)?), cfg)
}

pub fn exact_contour<T: Real>(
    model: &ParamCharPoly<T>,
    i: usize,
    cfg: &TraceConfig<T>,
) -> Result<Locus<T>, TraceError<T>> {
    run_exact(&Pencil::from_split(model.affine_split(i)?), cfg)
}

struct Builder<T: Real> {
    locus: Locus<T>,
}

impl<T: Real> Builder<T> {
    fn new(n: usize, cfg: &TraceConfig<T>, method: TraceMethod, len: usize) -> Self {
        Builder {
            locus: Locus {
                branches: (0..n).map(|_| Vec::with_capacity(len)).collect(),
                events: Vec::new(),
                config: *cfg,
                method,
            },
        }
    }

    fn push(&mut self, t: T, poles: &[Complex<T>], vel: &[Complex<T>]) {
        for ((branch, &pole), &velocity) in self.locus.branches.iter_mut().zip(poles).zip(vel) {
            branch.push(LocusSample { k: t, pole, velocity });
        }
    }

    fn event(&mut self, k: T, kind: EventKind, detail: String) {
        self.locus.events.push(LocusEvent { k, kind, detail });
    }

    fn interrupt(self, k: T, source: PolyError) -> TraceError<T> {
        TraceError::Interrupted {
            k: k.to_f64_lossy(),
            partial: Box::new(self.locus),
            source,
        }
    }
}

fn pole_scale<T: Real>(p: &[Complex<T>]) -> T {
    p.iter()
        .filter(|z| is_finite(**z))
        .fold(T::one(), |m, z| m.max(z.norm()))
}

fn closest_pair<T: Real>(p: &[Complex<T>]) -> Option<(usize, usize, T)> {
    let mut best: Option<(usize, usize, T)> = None;
    for a in 0..p.len() {
        for b in a + 1..p.len() {
            let d = projective_distance(p[a], p[b]);
            if best.is_none_or(|(_, _, m)| d < m) {
                best = Some((a, b, d));
            }
        }
    }
    best
}

fn median<T: Real>(values: &VecDeque<T>) -> T {
    let mut v: Vec<T> = values.iter().copied().collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) * T::lit(0.5)
    }
}

/// Reason to replace the current stabilized sample by exact roots, if any.
/// `r` holds the residuals `Δ(p_j, t)`; divided by the products they are
/// the Weierstrass corrections, i.e. first-order estimates of each
/// sample's error.
fn check_sample<T: Real>(
    cfg: &TraceConfig<T>,
    pencil: &Pencil<T>,
    t: T,
    est: &[Complex<T>],
    r: &[Complex<T>],
    prods: Option<&[Complex<T>]>,
) -> Option<String> {
    if cfg.residual_guard > T::zero() {
        let worst = r.iter().fold(T::zero(), |m, z| m.max(z.norm()));
        if worst > cfg.residual_guard * pencil.coeff_scale(t) {
            return Some(format!("residual {worst:e} above the guard"));
        }
    }
    if let Some(pr) = prods.filter(|_| cfg.error_guard > T::zero()) {
        let worst = r.iter().zip(pr).fold(T::zero(), |m, (a, b)| m.max((a / b).norm()));
        if worst > cfg.error_guard * pole_scale(est) {
            return Some(format!("estimated error {worst:e} above the guard"));
        }
    }
    None
}

/// Reason to reject a proposed step, if any.
fn screen_step<T: Real>(
    cfg: &TraceConfig<T>,
    old: &[Complex<T>],
    new: &[Complex<T>],
    history: &[VecDeque<T>],
) -> Option<String> {
    let moves: Vec<T> = old.iter().zip(new).map(|(a, b)| (b - a).norm()).collect();
    if moves.iter().any(|m| !m.is_finite()) || new.iter().any(|z| !is_finite(*z)) {
        return Some("non-finite update".into());
    }
    let floor = T::epsilon() * pole_scale(old);
    for (j, (&m, h)) in moves.iter().zip(history).enumerate() {
        if h.len() >= 3 && m > cfg.max_step_factor * median(h) + floor {
            return Some(format!("branch {j}: step {m:e} exceeds {} times its recent median", cfg.max_step_factor));
        }
    }
    if cfg.step_separation_ratio > T::zero() {
        for a in 0..old.len() {
            for b in a + 1..old.len() {
                let gap = (old[a] - old[b]).norm();
                if moves[a] + moves[b] > cfg.step_separation_ratio * gap {
                    return Some(format!("branches {a} and {b}: step comparable to their separation {gap:e}"));
                }
            }
        }
    }
    None
}

fn run_tracer<T: Real>(pencil: &Pencil<T>, cfg: &TraceConfig<T>) -> Result<Locus<T>, TraceError<T>> {
    let grid = cfg.grid()?;
    let n = pencil.degree;
    let mut out = Builder::new(n, cfg, TraceMethod::Tracer, grid.len());
    let t0 = grid[0];
    let mut est = match pencil.solve(t0) {
        Ok(r) => r,
        Err(e) => return Err(out.interrupt(t0, e)),
    };
    if pencil.drops_degree(t0) {
        out.event(t0, EventKind::DegreeDrop, "degree drop at the start of the grid".into());
    }
    let mut history: Vec<VecDeque<T>> = vec![VecDeque::with_capacity(STEP_HISTORY + 1); n];

    for i in 0..grid.len() {
        let t = grid[i];
        let last = i + 1 == grid.len();
        let next_t = if last { t } else { grid[i + 1] };
        let mut all_finite = est.iter().all(|z| is_finite(*z));
        let next_lead = pencil.lead(next_t);
        let mut prods = if all_finite {
            pencil.products(&est, next_lead).ok()
        } else {
            None
        };
        let mut residuals = (cfg.stabilizer_on && all_finite).then(|| pencil.residuals(&est, t));
        if let Some(reason) = residuals
            .as_deref()
            .filter(|_| i > 0)
            .and_then(|r| check_sample(cfg, pencil, t, &est, r, prods.as_deref()))
        {
            let exact = match pencil.solve(t) {
                Ok(r) => r,
                Err(e) => return Err(out.interrupt(t, e)),
            };
            out.event(t, EventKind::Reanchored, reason);
            est = align(&est, &exact);
            all_finite = est.iter().all(|z| is_finite(*z));
            prods = if all_finite {
                pencil.products(&est, next_lead).ok()
            } else {
                None
            };
            residuals = all_finite.then(|| pencil.residuals(&est, t));
        }

        // velocities at this sample; the lead only changes for proper plants
        let shared = if pencil.b.coeff(n) == Complex::new(T::zero(), T::zero()) {
            prods.as_deref()
        } else {
            None
        };
        let vel = pencil.velocities(&est, t, shared);
        out.push(t, &est, &vel);
        if last {
            break;
        }

        let dt = next_t - t;
        let mut resolve: Option<(EventKind, String)> = None;
        let mut proposed = Vec::new();
        if pencil.drops_degree(next_t) {
            resolve = Some((EventKind::DegreeDrop, "leading coefficient vanishes".into()));
        } else if !all_finite {
            resolve = Some((EventKind::Reanchored, "branch returning from infinity".into()));
        } else if cfg.reanchor_every > 0 && (i + 1) % cfg.reanchor_every == 0 {
            resolve = Some((EventKind::Reanchored, "periodic".into()));
        } else if let Some((a, b, d)) = closest_pair(&est).filter(|&(_, _, d)| d < cfg.branch_event_tol * pole_scale(&est)) {
            resolve = Some((
                EventKind::BranchPointSuspected,
                format!("branches {a} and {b} within {d:e}"),
            ));
        } else {
            match &prods {
                None => {
                    resolve = Some((EventKind::BranchPointSuspected, "colliding estimates".into()));
                }
                Some(pr) => {
                    proposed = pencil.step(&est, pr, t, dt, residuals.as_deref());
                    if let Some(reason) = screen_step(cfg, &est, &proposed, &history) {
                        resolve = Some((EventKind::BranchPointSuspected, reason));
                    }
                }
            }
        }

        let next = match resolve {
            None => proposed,
            Some((kind, detail)) => {
                let exact = match pencil.solve(next_t) {
                    Ok(r) => r,
                    Err(e) => return Err(out.interrupt(next_t, e)),
                };
                out.event(next_t, kind, detail);
                align(&est, &exact)
            }
        };

        for ((h, a), b) in history.iter_mut().zip(&est).zip(&next) {
            let m = projective_distance(*a, *b);
            if m.is_finite() {
                if h.len() == STEP_HISTORY {
                    h.pop_front();
                }
                h.push_back(m);
            }
        }
        est = next;
    }
    Ok(out.locus)
}

fn run_exact<T: Real>(pencil: &Pencil<T>, cfg: &TraceConfig<T>) -> Result<Locus<T>, TraceError<T>> {
    let grid = cfg.grid()?;
    let mut out = Builder::new(pencil.degree, cfg, TraceMethod::Exact, grid.len());
    let mut prev: Option<Vec<Complex<T>>> = None;
    for &t in &grid {
        let roots = match pencil.solve(t) {
            Ok(r) => r,
            Err(e) => return Err(out.interrupt(t, e)),
        };
        if pencil.drops_degree(t) {
            out.event(t, EventKind::DegreeDrop, "leading coefficient vanishes".into());
        }
        let poles = match &prev {
            None => roots,
            Some(p) => align(p, &roots),
        };
        let vel = pencil.velocities(&poles, t, None);
        out.push(t, &poles, &vel);
        prev = Some(poles);
    }
    Ok(out.locus)
}

/// Mean and maximum distance between corresponding samples, after
/// nearest-neighbour alignment of the test poles to the reference poles at
/// every grid value.
pub fn locus_error<T: Real>(test: &Locus<T>, truth: &Locus<T>) -> Result<(T, T), TraceError<T>> {
    if test.branches.len() != truth.branches.len() || test.len() != truth.len() {
        return Err(TraceError::GridMismatch);
    }
    let (gt, gr) = (test.grid(), truth.grid());
    for (a, b) in gt.iter().zip(&gr) {
        if (*a - *b).abs() > T::tol(1e-12) * T::one().max(a.abs()) {
            return Err(TraceError::GridMismatch);
        }
    }
    let mut sum = T::zero();
    let mut max = T::zero();
    let mut count = 0usize;
    for i in 0..test.len() {
        let reference = truth.poles_at(i);
        let aligned = align(&reference, &test.poles_at(i));
        for (r, z) in reference.iter().zip(&aligned) {
            let d = projective_distance(*r, *z);
            sum += d;
            max = max.max(d);
            count += 1;
        }
    }
    if count == 0 {
        return Ok((T::zero(), T::zero()));
    }
    Ok((sum / T::from_usize(count).unwrap(), max))
}
