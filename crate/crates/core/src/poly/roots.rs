//! All-roots solver: Aberth–Ehrlich simultaneous iteration followed by
//! Newton polishing and multiplicity clustering.

use super::{PolyError, Polynomial};
use crate::scalar::{is_finite, Real};
use num_complex::Complex;

const MAX_ITERATIONS: usize = 500;
const NEWTON_POLISH_STEPS: usize = 3;

/// Roots of a polynomial, with multiplicities.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSet<T> {
    /// Every root, repeated according to multiplicity (length = degree).
    pub roots: Vec<Complex<T>>,
    /// Distinct roots after clustering (cluster means).
    pub distinct: Vec<Complex<T>>,
    /// Multiplicity of each entry of `distinct`.
    pub multiplicities: Vec<usize>,
    pub cluster_tol: T,
    /// False when the iteration cap was hit before the residual target.
    pub converged: bool,
    pub iterations: usize,
}

impl<T: Real> RootSet<T> {
    pub fn degree(&self) -> usize {
        self.roots.len()
    }

    /// Distinct roots expanded back to one entry per multiplicity.
    pub fn expanded(&self) -> Vec<Complex<T>> {
        self.distinct
            .iter()
            .zip(&self.multiplicities)
            .flat_map(|(&z, &m)| std::iter::repeat_n(z, m))
            .collect()
    }

    pub fn is_simple(&self) -> bool {
        self.multiplicities.iter().all(|&m| m == 1)
    }
}

/// Distance a root can move under rounding of the polynomial's values:
/// `4 n eps Σ|a_i||z|^i / |p'(z)|`. Large for members of a numerically
/// split multiple root, negligible for well-separated simple roots.
fn rounding_radii<T: Real>(p: &Polynomial<Complex<T>>, roots: &[Complex<T>]) -> Vec<T> {
    let n = p.degree().unwrap_or(0);
    let noise = T::lit(4.0 * n as f64) * T::epsilon();
    roots
        .iter()
        .map(|&z| {
            let (_, dp) = p.eval_with_derivative(z);
            let r = noise * p.eval_abs(z) / dp.norm();
            let cap = T::lit(1e-3) * T::one().max(z.norm());
            if r.is_finite() {
                r.min(cap)
            } else {
                T::zero()
            }
        })
        .collect()
}

/// Default clustering radius for a set of roots.
pub fn default_cluster_tol<T: Real>(roots: &[Complex<T>]) -> T {
    let scale = roots
        .iter()
        .map(|z| z.norm())
        .filter(|m| m.is_finite())
        .fold(T::zero(), T::max);
    T::tol_sqrt(1e-8).max(T::tol_sqrt(1e-6) * scale)
}

pub struct Clusters<T> {
    pub centers: Vec<Complex<T>>,
    pub multiplicities: Vec<usize>,
    /// Cluster index of each input point.
    pub labels: Vec<usize>,
}

/// Single-linkage grouping of `points` within `tol`. Clusters are ordered by
/// first appearance; centers are member means.
pub fn cluster<T: Real>(points: &[Complex<T>], tol: T) -> Clusters<T> {
    cluster_uncertain(points, &vec![T::zero(); points.len()], tol)
}

/// Like [`cluster`], but two points are also linked when their distance is
/// within the sum of their uncertainty radii.
pub fn cluster_uncertain<T: Real>(points: &[Complex<T>], radii: &[T], tol: T) -> Clusters<T> {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (points[i] - points[j]).norm() <= tol.max(radii[i] + radii[j]) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut reps: Vec<usize> = Vec::new();
    let mut sums: Vec<Complex<T>> = Vec::new();
    let mut multiplicities: Vec<usize> = Vec::new();
    let mut labels = Vec::with_capacity(n);
    for (i, &z) in points.iter().enumerate() {
        let rep = find(&mut parent, i);
        let k = match reps.iter().position(|&r| r == rep) {
            Some(k) => k,
            None => {
                reps.push(rep);
                sums.push(Complex::new(T::zero(), T::zero()));
                multiplicities.push(0);
                reps.len() - 1
            }
        };
        sums[k] += z;
        multiplicities[k] += 1;
        labels.push(k);
    }
    let centers = sums
        .iter()
        .zip(&multiplicities)
        .map(|(&s, &m)| s / T::from_usize(m).unwrap())
        .collect();
    Clusters {
        centers,
        multiplicities,
        labels,
    }
}

impl<T: Real> Polynomial<Complex<T>> {
    /// All roots with multiplicity.
    ///
    /// Fails with [`PolyError::NoConvergence`] when the iteration cap is hit
    /// and some root misses the residual target; [`Self::roots_best_effort`]
    /// returns the best iterate instead.
    pub fn roots(&self) -> Result<RootSet<T>, PolyError> {
        let set = self.roots_best_effort()?;
        if !set.converged {
            return Err(PolyError::NoConvergence {
                iterations: set.iterations,
                worst_residual: self.worst_scaled_residual(&set.roots).to_f64_lossy(),
            });
        }
        Ok(set)
    }

    pub fn roots_best_effort(&self) -> Result<RootSet<T>, PolyError> {
        let n = match self.degree() {
            None | Some(0) => return Err(PolyError::DegreeZero),
            Some(n) => n,
        };
        let zero = Complex::new(T::zero(), T::zero());

        // exact roots at the origin
        let shift = self.coeffs.iter().take_while(|c| **c == zero).count();
        let reduced = Polynomial {
            coeffs: self.coeffs[shift..].to_vec(),
        };
        let mut roots = vec![zero; shift];
        let (mut found, iterations, mut converged) = match n - shift {
            0 => (Vec::new(), 0, true),
            1 => (vec![-reduced.coeffs[0] / reduced.coeffs[1]], 0, true),
            _ => aberth(&reduced),
        };
        polish(&reduced, &mut found);
        roots.append(&mut found);

        if self.has_real_coeffs() {
            symmetrize_conjugates(&mut roots);
        }

        let scale = T::lit(self.max_modulus());
        let bound = T::tol(1e-10) * scale;
        let residual_ok = roots.iter().all(|&z| {
            let r = T::one().max(z.norm());
            self.eval(&z).norm() <= bound * r.powi(n as i32)
        });
        converged = converged || residual_ok;

        let cluster_tol = default_cluster_tol(&roots);
        let radii = rounding_radii(self, &roots);
        let grouping = cluster_uncertain(&roots, &radii, cluster_tol);
        // repeated roots sit next to each other
        let roots = (0..grouping.centers.len())
            .flat_map(|k| {
                roots
                    .iter()
                    .zip(&grouping.labels)
                    .filter(move |(_, &l)| l == k)
                    .map(|(&z, _)| z)
            })
            .collect();
        let Clusters {
            centers: distinct,
            multiplicities,
            ..
        } = grouping;

        Ok(RootSet {
            roots,
            distinct,
            multiplicities,
            cluster_tol,
            converged,
            iterations,
        })
    }

    /// `max_i |p(z_i)| / (max|c| * max(1,|z_i|)^n)`.
    pub fn worst_scaled_residual(&self, roots: &[Complex<T>]) -> T {
        let n = self.degree().unwrap_or(0) as i32;
        let scale = T::lit(self.max_modulus());
        roots
            .iter()
            .map(|&z| self.eval(&z).norm() / (scale * T::one().max(z.norm()).powi(n)))
            .fold(T::zero(), T::max)
    }
}

/// Largest positive root of `|a_n| x^n - Σ_{i<n} |a_i| x^i`: every root of
/// the polynomial lies within this radius.
fn cauchy_radius<T: Real>(coeffs: &[Complex<T>]) -> T {
    let n = coeffs.len() - 1;
    let mags: Vec<T> = coeffs.iter().map(|c| c.norm()).collect();
    let f = |x: T| {
        let mut v = mags[n];
        for i in (0..n).rev() {
            v = v * x - mags[i];
        }
        v
    };
    if mags[..n].iter().all(|m| *m == T::zero()) {
        return T::zero();
    }
    let mut hi = T::one();
    while f(hi) < T::zero() {
        hi *= T::lit(2.0);
    }
    let mut lo = T::zero();
    for _ in 0..80 {
        let mid = (lo + hi) * T::lit(0.5);
        if f(mid) < T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Taylor shift: coefficients of `p(s + c)`.
fn taylor_shift<T: Real>(coeffs: &[Complex<T>], c: Complex<T>) -> Vec<Complex<T>> {
    let mut b = coeffs.to_vec();
    let n = b.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            b[j] = b[j] + c * b[j + 1];
        }
    }
    b
}

fn initial_guesses<T: Real>(p: &Polynomial<Complex<T>>) -> Vec<Complex<T>> {
    let n = p.coeffs.len() - 1;
    let lead = p.coeffs[n];
    let center = -p.coeffs[n - 1] / (lead * T::from_usize(n).unwrap());
    let radius = cauchy_radius(&taylor_shift(&p.coeffs, center));
    if radius == T::zero() {
        return vec![center; n];
    }
    let golden = T::PI() * (T::lit(3.0) - T::lit(5.0).sqrt());
    (0..n)
        .map(|k| {
            let theta = (T::TAU() * T::from_usize(k).unwrap() + golden) / T::from_usize(n).unwrap();
            center + Complex::from_polar(radius, theta)
        })
        .collect()
}

/// Returns (roots, iterations, converged).
fn aberth<T: Real>(p: &Polynomial<Complex<T>>) -> (Vec<Complex<T>>, usize, bool) {
    let n = p.coeffs.len() - 1;
    let mut z = initial_guesses(p);
    let mut done = vec![false; n];
    if z.windows(2).all(|w| w[0] == w[1]) {
        // p is (s - c)^n up to scale
        return (z, 0, true);
    }
    let step_tol = T::tol(1e-13);
    let noise = T::lit(4.0 * n as f64) * T::epsilon();
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS && done.iter().any(|d| !d) {
        iterations += 1;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (v, dv) = p.eval_with_derivative(z[i]);
            if v.norm() <= noise * p.eval_abs(z[i]) {
                done[i] = true;
                continue;
            }
            let repulsion: Complex<T> = (0..n)
                .filter(|&j| j != i && z[j] != z[i])
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let ratio = v / dv;
            let w = if is_finite(ratio) {
                ratio / (Complex::new(T::one(), T::zero()) - ratio * repulsion)
            } else {
                repulsion.inv()
            };
            if !is_finite(w) {
                continue;
            }
            z[i] -= w;
            if w.norm() < step_tol * (T::one() + z[i].norm()) {
                done[i] = true;
            }
        }
    }
    (z, iterations, done.iter().all(|&d| d))
}

/// Newton steps on isolated roots, accepted only when the residual drops.
fn polish<T: Real>(p: &Polynomial<Complex<T>>, roots: &mut [Complex<T>]) {
    let n = roots.len();
    if n < 2 {
        return;
    }
    let tol = default_cluster_tol(roots);
    for i in 0..n {
        let gap = (0..n)
            .filter(|&j| j != i)
            .map(|j| (roots[i] - roots[j]).norm())
            .fold(T::infinity(), T::min);
        if gap <= tol * T::lit(10.0) {
            continue;
        }
        let mut best = roots[i];
        let mut best_res = p.eval(&best).norm();
        for _ in 0..NEWTON_POLISH_STEPS {
            let (v, dv) = p.eval_with_derivative(best);
            let next = best - v / dv;
            if !is_finite(next) || (next - best).norm() > gap * T::lit(0.5) {
                break;
            }
            let res = p.eval(&next).norm();
            if res >= best_res {
                break;
            }
            best = next;
            best_res = res;
        }
        roots[i] = best;
    }
}

/// Makes complex roots of a real polynomial come in exact conjugate pairs
/// and snaps self-conjugate roots onto the real axis.
fn symmetrize_conjugates<T: Real>(roots: &mut [Complex<T>]) {
    let n = roots.len();
    let mut used = vec![false; n];
    let order: Vec<usize> = {
        let mut idx: Vec<usize> = (0..n).collect();
        // handle the roots farthest from the real axis first
        idx.sort_by(|&a, &b| roots[b].im.abs().partial_cmp(&roots[a].im.abs()).unwrap());
        idx
    };
    for &i in &order {
        if used[i] {
            continue;
        }
        let conj = roots[i].conj();
        let partner = (0..n)
            .filter(|&j| !used[j] && j != i)
            .min_by(|&a, &b| {
                (roots[a] - conj)
                    .norm()
                    .partial_cmp(&(roots[b] - conj).norm())
                    .unwrap()
            });
        let self_dist = (roots[i] - conj).norm();
        match partner {
            Some(j) if (roots[j] - conj).norm() < self_dist => {
                let avg = (roots[i] + roots[j].conj()) * T::lit(0.5);
                roots[i] = avg;
                roots[j] = avg.conj();
                used[i] = true;
                used[j] = true;
            }
            _ => {
                roots[i].im = T::zero();
                used[i] = true;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::{Complex32, Complex64};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        v
    }

    #[test]
    fn cubic_with_complex_pair() {
        let p = Polynomial::from_real(&[20.0, 13.0, 6.0, 1.0]);
        let set = p.roots().unwrap();
        assert!(set.is_simple());
        let r = sorted(set.roots.clone());
        let expect = [c(-4.0, 0.0), c(-1.0, -2.0), c(-1.0, 2.0)];
        for (a, b) in r.iter().zip(expect) {
            assert!((a - b).norm() < 1e-12, "{a} vs {b}");
        }
        // conjugate pair exact, real root exactly real
        assert_eq!(r[1], r[2].conj());
        assert_eq!(r[0].im, 0.0);
    }

    #[test]
    fn perfect_square_has_multiplicity_two() {
        let set = Polynomial::from_real(&[4.0, 4.0, 1.0]).roots().unwrap();
        assert_eq!(set.multiplicities, vec![2]);
        assert!((set.distinct[0] - c(-2.0, 0.0)).norm() < 1e-7);
    }

    #[test]
    fn triple_root_and_origin_roots() {
        // s^2 (s+1)^3
        let p = Polynomial::from_roots(
            &[c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0), c(-1.0, 0.0), c(-1.0, 0.0)],
            c(1.0, 0.0),
        )
        .unwrap();
        let set = p.roots().unwrap();
        let mut pairs: Vec<(f64, usize)> = set
            .distinct
            .iter()
            .zip(&set.multiplicities)
            .map(|(z, &m)| (z.re, m))
            .collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        assert_eq!(pairs.len(), 2);
        assert_eq!(pairs[1], (0.0, 2));
        assert_eq!(pairs[0].1, 3);
        assert!((pairs[0].0 + 1.0).abs() < 1e-5);
    }

    #[test]
    fn rounding_split_triple_root_is_one_cluster() {
        // (s+1)^3 (s+4) rebuilt as D + K N with inexact D
        let n = Polynomial::from_real(&[2.0, 1.0]);
        let target = Polynomial::from_real(&[4.0, 13.0, 15.0, 7.0, 1.0]);
        let k = Complex64::new(0.3, 0.0);
        let d = target.sub(&n.scale(&k));
        let p = d.add(&n.scale(&k));
        let set = p.roots().unwrap();
        let mut m = set.multiplicities.clone();
        m.sort();
        assert_eq!(m, vec![1, 3]);
    }

    #[test]
    fn close_simple_roots_stay_apart() {
        let roots = [Complex64::new(1.0, 0.0), Complex64::new(1.0 + 1e-5, 0.0), Complex64::new(-2.0, 0.0)];
        let p = Polynomial::from_roots(&roots, Complex64::new(1.0, 0.0)).unwrap();
        assert!(p.roots().unwrap().is_simple());
    }

    #[test]
    fn degree_zero_rejected() {
        assert_eq!(
            Polynomial::from_real(&[3.0]).roots(),
            Err(PolyError::DegreeZero)
        );
        assert_eq!(
            Polynomial::<Complex64>::zero().roots(),
            Err(PolyError::DegreeZero)
        );
    }

    #[test]
    fn pure_power_is_handled() {
        let set = Polynomial::from_real(&[0.0, 0.0, 0.0, 2.0]).roots().unwrap();
        assert_eq!(set.multiplicities, vec![3]);
        assert_eq!(set.distinct[0], c(0.0, 0.0));
        // (s - 3)^4 shifted: all guesses coincide at the centroid
        let p = Polynomial::from_roots(&[c(3.0, 0.0); 4], c(1.0, 0.0)).unwrap();
        let set = p.roots().unwrap();
        assert_eq!(set.multiplicities, vec![4]);
    }

    #[test]
    fn single_precision_recovers_cubic() {
        let p = Polynomial::<Complex32>::from_real(&[20.0f32, 13.0, 6.0, 1.0]);
        let set = p.roots().unwrap();
        assert!(set.roots.iter().any(|z| (z - Complex32::new(-4.0, 0.0)).norm() < 1e-4));
        assert!(set.roots.iter().any(|z| (z - Complex32::new(-1.0, 2.0)).norm() < 1e-4));
    }

    #[test]
    fn clustering_groups_within_tol() {
        let pts = [c(0.0, 0.0), c(1e-9, 0.0), c(1.0, 0.0)];
        let groups = cluster(&pts, 1e-8);
        assert_eq!(groups.multiplicities, vec![2, 1]);
        assert_eq!(groups.labels, vec![0, 0, 1]);
        assert!((groups.centers[0] - c(5e-10, 0.0)).norm() < 1e-20);
    }

    #[test]
    fn cauchy_radius_bounds_roots() {
        let p = Polynomial::from_real(&[20.0, 13.0, 6.0, 1.0]);
        let r = cauchy_radius(p.coeffs());
        assert!((4.0..10.0).contains(&r));
    }
}
