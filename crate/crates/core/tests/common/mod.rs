#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use reslocus::matching::align;
use reslocus::{Polynomial, RationalTF};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Roots of a real polynomial of the given degree: conjugate pairs and real
/// values inside the disk of radius `radius`, pairwise at least `sep` apart.
pub fn random_real_roots(r: &mut ChaCha8Rng, degree: usize, radius: f64, sep: f64) -> Vec<Complex64> {
    loop {
        let mut roots = Vec::with_capacity(degree);
        while roots.len() < degree {
            if degree - roots.len() >= 2 && r.gen_bool(0.5) {
                let m = r.gen_range(0.1..radius);
                let a = r.gen_range(0.1..std::f64::consts::PI - 0.1);
                let z = Complex64::from_polar(m, a);
                roots.push(z);
                roots.push(z.conj());
            } else {
                roots.push(c(r.gen_range(-radius..radius), 0.0));
            }
        }
        if min_separation(&roots) > sep {
            return roots;
        }
    }
}

pub fn min_separation(z: &[Complex64]) -> f64 {
    let mut m = f64::INFINITY;
    for i in 0..z.len() {
        for j in i + 1..z.len() {
            m = m.min((z[i] - z[j]).norm());
        }
    }
    m
}

/// Real polynomial with the given (conjugate-closed) roots.
pub fn real_poly(roots: &[Complex64], lead: f64) -> Polynomial<Complex64> {
    let p = Polynomial::from_roots(roots, c(lead, 0.0)).unwrap();
    Polynomial::new(p.coeffs().iter().map(|z| c(z.re, 0.0)).collect())
}

/// Strictly proper plant with simple open-loop poles of modulus ≤ 10.
pub fn random_plant(r: &mut ChaCha8Rng) -> RationalTF<f64> {
    let n = r.gen_range(2..=6);
    let m = r.gen_range(0..n);
    let poles = random_real_roots(r, n, 10.0, 0.3);
    let zeros = random_real_roots(r, m, 10.0, 0.3);
    let gain = r.gen_range(0.5..5.0) * if r.gen_bool(0.2) { -1.0 } else { 1.0 };
    RationalTF::new(real_poly(&zeros, gain), real_poly(&poles, 1.0)).unwrap()
}

pub fn roots_of(p: &Polynomial<Complex64>) -> Vec<Complex64> {
    p.roots().unwrap().expanded()
}

/// Central-difference velocity of the roots of `f(t)` at `t`, matched to
/// `anchors` by nearest neighbour.
pub fn fd_velocity<F>(f: F, t: f64, h: f64, anchors: &[Complex64]) -> Vec<Complex64>
where
    F: Fn(f64) -> Polynomial<Complex64>,
{
    let up = align(anchors, &roots_of(&f(t + h)));
    let down = align(anchors, &roots_of(&f(t - h)));
    up.iter().zip(&down).map(|(a, b)| (a - b) / (2.0 * h)).collect()
}

/// For each `(pole, v)` pair find the reference pole nearest to it and
/// return the largest velocity mismatch.
pub fn max_mismatch(computed: &[(Complex64, Complex64)], poles: &[Complex64], reference: &[Complex64]) -> f64 {
    computed
        .iter()
        .map(|(p, v)| {
            let j = (0..poles.len())
                .min_by(|&a, &b| (poles[a] - p).norm().total_cmp(&(poles[b] - p).norm()))
                .unwrap();
            (v - reference[j]).norm()
        })
        .fold(0.0, f64::max)
}

/// Least-squares slope of `y` against `x`.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64))
        .collect()
}
