//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use coiso_core::{Body, FourierLoop};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Composite Gauss–Legendre rule on `[a, b]`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let rule = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut s = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for (x, w) in &rule {
            s += w * f(mid + 0.5 * h * x);
        }
    }
    0.5 * h * s
}

/// `1/2 int_0^1 <-J x', x> dt` by quadrature.
pub fn quadrature_action(w: &FourierLoop) -> f64 {
    let n = w.idx().n();
    integrate(
        |t| {
            let x = w.evaluate(t);
            let v = w.velocity(t);
            let (x, v) = (x.as_slice(), v.as_slice());
            // <-J v, x> with J(q, p) = (p, -q)
            (0..n)
                .map(|i| -v[n + i] * x[i] + v[i] * x[n + i])
                .sum::<f64>()
                * 0.5
        },
        0.0,
        1.0,
        400,
        10,
    )
}

pub fn gaussian_vec(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| StandardNormal.sample(rng)).collect()
}

pub fn unit_vec(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    let v = gaussian_vec(rng, d);
    let l = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / l).collect()
}

/// A random loop with coefficient size decaying like `1/m`.
pub fn random_loop(rng: &mut ChaCha8Rng, idx: coiso_core::CoisoIndex, modes: usize) -> FourierLoop {
    let len = FourierLoop::coeff_len(idx, modes);
    let per = len / (2 * modes);
    let mut c = gaussian_vec(rng, len);
    for (j, x) in c.iter_mut().enumerate() {
        let b = j / per;
        let m = if b < modes { modes - b } else { b - modes + 1 };
        *x /= m as f64;
    }
    FourierLoop::from_coeffs(idx, modes, &c).unwrap()
}

/// `sup_z <w, z> - H(z)` by brute force over rays.
///
/// Along the ray through `u` the supremum is `<w, u>^2 / (4 H(u))` exactly, so
/// only the direction is searched: random sampling followed by an adaptive
/// random hill climb on the sphere.
pub fn brute_legendre(body: &Body, w: &[f64], rng: &mut ChaCha8Rng) -> f64 {
    let d = w.len();
    let phi = |u: &[f64]| {
        let s: f64 = u.iter().zip(w).map(|(a, b)| a * b).sum();
        if s <= 0.0 {
            return 0.0;
        }
        s * s / (4.0 * body.hamiltonian(u))
    };
    let mut best = w.to_vec();
    let mut fbest = phi(&best);
    for _ in 0..4000 {
        let u = unit_vec(rng, d);
        let f = phi(&u);
        if f > fbest {
            fbest = f;
            best = u;
        }
    }
    let mut step = 0.1;
    let mut misses = 0;
    while step > 1e-9 {
        let mut u: Vec<f64> = best
            .iter()
            .map(|x| {
                let g: f64 = StandardNormal.sample(rng);
                x + step * g
            })
            .collect();
        let l = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        u.iter_mut().for_each(|x| *x /= l);
        let f = phi(&u);
        if f > fbest {
            fbest = f;
            best = u;
            misses = 0;
        } else {
            misses += 1;
            if misses > 40 {
                step *= 0.5;
                misses = 0;
            }
        }
    }
    fbest
}

/// Central-difference gradient.
pub fn fd_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    (0..x.len())
        .map(|i| {
            y[i] = x[i] + h;
            let fp = f(&y);
            y[i] = x[i] - h;
            let fm = f(&y);
            y[i] = x[i];
            (fp - fm) / (2.0 * h)
        })
        .collect()
}

pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let diff = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt();
    let scale = b.iter().map(|y| y * y).sum::<f64>().sqrt().max(1e-12);
    diff / scale
}

/// A smooth body drawn at random: round ball, diagonal ellipsoid, rotated
/// ellipsoid or lp ball with `p` in `{3, 4}`.
pub fn random_smooth_body(rng: &mut ChaCha8Rng, n: usize) -> Body {
    let radii: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.0)).collect();
    match rng.random_range(0..4) {
        0 => Body::ball(n, radii[0]).unwrap(),
        1 => Body::ellipsoid(&radii).unwrap(),
        2 => {
            let d = 2 * n;
            let a: nalgebra::DMatrix<f64> =
                nalgebra::DMatrix::from_fn(d, d, |_, _| StandardNormal.sample(rng));
            let q = &a * a.transpose() + nalgebra::DMatrix::identity(d, d) * 0.5;
            Body::ellipsoid_matrix(q).unwrap()
        }
        _ => Body::lp_ball(if rng.random_bool(0.5) { 3.0 } else { 4.0 }, &radii).unwrap(),
    }
}
