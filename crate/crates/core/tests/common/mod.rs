//! Reference computations that share no code with the library: dense
//! matrix exponential, characteristic-polynomial eigenvalues, adaptive
//! quadrature, finite differences and rank correlation.

#![allow(dead_code)]

use kicktop_core::c64;

pub type CMat = Vec<Vec<c64>>;

pub fn zeros(n: usize) -> CMat {
    vec![vec![c64::new(0.0, 0.0); n]; n]
}

pub fn identity(n: usize) -> CMat {
    let mut m = zeros(n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = c64::new(1.0, 0.0);
    }
    m
}

pub fn matmul(a: &CMat, b: &CMat) -> CMat {
    let n = a.len();
    let mut out = zeros(n);
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            for j in 0..n {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

fn scale(a: &CMat, s: c64) -> CMat {
    a.iter().map(|r| r.iter().map(|z| z * s).collect()).collect()
}

fn add(a: &CMat, b: &CMat) -> CMat {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect())
        .collect()
}

fn max_norm(a: &CMat) -> f64 {
    a.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `J_x` in the Dicke basis ordered `m = -j, ..., j`, from the ladder formula.
pub fn jx_matrix(twice_j: u32) -> CMat {
    let j = twice_j as f64 / 2.0;
    let n = twice_j as usize + 1;
    let mut m = zeros(n);
    for i in 0..n - 1 {
        let mm = -j + i as f64;
        let r = 0.5 * (j * (j + 1.0) - mm * (mm + 1.0)).sqrt();
        m[i + 1][i] = c64::new(r, 0.0);
        m[i][i + 1] = c64::new(r, 0.0);
    }
    m
}

/// `exp(a)` by scaling and squaring with a degree-30 Taylor series.
pub fn expm(a: &CMat) -> CMat {
    let n = a.len();
    let norm = max_norm(a) * n as f64;
    let mut s = 0;
    while norm / 2f64.powi(s) > 0.25 {
        s += 1;
    }
    let a = scale(a, c64::new(2f64.powi(-s), 0.0));
    let mut term = identity(n);
    let mut sum = identity(n);
    for k in 1..=30 {
        term = scale(&matmul(&term, &a), c64::new(1.0 / k as f64, 0.0));
        sum = add(&sum, &term);
    }
    for _ in 0..s {
        sum = matmul(&sum, &sum);
    }
    sum
}

/// `exp(-i alpha J_x)`.
pub fn rotation_x(twice_j: u32, alpha: f64) -> CMat {
    expm(&scale(&jx_matrix(twice_j), c64::new(0.0, -alpha)))
}

/// Floquet matrix `diag(exp(-i kappa m^2/(2j))) exp(-i alpha J_x)` for integer `j`.
pub fn floquet_matrix(j: u32, kappa: f64, alpha: f64) -> CMat {
    let d = rotation_x(2 * j, alpha);
    let jf = j as f64;
    d.iter()
        .enumerate()
        .map(|(r, row)| {
            let m = -jf + r as f64;
            let ph = c64::from_polar(1.0, -kappa * m * m / (2.0 * jf));
            row.iter().map(|z| ph * z).collect()
        })
        .collect()
}

/// Coefficients `c_0..c_n` of `det(z I - A) = sum c_k z^k` (monic) by the
/// Faddeev-LeVerrier recursion.
pub fn characteristic_polynomial(a: &CMat) -> Vec<c64> {
    let n = a.len();
    let mut coeffs = vec![c64::new(0.0, 0.0); n + 1];
    coeffs[n] = c64::new(1.0, 0.0);
    let mut m = zeros(n);
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = matmul(a, &m);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += coeffs[n - k + 1];
        }
        m = next;
        let am = matmul(a, &m);
        let tr: c64 = (0..n).map(|i| am[i][i]).sum();
        coeffs[n - k] = -tr / k as f64;
    }
    coeffs
}

fn horner(coeffs: &[c64], z: c64) -> (c64, c64) {
    let mut p = c64::new(0.0, 0.0);
    let mut dp = c64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// All roots of a monic polynomial by Durand-Kerner iteration followed by
/// Newton polishing.
pub fn polynomial_roots(coeffs: &[c64]) -> Vec<c64> {
    let n = coeffs.len() - 1;
    let seed = c64::new(0.4, 0.9);
    let mut roots: Vec<c64> = (0..n).map(|k| seed.powu(k as u32)).collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let (p, _) = horner(coeffs, roots[i]);
            let mut den = c64::new(1.0, 0.0);
            for k in 0..n {
                if k != i {
                    den *= roots[i] - roots[k];
                }
            }
            let step = p / den;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    for r in roots.iter_mut() {
        for _ in 0..5 {
            let (p, dp) = horner(coeffs, *r);
            if dp.norm() == 0.0 {
                break;
            }
            *r -= p / dp;
        }
    }
    roots
}

/// Sorted eigenphases of a small unitary, in `[-pi, pi)`.
pub fn brute_force_eigenphases(u: &CMat) -> Vec<f64> {
    let mut ph: Vec<f64> = polynomial_roots(&characteristic_polynomial(u))
        .iter()
        .map(|z| {
            let a = z.arg();
            if a >= std::f64::consts::PI {
                a - 2.0 * std::f64::consts::PI
            } else {
                a
            }
        })
        .collect();
    ph.sort_by(f64::total_cmp);
    ph
}

/// Distance between two phases on the circle.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * std::f64::consts::PI);
    d.min(2.0 * std::f64::consts::PI - d)
}

/// Adaptive Simpson quadrature on `[a, b]`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let diff = left + right - whole;
        if depth == 0 || diff.abs() <= 15.0 * tol {
            return left + right + diff / 15.0;
        }
        rec(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1)
            + rec(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    rec(f, a, fa, b, fb, m, fm, whole, tol, 50)
}

/// `int_0^inf f` by splitting at unit intervals until the tail is negligible.
pub fn integrate_half_line(f: &dyn Fn(f64) -> f64, tol: f64) -> f64 {
    let mut total = 0.0;
    let mut a = 0.0;
    let mut width = 0.5;
    loop {
        let piece = integrate(f, a, a + width, tol * 1e-2);
        total += piece;
        a += width;
        if a > 20.0 && piece.abs() < tol * 1e-3 {
            return total;
        }
        width = (width * 1.5).min(4.0);
    }
}

/// Central-difference Jacobian of a map `R^3 -> R^3`.
pub fn fd_jacobian(f: &dyn Fn([f64; 3]) -> [f64; 3], x: [f64; 3], h: f64) -> [[f64; 3]; 3] {
    let mut jac = [[0.0; 3]; 3];
    for c in 0..3 {
        let mut xp = x;
        let mut xm = x;
        xp[c] += h;
        xm[c] -= h;
        let (fp, fm) = (f(xp), f(xm));
        for r in 0..3 {
            jac[r][c] = (fp[r] - fm[r]) / (2.0 * h);
        }
    }
    jac
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&x, &y| v[x].total_cmp(&v[y]));
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut k = i;
            while k + 1 < idx.len() && v[idx[k + 1]] == v[idx[i]] {
                k += 1;
            }
            for t in i..=k {
                r[idx[t]] = 0.5 * (i + k) as f64;
            }
            i = k + 1;
        }
        r
    }
    let (ra, rb) = (ranks(a), ranks(b));
    let n = a.len() as f64;
    let ma = ra.iter().sum::<f64>() / n;
    let mb = rb.iter().sum::<f64>() / n;
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

/// Squared coherent-state amplitudes from the binomial law, computed
/// directly in floating point (small j only).
pub fn coherent_probabilities(j: u32, theta: f64) -> Vec<f64> {
    let n = 2 * j;
    let (s, c) = ((theta / 2.0).sin(), (theta / 2.0).cos());
    (0..=n)
        .map(|i| {
            // index i is m = i - j, so j - m = n - i
            let k = n - i;
            let mut binom = 1.0;
            for t in 0..k {
                binom *= (n - t) as f64 / (t + 1) as f64;
            }
            binom * s.powi(k as i32 * 2) * c.powi(i as i32 * 2)
        })
        .collect()
}

#[test]
fn oracles_self_check() {
    // expm of a diagonal
    let mut d = zeros(2);
    d[0][0] = c64::new(0.0, 1.0);
    d[1][1] = c64::new(-0.5, 0.0);
    let e = expm(&d);
    assert!((e[0][0] - c64::from_polar(1.0, 1.0)).norm() < 1e-14);
    assert!((e[1][1] - c64::new((-0.5f64).exp(), 0.0)).norm() < 1e-14);
    // roots of (z-1)(z+2)(z-i)
    let i = c64::new(0.0, 1.0);
    let one = c64::new(1.0, 0.0);
    // z^3 + (1 - i) z^2 + (-2 - i) z + 2i
    let coeffs = vec![2.0 * i, c64::new(-2.0, -1.0), c64::new(1.0, -1.0), one];
    let mut roots = polynomial_roots(&coeffs);
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    assert!((roots[0] - c64::new(-2.0, 0.0)).norm() < 1e-12);
    assert!((roots[1] - i).norm() < 1e-12);
    assert!((roots[2] - one).norm() < 1e-12);
    // quadrature
    let v = integrate_half_line(&|x: f64| (-x).exp(), 1e-12);
    assert!((v - 1.0).abs() < 1e-10);
    assert!((spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 25.0]) - 1.0).abs() < 1e-15);
}
