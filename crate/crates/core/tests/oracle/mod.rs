//! Brute-force reference: every operator built as a dense Kronecker product,
//! projectors as full 32x32 matrices, partial trace by explicit summation.
//! Shares nothing with the library beyond the complex number type.

#![allow(dead_code)]

use num_complex::Complex64 as C;
use rand::Rng;

pub type Mat = Vec<Vec<C>>;

pub fn zeros(r: usize, c: usize) -> Mat {
    vec![vec![C::new(0.0, 0.0); c]; r]
}

pub fn eye(n: usize) -> Mat {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = C::new(1.0, 0.0);
    }
    m
}

pub fn real2(a: f64, b: f64, c: f64, d: f64) -> Mat {
    vec![vec![C::new(a, 0.0), C::new(b, 0.0)], vec![C::new(c, 0.0), C::new(d, 0.0)]]
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let (ar, ac, br, bc) = (a.len(), a[0].len(), b.len(), b[0].len());
    let mut m = zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            for k in 0..br {
                for l in 0..bc {
                    m[i * br + k][j * bc + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    m
}

pub fn mul(a: &Mat, b: &Mat) -> Mat {
    let mut m = zeros(a.len(), b[0].len());
    for i in 0..a.len() {
        for k in 0..b.len() {
            for j in 0..b[0].len() {
                m[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    m
}

pub fn dag(a: &Mat) -> Mat {
    let mut m = zeros(a[0].len(), a.len());
    for i in 0..a.len() {
        for j in 0..a[0].len() {
            m[j][i] = a[i][j].conj();
        }
    }
    m
}

pub fn add(a: &Mat, b: &Mat) -> Mat {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p + q).collect())
        .collect()
}

pub fn scale(a: &Mat, k: f64) -> Mat {
    a.iter().map(|row| row.iter().map(|x| x * k).collect()).collect()
}

pub fn trace(a: &Mat) -> f64 {
    (0..a.len()).map(|i| a[i][i].re).sum()
}

fn column(v: &[C]) -> Mat {
    v.iter().map(|x| vec![*x]).collect()
}

#[derive(Clone, Copy, Debug)]
pub enum Proto {
    I { omega: f64, q: f64 },
    II { k1: f64, k2: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Chan {
    Adc,
    Bfc,
    Pfc,
}

fn plus_minus(k: f64) -> (f64, f64) {
    (((1.0 + k) / 2.0).sqrt(), ((1.0 - k) / 2.0).sqrt())
}

pub fn measurement(p: Proto, i: usize) -> Mat {
    let (a, b) = match p {
        Proto::I { omega, .. } => ((omega / 2.0).cos(), (omega / 2.0).sin()),
        Proto::II { k1, .. } => plus_minus(k1),
    };
    if i == 0 {
        real2(a, 0.0, 0.0, b)
    } else {
        real2(b, 0.0, 0.0, a)
    }
}

pub fn reversal(p: Proto, i: usize) -> Mat {
    match (p, i) {
        (Proto::I { q, .. }, 0) => real2(q, 0.0, 0.0, 1.0),
        (Proto::I { q, .. }, _) => real2(1.0, 0.0, 0.0, q),
        (Proto::II { k2, .. }, 0) => {
            let (a, b) = plus_minus(k2);
            real2(a, 0.0, 0.0, b)
        }
        (Proto::II { k2, .. }, _) => {
            let (a, b) = plus_minus(k2);
            real2(b, 0.0, 0.0, a)
        }
    }
}

pub fn flip_op(i: usize) -> Mat {
    if i == 0 {
        eye(2)
    } else {
        real2(0.0, 1.0, 1.0, 0.0)
    }
}

pub fn kraus(ch: Chan, r: f64) -> Vec<Mat> {
    let (s, t) = ((1.0 - r).sqrt(), r.sqrt());
    match ch {
        Chan::Adc => vec![real2(1.0, 0.0, 0.0, s), real2(0.0, t, 0.0, 0.0)],
        Chan::Bfc => vec![real2(s, 0.0, 0.0, s), real2(0.0, t, t, 0.0)],
        Chan::Pfc => vec![real2(s, 0.0, 0.0, s), real2(t, 0.0, 0.0, -t)],
    }
}

/// `I (x) I (x) I (x) op` as a 16x16 matrix.
fn on_last(op: &Mat) -> Mat {
    kron(&eye(8), op)
}

fn resource() -> Vec<C> {
    let mut v = vec![C::new(0.0, 0.0); 16];
    for k in [0b0000, 0b0101, 0b1010, 0b1111] {
        v[k] = C::new(0.5, 0.0);
    }
    v
}

/// Normalized 16x16 shared state, or `None` if it vanishes.
/// `coherent` sums all branch amplitudes before forming the projector.
pub fn shared_density(p: Proto, ch: Chan, r: f64, coherent: bool) -> Option<Mat> {
    let psi = column(&resource());
    let mut branches = Vec::new();
    for i in 0..2 {
        for e in kraus(ch, r) {
            let total = [reversal(p, i), flip_op(i), e, flip_op(i), measurement(p, i)]
                .iter()
                .map(on_last)
                .fold(eye(16), |acc, m| mul(&acc, &m));
            branches.push(mul(&total, &psi));
        }
    }
    let rho = if coherent {
        let v = branches.iter().skip(1).fold(branches[0].clone(), |a, b| add(&a, b));
        mul(&v, &dag(&v))
    } else {
        branches.iter().fold(zeros(16, 16), |acc, v| add(&acc, &mul(v, &dag(v))))
    };
    let t = trace(&rho);
    (t > 1e-14).then(|| scale(&rho, 1.0 / t))
}

fn eta(k: usize) -> Vec<C> {
    let (plus, minus, sign) = match k {
        0 => ([0b0000, 0b0101], [0b1010, 0b1111], 1.0),
        1 => ([0b0000, 0b0101], [0b1010, 0b1111], -1.0),
        2 => ([0b0010, 0b0111], [0b1000, 0b1101], 1.0),
        _ => ([0b0010, 0b0111], [0b1000, 0b1101], -1.0),
    };
    let mut v = vec![C::new(0.0, 0.0); 16];
    for x in plus {
        v[x] = C::new(0.5, 0.0);
    }
    for x in minus {
        v[x] = C::new(0.5 * sign, 0.0);
    }
    v
}

pub fn correction(k: usize) -> Mat {
    let z = real2(1.0, 0.0, 0.0, -1.0);
    let x = real2(0.0, 1.0, 1.0, 0.0);
    match k {
        0 => eye(2),
        1 => z,
        2 => x,
        _ => mul(&z, &x),
    }
}

/// Bob's unnormalized state for outcome `k` when the input density is `|a><b|`.
pub type Maps = Vec<Vec<Vec<Mat>>>;

pub fn bob_maps(shared: &Mat) -> Maps {
    let mut out = vec![vec![vec![zeros(2, 2); 2]; 2]; 4];
    for k in 0..4 {
        let e = column(&eta(k));
        let proj = kron(&mul(&e, &dag(&e)), &eye(2));
        for a in 0..2 {
            for b in 0..2 {
                let mut unit = zeros(2, 2);
                unit[a][b] = C::new(1.0, 0.0);
                let joint = kron(&unit, shared);
                let y = mul(&mul(&proj, &joint), &proj);
                let mut bob = zeros(2, 2);
                for x in 0..16 {
                    for b1 in 0..2 {
                        for b2 in 0..2 {
                            bob[b1][b2] += y[x * 2 + b1][x * 2 + b2];
                        }
                    }
                }
                out[k][a][b] = bob;
            }
        }
    }
    out
}

pub fn fidelity(maps: &Maps, alpha: C, beta: C) -> f64 {
    let amp = [alpha, beta];
    let mut total = 0.0;
    for (k, per_k) in maps.iter().enumerate() {
        let mut rho = zeros(2, 2);
        for a in 0..2 {
            for b in 0..2 {
                let w = amp[a] * amp[b].conj();
                for i in 0..2 {
                    for j in 0..2 {
                        rho[i][j] += w * per_k[a][b][i][j];
                    }
                }
            }
        }
        let p = trace(&rho);
        if p < 1e-14 {
            continue;
        }
        let u = correction(k);
        let s = scale(&mul(&mul(&u, &rho), &dag(&u)), 1.0 / p);
        let mut f = C::new(0.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                f += amp[i].conj() * s[i][j] * amp[j];
            }
        }
        total += p * f.re;
    }
    total
}

/// Mean and standard error of F over `n` Haar-random inputs.
pub fn monte_carlo<R: Rng>(maps: &Maps, n: usize, rng: &mut R) -> (f64, f64) {
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..n {
        let cos_t: f64 = 2.0 * rng.gen::<f64>() - 1.0;
        let phi = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
        let half = cos_t.acos() / 2.0;
        let f = fidelity(maps, C::new(half.cos(), 0.0), C::from_polar(half.sin(), phi));
        s += f;
        s2 += f * f;
    }
    let nf = n as f64;
    let mean = s / nf;
    let var = ((s2 - nf * mean * mean) / (nf - 1.0)).max(0.0);
    (mean, (var / nf).sqrt())
}
