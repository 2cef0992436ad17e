//! Dense-matrix reference implementation used as a test oracle.
//!
//! Everything here is built from explicit 2x2 factors and Kronecker products,
//! sharing no code with the library's bit-twiddling kernels. Qubit `n-1` is
//! the leftmost tensor factor so that basis index bit `i` is qubit `i`.

#![allow(dead_code)]

use num_complex::Complex64;

pub type Matrix = Vec<Vec<Complex64>>;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn identity(dim: usize) -> Matrix {
    (0..dim)
        .map(|i| (0..dim).map(|j| if i == j { c(1.0) } else { c(0.0) }).collect())
        .collect()
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ra, rb) = (a.len(), b.len());
    let mut out = vec![vec![c(0.0); ra * rb]; ra * rb];
    for i in 0..ra {
        for j in 0..ra {
            for k in 0..rb {
                for l in 0..rb {
                    out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

/// `⊗_{q=n-1..0} factor(q)`.
pub fn tensor(n: usize, factor: impl Fn(usize) -> Matrix) -> Matrix {
    let mut m = vec![vec![c(1.0)]];
    for q in (0..n).rev() {
        m = kron(&m, &factor(q));
    }
    m
}

pub fn add(a: &Matrix, b: &Matrix) -> Matrix {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(u, v)| u + v).collect())
        .collect()
}

pub fn matvec(m: &Matrix, v: &[Complex64]) -> Vec<Complex64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// `<u|M|v>`.
pub fn sandwich(u: &[Complex64], m: &Matrix, v: &[Complex64]) -> Complex64 {
    u.iter().zip(matvec(m, v)).map(|(a, b)| a.conj() * b).sum()
}

pub fn i2() -> Matrix {
    identity(2)
}
pub fn pauli_z() -> Matrix {
    vec![vec![c(1.0), c(0.0)], vec![c(0.0), c(-1.0)]]
}
pub fn pauli_x() -> Matrix {
    vec![vec![c(0.0), c(1.0)], vec![c(1.0), c(0.0)]]
}
pub fn ket0bra0() -> Matrix {
    vec![vec![c(1.0), c(0.0)], vec![c(0.0), c(0.0)]]
}
pub fn ket1bra1() -> Matrix {
    vec![vec![c(0.0), c(0.0)], vec![c(0.0), c(1.0)]]
}
pub fn hadamard() -> Matrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    vec![vec![c(s), c(s)], vec![c(s), c(-s)]]
}
pub fn ry(theta: f64) -> Matrix {
    let (s, co) = (theta / 2.0).sin_cos();
    vec![vec![c(co), c(-s)], vec![c(s), c(co)]]
}
pub fn rz(phi: f64) -> Matrix {
    vec![
        vec![Complex64::from_polar(1.0, -phi / 2.0), c(0.0)],
        vec![c(0.0), Complex64::from_polar(1.0, phi / 2.0)],
    ]
}

pub fn single(n: usize, qubit: usize, u: &Matrix) -> Matrix {
    tensor(n, |q| if q == qubit { u.clone() } else { i2() })
}

pub fn cnot(n: usize, control: usize, target: usize) -> Matrix {
    let off = tensor(n, |q| if q == control { ket0bra0() } else { i2() });
    let on = tensor(n, |q| match q {
        _ if q == control => ket1bra1(),
        _ if q == target => pauli_x(),
        _ => i2(),
    });
    add(&off, &on)
}

pub fn cz(n: usize, a: usize, b: usize) -> Matrix {
    let off = tensor(n, |q| if q == a { ket0bra0() } else { i2() });
    let on = tensor(n, |q| match q {
        _ if q == a => ket1bra1(),
        _ if q == b => pauli_z(),
        _ => i2(),
    });
    add(&off, &on)
}

/// `Z` on every qubit of `support`, identity elsewhere.
pub fn zstring(n: usize, support: &[usize]) -> Matrix {
    tensor(n, |q| if support.contains(&q) { pauli_z() } else { i2() })
}

/// `|0><0|` on `qubit`, identity elsewhere.
pub fn up_projector(n: usize, qubit: usize) -> Matrix {
    tensor(n, |q| if q == qubit { ket0bra0() } else { i2() })
}

pub fn zero_ket(n: usize) -> Vec<Complex64> {
    let mut v = vec![c(0.0); 1 << n];
    v[0] = c(1.0);
    v
}

/// Estimator quantities from explicit `A` and `P↑` matrices.
#[derive(Debug, Clone, Copy)]
pub struct DenseMetrics {
    pub projected: f64,
    pub full: f64,
    pub overlap: f64,
    pub ratio: f64,
}

pub fn dense_metrics(r: &[Complex64], a: &Matrix, p: &Matrix) -> DenseMetrics {
    let dim = r.len();
    let n = dim.trailing_zeros() as i32;
    let pr = matvec(p, r);
    let projected = sandwich(&pr, a, &pr).re;
    let expectation = sandwich(r, a, r).re;
    let nonzero: Matrix = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| {
                    if i == j && a[i][i].norm() != 0.0 {
                        c(1.0)
                    } else {
                        c(0.0)
                    }
                })
                .collect()
        })
        .collect();
    let abs_a: Matrix = (0..dim)
        .map(|i| (0..dim).map(|j| c(a[i][j].norm())).collect())
        .collect();
    DenseMetrics {
        projected,
        full: projected / 2f64.powi(n - 1) - expectation / 2f64.powi(n),
        overlap: sandwich(&pr, &nonzero, &pr).re,
        ratio: projected / sandwich(&pr, &abs_a, &pr).re,
    }
}

/// In-place 2x2 update on `qubit`, by explicit index pairs.
pub fn apply_1q(state: &mut [Complex64], qubit: usize, u: &Matrix) {
    let stride = 1usize << qubit;
    for z in 0..state.len() {
        if z & stride == 0 {
            let (a0, a1) = (state[z], state[z | stride]);
            state[z] = u[0][0] * a0 + u[0][1] * a1;
            state[z | stride] = u[1][0] * a0 + u[1][1] * a1;
        }
    }
}

/// `u` on `target` wherever `control` reads 1.
pub fn apply_controlled(state: &mut [Complex64], control: usize, target: usize, u: &Matrix) {
    let (cbit, tbit) = (1usize << control, 1usize << target);
    for z in 0..state.len() {
        if z & cbit != 0 && z & tbit == 0 {
            let (a0, a1) = (state[z], state[z | tbit]);
            state[z] = u[0][0] * a0 + u[0][1] * a1;
            state[z | tbit] = u[1][0] * a0 + u[1][1] * a1;
        }
    }
}

/// Minimal OpenQASM 2.0 interpreter for `h x ry rz cx cz` on one register.
pub fn run_qasm(text: &str) -> Vec<Complex64> {
    let mut state: Option<Vec<Complex64>> = None;
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        let body = line.strip_suffix(';').unwrap_or_else(|| panic!("missing ';': {line}"));
        if body.starts_with("OPENQASM") || body.starts_with("include") {
            continue;
        }
        if let Some(size) = body.strip_prefix("qreg q[") {
            let n: usize = size.trim_end_matches(']').parse().unwrap();
            state = Some(zero_ket(n));
            continue;
        }
        let s = state.as_mut().expect("qreg before gates");
        let (head, args) = body.split_once(' ').unwrap();
        let qubits: Vec<usize> = args
            .split(',')
            .map(|a| a.trim().trim_start_matches("q[").trim_end_matches(']').parse().unwrap())
            .collect();
        let (name, param) = match head.split_once('(') {
            Some((name, rest)) => (name, Some(rest.trim_end_matches(')').parse::<f64>().unwrap())),
            None => (head, None),
        };
        match (name, param, qubits.as_slice()) {
            ("h", None, &[q]) => apply_1q(s, q, &hadamard()),
            ("x", None, &[q]) => apply_1q(s, q, &pauli_x()),
            ("ry", Some(t), &[q]) => apply_1q(s, q, &ry(t)),
            ("rz", Some(p), &[q]) => apply_1q(s, q, &rz(p)),
            ("cx", None, &[a, b]) => apply_controlled(s, a, b, &pauli_x()),
            ("cz", None, &[a, b]) => apply_controlled(s, a, b, &pauli_z()),
            _ => panic!("unsupported statement: {line}"),
        }
    }
    state.expect("no qreg")
}

/// `|<a|b>|`, which is 1 iff the states agree up to a global phase.
pub fn overlap_magnitude(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>().norm()
}
