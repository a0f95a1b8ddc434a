//! Small dense matrices.
//!
//! Everything here is sized at compile time: the symbol is 4×4 and the
//! full velocity symbol is at most 6×6. Arithmetic and the cofactor
//! determinant work over any [`Field`]; norms, solves and the exponential
//! need [`Real`].

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;

use crate::scalar::{Field, Real};

/// Row-major `N×N` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T, const N: usize>(pub [[T; N]; N]);

impl<T: Field, const N: usize> Matrix<T, N> {
    pub fn zeros() -> Self {
        Matrix(std::array::from_fn(|_| std::array::from_fn(|_| T::zero())))
    }

    pub fn identity() -> Self {
        Matrix(std::array::from_fn(|i| {
            std::array::from_fn(|j| if i == j { T::one() } else { T::zero() })
        }))
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> T) -> Self {
        Matrix(std::array::from_fn(|i| std::array::from_fn(|j| f(i, j))))
    }

    pub fn scale(&self, s: &T) -> Self {
        Self::from_fn(|i, j| self.0[i][j].clone() * s.clone())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i].clone())
    }

    pub fn trace(&self) -> T {
        (0..N).fold(T::zero(), |acc, i| acc + self.0[i][i].clone())
    }

    pub fn mul_vec(&self, v: &[T; N]) -> [T; N] {
        std::array::from_fn(|i| {
            (0..N).fold(T::zero(), |acc, j| acc + self.0[i][j].clone() * v[j].clone())
        })
    }

    /// Determinant by cofactor expansion; exact in exact arithmetic.
    pub fn det(&self) -> T {
        let rows: Vec<Vec<T>> = self.0.iter().map(|r| r.to_vec()).collect();
        det_cofactor(&rows)
    }
}

/// Cofactor-expansion determinant of a square matrix given as rows.
pub fn det_cofactor<T: Field>(m: &[Vec<T>]) -> T {
    let n = m.len();
    match n {
        0 => T::one(),
        1 => m[0][0].clone(),
        2 => m[0][0].clone() * m[1][1].clone() - m[0][1].clone() * m[1][0].clone(),
        _ => {
            let mut acc = T::zero();
            for col in 0..n {
                if m[0][col] == T::zero() {
                    continue;
                }
                let minor: Vec<Vec<T>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(j, _)| *j != col)
                            .map(|(_, v)| v.clone())
                            .collect()
                    })
                    .collect();
                let term = m[0][col].clone() * det_cofactor(&minor);
                if col % 2 == 0 {
                    acc = acc + term;
                } else {
                    acc = acc - term;
                }
            }
            acc
        }
    }
}

impl<T, const N: usize> Index<(usize, usize)> for Matrix<T, N> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.0[i][j]
    }
}

impl<T, const N: usize> IndexMut<(usize, usize)> for Matrix<T, N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.0[i][j]
    }
}

impl<T: Field, const N: usize> Add for &Matrix<T, N> {
    type Output = Matrix<T, N>;
    fn add(self, rhs: Self) -> Matrix<T, N> {
        Matrix::from_fn(|i, j| self.0[i][j].clone() + rhs.0[i][j].clone())
    }
}

impl<T: Field, const N: usize> Sub for &Matrix<T, N> {
    type Output = Matrix<T, N>;
    fn sub(self, rhs: Self) -> Matrix<T, N> {
        Matrix::from_fn(|i, j| self.0[i][j].clone() - rhs.0[i][j].clone())
    }
}

impl<T: Field, const N: usize> Mul for &Matrix<T, N> {
    type Output = Matrix<T, N>;
    fn mul(self, rhs: Self) -> Matrix<T, N> {
        Matrix::from_fn(|i, j| {
            (0..N).fold(T::zero(), |acc, k| acc + self.0[i][k].clone() * rhs.0[k][j].clone())
        })
    }
}

impl<T: Real, const N: usize> Matrix<T, N> {
    /// Induced 1-norm (max column sum).
    pub fn norm1(&self) -> T {
        (0..N)
            .map(|j| (0..N).map(|i| self.0[i][j].abs()).sum::<T>())
            .fold(T::zero(), T::max)
    }

    pub fn norm_inf(&self) -> T {
        self.transpose().norm1()
    }

    pub fn norm_fro(&self) -> T {
        self.0
            .iter()
            .flat_map(|r| r.iter())
            .map(|v| *v * *v)
            .sum::<T>()
            .sqrt()
    }

    /// Spectral norm, via power iteration on `MᵀM` started from every basis
    /// vector. Adequate for the well-separated top singular values seen here.
    pub fn norm2(&self) -> T {
        let gram = &self.transpose() * self;
        let mut best = T::zero();
        for start in 0..N {
            let mut v: [T; N] = std::array::from_fn(|i| if i == start { T::one() } else { T::lit(0.1) });
            let mut lambda = T::zero();
            for _ in 0..200 {
                let w = gram.mul_vec(&v);
                let n = w.iter().map(|x| *x * *x).sum::<T>().sqrt();
                if n == T::zero() {
                    break;
                }
                let next = n;
                v = std::array::from_fn(|i| w[i] / n);
                if (next - lambda).abs() <= T::lit(1e-15) * next {
                    lambda = next;
                    break;
                }
                lambda = next;
            }
            best = best.max(lambda);
        }
        best.sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flat_map(|r| r.iter()).all(|v| v.is_finite())
    }

    /// Solves `self · X = rhs` by LU with partial pivoting.
    pub fn solve(&self, rhs: &Self) -> Option<Self> {
        let mut a = self.0;
        let mut b = rhs.0;
        for col in 0..N {
            let pivot = (col..N)
                .max_by(|&p, &q| a[p][col].abs().partial_cmp(&a[q][col].abs()).unwrap_or(std::cmp::Ordering::Equal))?;
            if a[pivot][col] == T::zero() || !a[pivot][col].is_finite() {
                return None;
            }
            a.swap(col, pivot);
            b.swap(col, pivot);
            for row in col + 1..N {
                let f = a[row][col] / a[col][col];
                if f == T::zero() {
                    continue;
                }
                for k in col..N {
                    let v = a[col][k];
                    a[row][k] -= f * v;
                }
                for k in 0..N {
                    let v = b[col][k];
                    b[row][k] -= f * v;
                }
            }
        }
        let mut x = [[T::zero(); N]; N];
        for k in 0..N {
            for row in (0..N).rev() {
                let mut s = b[row][k];
                for c in row + 1..N {
                    s -= a[row][c] * x[c][k];
                }
                x[row][k] = s / a[row][row];
            }
        }
        Some(Matrix(x))
    }

    /// Matrix exponential by scaling and squaring with the degree-13 Padé
    /// approximant. Returns `None` if the result is not finite.
    pub fn expm(&self) -> Option<Self> {
        // Padé [13/13] coefficients.
        const B: [f64; 14] = [
            64764752532480000.0,
            32382376266240000.0,
            7771770303897600.0,
            1187353796428800.0,
            129060195264000.0,
            10559470521600.0,
            670442572800.0,
            33522128640.0,
            1323241920.0,
            40840800.0,
            960960.0,
            16380.0,
            182.0,
            1.0,
        ];
        const THETA_13: f64 = 5.371920351148152;
        let norm = self.norm1();
        if !norm.is_finite() {
            return None;
        }
        let mut squarings = 0i32;
        if norm > T::lit(THETA_13) {
            let s = (norm / T::lit(THETA_13)).log2().ceil();
            squarings = s.to_f64_lossy() as i32;
            if squarings > 1000 {
                return None;
            }
        }
        let a = self.scale(&T::lit(2f64.powi(-squarings)));
        let b = |k: usize| T::lit(B[k]);
        let id = Self::identity();
        let a2 = &a * &a;
        let a4 = &a2 * &a2;
        let a6 = &a4 * &a2;
        let lin = |c: [usize; 4]| -> Self {
            Self::from_fn(|i, j| {
                b(c[0]) * a6.0[i][j] + b(c[1]) * a4.0[i][j] + b(c[2]) * a2.0[i][j] + b(c[3]) * id.0[i][j]
            })
        };
        let u_inner = &a6 * &Self::from_fn(|i, j| b(13) * a6.0[i][j] + b(11) * a4.0[i][j] + b(9) * a2.0[i][j]);
        let u_poly = &u_inner + &lin([7, 5, 3, 1]);
        let u = &a * &u_poly;
        let v_inner = &a6 * &Self::from_fn(|i, j| b(12) * a6.0[i][j] + b(10) * a4.0[i][j] + b(8) * a2.0[i][j]);
        let v = &v_inner + &lin([6, 4, 2, 0]);
        let p = &v + &u;
        let q = &v - &u;
        let mut r = q.solve(&p)?;
        for _ in 0..squarings {
            r = &r * &r;
        }
        r.is_finite().then_some(r)
    }
}

impl<T: Real, const N: usize> Matrix<T, N> {
    /// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
    /// Only the upper triangle is read.
    pub fn symmetric_eigenvalues(&self) -> [T; N] {
        let mut a = self.0;
        for i in 0..N {
            for j in 0..i {
                a[i][j] = a[j][i];
            }
        }
        for _ in 0..100 {
            let off: T = (0..N).flat_map(|i| (i + 1..N).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
            let diag: T = (0..N).map(|i| a[i][i] * a[i][i]).sum();
            if off <= T::unit_roundoff() * T::unit_roundoff() * diag || off == T::zero() {
                break;
            }
            for p in 0..N {
                for q in p + 1..N {
                    if a[p][q] == T::zero() {
                        continue;
                    }
                    let theta = (a[q][q] - a[p][p]) / (T::lit(2.0) * a[p][q]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    let c = T::one() / (t * t + T::one()).sqrt();
                    let s = t * c;
                    for k in 0..N {
                        let (akp, akq) = (a[k][p], a[k][q]);
                        a[k][p] = c * akp - s * akq;
                        a[k][q] = s * akp + c * akq;
                    }
                    for k in 0..N {
                        let (apk, aqk) = (a[p][k], a[q][k]);
                        a[p][k] = c * apk - s * aqk;
                        a[q][k] = s * apk + c * aqk;
                    }
                }
            }
        }
        let mut ev: [T; N] = std::array::from_fn(|i| a[i][i]);
        ev.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
        ev
    }
}

/// Complex `N×N` matrix product, used for the full velocity symbol.
pub fn complex_matmul<T: Real, const N: usize>(
    a: &[[Complex<T>; N]; N],
    b: &[[Complex<T>; N]; N],
) -> [[Complex<T>; N]; N] {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| (0..N).fold(Complex::new(T::zero(), T::zero()), |acc, k| acc + a[i][k] * b[k][j]))
    })
}

/// Eigenvalues of a general real matrix: diagonal balancing by powers of
/// two, reduction to Hessenberg form by stabilized elimination, then
/// [`hessenberg_eigenvalues`].
pub fn general_eigenvalues<T: Real, const N: usize>(m: &Matrix<T, N>) -> Option<Vec<Complex<T>>> {
    let mut a: Vec<Vec<T>> = m.0.iter().map(|r| r.to_vec()).collect();
    let two = T::lit(2.0);
    loop {
        let mut done = true;
        for i in 0..N {
            let c: T = (0..N).filter(|&j| j != i).map(|j| a[j][i].abs()).sum();
            let r: T = (0..N).filter(|&j| j != i).map(|j| a[i][j].abs()).sum();
            if c == T::zero() || r == T::zero() {
                continue;
            }
            let s = c + r;
            let (mut c, mut f) = (c, T::one());
            while c < r / two {
                f *= two;
                c *= two * two;
            }
            while c > r * two {
                f /= two;
                c /= two * two;
            }
            if (c + r / f) < T::lit(0.95) * s {
                done = false;
                for j in 0..N {
                    a[i][j] /= f;
                    a[j][i] *= f;
                }
            }
        }
        if done {
            break;
        }
    }
    for m in 1..N.saturating_sub(1) {
        let mut x = T::zero();
        let mut piv = m;
        for j in m..N {
            if a[j][m - 1].abs() > x.abs() {
                x = a[j][m - 1];
                piv = j;
            }
        }
        if piv != m {
            a.swap(piv, m);
            for row in a.iter_mut() {
                row.swap(piv, m);
            }
        }
        if x != T::zero() {
            for i in m + 1..N {
                let y = a[i][m - 1] / x;
                if y == T::zero() {
                    continue;
                }
                a[i][m - 1] = T::zero();
                for j in m..N {
                    let v = a[m][j];
                    a[i][j] -= y * v;
                }
                for row in a.iter_mut() {
                    let v = row[i];
                    row[m] += y * v;
                }
            }
        }
    }
    hessenberg_eigenvalues(&mut a)
}

/// Eigenvalues of a real upper-Hessenberg matrix by the Francis double-shift
/// QR iteration. `h` is overwritten. Returns `None` when an eigenvalue fails
/// to deflate within the iteration budget.
pub fn hessenberg_eigenvalues<T: Real>(h: &mut [Vec<T>]) -> Option<Vec<Complex<T>>> {
    let n = h.len();
    let mut out = vec![Complex::new(T::zero(), T::zero()); n];
    if n == 0 {
        return Some(out);
    }
    let eps = T::unit_roundoff();
    let anorm = h
        .iter()
        .enumerate()
        .flat_map(|(i, row)| row.iter().enumerate().filter(move |(j, _)| *j + 1 >= i).map(|(_, v)| v.abs()))
        .sum::<T>();
    let mut nn = n as isize - 1;
    let mut t = T::zero();
    let two = T::lit(2.0);
    while nn >= 0 {
        let mut its = 0;
        loop {
            // look for a single small subdiagonal element
            let mut l = nn;
            while l >= 1 {
                let lu = l as usize;
                let s0 = h[lu - 1][lu - 1].abs() + h[lu][lu].abs();
                let s = if s0 == T::zero() { anorm } else { s0 };
                if h[lu][lu - 1].abs() <= eps * s {
                    h[lu][lu - 1] = T::zero();
                    break;
                }
                l -= 1;
            }
            let nnu = nn as usize;
            let x = h[nnu][nnu];
            if l == nn {
                out[nnu] = Complex::new(x + t, T::zero());
                nn -= 1;
                break;
            }
            let y = h[nnu - 1][nnu - 1];
            let w = h[nnu][nnu - 1] * h[nnu - 1][nnu];
            if l == nn - 1 {
                let p = (y - x) / two;
                let q = p * p + w;
                let z = q.abs().sqrt();
                let xs = x + t;
                if q >= T::zero() {
                    let z = p + if p >= T::zero() { z } else { -z };
                    let hi = xs + z;
                    let lo = if z != T::zero() { xs - w / z } else { hi };
                    out[nnu - 1] = Complex::new(hi, T::zero());
                    out[nnu] = Complex::new(lo, T::zero());
                } else {
                    out[nnu - 1] = Complex::new(xs + p, z);
                    out[nnu] = Complex::new(xs + p, -z);
                }
                nn -= 2;
                break;
            }
            if its == 60 {
                return None;
            }
            let (mut xs, mut ys, mut ws) = (x, y, w);
            if its == 10 || its == 20 {
                // exceptional shift
                t += xs;
                for i in 0..=nnu {
                    h[i][i] -= xs;
                }
                let s = h[nnu][nnu - 1].abs() + h[nnu - 1][nnu - 2].abs();
                xs = T::lit(0.75) * s;
                ys = xs;
                ws = T::lit(-0.4375) * s * s;
            }
            its += 1;
            // form shift and look for two consecutive small subdiagonals
            let lu = l as usize;
            let mut m = nnu - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = h[m][m];
                let rr = xs - z;
                let ss = ys - z;
                p = (rr * ss - ws) / h[m + 1][m] + h[m][m + 1];
                q = h[m + 1][m + 1] - z - rr - ss;
                r = h[m + 2][m + 1];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == lu {
                    break;
                }
                let u = h[m][m - 1].abs() * (q.abs() + r.abs());
                let v = p.abs() * (h[m - 1][m - 1].abs() + z.abs() + h[m + 1][m + 1].abs());
                if u <= eps * v {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=nnu {
                h[i][i - 2] = T::zero();
                if i != m + 2 {
                    h[i][i - 3] = T::zero();
                }
            }
            // double QR step on rows l..nn and columns m..nn
            let mut k = m;
            while k < nnu {
                let mut xn = T::one();
                if k != m {
                    p = h[k][k - 1];
                    q = h[k + 1][k - 1];
                    r = if k + 1 != nnu { h[k + 2][k - 1] } else { T::zero() };
                    xn = p.abs() + q.abs() + r.abs();
                    if xn != T::zero() {
                        p /= xn;
                        q /= xn;
                        r /= xn;
                    }
                }
                let s0 = (p * p + q * q + r * r).sqrt();
                let s = if p >= T::zero() { s0 } else { -s0 };
                if s != T::zero() {
                    if k == m {
                        if l as usize != m {
                            h[k][k - 1] = -h[k][k - 1];
                        }
                    } else {
                        h[k][k - 1] = -s * xn;
                    }
                    p += s;
                    let xk = p / s;
                    let yk = q / s;
                    let zk = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nnu {
                        let mut pp = h[k][j] + q * h[k + 1][j];
                        if k + 1 != nnu {
                            pp += r * h[k + 2][j];
                            h[k + 2][j] -= pp * zk;
                        }
                        h[k + 1][j] -= pp * yk;
                        h[k][j] -= pp * xk;
                    }
                    let mmin = if nnu < k + 3 { nnu } else { k + 3 };
                    for i in lu..=mmin {
                        let mut pp = xk * h[i][k] + yk * h[i][k + 1];
                        if k + 1 != nnu {
                            pp += zk * h[i][k + 2];
                            h[i][k + 2] -= pp * r;
                        }
                        h[i][k + 1] -= pp * q;
                        h[i][k] -= pp;
                    }
                }
                k += 1;
            }
        }
    }
    Some(out)
}
