//! Dense Hermitian eigensolver and the shifted trace-log / inverse built on it.
//!
//! The matrix is reduced to a complex tridiagonal form with Householder
//! reflectors, the off-diagonal phases are absorbed into a diagonal unitary so
//! the tridiagonal becomes real symmetric, and that is diagonalized with the
//! implicit QL iteration.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Relative asymmetry tolerated (and symmetrized away) on ingest.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Row-major `D x D` Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> HermitianMatrix<T> {
    /// Validates Hermiticity to [`HERMITIAN_TOL`] relative to the Frobenius norm, then symmetrizes.
    pub fn new(dim: usize, mut data: Vec<Complex<T>>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::Dimension { expected: dim * dim, found: data.len() });
        }
        let mut norm = T::zero();
        let mut asym = T::zero();
        for r in 0..dim {
            for c in 0..dim {
                norm = norm + data[r * dim + c].norm_sqr();
                if c > r {
                    asym = asym + (data[r * dim + c] - data[c * dim + r].conj()).norm_sqr();
                }
            }
        }
        let rel = if norm > T::zero() { (asym / norm).sqrt().as_f64() } else { 0.0 };
        if !(rel <= HERMITIAN_TOL) {
            return Err(Error::NotHermitian(rel));
        }
        let half = T::of(0.5);
        for r in 0..dim {
            data[r * dim + r].im = T::zero();
            for c in r + 1..dim {
                let avg = (data[r * dim + c] + data[c * dim + r].conj()) * half;
                data[r * dim + c] = avg;
                data[c * dim + r] = avg.conj();
            }
        }
        Ok(Self { dim, data })
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_real_diagonal(&vec![T::one(); dim])
    }

    pub fn from_real_diagonal(diag: &[T]) -> Self {
        let dim = diag.len();
        let mut data = vec![Complex::new(T::zero(), T::zero()); dim * dim];
        for (i, &d) in diag.iter().enumerate() {
            data[i * dim + i] = Complex::new(d, T::zero());
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> Complex<T> {
        self.data[r * self.dim + c]
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn trace(&self) -> T {
        (0..self.dim).map(|i| self.data[i * self.dim + i].re).sum()
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }
}

/// Eigenpairs with eigenvalues ascending and eigenvectors as columns of a
/// row-major unitary.
#[derive(Debug, Clone)]
pub struct Eigen<T> {
    pub values: Vec<T>,
    pub vectors: Vec<Complex<T>>,
    dim: usize,
}

impl<T: Real> Eigen<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn min(&self) -> T {
        self.values[0]
    }

    /// `V f(Lambda) V^dagger` for a real spectral function.
    pub fn reconstruct_with(&self, f: impl Fn(T) -> T) -> HermitianMatrix<T> {
        let n = self.dim;
        let fv: Vec<T> = self.values.iter().map(|&v| f(v)).collect();
        let mut out = vec![Complex::new(T::zero(), T::zero()); n * n];
        // scaled[k][r] = f_k * V[r][k], stored by eigen-index for contiguous inner loops
        let mut cols = vec![Complex::new(T::zero(), T::zero()); n * n];
        for r in 0..n {
            for k in 0..n {
                cols[k * n + r] = self.vectors[r * n + k];
            }
        }
        for r in 0..n {
            for c in r..n {
                let mut s = Complex::new(T::zero(), T::zero());
                for k in 0..n {
                    s = s + cols[k * n + r] * cols[k * n + c].conj() * fv[k];
                }
                out[r * n + c] = s;
                out[c * n + r] = s.conj();
            }
            out[r * n + r].im = T::zero();
        }
        HermitianMatrix { dim: n, data: out }
    }

    fn check_shift(&self, eps: T) -> Result<()> {
        if !(self.min() + eps > T::zero()) {
            return Err(Error::BarrierDomain { lambda_min: self.min().as_f64(), eps: eps.as_f64() });
        }
        Ok(())
    }

    /// `sum_i log(lambda_i + eps)`.
    pub fn trace_log_shifted(&self, eps: T) -> Result<T> {
        self.check_shift(eps)?;
        Ok(self.values.iter().map(|&v| (v + eps).ln()).sum())
    }

    /// `(A + eps I)^{-1}` from the spectral decomposition.
    pub fn inverse_shifted(&self, eps: T) -> Result<HermitianMatrix<T>> {
        self.check_shift(eps)?;
        Ok(self.reconstruct_with(|v| T::one() / (v + eps)))
    }
}

pub fn trace_log_shifted<T: Real>(a: &HermitianMatrix<T>, eps: T) -> Result<T> {
    eigh(a)?.trace_log_shifted(eps)
}

pub fn inverse_shifted<T: Real>(a: &HermitianMatrix<T>, eps: T) -> Result<HermitianMatrix<T>> {
    eigh(a)?.inverse_shifted(eps)
}

/// Eigenvalues only (skips eigenvector accumulation).
pub fn eigvalsh<T: Real>(a: &HermitianMatrix<T>) -> Result<Vec<T>> {
    let n = a.dim;
    if n == 0 {
        return Ok(Vec::new());
    }
    let (diag, off, _) = tridiagonalize(a, false);
    let mut z = Vec::new();
    let values = tql(diag, off, &mut z, false)?;
    Ok(values)
}

/// Full eigendecomposition `A = V diag(values) V^dagger`.
pub fn eigh<T: Real>(a: &HermitianMatrix<T>) -> Result<Eigen<T>> {
    let n = a.dim;
    if n == 0 {
        return Ok(Eigen { values: Vec::new(), vectors: Vec::new(), dim: 0 });
    }
    let (diag, off, q) = tridiagonalize(a, true);
    let mut z = vec![T::zero(); n * n];
    for i in 0..n {
        z[i * n + i] = T::one();
    }
    let values = tql(diag, off, &mut z, true)?;
    // V = Q Z, with the phase unitary already folded into Q
    let mut vectors = vec![Complex::new(T::zero(), T::zero()); n * n];
    for r in 0..n {
        let qrow = &q[r * n..(r + 1) * n];
        let vrow = &mut vectors[r * n..(r + 1) * n];
        for (k, &qv) in qrow.iter().enumerate() {
            if qv.re == T::zero() && qv.im == T::zero() {
                continue;
            }
            let zrow = &z[k * n..(k + 1) * n];
            for c in 0..n {
                vrow[c] = vrow[c] + qv * zrow[c];
            }
        }
    }
    Ok(Eigen { values, vectors, dim: n })
}

/// Householder reduction `A = Q T Q^dagger` followed by the phase change that
/// makes `T` real. Returns the diagonal, the (non-negative) subdiagonal and,
/// if requested, `Q Phi` row-major.
fn tridiagonalize<T: Real>(a: &HermitianMatrix<T>, want_q: bool) -> (Vec<T>, Vec<T>, Vec<Complex<T>>) {
    let n = a.dim;
    let zero = Complex::new(T::zero(), T::zero());
    let mut m = a.data.clone();
    let mut reflectors: Vec<Vec<Complex<T>>> = Vec::with_capacity(n.saturating_sub(2));
    let mut p = vec![zero; n];
    for k in 0..n.saturating_sub(2) {
        let len = n - k - 1;
        let x: Vec<Complex<T>> = (0..len).map(|i| m[(k + 1 + i) * n + k]).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        let tail = x[1..].iter().map(|z| z.norm_sqr()).sum::<T>();
        if xnorm == T::zero() || tail == T::zero() {
            reflectors.push(Vec::new());
            continue;
        }
        let x0abs = x[0].norm();
        let unit = if x0abs > T::zero() { x[0] / x0abs } else { Complex::new(T::one(), T::zero()) };
        let alpha = -unit * xnorm;
        let mut v = x;
        v[0] = v[0] - alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        for z in v.iter_mut() {
            *z = *z / vnorm;
        }
        // trailing block B = m[k+1.., k+1..]; p = B v, s = v^dagger p, q = p - s v
        let off = k + 1;
        for i in 0..len {
            let row = &m[(off + i) * n + off..(off + i) * n + n];
            let mut s = zero;
            for (bij, vj) in row.iter().zip(&v) {
                s = s + *bij * *vj;
            }
            p[i] = s;
        }
        let mut s = zero;
        for i in 0..len {
            s = s + v[i].conj() * p[i];
        }
        let s = s.re;
        for i in 0..len {
            p[i] = p[i] - v[i] * s;
        }
        // B <- B - 2 (v q^dagger + q v^dagger)
        let two = T::of(2.0);
        for i in 0..len {
            let (vi, qi) = (v[i] * two, p[i] * two);
            let row = &mut m[(off + i) * n + off..(off + i) * n + n];
            for j in 0..len {
                row[j] = row[j] - vi * p[j].conj() - qi * v[j].conj();
            }
        }
        m[off * n + k] = alpha;
        m[k * n + off] = alpha.conj();
        for i in 1..len {
            m[(off + i) * n + k] = zero;
            m[k * n + off + i] = zero;
        }
        reflectors.push(v);
    }

    let diag: Vec<T> = (0..n).map(|i| m[i * n + i].re).collect();
    let mut off = vec![T::zero(); n];
    let mut phase = vec![Complex::new(T::one(), T::zero()); n];
    for k in 0..n.saturating_sub(1) {
        let e = m[(k + 1) * n + k];
        let mag = e.norm();
        off[k] = mag;
        phase[k + 1] = if mag > T::zero() { phase[k] * (e / mag) } else { phase[k] };
    }

    let mut q = Vec::new();
    if want_q {
        // Q = H_0 H_1 ... H_{n-3}; apply right-to-left to the identity, then scale columns by the phases
        q = vec![zero; n * n];
        for i in 0..n {
            q[i * n + i] = Complex::new(T::one(), T::zero());
        }
        let mut w = vec![zero; n];
        for (k, v) in reflectors.iter().enumerate().rev() {
            if v.is_empty() {
                continue;
            }
            let off = k + 1;
            // rows off.. of Q: Q <- (I - 2 v v^dagger) Q
            for c in 0..n {
                w[c] = zero;
            }
            for (i, vi) in v.iter().enumerate() {
                let row = &q[(off + i) * n..(off + i + 1) * n];
                let vc = vi.conj();
                for c in 0..n {
                    w[c] = w[c] + vc * row[c];
                }
            }
            let two = T::of(2.0);
            for (i, vi) in v.iter().enumerate() {
                let f = *vi * two;
                let row = &mut q[(off + i) * n..(off + i + 1) * n];
                for c in 0..n {
                    row[c] = row[c] - f * w[c];
                }
            }
        }
        for r in 0..n {
            for c in 0..n {
                q[r * n + c] = q[r * n + c] * phase[c];
            }
        }
    }
    (diag, off, q)
}

/// Implicit QL with Wilkinson shifts on a real symmetric tridiagonal matrix
/// (`off[i]` couples `i` and `i+1`). Eigenvalues come back ascending; when
/// `vectors` is set, `z` (row-major, initially the identity) gets the matching
/// eigenvectors as columns.
fn tql<T: Real>(mut d: Vec<T>, mut e: Vec<T>, z: &mut [T], vectors: bool) -> Result<Vec<T>> {
    let n = d.len();
    let mut f = T::zero();
    let mut tst1 = T::zero();
    let eps = T::epsilon();
    if n > 0 {
        e[n - 1] = T::zero();
    }
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(Error::Numerical("tridiagonal QL iteration did not converge".into()));
                }
                let two = T::of(2.0);
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(T::one());
                if p < T::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di = *di - h;
                }
                f = f + h;

                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = T::zero();
                let mut s2 = T::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if vectors {
                        for k in 0..n {
                            let zk = &mut z[k * n..];
                            let h2 = zk[i + 1];
                            zk[i + 1] = s * zk[i] + c * h2;
                            zk[i] = c * zk[i] - s * h2;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] = d[l] + f;
        e[l] = T::zero();
    }
    // selection sort keeps eigenvector columns aligned
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for j in i + 1..n {
            if d[j] < p {
                k = j;
                p = d[j];
            }
        }
        if k != i {
            d[k] = d[i];
            d[i] = p;
            if vectors {
                for r in 0..n {
                    z.swap(r * n + i, r * n + k);
                }
            }
        }
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;
    use rand::{Rng, SeedableRng};

    fn random_hermitian(n: usize, seed: u64) -> HermitianMatrix<f64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut d = vec![C::new(0.0, 0.0); n * n];
        for r in 0..n {
            d[r * n + r] = C::new(rng.gen_range(-1.0..1.0), 0.0);
            for c in r + 1..n {
                let z = C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                d[r * n + c] = z;
                d[c * n + r] = z.conj();
            }
        }
        HermitianMatrix::new(n, d).unwrap()
    }

    /// Eigenvalues by cyclic Jacobi rotations on the real embedding
    /// `[[Re, -Im], [Im, Re]]`, whose spectrum is that of `a` with every value doubled.
    fn jacobi_eigenvalues(a: &HermitianMatrix<f64>) -> Vec<f64> {
        let n = a.dim();
        let m = 2 * n;
        let mut s = vec![0.0; m * m];
        for r in 0..n {
            for c in 0..n {
                let z = a.get(r, c);
                s[r * m + c] = z.re;
                s[(r + n) * m + c + n] = z.re;
                s[r * m + c + n] = -z.im;
                s[(r + n) * m + c] = z.im;
            }
        }
        for _sweep in 0..100 {
            let off: f64 = (0..m).flat_map(|r| (0..m).filter(move |&c| c != r).map(move |c| (r, c))).map(|(r, c)| s[r * m + c].powi(2)).sum();
            if off < 1e-30 {
                break;
            }
            for p in 0..m {
                for q in p + 1..m {
                    let apq = s[p * m + q];
                    if apq.abs() < 1e-300 {
                        continue;
                    }
                    let theta = (s[q * m + q] - s[p * m + p]) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let sn = t * c;
                    for k in 0..m {
                        let (skp, skq) = (s[k * m + p], s[k * m + q]);
                        s[k * m + p] = c * skp - sn * skq;
                        s[k * m + q] = sn * skp + c * skq;
                    }
                    for k in 0..m {
                        let (spk, sqk) = (s[p * m + k], s[q * m + k]);
                        s[p * m + k] = c * spk - sn * sqk;
                        s[q * m + k] = sn * spk + c * sqk;
                    }
                }
            }
        }
        let mut d: Vec<f64> = (0..m).map(|i| s[i * m + i]).collect();
        d.sort_by(|x, y| x.partial_cmp(y).unwrap());
        d.into_iter().step_by(2).collect()
    }

    /// Log-determinant through a Cholesky factorization.
    fn cholesky_logdet(a: &HermitianMatrix<f64>, eps: f64) -> f64 {
        let n = a.dim();
        let mut l = vec![C::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut s = a.get(i, j) + if i == j { C::new(eps, 0.0) } else { C::new(0.0, 0.0) };
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k].conj();
                }
                if i == j {
                    l[i * n + i] = C::new(s.re.sqrt(), 0.0);
                } else {
                    l[i * n + j] = s / l[j * n + j].re;
                }
            }
        }
        (0..n).map(|i| 2.0 * l[i * n + i].re.ln()).sum()
    }

    #[test]
    fn trivial_spectra() {
        let e = eigh(&HermitianMatrix::<f64>::identity(5)).unwrap();
        assert!(e.values.iter().all(|&v| (v - 1.0).abs() < 1e-15));
        let e = eigh(&HermitianMatrix::from_real_diagonal(&[2.0, -1.0, 5.0])).unwrap();
        assert_eq!(e.values, vec![-1.0, 2.0, 5.0]);
        let one = eigh(&HermitianMatrix::from_real_diagonal(&[3.5])).unwrap();
        assert_eq!(one.values, vec![3.5]);
    }

    #[test]
    fn rejects_non_hermitian() {
        let d = vec![C::new(1.0, 0.0), C::new(0.0, 1.0), C::new(0.0, 1.0), C::new(1.0, 0.0)];
        assert!(matches!(HermitianMatrix::new(2, d), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn random_matrix_against_jacobi() {
        let a = random_hermitian(50, 3);
        let e = eigh(&a).unwrap();
        let oracle = jacobi_eigenvalues(&a);
        for (i, (&v, w)) in e.values.iter().zip(&oracle).enumerate() {
            assert!((v - w).abs() < 1e-9, "eigenvalue {i}: {v} vs {w}");
        }
        let vals = eigvalsh(&a).unwrap();
        for (x, y) in vals.iter().zip(&e.values) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!((e.values.iter().sum::<f64>() - a.trace()).abs() < 1e-10 * a.frobenius_norm());
    }

    #[test]
    fn reconstruction_and_orthonormality() {
        for (n, seed) in [(2, 1), (7, 2), (40, 5)] {
            let a = random_hermitian(n, seed);
            let e = eigh(&a).unwrap();
            let back = e.reconstruct_with(|v| v);
            let err: f64 = a.as_slice().iter().zip(back.as_slice()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
            assert!(err < 1e-10 * a.frobenius_norm(), "reconstruction {err}");
            for i in 0..n {
                for j in 0..n {
                    let dot: C = (0..n).map(|r| e.vectors[r * n + i].conj() * e.vectors[r * n + j]).sum();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((dot - C::new(want, 0.0)).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn degenerate_and_structured_inputs() {
        // block with repeated eigenvalues and an already-tridiagonal column
        let mut d = vec![C::new(0.0, 0.0); 16];
        for i in 0..4 {
            d[i * 4 + i] = C::new(2.0, 0.0);
        }
        d[1] = C::new(0.0, 1.0);
        d[4] = C::new(0.0, -1.0);
        let a = HermitianMatrix::new(4, d).unwrap();
        let e = eigh(&a).unwrap();
        let want = [1.0, 2.0, 2.0, 3.0];
        for (v, w) in e.values.iter().zip(want) {
            assert!((v - w).abs() < 1e-14);
        }
    }

    #[test]
    fn trace_log_values() {
        let id = HermitianMatrix::<f64>::identity(4);
        assert_eq!(trace_log_shifted(&id, 0.0).unwrap(), 0.0);
        let a = HermitianMatrix::from_real_diagonal(&[1.0, std::f64::consts::E - 1.0]);
        let got = trace_log_shifted(&a, 1.0).unwrap();
        assert!((got - (2f64.ln() + 1.0)).abs() < 1e-14);
        assert!(matches!(
            trace_log_shifted(&HermitianMatrix::from_real_diagonal(&[-0.5, 1.0]), 0.5),
            Err(Error::BarrierDomain { .. })
        ));
        let r = random_hermitian(30, 9);
        let shift = 0.5 - eigvalsh(&r).unwrap()[0];
        let got = trace_log_shifted(&r, shift).unwrap();
        assert!((got - cholesky_logdet(&r, shift)).abs() < 1e-9);
    }

    #[test]
    fn shifted_inverse() {
        let inv = inverse_shifted(&HermitianMatrix::<f64>::identity(3), 1.0).unwrap();
        for r in 0..3 {
            for c in 0..3 {
                let want = if r == c { 0.5 } else { 0.0 };
                assert!((inv.get(r, c) - C::new(want, 0.0)).norm() < 1e-15);
            }
        }
        let inv = inverse_shifted(&HermitianMatrix::from_real_diagonal(&[2.0, 4.0, -0.5]), 1.0).unwrap();
        for (i, w) in [1.0f64 / 3.0, 0.2, 2.0].iter().enumerate() {
            assert!((inv.get(i, i).re - w).abs() < 1e-14);
        }

        let n = 200;
        let a = random_hermitian(n, 17);
        let shift = 1.0 - eigvalsh(&a).unwrap()[0];
        let x = inverse_shifted(&a, shift).unwrap();
        let mut resid = 0.0;
        for r in 0..n {
            for c in 0..n {
                let mut s: C = (0..n).map(|k| a.get(r, k) * x.get(k, c)).sum();
                s += x.get(r, c) * shift;
                if r == c {
                    s -= 1.0;
                }
                resid += s.norm_sqr();
            }
        }
        assert!(resid.sqrt() <= 1e-8 * n as f64);
    }

    #[test]
    fn trace_log_derivative_is_trace_of_inverse() {
        let a = random_hermitian(20, 4);
        let shift = 0.3 - eigvalsh(&a).unwrap()[0];
        let e = eigh(&a).unwrap();
        let h = 1e-6;
        let fd = (e.trace_log_shifted(shift + h).unwrap() - e.trace_log_shifted(shift - h).unwrap()) / (2.0 * h);
        let tr = e.inverse_shifted(shift).unwrap().trace();
        assert!(((fd - tr) / tr).abs() < 1e-6);
        // spectral inverse equals the reciprocal-eigenvalue reconstruction
        let via = e.reconstruct_with(|v| 1.0 / (v + shift));
        let direct = inverse_shifted(&a, shift).unwrap();
        for (x, y) in via.as_slice().iter().zip(direct.as_slice()) {
            assert!((x - y).norm() < 1e-9);
        }
    }

    #[test]
    fn single_precision_path() {
        let a64 = random_hermitian(12, 8);
        let a32 = HermitianMatrix::<f32>::new(
            12,
            a64.as_slice().iter().map(|z| num_complex::Complex32::new(z.re as f32, z.im as f32)).collect(),
        )
        .unwrap();
        let (e64, e32) = (eigh(&a64).unwrap(), eigh(&a32).unwrap());
        for (x, y) in e64.values.iter().zip(&e32.values) {
            assert!((x - *y as f64).abs() < 1e-4);
        }
    }
}
