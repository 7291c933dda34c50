//! Dense-matrix reference implementations shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64 as C;
use shadowvar::{Hamiltonian, PauliString, SnapshotBag};

#[derive(Clone, Debug)]
pub struct Dense {
    pub n: usize,
    pub a: Vec<C>,
}

impl Dense {
    pub fn zeros(n: usize) -> Self {
        Self { n, a: vec![C::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = C::new(1.0, 0.0);
        }
        m
    }

    pub fn get(&self, r: usize, c: usize) -> C {
        self.a[r * self.n + c]
    }

    pub fn matmul(&self, o: &Dense) -> Dense {
        let n = self.n;
        let mut out = Dense::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let x = self.a[i * n + k];
                if x == C::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.a[i * n + j] += x * o.a[k * n + j];
                }
            }
        }
        out
    }

    pub fn kron(&self, o: &Dense) -> Dense {
        let n = self.n * o.n;
        let mut out = Dense::zeros(n);
        for i in 0..self.n {
            for j in 0..self.n {
                for k in 0..o.n {
                    for l in 0..o.n {
                        out.a[(i * o.n + k) * n + j * o.n + l] = self.get(i, j) * o.get(k, l);
                    }
                }
            }
        }
        out
    }

    pub fn add_scaled(&mut self, s: C, o: &Dense) {
        for (x, y) in self.a.iter_mut().zip(&o.a) {
            *x += s * y;
        }
    }

    pub fn trace(&self) -> C {
        (0..self.n).map(|i| self.a[i * self.n + i]).sum()
    }

    /// `Tr(self * o)` without forming the product.
    pub fn trace_product(&self, o: &Dense) -> C {
        let n = self.n;
        let mut s = C::new(0.0, 0.0);
        for i in 0..n {
            for k in 0..n {
                s += self.a[i * n + k] * o.a[k * n + i];
            }
        }
        s
    }

    pub fn apply(&self, v: &[C]) -> Vec<C> {
        (0..self.n).map(|i| (0..self.n).map(|k| self.a[i * self.n + k] * v[k]).sum()).collect()
    }
}

pub fn sigma(c: char) -> Dense {
    let (o, z, i) = (C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 1.0));
    let a = match c {
        'I' => vec![o, z, z, o],
        'X' => vec![z, o, o, z],
        'Y' => vec![z, -i, i, z],
        'Z' => vec![o, z, z, -o],
        _ => panic!("bad axis {c}"),
    };
    Dense { n: 2, a }
}

/// Tensor product with site 0 as the most significant factor.
pub fn pauli_dense(p: &PauliString) -> Dense {
    p.to_string().chars().fold(Dense::identity(1), |acc, c| acc.kron(&sigma(c)))
}

pub fn hamiltonian_dense(h: &Hamiltonian) -> Dense {
    let n = 1 << h.sites();
    let mut m = Dense::zeros(n);
    for (c, p) in h.terms() {
        m.add_scaled(C::new(*c, 0.0), &pauli_dense(p));
    }
    m
}

/// Single-snapshot inverse `(x)_j (I + 3 n_j . sigma) / 2` with
/// `n = cos(theta) uZ - sin(theta) uY`.
pub fn snapshot_dense(bag: &SnapshotBag<f64>, l: usize) -> Dense {
    let mut out = Dense::identity(1);
    for j in 0..bag.sites() {
        let c = bag.coeffs(l, j);
        let t = bag.angle(l, j);
        let n: Vec<f64> = (0..3).map(|a| t.cos() * c.uz[a] - t.sin() * c.uy[a]).collect();
        let mut site = sigma('I');
        for (a, ch) in ['X', 'Y', 'Z'].iter().enumerate() {
            site.add_scaled(C::new(3.0 * n[a], 0.0), &sigma(*ch));
        }
        for x in site.a.iter_mut() {
            *x *= 0.5;
        }
        out = out.kron(&site);
    }
    out
}

pub fn shadow_dense(bag: &SnapshotBag<f64>) -> Dense {
    let dim = 1 << bag.sites();
    let mut rho = Dense::zeros(dim);
    let w = C::new(1.0 / bag.snapshots() as f64, 0.0);
    for l in 0..bag.snapshots() {
        rho.add_scaled(w, &snapshot_dense(bag, l));
    }
    rho
}

pub fn randomize(bag: &mut SnapshotBag<f64>, seed: u64) {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for t in bag.theta_mut() {
        *t = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
    }
}
