//! Parameterized classical-shadow snapshots.
//!
//! Snapshot `l` at site `j` is a product-state outcome measured after a fixed
//! Haar-random rotation `U_{j,l}`. Its inverted shadow contributes the Bloch
//! vector
//!
//! ```text
//! n_{j,l}(theta) = -sin(theta) * uY_{j,l} + cos(theta) * uZ_{j,l}
//! ```
//!
//! where `uY`, `uZ` are the images of the Y and Z axes under the rotation.
//! The single-snapshot estimate of a Pauli string of weight `w` is
//! `3^w * prod_{j in support} n_{j,l}[a_j]`.
//!
//! Randomness: the Haar stream draws, for `l` outer and `j` inner, the three
//! uniforms `gamma0, gamma1, gamma3` on `[-1, 1]` and sets
//! `(phi, omega, alpha) = (pi*gamma0, pi*gamma1, acos(gamma3))`. Born outcomes
//! come from a separate stream in the same `(l, j)` order.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::PauliString;
use crate::rng::{stream, Stream};
use crate::scalar::Real;

/// Lanes per block in the snapshot-parallel kernels; the reduction tree shape depends only on this.
pub(crate) const CHUNK: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HaarAngles {
    pub phi: f64,
    pub omega: f64,
    pub alpha: f64,
}

impl HaarAngles {
    pub fn from_uniforms(g0: f64, g1: f64, g3: f64) -> Self {
        let pi = std::f64::consts::PI;
        Self { phi: pi * g0, omega: pi * g1, alpha: g3.acos() }
    }
}

/// Rows of the rotation that enter the Bloch vector: images of Y and Z over (X, Y, Z).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationCoeffs<T> {
    pub uy: [T; 3],
    pub uz: [T; 3],
}

impl<T: Real> RotationCoeffs<T> {
    pub fn identity() -> Self {
        Self { uy: [T::zero(), T::one(), T::zero()], uz: [T::zero(), T::zero(), T::one()] }
    }

    pub fn from_angles(a: &HaarAngles) -> Self {
        let (sp, cp) = a.phi.sin_cos();
        let (so, co) = a.omega.sin_cos();
        let (sa, ca) = a.alpha.sin_cos();
        Self {
            uy: [T::of(co * sp + ca * cp * so), T::of(cp * co - ca * sp * so), T::of(sa * so)],
            uz: [T::of(-cp * sa), T::of(sa * sp), T::of(ca)],
        }
    }
}

/// Bloch vector of the inverted snapshot at angle `theta`.
pub fn bloch_vector<T: Real>(c: &RotationCoeffs<T>, theta: T) -> [T; 3] {
    let (s, co) = theta.sin_cos();
    [0, 1, 2].map(|a| -s * c.uy[a] + co * c.uz[a])
}

/// `d n / d theta`.
pub fn bloch_derivative<T: Real>(c: &RotationCoeffs<T>, theta: T) -> [T; 3] {
    let (s, co) = theta.sin_cos();
    [0, 1, 2].map(|a| -(co * c.uy[a] + s * c.uz[a]))
}

fn three_pow<T: Real>(w: usize) -> T {
    T::of(3f64.powi(w as i32))
}

/// `N` snapshots on `L` sites: the trainable angle matrix plus the fixed rotations.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotBag<T> {
    sites: usize,
    snapshots: usize,
    seed: u64,
    theta: Vec<T>,
    coeffs: Vec<RotationCoeffs<T>>,
}

/// Draws the Haar rotations for every `(l, j)` and starts all angles at zero.
pub fn sample_haar<T: Real>(seed: u64, snapshots: usize, sites: usize) -> Result<SnapshotBag<T>> {
    if snapshots == 0 {
        return Err(Error::Invalid("snapshot count must be at least 1".into()));
    }
    if sites < 2 {
        return Err(Error::Invalid(format!("need at least 2 sites, got {sites}")));
    }
    let mut rng = stream(seed, Stream::Haar);
    let mut coeffs = Vec::with_capacity(snapshots * sites);
    for _l in 0..snapshots {
        for _j in 0..sites {
            let g0: f64 = rng.gen_range(-1.0..=1.0);
            let g1: f64 = rng.gen_range(-1.0..=1.0);
            let g3: f64 = rng.gen_range(-1.0..=1.0);
            coeffs.push(RotationCoeffs::from_angles(&HaarAngles::from_uniforms(g0, g1, g3)));
        }
    }
    Ok(SnapshotBag { sites, snapshots, seed, theta: vec![T::zero(); snapshots * sites], coeffs })
}

impl<T: Real> SnapshotBag<T> {
    /// Bag with explicit rotations, mostly for tests and hand-built examples.
    pub fn from_parts(sites: usize, theta: Vec<T>, coeffs: Vec<RotationCoeffs<T>>, seed: u64) -> Result<Self> {
        if sites == 0 || theta.len() % sites != 0 || theta.is_empty() {
            return Err(Error::Invalid("theta length must be a positive multiple of the site count".into()));
        }
        if coeffs.len() != theta.len() {
            return Err(Error::Dimension { expected: theta.len(), found: coeffs.len() });
        }
        Ok(Self { sites, snapshots: theta.len() / sites, seed, theta, coeffs })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn snapshots(&self) -> usize {
        self.snapshots
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Row-major `N x L` angle matrix.
    pub fn theta(&self) -> &[T] {
        &self.theta
    }

    pub fn theta_mut(&mut self) -> &mut [T] {
        &mut self.theta
    }

    pub fn set_theta(&mut self, theta: &[T]) -> Result<()> {
        if theta.len() != self.theta.len() {
            return Err(Error::Dimension { expected: self.theta.len(), found: theta.len() });
        }
        self.theta.copy_from_slice(theta);
        Ok(())
    }

    pub fn angle(&self, l: usize, j: usize) -> T {
        self.theta[l * self.sites + j]
    }

    pub fn coeffs(&self, l: usize, j: usize) -> &RotationCoeffs<T> {
        &self.coeffs[l * self.sites + j]
    }

    pub fn bloch(&self, l: usize, j: usize) -> [T; 3] {
        bloch_vector(self.coeffs(l, j), self.angle(l, j))
    }

    fn check_len(&self, p: &PauliString) -> Result<()> {
        if p.len() != self.sites {
            return Err(Error::Dimension { expected: self.sites, found: p.len() });
        }
        Ok(())
    }

    /// `Tr(rho_l P)` for the inverted snapshot `l`.
    pub fn snapshot_expectation(&self, l: usize, p: &PauliString) -> Result<T> {
        self.check_len(p)?;
        let support = p.support();
        let mut v = three_pow::<T>(support.len());
        for (j, a) in support {
            v = v * self.bloch(l, j)[a.component().unwrap()];
        }
        Ok(v)
    }

    /// `d Tr(rho_l P) / d theta_{j,l}`; zero when `P` is the identity at `j`.
    pub fn snapshot_expectation_grad(&self, l: usize, j: usize, p: &PauliString) -> Result<T> {
        self.check_len(p)?;
        let Some(cj) = p.axis(j).component() else {
            return Ok(T::zero());
        };
        let support = p.support();
        let mut v = three_pow::<T>(support.len());
        for (site, a) in support {
            let c = a.component().unwrap();
            v = v * if site == j {
                bloch_derivative(self.coeffs(l, j), self.angle(l, j))[cj]
            } else {
                self.bloch(l, site)[c]
            };
        }
        Ok(v)
    }

    /// Shadow estimate `(1/N) sum_l Tr(rho_l P)`.
    pub fn estimate(&self, p: &PauliString) -> Result<T> {
        self.check_len(p)?;
        let table = BlochTable::new(self);
        Ok(table.estimate_many(&[Factors::of(p)])[0])
    }

    pub fn bloch_table(&self) -> BlochTable<T> {
        BlochTable::new(self)
    }

    pub fn checkpoint(&self) -> BagCheckpoint {
        BagCheckpoint {
            seed: self.seed,
            snapshots: self.snapshots,
            sites: self.sites,
            theta: self.theta.iter().map(|t| t.as_f64()).collect(),
        }
    }

    /// Rebuilds a bag from a checkpoint, regenerating the rotations from its seed.
    pub fn from_checkpoint(cp: &BagCheckpoint) -> Result<Self> {
        let mut bag = sample_haar(cp.seed, cp.snapshots, cp.sites)?;
        if cp.theta.len() != cp.snapshots * cp.sites {
            return Err(Error::Dimension { expected: cp.snapshots * cp.sites, found: cp.theta.len() });
        }
        bag.theta = cp.theta.iter().map(|&t| T::of(t)).collect();
        Ok(bag)
    }
}

/// Serialized bag: the rotations are a pure function of `(seed, snapshots, sites)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BagCheckpoint {
    pub seed: u64,
    pub snapshots: usize,
    pub sites: usize,
    pub theta: Vec<f64>,
}

impl BagCheckpoint {
    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let f = std::io::BufWriter::new(std::fs::File::create(path)?);
        serde_json::to_writer(f, self)?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let f = std::io::BufReader::new(std::fs::File::open(path)?);
        Ok(serde_json::from_reader(f)?)
    }
}

/// Pauli string flattened to rows of a [`BlochTable`] (`3 * site + component`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factors {
    rows: Vec<usize>,
}

impl Factors {
    pub fn of(p: &PauliString) -> Self {
        Self {
            rows: p.support().into_iter().map(|(j, a)| 3 * j + a.component().unwrap()).collect(),
        }
    }

    pub fn weight(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn touches(&self, site: usize) -> bool {
        self.rows.iter().any(|r| r / 3 == site)
    }
}

/// Structure-of-arrays Bloch vectors and their theta-derivatives:
/// row `3j + a` holds component `a` of site `j` for every snapshot.
pub struct BlochTable<T> {
    sites: usize,
    snapshots: usize,
    n: Vec<T>,
    dn: Vec<T>,
}

impl<T: Real> BlochTable<T> {
    pub fn new(bag: &SnapshotBag<T>) -> Self {
        let (big_n, sites) = (bag.snapshots, bag.sites);
        let mut n = vec![T::zero(); 3 * sites * big_n];
        let mut dn = vec![T::zero(); 3 * sites * big_n];
        for l in 0..big_n {
            for j in 0..sites {
                let c = bag.coeffs(l, j);
                let t = bag.angle(l, j);
                let v = bloch_vector(c, t);
                let d = bloch_derivative(c, t);
                for a in 0..3 {
                    n[(3 * j + a) * big_n + l] = v[a];
                    dn[(3 * j + a) * big_n + l] = d[a];
                }
            }
        }
        Self { sites, snapshots: big_n, n, dn }
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn snapshots(&self) -> usize {
        self.snapshots
    }

    fn row(&self, r: usize, lanes: std::ops::Range<usize>) -> &[T] {
        &self.n[r * self.snapshots..][lanes]
    }

    fn drow(&self, r: usize, lanes: std::ops::Range<usize>) -> &[T] {
        &self.dn[r * self.snapshots..][lanes]
    }

    fn chunks(&self) -> Vec<std::ops::Range<usize>> {
        (0..self.snapshots)
            .step_by(CHUNK)
            .map(|s| s..(s + CHUNK).min(self.snapshots))
            .collect()
    }

    /// Shadow estimates of many strings. Partial sums per block of snapshots are
    /// combined in block order, so the result does not depend on thread count.
    pub fn estimate_many(&self, strings: &[Factors]) -> Vec<T> {
        let plan = Plan::new(strings.iter());
        let partials: Vec<Vec<T>> = self
            .chunks()
            .into_par_iter()
            .map(|lanes| {
                let pairs = self.pair_products(&plan, lanes.clone());
                let src = |s: Source| -> &[T] {
                    match s {
                        Source::Row(r) => self.row(r, lanes.clone()),
                        Source::Pair(p) => &pairs[p * lanes.len()..][..lanes.len()],
                    }
                };
                plan.kernels
                    .iter()
                    .zip(strings)
                    .map(|(k, f)| match *k {
                        Kernel::One => T::of(lanes.len() as f64),
                        Kernel::Sum(a) => sum(src(a)),
                        Kernel::Dot(a, b) => dot(src(a), src(b)),
                        Kernel::Generic => self.generic_sum(f, lanes.clone()),
                    })
                    .collect()
            })
            .collect();
        let inv_n = T::one() / T::of(self.snapshots as f64);
        (0..strings.len())
            .map(|i| {
                if strings[i].weight() == 0 {
                    return T::one();
                }
                let total = partials.iter().fold(T::zero(), |acc, p| acc + p[i]);
                total * three_pow::<T>(strings[i].weight()) * inv_n
            })
            .collect()
    }

    /// Products of the row pairs the plan needs, `pairs x lanes`.
    fn pair_products(&self, plan: &Plan, lanes: std::ops::Range<usize>) -> Vec<T> {
        let len = lanes.len();
        let mut out = vec![T::zero(); plan.pairs.len() * len];
        for (p, &(r0, r1)) in plan.pairs.iter().enumerate() {
            let (a, b) = (self.row(r0, lanes.clone()), self.row(r1, lanes.clone()));
            for ((o, x), y) in out[p * len..][..len].iter_mut().zip(a).zip(b) {
                *o = *x * *y;
            }
        }
        out
    }

    fn generic_sum(&self, f: &Factors, lanes: std::ops::Range<usize>) -> T {
        let mut prod = vec![T::one(); lanes.len()];
        for &r in &f.rows {
            for (p, x) in prod.iter_mut().zip(self.row(r, lanes.clone())) {
                *p = *p * *x;
            }
        }
        sum(&prod)
    }

    /// Gradient of `sum_c weight_c * estimate(c)` with respect to every angle,
    /// returned row-major `N x L`.
    pub fn gradient(&self, weighted: &[(T, &Factors)]) -> Vec<T> {
        let inv_n = T::one() / T::of(self.snapshots as f64);
        let scaled: Vec<(T, &Factors)> = weighted
            .iter()
            .filter(|(w, f)| f.weight() > 0 && *w != T::zero())
            .map(|&(w, f)| (w * three_pow::<T>(f.weight()) * inv_n, f))
            .collect();
        let plan = Plan::new(scaled.iter().map(|(_, f)| *f));
        let blocks: Vec<(std::ops::Range<usize>, Vec<T>)> = self
            .chunks()
            .into_par_iter()
            .map(|lanes| {
                let out = self.block_gradient(&plan, &scaled, lanes.clone());
                (lanes, out)
            })
            .collect();
        let mut grad = vec![T::zero(); self.snapshots * self.sites];
        for (lanes, out) in blocks {
            let len = lanes.len();
            for j in 0..self.sites {
                for (i, l) in lanes.clone().enumerate() {
                    grad[l * self.sites + j] = out[j * len + i];
                }
            }
        }
        grad
    }

    /// Reverse-mode pass over one block: adjoints of the pair products are
    /// accumulated first, then pushed to the rows, then contracted with `dn`.
    fn block_gradient(&self, plan: &Plan, scaled: &[(T, &Factors)], lanes: std::ops::Range<usize>) -> Vec<T> {
        let len = lanes.len();
        let rows = 3 * self.sites;
        let pairs = self.pair_products(plan, lanes.clone());
        let mut row_adj = vec![T::zero(); rows * len];
        let mut pair_adj = vec![T::zero(); plan.pairs.len() * len];
        for (k, &(w, f)) in plan.kernels.iter().zip(scaled) {
            match *k {
                Kernel::One => {}
                Kernel::Sum(Source::Row(r)) => row_adj[r * len..][..len].iter_mut().for_each(|x| *x = *x + w),
                Kernel::Sum(Source::Pair(_)) => unreachable!("single-row strings never use pairs"),
                Kernel::Dot(a, b) => {
                    let value = |s: Source| -> &[T] {
                        match s {
                            Source::Row(r) => self.row(r, lanes.clone()),
                            Source::Pair(p) => &pairs[p * len..][..len],
                        }
                    };
                    let (va, vb) = (value(a), value(b));
                    let adj = |s: Source, row_adj: &mut Vec<T>, pair_adj: &mut Vec<T>, x: &[T]| {
                        let y = match s {
                            Source::Row(r) => &mut row_adj[r * len..][..len],
                            Source::Pair(p) => &mut pair_adj[p * len..][..len],
                        };
                        axpy(y, w, x);
                    };
                    adj(a, &mut row_adj, &mut pair_adj, vb);
                    adj(b, &mut row_adj, &mut pair_adj, va);
                }
                Kernel::Generic => {
                    let mut rest = vec![T::zero(); len];
                    for (q, &r) in f.rows.iter().enumerate() {
                        rest.iter_mut().for_each(|x| *x = w);
                        for (q2, &r2) in f.rows.iter().enumerate() {
                            if q2 != q {
                                for (x, n) in rest.iter_mut().zip(self.row(r2, lanes.clone())) {
                                    *x = *x * *n;
                                }
                            }
                        }
                        axpy(&mut row_adj[r * len..][..len], T::one(), &rest);
                    }
                }
            }
        }
        for (p, &(r0, r1)) in plan.pairs.iter().enumerate() {
            let u = &pair_adj[p * len..][..len];
            axpy_mul(&mut row_adj[r0 * len..][..len], u, self.row(r1, lanes.clone()));
            axpy_mul(&mut row_adj[r1 * len..][..len], u, self.row(r0, lanes.clone()));
        }
        let mut out = vec![T::zero(); self.sites * len];
        for j in 0..self.sites {
            let o = &mut out[j * len..][..len];
            for a in 0..3 {
                let r = 3 * j + a;
                axpy_mul(o, &row_adj[r * len..][..len], self.drow(r, lanes.clone()));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
enum Source {
    Row(usize),
    Pair(usize),
}

/// How one string's per-snapshot product is formed from rows and shared row pairs.
#[derive(Debug, Clone, Copy)]
enum Kernel {
    One,
    Sum(Source),
    Dot(Source, Source),
    Generic,
}

/// Weight-3 and weight-4 strings share pair products of their leading rows.
struct Plan {
    kernels: Vec<Kernel>,
    pairs: Vec<(usize, usize)>,
}

impl Plan {
    fn new<'a>(strings: impl Iterator<Item = &'a Factors>) -> Self {
        let mut index = std::collections::HashMap::new();
        let mut pairs = Vec::new();
        let mut pair = |a: usize, b: usize| {
            Source::Pair(*index.entry((a, b)).or_insert_with(|| {
                pairs.push((a, b));
                pairs.len() - 1
            }))
        };
        let kernels = strings
            .map(|f| match *f.rows() {
                [] => Kernel::One,
                [a] => Kernel::Sum(Source::Row(a)),
                [a, b] => Kernel::Dot(Source::Row(a), Source::Row(b)),
                [a, b, c] => Kernel::Dot(pair(a, b), Source::Row(c)),
                [a, b, c, d] => Kernel::Dot(pair(a, b), pair(c, d)),
                _ => Kernel::Generic,
            })
            .collect();
        Self { kernels, pairs }
    }
}

fn sum<T: Real>(x: &[T]) -> T {
    let mut acc = [T::zero(); 4];
    let chunks = x.chunks_exact(4);
    let tail = chunks.remainder();
    for c in chunks {
        for k in 0..4 {
            acc[k] = acc[k] + c[k];
        }
    }
    for &t in tail {
        acc[0] = acc[0] + t;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3])
}

fn dot<T: Real>(x: &[T], y: &[T]) -> T {
    let mut acc = [T::zero(); 4];
    let (xc, yc) = (x.chunks_exact(4), y.chunks_exact(4));
    let (xt, yt) = (xc.remainder(), yc.remainder());
    for (a, b) in xc.zip(yc) {
        for k in 0..4 {
            acc[k] = acc[k] + a[k] * b[k];
        }
    }
    for (a, b) in xt.iter().zip(yt) {
        acc[0] = acc[0] + *a * *b;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3])
}

/// `y += w x`.
fn axpy<T: Real>(y: &mut [T], w: T, x: &[T]) {
    for (a, b) in y.iter_mut().zip(x) {
        *a = *a + w * *b;
    }
}

/// `y += u * x` element-wise.
fn axpy_mul<T: Real>(y: &mut [T], u: &[T], x: &[T]) {
    for ((a, b), c) in y.iter_mut().zip(u).zip(x) {
        *a = *a + *b * *c;
    }
}

/// Product state given by one Bloch vector per site.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductState {
    bloch: Vec<[f64; 3]>,
}

impl ProductState {
    /// `|0...0>`.
    pub fn zeros(sites: usize) -> Self {
        Self { bloch: vec![[0.0, 0.0, 1.0]; sites] }
    }

    pub fn from_bloch(bloch: Vec<[f64; 3]>) -> Result<Self> {
        for r in &bloch {
            let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !(norm <= 1.0 + 1e-12) {
                return Err(Error::Invalid(format!("Bloch vector {r:?} lies outside the unit ball")));
            }
        }
        Ok(Self { bloch })
    }

    /// Per-site labels from `0 1 + - r l` (Z, -Z, X, -X, Y, -Y eigenstates).
    pub fn from_label(label: &str) -> Result<Self> {
        let bloch = label
            .chars()
            .map(|c| match c {
                '0' => Ok([0.0, 0.0, 1.0]),
                '1' => Ok([0.0, 0.0, -1.0]),
                '+' => Ok([1.0, 0.0, 0.0]),
                '-' => Ok([-1.0, 0.0, 0.0]),
                'r' => Ok([0.0, 1.0, 0.0]),
                'l' => Ok([0.0, -1.0, 0.0]),
                _ => Err(Error::Unsupported(format!(
                    "state label '{c}': only product states of single-qubit eigenstates are supported"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { bloch })
    }

    pub fn sites(&self) -> usize {
        self.bloch.len()
    }

    pub fn bloch(&self, j: usize) -> [f64; 3] {
        self.bloch[j]
    }
}

/// Simulated shadow tomography of a product state: each `(l, j)` outcome is drawn
/// from the Born rule in the rotated basis, giving `theta = 0` or `pi`.
pub fn born_sample<T: Real>(state: &ProductState, seed: u64, snapshots: usize, sites: usize) -> Result<SnapshotBag<T>> {
    if state.sites() != sites {
        return Err(Error::Dimension { expected: sites, found: state.sites() });
    }
    let mut bag = sample_haar::<T>(seed, snapshots, sites)?;
    let mut rng = stream(seed, Stream::Born);
    for l in 0..snapshots {
        for j in 0..sites {
            let uz = bag.coeffs(l, j).uz;
            let r = state.bloch(j);
            let p0 = 0.5 * (1.0 + (0..3).map(|a| r[a] * uz[a].as_f64()).sum::<f64>());
            let u: f64 = rng.gen();
            bag.theta[l * sites + j] = if u < p0 { T::zero() } else { T::PI() };
        }
    }
    Ok(bag)
}
