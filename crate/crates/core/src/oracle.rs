//! Exact ground states by matrix-free Lanczos, exact correlators, error metrics,
//! and the eigenvalue-floor fit.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corrmat::{assemble, CompiledHamiltonian};
use crate::error::{Error, Result};
use crate::model::Hamiltonian;
use crate::optimizer::EigenFloor;
use crate::pauli::{enumerate_basis, enumerate_contiguous, PauliAxis, PauliString};
use crate::rng::{stream, Stream};
use crate::scalar::Real;
use crate::shadows::{born_sample, Factors, ProductState, SnapshotBag};
use crate::spectral::{eigh, eigvalsh, HermitianMatrix};

/// Largest chain the dense state vector supports.
pub const MAX_EXACT_SITES: usize = 14;
pub const RESIDUAL_TOL: f64 = 1e-8;
pub const DEGENERACY_TOL: f64 = 1e-6;
const KRYLOV_DIM: usize = 80;
const MAX_RESTARTS: usize = 200;
const PAR_CHUNK: usize = 1024;

/// Pauli string as bit masks; site `j` is bit `j` of the basis-state index, `|0>` = bit clear.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliMask {
    /// Sites carrying X or Y (flipped).
    pub flip: usize,
    /// Sites carrying Y or Z (sign `(-1)^bit`).
    pub sign: usize,
    /// `i^{#Y}`.
    pub phase: Complex64,
}

impl PauliMask {
    pub fn of(p: &PauliString) -> Self {
        let (mut flip, mut sign, mut ny) = (0usize, 0usize, 0u32);
        for (j, a) in p.axes().iter().enumerate() {
            match a {
                PauliAxis::I => {}
                PauliAxis::X => flip |= 1 << j,
                PauliAxis::Y => {
                    flip |= 1 << j;
                    sign |= 1 << j;
                    ny += 1;
                }
                PauliAxis::Z => sign |= 1 << j,
            }
        }
        let phase = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, -1.0),
        ][(ny % 4) as usize];
        Self { flip, sign, phase }
    }

    /// `<t| P |t ^ flip>`.
    #[inline]
    fn element(&self, t: usize) -> Complex64 {
        let source = t ^ self.flip;
        if (source & self.sign).count_ones() % 2 == 1 {
            -self.phase
        } else {
            self.phase
        }
    }
}

/// A Hamiltonian ready to act on dense state vectors.
#[derive(Debug, Clone)]
pub struct PauliOperator {
    sites: usize,
    terms: Vec<(f64, PauliMask)>,
}

impl PauliOperator {
    pub fn new(h: &Hamiltonian) -> Result<Self> {
        check_envelope(h.sites())?;
        let terms = h.terms().iter().map(|(c, p)| (*c, PauliMask::of(p))).collect();
        Ok(Self { sites: h.sites(), terms })
    }

    pub fn dim(&self) -> usize {
        1 << self.sites
    }

    /// `out = H v`.
    pub fn apply(&self, v: &[Complex64], out: &mut [Complex64]) {
        out.par_chunks_mut(PAR_CHUNK).enumerate().for_each(|(ci, chunk)| {
            let base = ci * PAR_CHUNK;
            for (k, o) in chunk.iter_mut().enumerate() {
                let t = base + k;
                let mut acc = Complex64::new(0.0, 0.0);
                for (c, m) in &self.terms {
                    acc += m.element(t) * v[t ^ m.flip] * *c;
                }
                *o = acc;
            }
        });
    }

    pub fn expectation(&self, v: &[Complex64]) -> f64 {
        let mut hv = vec![Complex64::new(0.0, 0.0); v.len()];
        self.apply(v, &mut hv);
        dot(v, &hv).re
    }
}

fn check_envelope(sites: usize) -> Result<()> {
    if sites > MAX_EXACT_SITES {
        return Err(Error::Unsupported(format!(
            "exact diagonalization supports at most {MAX_EXACT_SITES} sites, got {sites}"
        )));
    }
    if sites == 0 {
        return Err(Error::Invalid("need at least one site".into()));
    }
    Ok(())
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.par_chunks(PAR_CHUNK)
        .zip(b.par_chunks(PAR_CHUNK))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p.conj() * q).sum::<Complex64>())
        .collect::<Vec<_>>()
        .into_iter()
        .sum()
}

fn norm(a: &[Complex64]) -> f64 {
    dot(a, a).re.sqrt()
}

fn axpy(alpha: Complex64, x: &[Complex64], y: &mut [Complex64]) {
    y.par_chunks_mut(PAR_CHUNK).zip(x.par_chunks(PAR_CHUNK)).for_each(|(ys, xs)| {
        for (yy, xx) in ys.iter_mut().zip(xs) {
            *yy += alpha * xx;
        }
    });
}

fn scale(alpha: f64, x: &mut [Complex64]) {
    x.par_iter_mut().for_each(|v| *v *= alpha);
}

/// Removes the components along each (orthonormal) vector, twice for stability.
fn orthogonalize(w: &mut [Complex64], against: &[Vec<Complex64>]) {
    for _ in 0..2 {
        for q in against {
            let c = dot(q, w);
            axpy(-c, q, w);
        }
    }
}

/// Restarted Lanczos with full reorthogonalization for the lowest eigenpair of
/// `H` restricted to the complement of `deflate`.
fn lowest_eigenpair(op: &PauliOperator, mut start: Vec<Complex64>, deflate: &[Vec<Complex64>]) -> Result<(f64, Vec<Complex64>)> {
    let dim = op.dim();
    let krylov = KRYLOV_DIM.min(dim - deflate.len());
    if krylov == 0 {
        return Err(Error::Invalid("no vectors left after deflation".into()));
    }
    let mut w = vec![Complex64::new(0.0, 0.0); dim];
    let mut last_residual = f64::INFINITY;
    for _ in 0..MAX_RESTARTS {
        orthogonalize(&mut start, deflate);
        let n0 = norm(&start);
        if !(n0 > 0.0) {
            return Err(Error::Numerical("Lanczos start vector vanished".into()));
        }
        scale(1.0 / n0, &mut start);
        let mut basis: Vec<Vec<Complex64>> = vec![start];
        let (mut alphas, mut betas) = (Vec::new(), Vec::new());
        loop {
            let k = basis.len() - 1;
            op.apply(&basis[k], &mut w);
            orthogonalize(&mut w, deflate);
            let alpha = dot(&basis[k], &w).re;
            alphas.push(alpha);
            orthogonalize(&mut w, &basis);
            let beta = norm(&w);
            if basis.len() == krylov || beta < 1e-12 * alpha.abs().max(1.0) {
                break;
            }
            betas.push(beta);
            let mut next = w.clone();
            scale(1.0 / beta, &mut next);
            basis.push(next);
        }
        let m = alphas.len();
        let mut t = vec![num_complex::Complex::new(0.0, 0.0); m * m];
        for i in 0..m {
            t[i * m + i].re = alphas[i];
            if i + 1 < m {
                t[i * m + i + 1].re = betas[i];
                t[(i + 1) * m + i].re = betas[i];
            }
        }
        let eig = eigh(&HermitianMatrix::new(m, t)?)?;
        let theta = eig.values[0];
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        for (i, q) in basis.iter().enumerate() {
            axpy(eig.vectors[i * m], q, &mut v);
        }
        orthogonalize(&mut v, deflate);
        let nv = norm(&v);
        scale(1.0 / nv, &mut v);
        op.apply(&v, &mut w);
        orthogonalize(&mut w, deflate);
        axpy(Complex64::new(-theta, 0.0), &v, &mut w);
        last_residual = norm(&w);
        if last_residual <= RESIDUAL_TOL {
            return Ok((op.expectation(&v), v));
        }
        start = v;
    }
    Err(Error::Numerical(format!(
        "Lanczos did not converge after {MAX_RESTARTS} restarts (residual {last_residual:e})"
    )))
}

#[derive(Debug, Clone)]
pub struct GroundState {
    pub sites: usize,
    pub energy: f64,
    /// Amplitudes indexed by basis state, site `j` at bit `j`.
    pub vector: Vec<Complex64>,
    /// Second-lowest eigenvalue minus the ground energy.
    pub gap: f64,
    /// Set when the gap is below [`DEGENERACY_TOL`].
    pub degenerate: bool,
}

impl GroundState {
    pub fn expectation(&self, p: &PauliString) -> Result<f64> {
        exact_expectation(self, p)
    }
}

pub fn ground_state(h: &Hamiltonian) -> Result<GroundState> {
    ground_state_seeded(h, 0)
}

/// Ground state from a random start vector drawn from the Lanczos sub-stream of `seed`.
pub fn ground_state_seeded(h: &Hamiltonian, seed: u64) -> Result<GroundState> {
    let op = PauliOperator::new(h)?;
    let dim = op.dim();
    let mut rng = stream(seed, Stream::LanczosStart);
    let mut random_vector = || -> Vec<Complex64> {
        (0..dim).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
    };
    let (energy, vector) = lowest_eigenpair(&op, random_vector(), &[])?;
    let gap = if dim > 1 {
        let (second, _) = lowest_eigenpair(&op, random_vector(), std::slice::from_ref(&vector))?;
        second - energy
    } else {
        f64::INFINITY
    };
    Ok(GroundState { sites: h.sites(), energy, vector, gap, degenerate: gap < DEGENERACY_TOL })
}

/// `<v|P|v>`.
pub fn exact_expectation(gs: &GroundState, p: &PauliString) -> Result<f64> {
    if p.len() != gs.sites {
        return Err(Error::Dimension { expected: gs.sites, found: p.len() });
    }
    let m = PauliMask::of(p);
    let v = &gs.vector;
    let value: Complex64 = v
        .par_iter()
        .enumerate()
        .map(|(t, vt)| vt.conj() * m.element(t) * v[t ^ m.flip])
        .sum();
    Ok(value.re)
}

/// Exact correlators keyed by Pauli string, with the ground energy they came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactTable {
    pub sites: usize,
    pub energy: f64,
    pub degenerate: bool,
    pub values: BTreeMap<PauliString, f64>,
}

impl ExactTable {
    pub fn from_ground_state(gs: &GroundState, strings: &[PauliString]) -> Result<Self> {
        let mut values = BTreeMap::new();
        for p in strings {
            values.insert(p.clone(), exact_expectation(gs, p)?);
        }
        Ok(Self { sites: gs.sites, energy: gs.energy, degenerate: gs.degenerate, values })
    }

    /// Weight-<=2 basis plus contiguous strings of each weight in `contiguous`.
    pub fn standard_strings(sites: usize, contiguous: &[usize]) -> Result<Vec<PauliString>> {
        let mut out = enumerate_basis(sites, 2)?;
        for &k in contiguous {
            if k <= sites {
                out.extend(enumerate_contiguous(sites, k)?);
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    pub fn get(&self, p: &PauliString) -> Option<f64> {
        self.values.get(p).copied()
    }

    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "string,value")?;
        for (p, v) in &self.values {
            writeln!(out, "{p},{v:e}")?;
        }
        Ok(())
    }

    /// Reads the `(string, value)` table; energy and degeneracy come from the caller.
    pub fn read_csv<R: BufRead>(input: R, energy: f64, degenerate: bool) -> Result<Self> {
        let mut values = BTreeMap::new();
        let mut sites = None;
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            if i == 0 || line.trim().is_empty() {
                continue;
            }
            let (s, v) = line
                .split_once(',')
                .ok_or_else(|| Error::Invalid(format!("line {}: expected \"string,value\"", i + 1)))?;
            let p: PauliString = s.trim().parse()?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|e| Error::Invalid(format!("line {}: bad value: {e}", i + 1)))?;
            match sites {
                None => sites = Some(p.len()),
                Some(l) if l != p.len() => return Err(Error::Dimension { expected: l, found: p.len() }),
                _ => {}
            }
            values.insert(p, v);
        }
        let sites = sites.ok_or_else(|| Error::Invalid("empty exact table".into()))?;
        Ok(Self { sites, energy, degenerate, values })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorRow {
    pub string: PauliString,
    pub exact: f64,
    pub estimated: f64,
    pub rescaled: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub sites: usize,
    pub exact_energy: f64,
    pub estimated_energy: f64,
    pub rescaled_energy: f64,
    pub amplitude_factor: f64,
    /// `|E_est - E| / L` without rescaling.
    pub raw_energy_density_error: f64,
    /// `|E_rescaled - E| / L`.
    pub energy_density_error: f64,
    /// RMS error of f-rescaled estimates over contiguous strings of exactly weight `k`.
    pub rms_error_by_weight: BTreeMap<usize, f64>,
    /// Same over every contiguous string with weight at most `k`.
    pub rms_error_up_to_weight: BTreeMap<usize, f64>,
    pub degenerate: bool,
    pub operators: Vec<OperatorRow>,
}

/// `offset + f (E - offset)`, with `offset` the identity part of `H`.
pub fn rescaled_energy(raw: f64, f: f64, h: &Hamiltonian) -> f64 {
    let offset = h.identity_coefficient();
    offset + f * (raw - offset)
}

fn rms(errors: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = errors.fold((0.0, 0usize), |(s, n), e| (s + e * e, n + 1));
    if n == 0 {
        0.0
    } else {
        (sum / n as f64).sqrt()
    }
}

/// Error metrics for raw shadow estimates given as a map over (at least) the
/// contiguous strings of each weight in `weights`.
pub fn error_report_from(
    estimates: &BTreeMap<PauliString, f64>,
    estimated_energy: f64,
    exact: &ExactTable,
    h: &Hamiltonian,
    f: f64,
    weights: &[usize],
) -> Result<ErrorReport> {
    if h.sites() != exact.sites {
        return Err(Error::Dimension { expected: exact.sites, found: h.sites() });
    }
    let sites = exact.sites;
    let mut by_k: BTreeMap<usize, Vec<OperatorRow>> = BTreeMap::new();
    let max_k = weights.iter().copied().max().unwrap_or(0).min(sites);
    for k in 1..=max_k {
        let rows = enumerate_contiguous(sites, k)?
            .into_iter()
            .map(|p| {
                let exact_v = exact
                    .get(&p)
                    .ok_or_else(|| Error::Invalid(format!("exact table lacks {p}")))?;
                let est = *estimates
                    .get(&p)
                    .ok_or_else(|| Error::Invalid(format!("estimates lack {p}")))?;
                Ok(OperatorRow { string: p, exact: exact_v, estimated: est, rescaled: f * est })
            })
            .collect::<Result<Vec<_>>>();
        // weights below the largest requested one are only needed for the cumulative RMS
        match rows {
            Ok(rows) => {
                by_k.insert(k, rows);
            }
            Err(e) if weights.contains(&k) => return Err(e),
            Err(_) => {}
        }
    }
    let mut rms_error_by_weight = BTreeMap::new();
    let mut rms_error_up_to_weight = BTreeMap::new();
    let mut operators = Vec::new();
    for &k in weights {
        let Some(rows) = by_k.get(&k) else { continue };
        rms_error_by_weight.insert(k, rms(rows.iter().map(|r| r.rescaled - r.exact)));
        if (1..=k).all(|w| by_k.contains_key(&w)) {
            let all = (1..=k).flat_map(|w| by_k[&w].iter());
            rms_error_up_to_weight.insert(k, rms(all.map(|r| r.rescaled - r.exact)));
        }
        operators.extend(rows.iter().cloned());
    }
    let rescaled = rescaled_energy(estimated_energy, f, h);
    Ok(ErrorReport {
        sites,
        exact_energy: exact.energy,
        estimated_energy,
        rescaled_energy: rescaled,
        amplitude_factor: f,
        raw_energy_density_error: (estimated_energy - exact.energy).abs() / sites as f64,
        energy_density_error: (rescaled - exact.energy).abs() / sites as f64,
        rms_error_by_weight,
        rms_error_up_to_weight,
        degenerate: exact.degenerate,
        operators,
    })
}

/// Shadow estimates of every contiguous string of weight `1..=max(weights)`.
pub fn contiguous_estimates<T: Real>(bag: &SnapshotBag<T>, weights: &[usize]) -> Result<BTreeMap<PauliString, f64>> {
    let max_k = weights.iter().copied().max().unwrap_or(0).min(bag.sites());
    let mut strings = Vec::new();
    for k in 1..=max_k {
        strings.extend(enumerate_contiguous(bag.sites(), k)?);
    }
    let factors: Vec<Factors> = strings.iter().map(Factors::of).collect();
    let values = bag.bloch_table().estimate_many(&factors);
    Ok(strings.into_iter().zip(values.into_iter().map(|v| v.as_f64())).collect())
}

pub fn error_report<T: Real>(
    bag: &SnapshotBag<T>,
    exact: &ExactTable,
    h: &Hamiltonian,
    f: f64,
    weights: &[usize],
) -> Result<ErrorReport> {
    if bag.sites() != exact.sites {
        return Err(Error::Dimension { expected: exact.sites, found: bag.sites() });
    }
    let estimates = contiguous_estimates(bag, weights)?;
    let energy = CompiledHamiltonian::<T>::new(h).energy(&bag.bloch_table()).as_f64();
    error_report_from(&estimates, energy, exact, h, f, weights)
}

/// One smallest-eigenvalue observation of `M` from simulated shadows of `|0...0>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FloorSample {
    pub snapshots: usize,
    pub sites: usize,
    pub lambda_min: f64,
}

impl FloorSample {
    /// `lambda_min * sqrt(N)`.
    pub fn scaled(&self) -> f64 {
        self.lambda_min * (self.snapshots as f64).sqrt()
    }
}

pub fn simulate_floor_sample(sites: usize, snapshots: usize, seed: u64) -> Result<FloorSample> {
    let bag = born_sample::<f64>(&ProductState::zeros(sites), seed, snapshots, sites)?;
    let cache = crate::corrmat::ProductCache::for_sites(sites)?;
    let m = assemble(&bag, &cache)?;
    let lambda_min = eigvalsh(m.matrix())?[0];
    Ok(FloorSample { snapshots, sites, lambda_min })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FloorFit {
    pub floor: EigenFloor,
    /// Root-mean-square residual of `lambda_min sqrt(N)` about the fitted line.
    pub residual_sigma: f64,
    pub samples: Vec<FloorSample>,
}

impl FloorFit {
    pub fn predict(&self, sites: usize) -> f64 {
        self.floor.b0 - self.floor.alpha0 * sites as f64
    }
}

/// Least-squares fit of `lambda_min sqrt(N) = b0 - alpha0 L`.
pub fn fit_eigen_floor(samples: &[FloorSample]) -> Result<FloorFit> {
    let distinct = |key: fn(&FloorSample) -> usize| {
        let mut v: Vec<usize> = samples.iter().map(key).collect();
        v.sort_unstable();
        v.dedup();
        v.len()
    };
    if distinct(|s| s.sites) < 2 {
        return Err(Error::RankDeficient("need at least two distinct site counts".into()));
    }
    if distinct(|s| s.snapshots) < 2 {
        return Err(Error::RankDeficient("need at least two distinct snapshot counts".into()));
    }
    if samples.iter().any(|s| !s.lambda_min.is_finite() || s.snapshots == 0) {
        return Err(Error::Invalid("floor samples must have finite eigenvalues and N > 0".into()));
    }
    let n = samples.len() as f64;
    let mean_l = samples.iter().map(|s| s.sites as f64).sum::<f64>() / n;
    let mean_y = samples.iter().map(FloorSample::scaled).sum::<f64>() / n;
    let sxx: f64 = samples.iter().map(|s| (s.sites as f64 - mean_l).powi(2)).sum();
    let sxy: f64 = samples.iter().map(|s| (s.sites as f64 - mean_l) * (s.scaled() - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_l;
    let floor = EigenFloor { alpha0: -slope, b0: intercept };
    let residual_sigma = rms(samples.iter().map(|s| s.scaled() - (intercept + slope * s.sites as f64)));
    Ok(FloorFit { floor, residual_sigma, samples: samples.to_vec() })
}

/// Reference snapshot count `ceil(3^k ln(M) / eps^2)` for estimating `M` weight-`k` observables to accuracy `eps`.
pub fn shadow_budget(k: u32, m: u64, eps: f64) -> Result<u64> {
    if k == 0 || m == 0 || !(eps > 0.0) {
        return Err(Error::Invalid(format!("shadow budget needs k >= 1, M >= 1, eps > 0 (got {k}, {m}, {eps})")));
    }
    Ok((3f64.powi(k as i32) * (m as f64).ln() / (eps * eps)).ceil() as u64)
}

/// Inverse of [`shadow_budget`]: accuracy reached with `n` snapshots.
pub fn shadow_error(k: u32, m: u64, n: u64) -> f64 {
    (3f64.powi(k as i32) * (m as f64).ln() / n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::builtin;

    #[test]
    fn classical_ising() {
        let gs = ground_state(&builtin("ising", 4).unwrap()).unwrap();
        assert!((gs.energy + 4.0).abs() < 1e-10);
        assert!(gs.degenerate);
        let zz: PauliString = "ZZII".parse().unwrap();
        assert!((exact_expectation(&gs, &zz).unwrap() - 1.0).abs() < 1e-10);
        let id = PauliString::identity(4);
        assert!((exact_expectation(&gs, &id).unwrap() - 1.0).abs() < 1e-12);
        let weight: f64 = [0usize, 15].iter().map(|&i| gs.vector[i].norm_sqr()).sum();
        assert!((weight - 1.0).abs() < 1e-10);
    }

    #[test]
    fn ground_state_invariants() {
        let h = builtin("main", 6).unwrap();
        let gs = ground_state(&h).unwrap();
        assert!((norm(&gs.vector) - 1.0).abs() < 1e-12);
        let op = PauliOperator::new(&h).unwrap();
        let mut hv = vec![Complex64::new(0.0, 0.0); gs.vector.len()];
        op.apply(&gs.vector, &mut hv);
        axpy(Complex64::new(-gs.energy, 0.0), &gs.vector, &mut hv);
        assert!(norm(&hv) <= 1e-8);
        assert!(!gs.degenerate && gs.gap > 0.0);
    }

    #[test]
    fn envelope() {
        let h = builtin("H1", 15).unwrap();
        assert!(matches!(ground_state(&h), Err(Error::Unsupported(_))));
    }

    #[test]
    fn rms_toy() {
        assert!((rms([0.3, 0.4].into_iter()) - (0.125f64).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn synthetic_floor_recovered() {
        let mut samples = Vec::new();
        for &l in &[4usize, 6, 8, 10] {
            for &n in &[1024usize, 4096, 16384] {
                let lambda_min = (340.0 - 70.0 * l as f64) / (n as f64).sqrt();
                samples.push(FloorSample { snapshots: n, sites: l, lambda_min });
            }
        }
        let fit = fit_eigen_floor(&samples).unwrap();
        assert!((fit.floor.alpha0 - 70.0).abs() < 1e-10);
        assert!((fit.floor.b0 - 340.0).abs() < 1e-10);
        assert!(fit.residual_sigma < 1e-10);
        let one = [FloorSample { snapshots: 4096, sites: 4, lambda_min: -1.0 }];
        assert!(matches!(fit_eigen_floor(&one), Err(Error::RankDeficient(_))));
        let same_n: Vec<_> = samples.iter().filter(|s| s.snapshots == 4096).copied().collect();
        assert!(matches!(fit_eigen_floor(&same_n), Err(Error::RankDeficient(_))));
    }

    #[test]
    fn budget() {
        assert_eq!(shadow_budget(2, 400, 0.02).unwrap(), 134_808);
        assert_eq!(shadow_budget(1, 1, 1.0).unwrap(), 0);
        let a = shadow_budget(5, 1000, 0.1).unwrap() as f64;
        let b = shadow_budget(5, 1000, 0.05).unwrap() as f64;
        assert!((b / a - 4.0).abs() < 1e-4);
        assert!(shadow_budget(0, 10, 0.1).is_err());
        assert!((shadow_error(2, 400, 134_808) - 0.02).abs() < 1e-6);
    }

    #[test]
    fn csv_round_trip() {
        let gs = ground_state(&builtin("H2", 4).unwrap()).unwrap();
        let strings = ExactTable::standard_strings(4, &[2, 3]).unwrap();
        let t = ExactTable::from_ground_state(&gs, &strings).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let back = ExactTable::read_csv(&buf[..], t.energy, t.degenerate).unwrap();
        assert_eq!(back, t);
    }
}
