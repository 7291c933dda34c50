//! Correlation matrix `M[b][a] = <P_b P_a>` over the weight-<=2 Pauli basis,
//! its angle derivatives, and the energy estimator.

use std::collections::HashMap;
use std::io::Write;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::model::Hamiltonian;
use crate::pauli::{enumerate_basis, PauliString, Phase};
use crate::scalar::Real;
use crate::shadows::{BlochTable, Factors, SnapshotBag};
use crate::spectral::HermitianMatrix;

/// `phase * value` with the zero component exactly zero.
pub fn phased<T: Real>(phase: Phase, value: T) -> Complex<T> {
    let z = T::zero();
    match phase.power_of_i() {
        0 => Complex::new(value, z),
        1 => Complex::new(z, value),
        2 => Complex::new(-value, z),
        _ => Complex::new(z, -value),
    }
}

/// Every basis product `P_b P_a` precomputed once: the phase and an index into
/// the list of distinct product strings.
#[derive(Debug, Clone)]
pub struct ProductCache {
    sites: usize,
    basis: Vec<PauliString>,
    strings: Vec<PauliString>,
    factors: Vec<Factors>,
    entries: Vec<(Phase, u32)>,
}

impl ProductCache {
    pub fn new(basis: Vec<PauliString>) -> Result<Self> {
        let sites = basis.first().map(PauliString::len).ok_or_else(|| Error::Invalid("empty basis".into()))?;
        let dim = basis.len();
        let mut index: HashMap<PauliString, u32> = HashMap::new();
        let mut strings = Vec::new();
        let mut entries = Vec::with_capacity(dim * dim);
        for b in &basis {
            for a in &basis {
                let (phase, s) = b.mul(a)?;
                let next = strings.len() as u32;
                let id = *index.entry(s.clone()).or_insert_with(|| {
                    strings.push(s);
                    next
                });
                entries.push((phase, id));
            }
        }
        let factors = strings.iter().map(Factors::of).collect();
        Ok(Self { sites, basis, strings, factors, entries })
    }

    /// Cache over the weight-<=2 basis of an `L`-site chain.
    pub fn for_sites(sites: usize) -> Result<Self> {
        Self::new(enumerate_basis(sites, 2)?)
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[PauliString] {
        &self.basis
    }

    /// Distinct product strings, indexed as in [`ProductCache::index`].
    pub fn strings(&self) -> &[PauliString] {
        &self.strings
    }

    pub fn factors(&self) -> &[Factors] {
        &self.factors
    }

    pub fn index(&self, row: usize, col: usize) -> (Phase, usize) {
        let (p, i) = self.entries[row * self.dim() + col];
        (p, i as usize)
    }

    pub fn get(&self, row: usize, col: usize) -> (Phase, &PauliString) {
        let (p, i) = self.index(row, col);
        (p, &self.strings[i])
    }

    fn check(&self, bag_sites: usize) -> Result<()> {
        if bag_sites != self.sites {
            return Err(Error::Dimension { expected: self.sites, found: bag_sites });
        }
        Ok(())
    }

    /// Per-string weights `G_c` with `Tr(W dM) = sum_c G_c d<P_c>` for any
    /// Hermitian `W`, i.e. `G_c = Re sum_{(b,a) -> c} W[a][b] phase(b,a)`.
    pub fn contract<T: Real>(&self, w: &HermitianMatrix<T>) -> Vec<T> {
        let d = self.dim();
        let mut g = vec![T::zero(); self.strings.len()];
        for b in 0..d {
            for a in 0..d {
                let (phase, idx) = self.entries[b * d + a];
                let wab = w.get(a, b);
                // Re(wab * phase)
                let contribution = match phase.power_of_i() {
                    0 => wab.re,
                    1 => -wab.im,
                    2 => -wab.re,
                    _ => wab.im,
                };
                g[idx as usize] = g[idx as usize] + contribution;
            }
        }
        g
    }
}

/// Estimated correlation matrix together with the distinct-string estimates it was built from.
#[derive(Debug, Clone)]
pub struct CorrelationMatrix<T> {
    matrix: HermitianMatrix<T>,
    estimates: Vec<T>,
}

impl<T: Real> CorrelationMatrix<T> {
    pub fn from_estimates(cache: &ProductCache, estimates: Vec<T>) -> Result<Self> {
        if estimates.len() != cache.strings.len() {
            return Err(Error::Dimension { expected: cache.strings.len(), found: estimates.len() });
        }
        let data = cache.entries.iter().map(|&(p, i)| phased(p, estimates[i as usize])).collect();
        let matrix = HermitianMatrix::new(cache.dim(), data)?;
        Ok(Self { matrix, estimates })
    }

    pub fn matrix(&self) -> &HermitianMatrix<T> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex<T> {
        self.matrix.get(row, col)
    }

    /// Estimates of the distinct product strings (see [`ProductCache::strings`]).
    pub fn estimates(&self) -> &[T] {
        &self.estimates
    }

    /// CSV with basis labels on the first row and column; entries as `re+imj`.
    pub fn export_csv<W: Write>(&self, cache: &ProductCache, out: &mut W) -> Result<()> {
        let labels: Vec<String> = cache.basis().iter().map(|s| s.to_string()).collect();
        writeln!(out, "basis,{}", labels.join(","))?;
        for (r, label) in labels.iter().enumerate() {
            write!(out, "{label}")?;
            for c in 0..self.dim() {
                let z = self.entry(r, c);
                let sign = if z.im.is_sign_negative() { '-' } else { '+' };
                write!(out, ",{}{}{}j", z.re, sign, z.im.abs())?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Builds `M` from the bag's shadow estimates.
pub fn assemble<T: Real>(bag: &SnapshotBag<T>, cache: &ProductCache) -> Result<CorrelationMatrix<T>> {
    cache.check(bag.sites())?;
    assemble_from_table(&bag.bloch_table(), cache)
}

pub fn assemble_from_table<T: Real>(table: &BlochTable<T>, cache: &ProductCache) -> Result<CorrelationMatrix<T>> {
    CorrelationMatrix::from_estimates(cache, table.estimate_many(cache.factors()))
}

/// Nonzero entries of `dM / d theta_{j,l}`.
#[derive(Debug, Clone)]
pub struct SparseDerivative<T> {
    pub dim: usize,
    pub entries: Vec<(usize, usize, Complex<T>)>,
}

impl<T: Real> SparseDerivative<T> {
    /// `Tr(W dM) = sum W[a][b] dM[b][a]`.
    pub fn trace_with(&self, w: &HermitianMatrix<T>) -> T {
        self.entries.iter().map(|&(b, a, d)| (w.get(a, b) * d).re).sum()
    }
}

/// Only entries whose product string acts on site `j` can depend on `theta_{j,l}`.
pub fn assemble_derivative<T: Real>(
    bag: &SnapshotBag<T>,
    cache: &ProductCache,
    j: usize,
    l: usize,
) -> Result<SparseDerivative<T>> {
    cache.check(bag.sites())?;
    if j >= bag.sites() || l >= bag.snapshots() {
        return Err(Error::Invalid(format!("parameter ({j}, {l}) out of range")));
    }
    let inv_n = T::one() / T::of(bag.snapshots() as f64);
    let mut per_string: Vec<Option<T>> = vec![None; cache.strings.len()];
    for (i, s) in cache.strings.iter().enumerate() {
        if cache.factors[i].touches(j) {
            per_string[i] = Some(bag.snapshot_expectation_grad(l, j, s)? * inv_n);
        }
    }
    let d = cache.dim();
    let mut entries = Vec::new();
    for b in 0..d {
        for a in 0..d {
            let (phase, idx) = cache.entries[b * d + a];
            if let Some(v) = per_string[idx as usize] {
                entries.push((b, a, phased(phase, v)));
            }
        }
    }
    Ok(SparseDerivative { dim: d, entries })
}

/// Hamiltonian terms flattened for the shadow kernels.
#[derive(Debug, Clone)]
pub struct CompiledHamiltonian<T> {
    sites: usize,
    terms: Vec<(T, Factors)>,
}

impl<T: Real> CompiledHamiltonian<T> {
    pub fn new(h: &Hamiltonian) -> Self {
        Self {
            sites: h.sites(),
            terms: h.terms().iter().map(|(c, s)| (T::of(*c), Factors::of(s))).collect(),
        }
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn energy(&self, table: &BlochTable<T>) -> T {
        let factors: Vec<Factors> = self.terms.iter().map(|(_, f)| f.clone()).collect();
        let est = table.estimate_many(&factors);
        self.terms.iter().zip(est).fold(T::zero(), |acc, ((c, _), e)| acc + *c * e)
    }

    /// Row-major `N x L` gradient of the energy estimate.
    pub fn gradient(&self, table: &BlochTable<T>) -> Vec<T> {
        let weighted: Vec<(T, &Factors)> = self.terms.iter().map(|(c, f)| (*c, f)).collect();
        table.gradient(&weighted)
    }
}

/// `sum_m c_m <P_m>` under the bag's shadow.
pub fn energy<T: Real>(bag: &SnapshotBag<T>, h: &Hamiltonian) -> Result<T> {
    if h.sites() != bag.sites() {
        return Err(Error::Dimension { expected: bag.sites(), found: h.sites() });
    }
    Ok(CompiledHamiltonian::new(h).energy(&bag.bloch_table()))
}

/// `d energy / d theta_{j,l}`, row-major `N x L`.
pub fn energy_grad<T: Real>(bag: &SnapshotBag<T>, h: &Hamiltonian) -> Result<Vec<T>> {
    if h.sites() != bag.sites() {
        return Err(Error::Dimension { expected: bag.sites(), found: h.sites() });
    }
    Ok(CompiledHamiltonian::new(h).gradient(&bag.bloch_table()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::builtin;
    use crate::shadows::{born_sample, sample_haar, ProductState};

    fn random_bag(sites: usize, snapshots: usize, seed: u64) -> SnapshotBag<f64> {
        let mut bag = sample_haar::<f64>(seed, snapshots, sites).unwrap();
        for (i, t) in bag.theta_mut().iter_mut().enumerate() {
            *t = ((i as f64 + 0.5) * 2.17 + seed as f64).sin() * 3.0;
        }
        bag
    }

    #[test]
    fn cache_basics() {
        let cache = ProductCache::for_sites(3).unwrap();
        assert_eq!(cache.dim(), 1 + 9 + 27);
        for a in 0..cache.dim() {
            let (p, s) = cache.get(a, a);
            assert_eq!(p, Phase::ONE);
            assert!(s.is_identity());
        }
        let x0 = cache.basis().iter().position(|s| s.to_string() == "XII").unwrap();
        let y0 = cache.basis().iter().position(|s| s.to_string() == "YII").unwrap();
        let (p, s) = cache.get(x0, y0);
        assert_eq!((p, s.to_string().as_str()), (Phase::I, "ZII"));
        let zz = cache.basis().iter().position(|s| s.to_string() == "ZZI").unwrap();
        let xx = cache.basis().iter().position(|s| s.to_string() == "IXX").unwrap();
        let (p, s) = cache.get(zz, xx);
        // Z0 Z1 * X1 X2 = Z0 (ZX)1 X2 = i Z0 Y1 X2
        assert_eq!((p, s.to_string().as_str()), (Phase::I, "ZYX"));
        assert!(cache.strings().iter().all(|s| s.weight() <= 4));
    }

    #[test]
    fn matrix_invariants() {
        let bag = random_bag(4, 32, 1);
        let cache = ProductCache::for_sites(4).unwrap();
        let m = assemble(&bag, &cache).unwrap();
        for r in 0..m.dim() {
            assert_eq!(m.entry(r, r), Complex::new(1.0, 0.0));
            for c in 0..m.dim() {
                let z = m.entry(r, c);
                assert_eq!(z, m.entry(c, r).conj());
                assert_eq!(z.re.abs().min(z.im.abs()), 0.0);
            }
        }
    }

    #[test]
    fn product_state_correlations() {
        let bag = born_sample::<f64>(&ProductState::zeros(3), 3, 40_000, 3).unwrap();
        let cache = ProductCache::for_sites(3).unwrap();
        let m = assemble(&bag, &cache).unwrap();
        let z0 = cache.basis().iter().position(|s| s.to_string() == "ZII").unwrap();
        let z1 = cache.basis().iter().position(|s| s.to_string() == "IZI").unwrap();
        // single-shot ZZ estimate has variance 8
        assert!((m.entry(z0, z1).re - 1.0).abs() < 5.0 * (8.0f64 / 40_000.0).sqrt());
    }

    #[test]
    fn derivative_support_and_contraction() {
        let bag = random_bag(4, 16, 2);
        let cache = ProductCache::for_sites(4).unwrap();
        let (j, l) = (2, 5);
        let d = assemble_derivative(&bag, &cache, j, l).unwrap();
        for &(b, a, _) in &d.entries {
            assert!(cache.get(b, a).1.axis(j) != crate::pauli::PauliAxis::I);
        }
        // brute-force count of entries touching site j
        let want = (0..cache.dim())
            .flat_map(|b| (0..cache.dim()).map(move |a| (b, a)))
            .filter(|&(b, a)| cache.get(b, a).1.axis(j) != crate::pauli::PauliAxis::I)
            .count();
        assert_eq!(d.entries.len(), want);

        let w = crate::spectral::eigh(assemble(&bag, &cache).unwrap().matrix()).unwrap().reconstruct_with(|v| v.sin());
        let g = cache.contract(&w);
        let weighted: Vec<(f64, &Factors)> = g.iter().copied().zip(cache.factors()).collect();
        let fast = bag.bloch_table().gradient(&weighted);
        assert!((fast[l * 4 + j] - d.trace_with(&w)).abs() < 1e-11);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let bag = random_bag(4, 8, 3);
        let cache = ProductCache::for_sites(4).unwrap();
        for (j, l) in [(0, 0), (3, 7), (1, 4)] {
            let d = assemble_derivative(&bag, &cache, j, l).unwrap();
            let h = 1e-5;
            let mut plus = bag.clone();
            plus.theta_mut()[l * 4 + j] += h;
            let mut minus = bag.clone();
            minus.theta_mut()[l * 4 + j] -= h;
            let (mp, mm) = (assemble(&plus, &cache).unwrap(), assemble(&minus, &cache).unwrap());
            for &(b, a, v) in &d.entries {
                let fd = (mp.entry(b, a) - mm.entry(b, a)) / (2.0 * h);
                assert!((fd - v).norm() <= 1e-6 * v.norm().max(1e-2), "({b},{a})");
            }
        }
    }

    #[test]
    fn derivative_nonzero_count_at_eight_sites() {
        let bag = random_bag(8, 2, 4);
        let cache = ProductCache::for_sites(8).unwrap();
        let d = assemble_derivative(&bag, &cache, 3, 1).unwrap();
        let filtered = (0..cache.dim())
            .map(|b| (0..cache.dim()).filter(|&a| cache.get(b, a).1.axis(3) != crate::pauli::PauliAxis::I).count())
            .sum::<usize>();
        assert_eq!(d.entries.len(), filtered);
        assert!(d.entries.len() < cache.dim() * cache.dim());
    }

    #[test]
    fn energy_cases() {
        let bag = random_bag(4, 16, 5);
        let empty = Hamiltonian::new("empty", 4, vec![]).unwrap();
        assert_eq!(energy(&bag, &empty).unwrap(), 0.0);

        let h = builtin("main", 4).unwrap();
        let g1 = energy_grad(&bag, &h).unwrap();
        let doubled = Hamiltonian::new("x2", 4, h.terms().iter().map(|(c, s)| (2.0 * c, s.clone())).collect()).unwrap();
        let g2 = energy_grad(&bag, &doubled).unwrap();
        for (a, b) in g1.iter().zip(&g2) {
            assert_eq!(2.0 * a, *b);
        }

        // site 3 untouched by any term: its gradient column vanishes
        let local = Hamiltonian::new("local", 4, vec![(1.0, "XZII".parse().unwrap()), (0.5, "IYII".parse().unwrap())]).unwrap();
        let g = energy_grad(&bag, &local).unwrap();
        assert!((0..16).all(|l| g[l * 4 + 3] == 0.0 && g[l * 4 + 2] == 0.0));
    }

    #[test]
    fn energy_gradient_matches_finite_difference() {
        let bag = random_bag(4, 16, 6);
        let h = builtin("main", 4).unwrap();
        let g = energy_grad(&bag, &h).unwrap();
        for idx in [0, 7, 33, 63] {
            let step = 1e-5;
            let mut p = bag.clone();
            p.theta_mut()[idx] += step;
            let mut m = bag.clone();
            m.theta_mut()[idx] -= step;
            let fd = (energy(&p, &h).unwrap() - energy(&m, &h).unwrap()) / (2.0 * step);
            assert!((fd - g[idx]).abs() <= 1e-6 * g[idx].abs().max(1e-3));
        }
    }

    #[test]
    fn csv_export() {
        let bag = random_bag(2, 4, 7);
        let cache = ProductCache::for_sites(2).unwrap();
        let m = assemble(&bag, &cache).unwrap();
        let mut buf = Vec::new();
        m.export_csv(&cache, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 1 + cache.dim());
        assert!(lines[0].starts_with("basis,II,XI,YI,ZI,IX"));
        assert!(lines[1].starts_with("II,1+0j,"));
    }

    #[test]
    fn mismatched_sites_rejected() {
        let bag = random_bag(3, 4, 8);
        let cache = ProductCache::for_sites(4).unwrap();
        assert!(matches!(assemble(&bag, &cache), Err(Error::Dimension { .. })));
    }
}
