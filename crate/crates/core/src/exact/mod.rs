//! Numerically exact reference for the Rabi model in a truncated Fock basis.
//!
//! Basis ordering is `|↓,0⟩, |↑,0⟩, |↓,1⟩, |↑,1⟩, …`, i.e. index `2n + s` with
//! `s = 0` for the lower and `s = 1` for the upper atomic level. Keeping
//! photon numbers `0..=n_cut` gives dimension `2 (n_cut + 1)`.

pub mod eigen;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{Branch, CoherentField, ModelParams, TimeGrid, TimeSeries};
use eigen::{symmetric_eigen, SymMatrix};

/// Default photon-number truncation.
pub const DEFAULT_N_CUT: usize = 60;

/// Relative energy window for treating eigenvalues as degenerate.
const DEGENERACY_TOL: f64 = 1e-9;

/// Threshold on `Σ p_j²` deficit above which truncation leakage is reported.
const LEAKAGE_TOL: f64 = 1e-10;

pub fn basis_index(up: bool, n: usize) -> usize {
    2 * n + usize::from(up)
}

/// `σ_z` on basis state `i`.
pub fn sigma_z(i: usize) -> f64 {
    if i % 2 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// `Π = σ_z (−1)^{a†a}` on basis state `i`.
pub fn parity(i: usize) -> f64 {
    let photon_sign = if (i / 2) % 2 == 0 { 1.0 } else { -1.0 };
    sigma_z(i) * photon_sign
}

#[derive(Debug, Clone)]
pub struct HamiltonianMatrix {
    pub matrix: SymMatrix,
    pub n_cut: usize,
    pub params: ModelParams,
}

impl HamiltonianMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

/// `H = (Δ/2)σ_z + ω a†a + g (a† + a) σ_x` truncated at `n_cut` photons.
pub fn build_hamiltonian(params: &ModelParams, n_cut: usize) -> HamiltonianMatrix {
    let dim = 2 * (n_cut + 1);
    let half = params.delta_atom() / 2.0;
    let mut m = SymMatrix::zeros(dim);
    for n in 0..=n_cut {
        let photons = n as f64 * params.omega();
        m.set(basis_index(false, n), basis_index(false, n), photons - half);
        m.set(basis_index(true, n), basis_index(true, n), photons + half);
        if n < n_cut {
            let c = params.g() * ((n + 1) as f64).sqrt();
            m.set_sym(basis_index(false, n), basis_index(true, n + 1), c);
            m.set_sym(basis_index(true, n), basis_index(false, n + 1), c);
        }
    }
    HamiltonianMatrix {
        matrix: m,
        n_cut,
        params: *params,
    }
}

#[derive(Debug, Clone)]
pub struct ExactEigensystem {
    pub energies: Vec<f64>,
    /// Column-major eigenvectors in the product basis.
    pub vectors: Vec<f64>,
    pub dim: usize,
    pub n_cut: usize,
    /// `max_j ‖H v_j − E_j v_j‖`.
    pub residual_norm: f64,
    pub orthonormality_error: f64,
}

impl ExactEigensystem {
    pub fn vector(&self, j: usize) -> &[f64] {
        &self.vectors[j * self.dim..(j + 1) * self.dim]
    }

    /// `⟨v_j|Π|v_j⟩`.
    pub fn parity_expectation(&self, j: usize) -> f64 {
        self.vector(j)
            .iter()
            .enumerate()
            .map(|(i, x)| parity(i) * x * x)
            .sum()
    }

    /// Indices of the eigenstates with parity `sign`, ascending in energy.
    pub fn sector_indices(&self, sign: i8) -> Vec<usize> {
        (0..self.dim)
            .filter(|&j| (self.parity_expectation(j) > 0.0) == (sign > 0))
            .collect()
    }

    /// Index of the exact state continuing the CRWA level `(k, n)`.
    ///
    /// The CRWA state `(k, n)` has parity `(−1)^n` and is the `(n + k)`-th
    /// state of that sector, counting the ground state as the first state of
    /// the negative sector. Valid while no levels cross within a sector.
    pub fn level_index(&self, k: Branch, n: usize) -> Option<usize> {
        let sign = if n % 2 == 0 { 1 } else { -1 };
        let rank = n + usize::from(k == Branch::Upper);
        self.sector_indices(sign).get(rank).copied()
    }

    pub fn level_energy(&self, k: Branch, n: usize) -> Option<f64> {
        self.level_index(k, n).map(|j| self.energies[j])
    }

    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }
}

/// Dense diagonalization, sorted ascending, with degenerate clusters rotated
/// onto parity eigenstates.
pub fn diagonalize(h: &HamiltonianMatrix) -> Result<ExactEigensystem> {
    let eig = symmetric_eigen(&h.matrix)?;
    let dim = eig.dim;
    let mut vectors = eig.vectors;
    let energies = eig.values;

    let mut start = 0;
    while start < dim {
        let mut end = start + 1;
        while end < dim
            && energies[end] - energies[end - 1] <= DEGENERACY_TOL * energies[end].abs().max(1.0)
        {
            end += 1;
        }
        if end - start > 1 {
            project_cluster(&mut vectors[start * dim..end * dim], dim)?;
        }
        start = end;
    }
    finish(h, energies, vectors)
}

fn finish(h: &HamiltonianMatrix, energies: Vec<f64>, vectors: Vec<f64>) -> Result<ExactEigensystem> {
    let dim = h.dim();
    let check = eigen::SymEigen {
        values: energies,
        vectors,
        dim,
    };
    let residual_norm = check.residual(&h.matrix);
    let orthonormality_error = check.orthonormality_error();
    let scale = h.matrix.norm().max(1.0);
    if residual_norm > 1e-10 * scale || orthonormality_error > 1e-10 {
        return Err(Error::NoConvergence {
            iterations: 0,
            residual: residual_norm.max(orthonormality_error),
        });
    }
    Ok(ExactEigensystem {
        energies: check.values,
        vectors: check.vectors,
        dim,
        n_cut: h.n_cut,
        residual_norm,
        orthonormality_error,
    })
}

/// Replaces the cluster's vectors with an orthonormal basis of the same span
/// made of parity eigenstates, negative sector first.
fn project_cluster(block: &mut [f64], dim: usize) -> Result<()> {
    let count = block.len() / dim;
    let originals: Vec<Vec<f64>> = block.chunks(dim).map(<[f64]>::to_vec).collect();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(count);
    for sign in [-1.0, 1.0] {
        for v in &originals {
            let mut w: Vec<f64> = v
                .iter()
                .enumerate()
                .map(|(i, x)| if parity(i) == sign { *x } else { 0.0 })
                .collect();
            for _ in 0..2 {
                for b in &basis {
                    let dot: f64 = b.iter().zip(&w).map(|(x, y)| x * y).sum();
                    for (wi, bi) in w.iter_mut().zip(b) {
                        *wi -= dot * bi;
                    }
                }
            }
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-6 && basis.len() < count {
                w.iter_mut().for_each(|x| *x /= norm);
                basis.push(w);
            }
        }
    }
    if basis.len() != count {
        return Err(Error::MixedParity {
            index: 0,
            value: basis.len() as f64 / count as f64,
        });
    }
    for (chunk, b) in block.chunks_mut(dim).zip(basis) {
        chunk.copy_from_slice(&b);
    }
    Ok(())
}

/// Diagonalizes the two parity blocks separately and merges them.
///
/// Same contract as [`diagonalize`]; cheaper, and the dense path serves as
/// its check.
pub fn diagonalize_by_parity(h: &HamiltonianMatrix) -> Result<ExactEigensystem> {
    let dim = h.dim();
    let mut pairs: Vec<(f64, Vec<f64>)> = Vec::with_capacity(dim);
    for sign in [-1.0, 1.0] {
        let idx: Vec<usize> = (0..dim).filter(|&i| parity(i) == sign).collect();
        let mut block = SymMatrix::zeros(idx.len());
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                block.set(a, b, h.matrix.get(i, j));
            }
        }
        let eig = symmetric_eigen(&block)?;
        for j in 0..idx.len() {
            let mut full = vec![0.0; dim];
            for (a, &i) in idx.iter().enumerate() {
                full[i] = eig.vector(j)[a];
            }
            pairs.push((eig.values[j], full));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let energies = pairs.iter().map(|p| p.0).collect();
    let vectors = pairs.into_iter().flat_map(|p| p.1).collect();
    finish(h, energies, vectors)
}

/// `⟨Π⟩` of every eigenvector, rounded to `±1`.
///
/// Fails if any eigenvector is not a parity eigenstate to `1e−6`.
pub fn parity_labels(eig: &ExactEigensystem) -> Result<Vec<i8>> {
    (0..eig.dim)
        .map(|j| {
            let value = eig.parity_expectation(j);
            if (value.abs() - 1.0).abs() > 1e-6 {
                Err(Error::MixedParity { index: j, value })
            } else if value > 0.0 {
                Ok(1)
            } else {
                Ok(-1)
            }
        })
        .collect()
}

/// `|↑⟩ ⊗ |α⟩` in the product basis, cut at `n_cut` photons, without
/// renormalization.
pub fn initial_state(field: &CoherentField, n_cut: usize) -> Vec<f64> {
    let mut psi = vec![0.0; 2 * (n_cut + 1)];
    for (n, beta) in field.betas.iter().enumerate().take(n_cut + 1) {
        psi[basis_index(true, n)] = *beta;
    }
    psi
}

/// Precomputed eigenbasis data for `W(t) = Σ_{jl} p_j p_l (σ_z)_{jl} cos((E_j − E_l) t)`.
#[derive(Debug, Clone)]
pub struct InversionEvaluator {
    energies: Vec<f64>,
    /// `p_j p_l (σ_z)_{jl}` over the retained states, row-major.
    weights: Vec<f64>,
    captured_norm: f64,
}

impl InversionEvaluator {
    pub fn new(eig: &ExactEigensystem, field: &CoherentField) -> Self {
        let psi = initial_state(field, eig.n_cut);
        let p: Vec<f64> = (0..eig.dim)
            .map(|j| eig.vector(j).iter().zip(&psi).map(|(a, b)| a * b).sum())
            .collect();
        let captured_norm = p.iter().map(|x| x * x).sum();
        let active: Vec<usize> = (0..eig.dim).filter(|&j| p[j].abs() > 1e-15).collect();
        let m = active.len();
        let mut weights = vec![0.0; m * m];
        for (a, &j) in active.iter().enumerate() {
            let vj = eig.vector(j);
            for (b, &l) in active.iter().enumerate().take(a + 1) {
                let vl = eig.vector(l);
                let sz: f64 = (0..eig.dim).map(|i| sigma_z(i) * vj[i] * vl[i]).sum();
                let w = p[j] * p[l] * sz;
                weights[a * m + b] = w;
                weights[b * m + a] = w;
            }
        }
        Self {
            energies: active.iter().map(|&j| eig.energies[j]).collect(),
            weights,
            captured_norm,
        }
    }

    /// `Σ_j p_j²`.
    pub fn captured_norm(&self) -> f64 {
        self.captured_norm
    }

    /// Message when the initial state leaks out of the truncated basis.
    pub fn leakage_warning(&self) -> Option<String> {
        (self.captured_norm < 1.0 - LEAKAGE_TOL).then(|| {
            format!(
                "initial state norm captured by the truncated basis is {:.3e} short of 1",
                1.0 - self.captured_norm
            )
        })
    }

    /// `cᵀAc + sᵀAs` with `c_j = cos(E_j t)`, `s_j = sin(E_j t)`.
    pub fn at(&self, t: f64) -> f64 {
        let m = self.energies.len();
        let (s, c): (Vec<f64>, Vec<f64>) = self.energies.iter().map(|e| (e * t).sin_cos()).unzip();
        let mut total = 0.0;
        for a in 0..m {
            let row = &self.weights[a * m..(a + 1) * m];
            let mut acc = 0.0;
            for b in 0..m {
                acc += row[b] * (c[a] * c[b] + s[a] * s[b]);
            }
            total += acc;
        }
        total
    }

    pub fn evaluate(&self, grid: &TimeGrid) -> TimeSeries {
        TimeSeries::from_fn(grid, |t| self.at(t))
    }
}

/// Exact `W(t)` for the atom in its upper level and the field in `field`.
pub fn exact_inversion(eig: &ExactEigensystem, field: &CoherentField, grid: &TimeGrid) -> TimeSeries {
    InversionEvaluator::new(eig, field).evaluate(grid)
}

/// Convenience: build, diagonalize and evaluate `W(t)` at truncation `n_cut`.
pub fn exact_inversion_for(
    params: &ModelParams,
    n_cut: usize,
    field: &CoherentField,
    grid: &TimeGrid,
) -> Result<TimeSeries> {
    let eig = diagonalize(&build_hamiltonian(params, n_cut))?;
    Ok(exact_inversion(&eig, field, grid))
}

/// `e^{−iHt} ψ0` through the eigenbasis.
pub fn evolve(eig: &ExactEigensystem, psi0: &[f64], t: f64) -> Vec<Complex64> {
    let mut psi = vec![Complex64::new(0.0, 0.0); eig.dim];
    for j in 0..eig.dim {
        let v = eig.vector(j);
        let p: f64 = v.iter().zip(psi0).map(|(a, b)| a * b).sum();
        let phase = Complex64::from_polar(p, -eig.energies[j] * t);
        for (out, x) in psi.iter_mut().zip(v) {
            *out += phase * x;
        }
    }
    psi
}

/// `Re ⟨ψ|H|ψ⟩`.
pub fn energy_expectation(h: &HamiltonianMatrix, psi: &[Complex64]) -> f64 {
    let re: Vec<f64> = psi.iter().map(|z| z.re).collect();
    let im: Vec<f64> = psi.iter().map(|z| z.im).collect();
    let hre = h.matrix.matvec(&re);
    let him = h.matrix.matvec(&im);
    re.iter().zip(&hre).map(|(a, b)| a * b).sum::<f64>()
        + im.iter().zip(&him).map(|(a, b)| a * b).sum::<f64>()
}

/// `⟨ψ|σ_z|ψ⟩`.
pub fn sigma_z_expectation(psi: &[Complex64]) -> f64 {
    psi.iter()
        .enumerate()
        .map(|(i, z)| sigma_z(i) * z.norm_sqr())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crwa::{crwa_energy_closed, ground_state, GroundStateOrder};
    use crate::model::{coherent_amplitudes, reduced_time_grid};

    fn system(g: f64, n_cut: usize) -> (HamiltonianMatrix, ExactEigensystem) {
        let h = build_hamiltonian(&ModelParams::resonant(g).unwrap(), n_cut);
        let eig = diagonalize(&h).unwrap();
        (h, eig)
    }

    #[test]
    fn decoupled_matrix() {
        let h = build_hamiltonian(&ModelParams::resonant(0.0).unwrap(), 1);
        let diag: Vec<f64> = (0..4).map(|i| h.matrix.get(i, i)).collect();
        assert_eq!(diag, vec![-0.5, 0.5, 0.5, 1.5]);
        assert_eq!(h.matrix.asymmetry(), 0.0);
    }

    #[test]
    fn coupling_entries() {
        let h = build_hamiltonian(&ModelParams::resonant(0.06).unwrap(), 1);
        // |down,0> <-> |up,1> and |up,0> <-> |down,1>
        assert_eq!(h.matrix.get(0, 3), 0.06);
        assert_eq!(h.matrix.get(1, 2), 0.06);
        assert_eq!(h.matrix.get(0, 1), 0.0);
        assert_eq!(h.matrix.get(0, 2), 0.0);
        let h = build_hamiltonian(&ModelParams::resonant(0.3).unwrap(), 7);
        assert_eq!(h.matrix.asymmetry(), 0.0);
        assert!((h.matrix.get(basis_index(true, 3), basis_index(false, 4)) - 0.6).abs() < 1e-15);
    }

    #[test]
    fn decoupled_spectrum_and_parity() {
        let (_, eig) = system(0.0, 10);
        let mut expected: Vec<f64> = (0..=10)
            .flat_map(|n| [n as f64 - 0.5, n as f64 + 0.5])
            .collect();
        expected.sort_by(f64::total_cmp);
        for (e, x) in eig.energies.iter().zip(&expected) {
            assert!((e - x).abs() < 1e-12);
        }
        for j in 0..eig.dim {
            assert!((eig.parity_expectation(j).abs() - 1.0).abs() < 1e-12);
        }
        assert!(parity_labels(&eig).is_ok());
    }

    #[test]
    fn eigensystem_contract() {
        let (h, eig) = system(0.2, 120);
        assert_eq!(eig.dim, 242);
        assert!(eig.residual_norm <= 1e-10 * h.matrix.norm());
        assert!(eig.orthonormality_error < 1e-10);
        assert!(eig.energies.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn parity_block_path_matches_dense() {
        let h = build_hamiltonian(&ModelParams::resonant(0.15).unwrap(), 40);
        let dense = diagonalize(&h).unwrap();
        let blocks = diagonalize_by_parity(&h).unwrap();
        for (a, b) in dense.energies.iter().zip(&blocks.energies) {
            assert!((a - b).abs() < 1e-11);
        }
        assert_eq!(parity_labels(&dense).unwrap(), parity_labels(&blocks).unwrap());
    }

    #[test]
    fn parity_labels_at_small_coupling() {
        let (_, eig) = system(0.1, 60);
        for j in 0..eig.dim {
            assert!((eig.parity_expectation(j).abs() - 1.0).abs() < 1e-8);
        }
        let labels = parity_labels(&eig).unwrap();
        // -, +, +, -, -, +, + ...
        assert_eq!(labels[0], -1);
        for (j, pair) in labels[1..21].chunks(2).enumerate() {
            let expect = if j % 2 == 0 { 1 } else { -1 };
            assert_eq!(pair, &[expect, expect]);
        }
    }

    #[test]
    fn ground_energy_against_second_order() {
        let err = |g: f64| {
            let (_, eig) = system(g, 60);
            (eig.ground_energy() - ground_state(g, GroundStateOrder::Second).energy).abs()
        };
        let e = err(0.06);
        assert!(e < 0.06f64.powi(6));
        assert!((err(0.2) / err(0.1) - 64.0).abs() < 8.0);
    }

    #[test]
    fn truncation_doubling() {
        let (_, a) = system(0.2, 60);
        let (_, b) = system(0.2, 120);
        for j in 0..40 {
            assert!((a.energies[j] - b.energies[j]).abs() < 1e-10);
        }
    }

    #[test]
    fn level_labelling() {
        let (_, eig) = system(0.05, 30);
        assert_eq!(eig.level_index(Branch::Lower, 0), Some(1));
        assert_eq!(eig.level_index(Branch::Upper, 0), Some(2));
        assert_eq!(eig.level_index(Branch::Lower, 1), Some(3));
        for n in 0..6 {
            for k in Branch::BOTH {
                let e = eig.level_energy(k, n).unwrap();
                // CRWA misses the shift by about n g^2 / 4
                assert!((e - crwa_energy_closed(k, n, 0.05)).abs() < 0.5 * (n + 1) as f64 * 0.0025);
            }
        }
    }

    #[test]
    fn inversion_is_frozen_without_coupling() {
        let (_, eig) = system(0.0, 40);
        let field = coherent_amplitudes(10f64.sqrt(), 40).unwrap();
        let grid = TimeGrid::uniform(0.0, 50.0, 51, 1.0).unwrap();
        let w = exact_inversion(&eig, &field, &grid);
        let expect = 1.0 - field.tail_deficit;
        assert!(w.values.iter().all(|x| (x - expect).abs() < 1e-12));
    }

    #[test]
    fn inversion_matches_propagated_state() {
        let g = 0.06;
        let (h, eig) = system(g, 60);
        let field = coherent_amplitudes(10f64.sqrt(), 60).unwrap();
        let grid = reduced_time_grid(30.0, 7, g).unwrap();
        let w = exact_inversion(&eig, &field, &grid);
        assert!((w.values[0] - (1.0 - field.tail_deficit)).abs() < 1e-12);
        let psi0 = initial_state(&field, 60);
        let psi0c: Vec<Complex64> = psi0.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let e0 = energy_expectation(&h, &psi0c);
        for (t, wt) in grid.times().iter().zip(&w.values) {
            let psi = evolve(&eig, &psi0, *t);
            assert!((sigma_z_expectation(&psi) - wt).abs() < 1e-11);
            assert!((energy_expectation(&h, &psi) - e0).abs() < 1e-10);
        }
    }

    #[test]
    fn leakage_reported_for_short_basis() {
        let field = coherent_amplitudes(10f64.sqrt(), 60).unwrap();
        let (_, eig) = system(0.06, 8);
        let eval = InversionEvaluator::new(&eig, &field);
        assert!(eval.leakage_warning().is_some());
        let (_, eig) = system(0.06, 60);
        assert!(InversionEvaluator::new(&eig, &field).leakage_warning().is_none());
    }
}
