//! Gauge-invariant spin triples on the Θ-graph and their Hamiltonian.
//!
//! Two trivalent vertices joined by three edges force all three edge spins
//! into a single coupling triad, so a basis state is one triple (j1,j2,j3)
//! passing the integer-sum and triangle conditions. The Hamiltonian mixes
//! an electric Casimir term with plaquette operators on each edge pair,
//! weighted by a single coupling λ.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::half::Half;
use crate::linalg::{eigh, DMat, Spectrum};
use crate::wigner::{triangle_ok, wigner_6j};
use crate::Error;

/// One basis state: the three edge spins.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct ThetaState {
    pub j1: Half,
    pub j2: Half,
    pub j3: Half,
}

impl ThetaState {
    pub fn new(j1: Half, j2: Half, j3: Half) -> ThetaState {
        ThetaState { j1, j2, j3 }
    }

    pub fn js(&self) -> [Half; 3] {
        [self.j1, self.j2, self.j3]
    }

    /// Both graph vertices impose the same triad condition.
    pub fn is_physical(&self) -> bool {
        triangle_ok(self.j1, self.j2, self.j3)
    }

    /// Σ_a j_a(j_a+1), the electric energy.
    pub fn electric_energy(&self) -> f64 {
        self.js().iter().map(|j| j.casimir()).sum()
    }
}

impl std::fmt::Display for ThetaState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{})", self.j1, self.j2, self.j3)
    }
}

/// Ordered physical basis below a spin cutoff.
#[derive(Clone, Debug)]
pub struct ThetaBasis {
    j_max: Half,
    states: Vec<ThetaState>,
    index: HashMap<ThetaState, usize>,
}

impl ThetaBasis {
    pub fn j_max(&self) -> Half {
        self.j_max
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[ThetaState] {
        &self.states
    }

    pub fn state(&self, i: usize) -> ThetaState {
        self.states[i]
    }

    pub fn position(&self, s: &ThetaState) -> Option<usize> {
        self.index.get(s).copied()
    }
}

/// All physical triples with every spin ≤ j_max, lexicographic in
/// (2j1, 2j2, 2j3).
pub fn enumerate_basis(j_max: Half) -> ThetaBasis {
    let mut states = Vec::new();
    for j1 in Half::ladder(j_max) {
        for j2 in Half::ladder(j_max) {
            for j3 in Half::ladder(j_max) {
                let s = ThetaState::new(j1, j2, j3);
                if s.is_physical() {
                    states.push(s);
                }
            }
        }
    }
    let index = states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    ThetaBasis { j_max, states, index }
}

/// Coupling point λ ∈ [0,1]: electric weight 1−λ², magnetic weight 2λ².
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    lambda: f64,
}

impl Coupling {
    pub fn new(lambda: f64) -> Result<Coupling, Error> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::BadCoupling { lambda });
        }
        Ok(Coupling { lambda })
    }

    pub fn lambda(self) -> f64 {
        self.lambda
    }

    pub fn g_electric(self) -> f64 {
        1.0 - self.lambda * self.lambda
    }

    pub fn g_magnetic(self) -> f64 {
        2.0 * self.lambda * self.lambda
    }
}

/// Edge pair carrying a plaquette operator.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Pair {
    P12,
    P13,
    P23,
}

impl Pair {
    pub const ALL: [Pair; 3] = [Pair::P12, Pair::P13, Pair::P23];

    /// Zero-based positions of the two acted-on spins and the spectator.
    pub fn indices(self) -> (usize, usize, usize) {
        match self {
            Pair::P12 => (0, 1, 2),
            Pair::P13 => (0, 2, 1),
            Pair::P23 => (1, 2, 0),
        }
    }
}

impl std::fmt::Display for Pair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (a, b, _) = self.indices();
        write!(f, "({},{})", a + 1, b + 1)
    }
}

/// Diagonal of the electric Hamiltonian.
pub fn h_electric(basis: &ThetaBasis) -> Vec<f64> {
    basis.states().iter().map(ThetaState::electric_energy).collect()
}

/// Symmetric plaquette operator on one edge pair.
///
/// A matrix element connects triples whose paired spins each move by ±1/2
/// while the spectator is unchanged, with weight
/// √(d_{j_a} d_{j_a'} d_{j_b} d_{j_b'}) · {j_a j_b j_c; j_b' j_a' 1/2}².
pub fn h_magnetic_plaquette(basis: &ThetaBasis, pair: Pair) -> DMat {
    let (ia, ib, ic) = pair.indices();
    let mut m = DMat::zeros(basis.len());
    let half = Half::HALF;
    for (row, s) in basis.states().iter().enumerate() {
        let js = s.js();
        for da in [-1i32, 1] {
            for db in [-1i32, 1] {
                let ja_new = Half::new(js[ia].twice() + da);
                let jb_new = Half::new(js[ib].twice() + db);
                if ja_new.twice() < 0 || jb_new.twice() < 0 {
                    continue;
                }
                let mut js_new = js;
                js_new[ia] = ja_new;
                js_new[ib] = jb_new;
                let target = ThetaState::new(js_new[0], js_new[1], js_new[2]);
                let Some(col) = basis.position(&target) else { continue };
                if col < row {
                    continue;
                }
                let dims = f64::from(
                    js[ia].dim() * ja_new.dim() * js[ib].dim() * jb_new.dim(),
                );
                let six = wigner_6j(js[ia], js[ib], js[ic], jb_new, ja_new, half);
                let value = dims.sqrt() * six * six;
                m[(row, col)] = value;
                m[(col, row)] = value;
            }
        }
    }
    m
}

/// Full Hamiltonian H(λ) = (1−λ²)·H_E − 2λ²·Σ_pairs H_□.
pub fn hamiltonian(basis: &ThetaBasis, c: Coupling) -> DMat {
    let mut h = DMat::zeros(basis.len());
    let ge = c.g_electric();
    for (i, e) in h_electric(basis).into_iter().enumerate() {
        h[(i, i)] = ge * e;
    }
    let gb = c.g_magnetic();
    for pair in Pair::ALL {
        h.add_scaled(-gb, &h_magnetic_plaquette(basis, pair));
    }
    h
}

/// Diagonalizes H(λ) on the cutoff basis.
pub fn solve(basis: &ThetaBasis, c: Coupling) -> Spectrum {
    eigh(&hamiltonian(basis, c)).expect("model Hamiltonian is symmetric by construction")
}

/// 2-point correlator c_P = ½⟨Ω|H_□(a,b)|Ω⟩ for a normalized state Ω.
pub fn correlator(omega: &[f64], basis: &ThetaBasis, pair: Pair) -> Result<f64, Error> {
    let norm: f64 = omega.iter().map(|x| x * x).sum();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::Unnormalized { norm: norm.sqrt() });
    }
    Ok(0.5 * h_magnetic_plaquette(basis, pair).quad_form(omega))
}

/// Cutoff uncertainty at one coupling: ground energy at the reference
/// cutoff and its distance to a (near-)converged cutoff.
pub fn cutoff_band(lambda: f64, j_ref: Half, j_conv: Half) -> Result<(f64, f64), Error> {
    if j_conv <= j_ref {
        return Err(Error::BadCutoffPair { j_ref, j_conv });
    }
    let c = Coupling::new(lambda)?;
    let e_ref = solve(&enumerate_basis(j_ref), c).ground_energy();
    let e_conv = solve(&enumerate_basis(j_conv), c).ground_energy();
    Ok((e_ref, (e_ref - e_conv).abs()))
}

/// Uniform λ grid on [0,1] with `n` points (n ≥ 2).
pub fn lambda_grid(n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

/// One row of the exact-sweep report.
#[derive(Clone, Debug, Serialize)]
pub struct ExactRow {
    pub lambda: f64,
    pub j_max: Half,
    pub e0: f64,
    pub e1: f64,
    pub gap: f64,
    pub c_p: f64,
    pub band_width: f64,
}

/// Exact spectra over a λ grid for each cutoff, with the correlator on the
/// (1,2) pair and the cutoff band against `j_conv`.
pub fn exact_sweep(j_max_list: &[Half], grid: &[f64], j_conv: Half) -> Result<Vec<ExactRow>, Error> {
    let j_top = j_max_list.iter().copied().max().unwrap_or(j_conv).max(j_conv);
    let conv_basis = enumerate_basis(j_top);
    let conv_e0 = crate::exec::collect_indexed(grid.len(), |k| {
        Coupling::new(grid[k]).map(|c| solve(&conv_basis, c).ground_energy())
    })
    .into_iter()
    .collect::<Result<Vec<f64>, Error>>()?;

    let mut rows = Vec::new();
    for &j_max in j_max_list {
        let basis = enumerate_basis(j_max);
        let per_lambda = crate::exec::collect_indexed(grid.len(), |k| {
            let c = Coupling::new(grid[k])?;
            let spec = solve(&basis, c);
            let (e0, omega) = spec.ground_state();
            let c_p = correlator(omega, &basis, Pair::P12)?;
            let band = if basis.len() == conv_basis.len() {
                0.0
            } else {
                (e0 - conv_e0[k]).abs()
            };
            Ok(ExactRow {
                lambda: grid[k],
                j_max,
                e0,
                e1: spec.energies[1.min(spec.energies.len() - 1)],
                gap: if spec.energies.len() > 1 { spec.gap() } else { 0.0 },
                c_p,
                band_width: band,
            })
        });
        for row in per_lambda {
            rows.push(row?);
        }
    }
    Ok(rows)
}
