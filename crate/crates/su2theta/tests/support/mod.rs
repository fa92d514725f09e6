//! Independent numerical oracles shared by integration tests.
//!
//! Nothing here calls the library's Racah-sum evaluators: 3j symbols come
//! from a Clebsch-Gordan ladder recursion, the 6j from a brute-force
//! contraction of four 3j symbols. Agreement between the two routes is what
//! the recoupling tests assert.

#![allow(dead_code)]

use su2theta::half::Half;
use su2theta::wigner::triangle_ok;

/// Raising matrix element √(j(j+1) − m(m+1)) for |j m⟩ → |j m+1⟩.
fn ladder_up(j: f64, m: f64) -> f64 {
    (j * (j + 1.0) - m * (m + 1.0)).max(0.0).sqrt()
}

/// Lowering matrix element √(j(j+1) − m(m−1)) for |j m⟩ → |j m−1⟩.
fn ladder_down(j: f64, m: f64) -> f64 {
    (j * (j + 1.0) - m * (m - 1.0)).max(0.0).sqrt()
}

/// Clebsch-Gordan coefficient ⟨j1 m1 j2 m2 | j3 m3⟩ by ladder recursion.
///
/// The stretched state |j3 j3⟩ follows from the two-term recursion that
/// total raising annihilates it, normalized with the Condon-Shortley sign
/// (coefficient at m1 = j1 positive); lower m3 by applying total lowering.
/// No factorials appear anywhere.
pub fn clebsch_gordan(j1: Half, j2: Half, j3: Half, m1: Half, m2: Half, m3: Half) -> f64 {
    if !triangle_ok(j1, j2, j3)
        || (m1 + m2).twice() != m3.twice()
        || m1.abs() > j1
        || m2.abs() > j2
        || m3.abs() > j3
        || (j1.twice() + m1.twice()) % 2 != 0
        || (j2.twice() + m2.twice()) % 2 != 0
    {
        return 0.0;
    }
    let (fj1, fj2, fj3) = (j1.to_f64(), j2.to_f64(), j3.to_f64());

    // Coefficients of |j1 m1⟩|j2 m3−m1⟩ on the full grid m1 = −j1..j1;
    // entries outside the valid window of the current m3 stay exactly zero.
    let len = (j1.twice() + 1) as usize;
    let fm1_at = |k: usize| f64::from(-j1.twice() + 2 * k as i32) / 2.0;

    // Top state m3 = j3 from J+ annihilation, entered at its lowest valid m1.
    let k0 = ((-j1.twice()).max(j3.twice() - j2.twice()) + j1.twice()) as usize / 2;
    let mut c = vec![0.0f64; len];
    c[k0] = 1.0;
    for k in k0 + 1..len {
        let fm1 = fm1_at(k);
        c[k] = -c[k - 1] * ladder_up(fj1, fm1 - 1.0) / ladder_up(fj2, fj3 - fm1);
    }
    let norm: f64 = c.iter().map(|x| x * x).sum::<f64>().sqrt();
    let sign = c[len - 1].signum();
    for x in &mut c {
        *x *= sign / norm;
    }

    // Lower from m3 = j3 down to the requested m3.
    let mut tm3 = j3.twice();
    while tm3 > m3.twice() {
        let fm3 = f64::from(tm3) / 2.0;
        let mut next = vec![0.0f64; len];
        for (k, slot) in next.iter_mut().enumerate() {
            let fm1 = fm1_at(k);
            let mut amp = c[k] * ladder_down(fj2, fm3 - fm1);
            if k + 1 < len {
                amp += c[k + 1] * ladder_down(fj1, fm1 + 1.0);
            }
            *slot = amp / ladder_down(fj3, fm3);
        }
        c = next;
        tm3 -= 2;
    }

    c[((m1.twice() + j1.twice()) / 2) as usize]
}

/// 3j symbol from the Clebsch-Gordan oracle.
pub fn oracle_3j(j1: Half, j2: Half, j3: Half, m1: Half, m2: Half, m3: Half) -> f64 {
    let exp = (j1.twice() - j2.twice() - m3.twice()) / 2;
    let sign = if exp.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    sign * clebsch_gordan(j1, j2, j3, m1, m2, -m3) / f64::from(j3.twice() + 1).sqrt()
}

/// All magnetic numbers −j..j of a spin.
pub fn magnetics(j: Half) -> impl Iterator<Item = Half> {
    (-j.twice()..=j.twice()).step_by(2).map(Half::new)
}

/// 6j symbol by contracting four oracle 3j symbols over all magnetic numbers.
pub fn contract_6j(a: Half, b: Half, c: Half, d: Half, e: Half, f: Half) -> f64 {
    let mut total = 0.0;
    for alpha in magnetics(a) {
        for beta in magnetics(b) {
            let gamma = -(alpha + beta);
            if gamma.abs() > c {
                continue;
            }
            for delta in magnetics(d) {
                let phi = delta - beta;
                let eps = delta + gamma;
                if phi.abs() > f || eps.abs() > e {
                    continue;
                }
                let exp = (d + e + f + delta + eps + phi).twice() / 2;
                let sign = if exp.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                total += sign
                    * oracle_3j(a, b, c, alpha, beta, gamma)
                    * oracle_3j(a, e, f, alpha, eps, -phi)
                    * oracle_3j(d, b, f, -delta, beta, phi)
                    * oracle_3j(d, e, c, delta, -eps, gamma);
            }
        }
    }
    total
}

/// Every triad (j1,j2,j3) with all spins ≤ j_max that couples.
pub fn coupling_triads(j_max: Half) -> Vec<(Half, Half, Half)> {
    let mut out = Vec::new();
    for j1 in Half::ladder(j_max) {
        for j2 in Half::ladder(j_max) {
            for j3 in Half::ladder(j_max) {
                if triangle_ok(j1, j2, j3) {
                    out.push((j1, j2, j3));
                }
            }
        }
    }
    out
}
