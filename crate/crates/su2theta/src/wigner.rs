//! Wigner 3j and 6j symbols via Racah's closed-form sums.
//!
//! The alternating sums cancel catastrophically in plain doubles, so every
//! term is evaluated as an exact `i128` fraction; only the final square
//! root and the conversion to `f64` round. Arguments with `2j ≤ 15` stay
//! well inside the exact range. Should the checked arithmetic ever
//! overflow, evaluation falls back to compensated floating point.
//!
//! Symbols are memoized under a symmetry-canonical key, so the cache is
//! shared between all equivalent argument orderings and safe for
//! concurrent readers.

use std::collections::HashMap;
use std::sync::RwLock;

use crate::half::Half;
use crate::Error;

/// Largest n with n! exactly representable in i128.
const MAX_EXACT_FACT: usize = 33;

fn exact_factorials() -> [i128; MAX_EXACT_FACT + 1] {
    let mut f = [1i128; MAX_EXACT_FACT + 1];
    let mut n = 1;
    while n <= MAX_EXACT_FACT {
        f[n] = f[n - 1] * n as i128;
        n += 1;
    }
    f
}

fn fact_exact(n: i32) -> Option<i128> {
    static TABLE: std::sync::OnceLock<[i128; MAX_EXACT_FACT + 1]> = std::sync::OnceLock::new();
    let table = TABLE.get_or_init(exact_factorials);
    usize::try_from(n).ok().and_then(|n| table.get(n).copied())
}

fn fact_f64(n: i32) -> f64 {
    (2..=n).map(f64::from).product()
}

/// Reduced fraction with positive denominator.
#[derive(Clone, Copy, Debug)]
struct Frac {
    num: i128,
    den: i128,
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

impl Frac {
    const ZERO: Frac = Frac { num: 0, den: 1 };

    fn new(num: i128, den: i128) -> Frac {
        debug_assert!(den > 0);
        let g = gcd(num, den);
        Frac { num: num / g, den: den / g }
    }

    fn checked_add(self, rhs: Frac) -> Option<Frac> {
        let g = gcd(self.den, rhs.den);
        let l = self.den.checked_mul(rhs.den / g)?;
        let a = self.num.checked_mul(l / self.den)?;
        let b = rhs.num.checked_mul(l / rhs.den)?;
        Some(Frac::new(a.checked_add(b)?, l))
    }

    fn checked_mul(self, rhs: Frac) -> Option<Frac> {
        let g1 = gcd(self.num, rhs.den);
        let g2 = gcd(rhs.num, self.den);
        let num = (self.num / g1).checked_mul(rhs.num / g2)?;
        let den = (self.den / g2).checked_mul(rhs.den / g1)?;
        Some(Frac::new(num, den))
    }

    fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// Product of factorials in the numerator and denominator, as a fraction.
fn fact_ratio(num: &[i32], den: &[i32]) -> Option<Frac> {
    let mut acc = Frac { num: 1, den: 1 };
    for &n in num {
        acc = acc.checked_mul(Frac { num: fact_exact(n)?, den: 1 })?;
    }
    for &d in den {
        acc = acc.checked_mul(Frac { num: 1, den: fact_exact(d)? })?;
    }
    Some(acc)
}

fn fact_ratio_f64(num: &[i32], den: &[i32]) -> f64 {
    let top: f64 = num.iter().map(|&n| fact_f64(n)).product();
    let bot: f64 = den.iter().map(|&d| fact_f64(d)).product();
    top / bot
}

/// True iff the triad couples: integer total spin and triangle inequality.
pub fn triangle_ok(j1: Half, j2: Half, j3: Half) -> bool {
    let (t1, t2, t3) = (j1.twice(), j2.twice(), j3.twice());
    t1 >= 0 && t2 >= 0 && t3 >= 0
        && (t1 + t2 + t3) % 2 == 0
        && (t1 - t2).abs() <= t3
        && t3 <= t1 + t2
}

/// Triangle coefficient Δ(abc) as an exact fraction (squared prefactor part).
fn triangle_delta(a: Half, b: Half, c: Half) -> Option<Frac> {
    let x = (a.twice() + b.twice() - c.twice()) / 2;
    let y = (a.twice() - b.twice() + c.twice()) / 2;
    let z = (-a.twice() + b.twice() + c.twice()) / 2;
    let s = (a.twice() + b.twice() + c.twice()) / 2 + 1;
    fact_ratio(&[x, y, z], &[s])
}

fn triangle_delta_f64(a: Half, b: Half, c: Half) -> f64 {
    let x = (a.twice() + b.twice() - c.twice()) / 2;
    let y = (a.twice() - b.twice() + c.twice()) / 2;
    let z = (-a.twice() + b.twice() + c.twice()) / 2;
    let s = (a.twice() + b.twice() + c.twice()) / 2 + 1;
    fact_ratio_f64(&[x, y, z], &[s])
}

fn sign_pow(exp: i32) -> f64 {
    if exp.rem_euclid(2) == 0 { 1.0 } else { -1.0 }
}

static CACHE_3J: RwLock<Option<HashMap<[i32; 6], f64>>> = RwLock::new(None);
static CACHE_6J: RwLock<Option<HashMap<[i32; 6], f64>>> = RwLock::new(None);

fn cache_get(cache: &RwLock<Option<HashMap<[i32; 6], f64>>>, key: &[i32; 6]) -> Option<f64> {
    cache.read().ok()?.as_ref()?.get(key).copied()
}

fn cache_put(cache: &RwLock<Option<HashMap<[i32; 6], f64>>>, key: [i32; 6], value: f64) {
    if let Ok(mut guard) = cache.write() {
        guard.get_or_insert_with(HashMap::new).insert(key, value);
    }
}

/// Canonical key for a 3j symbol and the sign relating it to the input.
///
/// Even column permutations and simultaneous `m → −m` leave the value
/// invariant up to `(−1)^{j1+j2+j3}`; the lexicographically smallest of the
/// twelve equivalent orderings is the cache key.
fn canon_3j(cols: [(i32, i32); 3], j_sum: i32) -> ([i32; 6], f64) {
    let perms: [([usize; 3], bool); 6] = [
        ([0, 1, 2], false),
        ([1, 2, 0], false),
        ([2, 0, 1], false),
        ([0, 2, 1], true),
        ([1, 0, 2], true),
        ([2, 1, 0], true),
    ];
    let mut best: Option<([i32; 6], f64)> = None;
    for &(p, odd) in &perms {
        for flip in [false, true] {
            let f = |m: i32| if flip { -m } else { m };
            let key = [
                cols[p[0]].0, cols[p[1]].0, cols[p[2]].0,
                f(cols[p[0]].1), f(cols[p[1]].1), f(cols[p[2]].1),
            ];
            let sign = if odd ^ flip { sign_pow(j_sum) } else { 1.0 };
            if best.map_or(true, |(b, _)| key < b) {
                best = Some((key, sign));
            }
        }
    }
    best.unwrap()
}

/// Wigner 3j symbol `(j1 j2 j3; m1 m2 m3)`.
///
/// Returns zero whenever a selection rule fails; rejects magnetic numbers
/// whose integer/half-integer parity disagrees with their spin.
pub fn wigner_3j(
    j1: Half, j2: Half, j3: Half,
    m1: Half, m2: Half, m3: Half,
) -> Result<f64, Error> {
    for (j, m) in [(j1, m1), (j2, m2), (j3, m3)] {
        if (j.twice() + m.twice()) % 2 != 0 {
            return Err(Error::MagneticParity { j, m });
        }
    }
    if m1.twice() + m2.twice() + m3.twice() != 0
        || !triangle_ok(j1, j2, j3)
        || m1.abs() > j1.abs() || m2.abs() > j2.abs() || m3.abs() > j3.abs()
    {
        return Ok(0.0);
    }
    if (j1 + j2 + j3).twice() / 2 > MAX_EXACT_FACT as i32 - 1 {
        return Err(Error::SpinRange { max: Half::new((MAX_EXACT_FACT as i32 - 1) * 2 / 3) });
    }

    let j_sum = (j1 + j2 + j3).twice() / 2;
    let cols = [
        (j1.twice(), m1.twice()),
        (j2.twice(), m2.twice()),
        (j3.twice(), m3.twice()),
    ];
    let (key, sign) = canon_3j(cols, j_sum);
    if let Some(v) = cache_get(&CACHE_3J, &key) {
        return Ok(sign * v);
    }

    let [tj1, tj2, tj3, tm1, tm2, tm3] = key;
    let value = raw_3j(tj1, tj2, tj3, tm1, tm2, tm3);
    cache_put(&CACHE_3J, key, value);
    Ok(sign * value)
}

/// Racah's single-sum formula on twice-valued arguments (rules pre-checked).
fn raw_3j(tj1: i32, tj2: i32, tj3: i32, tm1: i32, tm2: i32, tm3: i32) -> f64 {
    let (j1, j2, j3) = (Half::new(tj1), Half::new(tj2), Half::new(tj3));
    // Integer factorial arguments; selection rules make all of these whole.
    let a1 = (tj1 + tm1) / 2;
    let a2 = (tj1 - tm1) / 2;
    let a3 = (tj2 + tm2) / 2;
    let a4 = (tj2 - tm2) / 2;
    let a5 = (tj3 + tm3) / 2;
    let a6 = (tj3 - tm3) / 2;
    let b1 = (tj1 + tj2 - tj3) / 2;
    let b2 = (tj3 - tj2 + tm1) / 2;
    let b3 = (tj3 - tj1 - tm2) / 2;

    let t_min = 0.max(-b2).max(-b3);
    let t_max = b1.min(a2).min(a3);
    let phase = sign_pow((tj1 - tj2 - tm3) / 2);

    let exact = || -> Option<f64> {
        let pref2 = triangle_delta(j1, j2, j3)?
            .checked_mul(fact_ratio(&[a1, a2, a3, a4, a5, a6], &[])?)?;
        let mut sum = Frac::ZERO;
        for t in t_min..=t_max {
            let term = fact_ratio(&[], &[t, b2 + t, b3 + t, b1 - t, a2 - t, a3 - t])?;
            let signed = Frac { num: if t % 2 == 0 { term.num } else { -term.num }, den: term.den };
            sum = sum.checked_add(signed)?;
        }
        Some(phase * pref2.to_f64().sqrt() * sum.to_f64())
    };
    exact().unwrap_or_else(|| {
        let pref2 = triangle_delta_f64(j1, j2, j3) * fact_ratio_f64(&[a1, a2, a3, a4, a5, a6], &[]);
        let mut sum = 0.0;
        let mut comp = 0.0;
        for t in t_min..=t_max {
            let term = sign_pow(t) * fact_ratio_f64(&[], &[t, b2 + t, b3 + t, b1 - t, a2 - t, a3 - t]);
            let y = term - comp;
            let s = sum + y;
            comp = (s - sum) - y;
            sum = s;
        }
        phase * pref2.sqrt() * sum
    })
}

/// Canonical key for a 6j symbol.
///
/// The symbol is invariant under any permutation of its three columns and
/// under swapping the upper and lower entries of any two columns; the
/// smallest of the 24 equivalent orderings is the cache key.
fn canon_6j(cols: [(i32, i32); 3]) -> [i32; 6] {
    let perms: [[usize; 3]; 6] = [
        [0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0],
    ];
    let mut best = [i32::MAX; 6];
    for p in perms {
        for swaps in [[false; 3], [false, true, true], [true, false, true], [true, true, false]] {
            let mut key = [0i32; 6];
            for i in 0..3 {
                let (up, lo) = cols[p[i]];
                let (up, lo) = if swaps[i] { (lo, up) } else { (up, lo) };
                key[i] = up;
                key[3 + i] = lo;
            }
            if key < best {
                best = key;
            }
        }
    }
    best
}

/// Wigner 6j symbol `{a b c; d e f}`.
///
/// Zero unless all four triads `(a,b,c), (a,e,f), (d,b,f), (d,e,c)` couple.
///
/// # Panics
/// Panics when arguments exceed the exact factorial range (`2j > 15`); the
/// lattice model never queries beyond `j_max + 1/2`.
pub fn wigner_6j(a: Half, b: Half, c: Half, d: Half, e: Half, f: Half) -> f64 {
    if !(triangle_ok(a, b, c) && triangle_ok(a, e, f) && triangle_ok(d, b, f) && triangle_ok(d, e, c)) {
        return 0.0;
    }
    let max_sum = (a + b + d + e).twice().max((a + c + d + f).twice()).max((b + c + e + f).twice());
    assert!(
        max_sum / 2 + 1 <= MAX_EXACT_FACT as i32,
        "6j arguments exceed the exact factorial range"
    );

    let key = canon_6j([(a.twice(), d.twice()), (b.twice(), e.twice()), (c.twice(), f.twice())]);
    if let Some(v) = cache_get(&CACHE_6J, &key) {
        return v;
    }
    let value = raw_6j(a, b, c, d, e, f);
    cache_put(&CACHE_6J, key, value);
    value
}

/// Racah's single-sum formula for the 6j symbol (triads pre-checked).
fn raw_6j(a: Half, b: Half, c: Half, d: Half, e: Half, f: Half) -> f64 {
    // Triad sums and opposite-pair sums, as plain integers.
    let t1 = (a + b + c).twice() / 2;
    let t2 = (a + e + f).twice() / 2;
    let t3 = (d + b + f).twice() / 2;
    let t4 = (d + e + c).twice() / 2;
    let s1 = (a + b + d + e).twice() / 2;
    let s2 = (a + c + d + f).twice() / 2;
    let s3 = (b + c + e + f).twice() / 2;

    let t_min = t1.max(t2).max(t3).max(t4);
    let t_max = s1.min(s2).min(s3);

    let exact = || -> Option<f64> {
        let pref2 = triangle_delta(a, b, c)?
            .checked_mul(triangle_delta(a, e, f)?)?
            .checked_mul(triangle_delta(d, b, f)?)?
            .checked_mul(triangle_delta(d, e, c)?)?;
        let mut sum = Frac::ZERO;
        for t in t_min..=t_max {
            let term = fact_ratio(
                &[t + 1],
                &[t - t1, t - t2, t - t3, t - t4, s1 - t, s2 - t, s3 - t],
            )?;
            let signed = Frac { num: if t % 2 == 0 { term.num } else { -term.num }, den: term.den };
            sum = sum.checked_add(signed)?;
        }
        Some(pref2.to_f64().sqrt() * sum.to_f64())
    };
    exact().unwrap_or_else(|| {
        let pref2 = triangle_delta_f64(a, b, c)
            * triangle_delta_f64(a, e, f)
            * triangle_delta_f64(d, b, f)
            * triangle_delta_f64(d, e, c);
        let mut sum = 0.0;
        let mut comp = 0.0;
        for t in t_min..=t_max {
            let term = sign_pow(t)
                * fact_ratio_f64(&[t + 1], &[t - t1, t - t2, t - t3, t - t4, s1 - t, s2 - t, s3 - t]);
            let y = term - comp;
            let s = sum + y;
            comp = (s - sum) - y;
            sum = s;
        }
        pref2.sqrt() * sum
    })
}
