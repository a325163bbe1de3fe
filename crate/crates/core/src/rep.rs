//! Classical Bn / Cn representation theory in exact arithmetic: Dynkin
//! labels and weights, the Weyl dimension formula, weight systems by the
//! Freudenthal recursion, and tensor-power decompositions by peeling.
//!
//! Weights are stored with doubled orthogonal coordinates so that the
//! half-integral Bn spinor weights are integers.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::Algebra;

/// Default cap on the dimension of a weight system.
pub const WEIGHT_SYSTEM_CAP: u64 = 10_000;

/// Default cap on `(2n+1)^N` for tensor-power decompositions.
pub const DECOMPOSITION_CAP: u64 = 1 << 24;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IrrepLabel {
    pub algebra: Algebra,
    pub labels: Vec<u32>,
}

impl IrrepLabel {
    pub fn new(algebra: Algebra, labels: Vec<u32>) -> Self {
        assert!(!labels.is_empty(), "rank must be at least 1");
        Self { algebra, labels }
    }

    pub fn trivial(algebra: Algebra, rank: usize) -> Self {
        Self::new(algebra, vec![0; rank])
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn dimension(&self) -> u64 {
        weyl_dimension(self)
    }
}

impl fmt::Display for IrrepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.labels.iter().map(u32::to_string).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// A weight in the orthogonal basis, stored as twice its coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WeightVector {
    pub twice: Vec<i64>,
}

impl WeightVector {
    pub fn from_twice(twice: Vec<i64>) -> Self {
        Self { twice }
    }

    pub fn from_integers(coords: &[i64]) -> Self {
        Self { twice: coords.iter().map(|c| 2 * c).collect() }
    }

    pub fn coords(&self) -> Vec<Ratio<i64>> {
        self.twice.iter().map(|&t| Ratio::new(t, 2)).collect()
    }

    pub fn rank(&self) -> usize {
        self.twice.len()
    }

    /// Representative in the dominant chamber: absolute values, sorted
    /// decreasingly (the Weyl group acts by signed permutations).
    pub fn dominant(&self) -> WeightVector {
        let mut t: Vec<i64> = self.twice.iter().map(|x| x.abs()).collect();
        t.sort_unstable_by(|a, b| b.cmp(a));
        WeightVector { twice: t }
    }

    pub fn is_dominant(&self) -> bool {
        self.twice.windows(2).all(|w| w[0] >= w[1]) && self.twice.last().is_none_or(|&x| x >= 0)
    }

    fn add(&self, other: &[i64], k: i64) -> WeightVector {
        WeightVector { twice: self.twice.iter().zip(other).map(|(a, b)| a + k * b).collect() }
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords().iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `(h₁,…,hₙ) = Σ a_j ω_j`.
pub fn label_to_weight(l: &IrrepLabel) -> WeightVector {
    let n = l.rank();
    let last = match l.algebra {
        Algebra::B => l.labels[n - 1] as i64,
        Algebra::C => 2 * l.labels[n - 1] as i64,
    };
    let twice = (0..n).map(|i| 2 * l.labels[i..n - 1].iter().map(|&a| a as i64).sum::<i64>() + last).collect();
    WeightVector { twice }
}

/// Inverse of [`label_to_weight`]; fails for non-dominant or non-integral
/// weights.
pub fn weight_to_label(w: &WeightVector, algebra: Algebra) -> Result<IrrepLabel> {
    let n = w.rank();
    let bad = || Error::NonDominant(w.to_string());
    if n == 0 || !w.is_dominant() {
        return Err(bad());
    }
    let t = &w.twice;
    let mut labels = Vec::with_capacity(n);
    for i in 0..n - 1 {
        let diff = t[i] - t[i + 1];
        if diff % 2 != 0 {
            return Err(bad());
        }
        labels.push((diff / 2) as u32);
    }
    let last = match algebra {
        Algebra::B => t[n - 1],
        Algebra::C if t[n - 1] % 2 == 0 => t[n - 1] / 2,
        Algebra::C => return Err(bad()),
    };
    labels.push(last as u32);
    Ok(IrrepLabel::new(algebra, labels))
}

/// Positive roots in doubled coordinates.
fn positive_roots(algebra: Algebra, n: usize) -> Vec<Vec<i64>> {
    let mut roots = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for s in [-1, 1] {
                let mut r = vec![0; n];
                r[i] = 2;
                r[j] = 2 * s;
                roots.push(r);
            }
        }
        let mut r = vec![0; n];
        r[i] = match algebra {
            Algebra::B => 2,
            Algebra::C => 4,
        };
        roots.push(r);
    }
    roots
}

/// Half-sum of positive roots, doubled.
fn rho_twice(algebra: Algebra, n: usize) -> Vec<i64> {
    (0..n)
        .map(|i| match algebra {
            Algebra::B => 2 * (n - i) as i64 - 1,
            Algebra::C => 2 * (n - i) as i64,
        })
        .collect()
}

/// Weyl dimension formula `Π ⟨λ+ρ, α⟩ / ⟨ρ, α⟩` in exact rationals.
pub fn weyl_dimension(l: &IrrepLabel) -> u64 {
    let n = l.rank();
    let lam = label_to_weight(l).twice;
    let rho = rho_twice(l.algebra, n);
    let shifted: Vec<i64> = lam.iter().zip(&rho).map(|(a, b)| a + b).collect();
    let mut prod = Ratio::<i128>::from_integer(1);
    for alpha in positive_roots(l.algebra, n) {
        prod *= Ratio::new(dot(&shifted, &alpha) as i128, dot(&rho, &alpha) as i128);
    }
    assert!(prod.is_integer(), "Weyl dimension is an integer");
    *prod.numer() as u64
}

/// Coefficients of `λ − μ` in the simple-root basis, if all are
/// non-negative integers.
fn simple_root_depths(algebra: Algebra, diff_twice: &[i64]) -> Option<Vec<i64>> {
    let n = diff_twice.len();
    let mut out = Vec::with_capacity(n);
    let mut partial = 0;
    for (i, &v) in diff_twice.iter().enumerate() {
        partial += v;
        let k2 = if i == n - 1 && algebra == Algebra::C { partial / 2 } else { partial };
        if k2 < 0 || k2 % 2 != 0 || (i == n - 1 && algebra == Algebra::C && partial % 4 != 0) {
            return None;
        }
        out.push(k2 / 2);
    }
    Some(out)
}

/// Weight multiset of an irrep.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightSystem {
    pub label: IrrepLabel,
    pub weights: BTreeMap<WeightVector, u64>,
}

impl WeightSystem {
    pub fn dimension(&self) -> u64 {
        self.weights.values().sum()
    }

    pub fn multiplicity(&self, w: &WeightVector) -> u64 {
        self.weights.get(w).copied().unwrap_or(0)
    }
}

fn cache() -> &'static RwLock<HashMap<IrrepLabel, Arc<WeightSystem>>> {
    static CACHE: OnceLock<RwLock<HashMap<IrrepLabel, Arc<WeightSystem>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Full weight system (memoized).
pub fn weight_system(l: &IrrepLabel) -> Result<Arc<WeightSystem>> {
    weight_system_with_cap(l, WEIGHT_SYSTEM_CAP)
}

pub fn weight_system_with_cap(l: &IrrepLabel, cap: u64) -> Result<Arc<WeightSystem>> {
    let dim = weyl_dimension(l);
    if dim > cap {
        return Err(Error::DimensionCap { dim: dim as usize, cap: cap as usize });
    }
    if let Some(ws) = cache().read().expect("weight cache poisoned").get(l) {
        return Ok(ws.clone());
    }
    let ws = Arc::new(freudenthal(l)?);
    cache().write().expect("weight cache poisoned").entry(l.clone()).or_insert_with(|| ws.clone());
    Ok(ws)
}

/// All signed permutations of a dominant weight.
fn orbit(w: &WeightVector) -> Vec<WeightVector> {
    let mut perms: Vec<Vec<i64>> = vec![Vec::new()];
    let mut rest = w.twice.clone();
    rest.sort_unstable();
    // Distinct permutations via recursive selection.
    fn permute(prefix: &mut Vec<i64>, rest: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if rest.is_empty() {
            out.push(prefix.clone());
            return;
        }
        let mut i = 0;
        while i < rest.len() {
            let v = rest.remove(i);
            prefix.push(v);
            permute(prefix, rest, out);
            prefix.pop();
            rest.insert(i, v);
            i += 1;
            while i < rest.len() && rest[i] == rest[i - 1] {
                i += 1;
            }
        }
    }
    perms.clear();
    permute(&mut Vec::new(), &mut rest, &mut perms);
    let mut out = Vec::new();
    for p in perms {
        let nonzero: Vec<usize> = (0..p.len()).filter(|&i| p[i] != 0).collect();
        for mask in 0..(1u32 << nonzero.len()) {
            let mut q = p.clone();
            for (b, &i) in nonzero.iter().enumerate() {
                if mask & (1 << b) != 0 {
                    q[i] = -q[i];
                }
            }
            out.push(WeightVector { twice: q });
        }
    }
    out
}

fn freudenthal(l: &IrrepLabel) -> Result<WeightSystem> {
    let n = l.rank();
    let algebra = l.algebra;
    let lam = label_to_weight(l);
    let rho = rho_twice(algebra, n);
    let roots = positive_roots(algebra, n);
    let top = lam.twice[0];
    // Candidate dominant weights: same parity class as λ, bounded by λ₁.
    let parity = lam.twice[0].rem_euclid(2);
    let mut dominant: Vec<(i64, WeightVector)> = Vec::new();
    let mut current = vec![0i64; n];
    fn enumerate(
        i: usize,
        bound: i64,
        parity: i64,
        current: &mut Vec<i64>,
        out: &mut Vec<Vec<i64>>,
    ) {
        if i == current.len() {
            out.push(current.clone());
            return;
        }
        let mut v = bound;
        while v >= 0 {
            if v.rem_euclid(2) == parity {
                current[i] = v;
                enumerate(i + 1, v, parity, current, out);
            }
            v -= 1;
        }
    }
    let mut cands = Vec::new();
    enumerate(0, top, parity, &mut current, &mut cands);
    for c in cands {
        let diff: Vec<i64> = lam.twice.iter().zip(&c).map(|(a, b)| a - b).collect();
        if let Some(depths) = simple_root_depths(algebra, &diff) {
            dominant.push((depths.iter().sum(), WeightVector { twice: c }));
        }
    }
    dominant.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| b.1.cmp(&a.1)));
    let shifted = |w: &WeightVector| -> Vec<i64> { w.twice.iter().zip(&rho).map(|(a, b)| a + b).collect() };
    let lam_rho = shifted(&lam);
    let norm_lam = dot(&lam_rho, &lam_rho);
    let mut mult: HashMap<WeightVector, u64> = HashMap::new();
    for (depth, mu) in &dominant {
        if *depth == 0 {
            mult.insert(mu.clone(), 1);
            continue;
        }
        let mut num: i64 = 0;
        for alpha in &roots {
            let mut k = 1;
            loop {
                let nu = mu.add(alpha, k);
                let m = match mult.get(&nu.dominant()) {
                    Some(&m) => m,
                    None => break,
                };
                num += 2 * m as i64 * dot(&nu.twice, alpha);
                k += 1;
            }
        }
        let mr = shifted(mu);
        let den = norm_lam - dot(&mr, &mr);
        if den <= 0 || num % den != 0 {
            return Err(Error::NegativeMultiplicity(format!("Freudenthal step at {mu} for {l}")));
        }
        let m = num / den;
        if m > 0 {
            mult.insert(mu.clone(), m as u64);
        }
    }
    let mut weights = BTreeMap::new();
    for (mu, m) in mult {
        for w in orbit(&mu) {
            weights.insert(w, m);
        }
    }
    Ok(WeightSystem { label: l.clone(), weights })
}

/// Irreps with multiplicities in a tensor power of the site representation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub algebra: Algebra,
    pub rank: usize,
    pub sites: usize,
    /// Sorted by label.
    pub entries: Vec<(IrrepLabel, u64)>,
}

impl Decomposition {
    pub fn multiplicity(&self, l: &IrrepLabel) -> u64 {
        self.entries.iter().find(|(k, _)| k == l).map_or(0, |(_, m)| *m)
    }

    pub fn total_dimension(&self) -> u64 {
        self.entries.iter().map(|(l, m)| m * weyl_dimension(l)).sum()
    }

    pub fn irrep_count(&self) -> u64 {
        self.entries.iter().map(|(_, m)| m).sum()
    }
}

impl fmt::Display for Decomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|(l, m)| if *m == 1 { l.to_string() } else { format!("{m}{l}") })
            .collect();
        f.write_str(&parts.join(" ⊕ "))
    }
}

/// Weights of the (2n+1)-dimensional site basis states, read from the
/// Cartan diagonals `H_j = e_{jj} − e_{2n+2−j,2n+2−j}`.
pub fn site_weights(n: usize) -> Vec<WeightVector> {
    (1..=2 * n + 1)
        .map(|a| {
            let twice = (1..=n)
                .map(|j| 2 * ((a == j) as i64 - (a == 2 * n + 2 - j) as i64))
                .collect();
            WeightVector { twice }
        })
        .collect()
}

/// Weight multiset of `V^{⊗N}`.
pub fn tensor_power_weights(n: usize, sites: usize) -> BTreeMap<WeightVector, u64> {
    let site = site_weights(n);
    let mut acc: BTreeMap<WeightVector, u64> = BTreeMap::new();
    acc.insert(WeightVector { twice: vec![0; n] }, 1);
    for _ in 0..sites {
        let mut next = BTreeMap::new();
        for (w, m) in &acc {
            for s in &site {
                *next.entry(w.add(&s.twice, 1)).or_insert(0) += m;
            }
        }
        acc = next;
    }
    acc
}

/// Decomposes `V^{⊗N}` into irreps of the given algebra by repeatedly
/// removing the weight system of the lexicographically largest weight.
pub fn tensor_power_decompose(n: usize, sites: usize, algebra: Algebra) -> Result<Decomposition> {
    let total = ((2 * n + 1) as u64).checked_pow(sites as u32);
    if total.is_none_or(|t| t > DECOMPOSITION_CAP) {
        return Err(Error::DimensionCap { dim: total.unwrap_or(u64::MAX) as usize, cap: DECOMPOSITION_CAP as usize });
    }
    let mut remaining = tensor_power_weights(n, sites);
    let mut entries: BTreeMap<IrrepLabel, u64> = BTreeMap::new();
    while let Some((top, &c)) = remaining.iter().next_back() {
        let top = top.clone();
        let label = weight_to_label(&top, algebra)?;
        let ws = weight_system(&label)?;
        for (w, m) in &ws.weights {
            let slot = remaining.get_mut(w).ok_or_else(|| Error::NegativeMultiplicity(w.to_string()))?;
            *slot = slot.checked_sub(c * m).ok_or_else(|| Error::NegativeMultiplicity(w.to_string()))?;
            if *slot == 0 {
                remaining.remove(w);
            }
        }
        *entries.entry(label).or_insert(0) += c;
    }
    Ok(Decomposition { algebra, rank: n, sites, entries: entries.into_iter().collect() })
}
