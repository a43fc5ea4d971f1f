//! Exact oracles: brute-force Shapley values, the odd/even split, Möbius and
//! Fourier transforms, and Shapley readouts from either coefficient basis.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::time::Duration;

use crate::coalition::Coalition;
use crate::error::{Error, Result};
use crate::game::{check_table_dim, GameTable};

/// Entries with magnitude below this are dropped from coefficient maps.
pub const PURGE_THRESHOLD: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    /// Unanimity functions `u_T(S) = 1[T ⊆ S]`.
    Mobius,
    /// Walsh characters `χ_T(S) = (-1)^{|S ∩ T|}`.
    Fourier,
}

impl Basis {
    #[inline]
    pub fn eval(self, t: &Coalition, s: &Coalition) -> f64 {
        match self {
            Basis::Mobius => t.unanimity(s),
            Basis::Fourier => t.chi(s),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Basis::Mobius => "mobius",
            Basis::Fourier => "fourier",
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Basis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mobius" => Ok(Basis::Mobius),
            "fourier" => Ok(Basis::Fourier),
            other => Err(Error::InvalidParameter(format!("unknown basis `{other}`"))),
        }
    }
}

/// Sparse expansion `f = Σ_T c_T b_T` in one of the two bases.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientMap {
    d: usize,
    basis: Basis,
    entries: BTreeMap<Coalition, f64>,
}

impl CoefficientMap {
    pub fn new(d: usize, basis: Basis) -> Self {
        CoefficientMap {
            d,
            basis,
            entries: BTreeMap::new(),
        }
    }

    /// Builds a map, summing repeated keys and purging near-zero entries.
    pub fn from_entries(
        d: usize,
        basis: Basis,
        entries: impl IntoIterator<Item = (Coalition, f64)>,
    ) -> Result<Self> {
        let mut map = CoefficientMap::new(d, basis);
        for (t, v) in entries {
            if t.d() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    actual: t.d(),
                });
            }
            *map.entries.entry(t).or_insert(0.0) += v;
        }
        map.purge();
        Ok(map)
    }

    fn from_accumulator(d: usize, basis: Basis, acc: HashMap<Coalition, f64>) -> Self {
        let entries = acc
            .into_iter()
            .filter(|(_, v)| v.abs() >= PURGE_THRESHOLD)
            .collect();
        CoefficientMap { d, basis, entries }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Coefficient of `t`, zero when absent.
    pub fn get(&self, t: &Coalition) -> f64 {
        self.entries.get(t).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Coalition, &f64)> {
        self.entries.iter()
    }

    pub fn insert(&mut self, t: Coalition, value: f64) {
        assert_eq!(t.d(), self.d, "coalition width mismatch");
        if value.abs() < PURGE_THRESHOLD {
            self.entries.remove(&t);
        } else {
            self.entries.insert(t, value);
        }
    }

    pub fn purge(&mut self) {
        self.entries.retain(|_, v| v.abs() >= PURGE_THRESHOLD);
    }

    /// Evaluates the expansion at one coalition.
    pub fn evaluate(&self, s: &Coalition) -> f64 {
        self.entries
            .iter()
            .map(|(t, c)| c * self.basis.eval(t, s))
            .sum()
    }

    /// Dense reconstruction of the represented set function.
    pub fn to_table(&self) -> Result<GameTable> {
        check_table_dim(self.d)?;
        let n = 1usize << self.d;
        let mut values = vec![0.0; n];
        for (t, c) in &self.entries {
            values[t.index()] = *c;
        }
        match self.basis {
            Basis::Mobius => zeta_transform(&mut values, self.d),
            // Synthesis `f = Σ β_T χ_T` is the unnormalized Walsh-Hadamard transform.
            Basis::Fourier => walsh_hadamard(&mut values),
        }
        GameTable::new(self.d, values)
    }
}

/// Shapley values plus run diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Attribution {
    pub d: usize,
    pub phi: Vec<f64>,
    pub budget_used: usize,
    pub basis_size: usize,
    pub wall_time: Duration,
}

impl Attribution {
    pub fn new(phi: Vec<f64>) -> Self {
        Attribution {
            d: phi.len(),
            phi,
            budget_used: 0,
            basis_size: 0,
            wall_time: Duration::ZERO,
        }
    }

    pub fn total(&self) -> f64 {
        self.phi.iter().sum()
    }
}

/// `C(n, k)` in floating point; exact for every value below 2^53.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for j in 0..k {
        acc = acc * (n - j) as f64 / (j + 1) as f64;
    }
    // Intermediate divisions can leave 1-ulp noise; snap to the integer when
    // it is exactly representable.
    if acc < 9.007_199_254_740_992e15 {
        acc.round()
    } else {
        acc
    }
}

/// Marginal-contribution weight `p_ℓ = 1 / (d · C(d-1, ℓ))`.
pub fn shapley_weight_p(ell: usize, d: usize) -> Result<f64> {
    if d == 0 || ell >= d {
        return Err(Error::InvalidParameter(format!(
            "p_ell needs 0 <= ell <= d-1, got ell={ell}, d={d}"
        )));
    }
    Ok(1.0 / (d as f64 * binomial(d - 1, ell)))
}

/// Brute-force Shapley values of a tabulated game.
pub fn exact_shapley(table: &GameTable) -> Result<Attribution> {
    let d = table.d();
    check_table_dim(d)?;
    if d == 0 {
        return Ok(Attribution::new(vec![]));
    }
    let p: Vec<f64> = (0..d)
        .map(|l| shapley_weight_p(l, d).expect("in range"))
        .collect();
    let values = table.values();
    let mut phi = vec![0.0; d];
    for (i, phi_i) in phi.iter_mut().enumerate() {
        let bit = 1usize << i;
        let mut acc = 0.0;
        for s in 0..values.len() {
            if s & bit == 0 {
                let size = s.count_ones() as usize;
                acc += p[size] * (values[s | bit] - values[s]);
            }
        }
        *phi_i = acc;
    }
    Ok(Attribution::new(phi))
}

/// Splits `f` into `f_odd(S) = (f(S) - f(S^c))/2` and `f_even(S) = (f(S) + f(S^c))/2`.
pub fn odd_even_decompose(table: &GameTable) -> (GameTable, GameTable) {
    let d = table.d();
    let values = table.values();
    let full = values.len() - 1;
    let mut odd = Vec::with_capacity(values.len());
    let mut even = Vec::with_capacity(values.len());
    for s in 0..values.len() {
        let (a, b) = (values[s], values[full ^ s]);
        odd.push((a - b) / 2.0);
        even.push((a + b) / 2.0);
    }
    (
        GameTable::new(d, odd).expect("same shape"),
        GameTable::new(d, even).expect("same shape"),
    )
}

// In-place subset-sum (zeta) transform: a[S] <- Σ_{T⊆S} a[T].
fn zeta_transform(a: &mut [f64], d: usize) {
    for i in 0..d {
        let bit = 1usize << i;
        for s in 0..a.len() {
            if s & bit != 0 {
                a[s] += a[s ^ bit];
            }
        }
    }
}

// Inverse of `zeta_transform`.
fn mobius_inversion(a: &mut [f64], d: usize) {
    for i in 0..d {
        let bit = 1usize << i;
        for s in 0..a.len() {
            if s & bit != 0 {
                a[s] -= a[s ^ bit];
            }
        }
    }
}

/// Unnormalized fast Walsh-Hadamard transform, `O(n log n)`.
pub fn walsh_hadamard(a: &mut [f64]) {
    let n = a.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for j in block..block + h {
                let (x, y) = (a[j], a[j + h]);
                a[j] = x + y;
                a[j + h] = x - y;
            }
        }
        h *= 2;
    }
}

fn dense_to_map(d: usize, basis: Basis, values: &[f64]) -> CoefficientMap {
    let entries = values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.abs() >= PURGE_THRESHOLD)
        .map(|(idx, v)| (Coalition::from_index(d, idx), *v))
        .collect();
    CoefficientMap { d, basis, entries }
}

/// Möbius coefficients `α` with `f(S) = Σ_{T⊆S} α_T`.
pub fn mobius_transform(table: &GameTable) -> Result<CoefficientMap> {
    check_table_dim(table.d())?;
    let mut a = table.values().to_vec();
    mobius_inversion(&mut a, table.d());
    Ok(dense_to_map(table.d(), Basis::Mobius, &a))
}

/// Fourier coefficients `β_T = 2^{-d} Σ_S f(S) χ_T(S)`, so that `f = Σ β_T χ_T`.
pub fn fourier_transform(table: &GameTable) -> Result<CoefficientMap> {
    check_table_dim(table.d())?;
    let mut a = table.values().to_vec();
    walsh_hadamard(&mut a);
    let scale = (-(table.d() as f64)).exp2();
    a.iter_mut().for_each(|v| *v *= scale);
    Ok(dense_to_map(table.d(), Basis::Fourier, &a))
}

fn expect_basis(map: &CoefficientMap, basis: Basis) -> Result<()> {
    if map.basis != basis {
        return Err(Error::InvalidParameter(format!(
            "expected {basis} coefficients, got {}",
            map.basis
        )));
    }
    Ok(())
}

/// `β_T = (-1)^{|T|} Σ_{S⊇T} α_S / 2^{|S|}`, summed over the downward closure of the support.
pub fn mobius_to_fourier(alpha: &CoefficientMap) -> Result<CoefficientMap> {
    expect_basis(alpha, Basis::Mobius)?;
    let mut acc: HashMap<Coalition, f64> = HashMap::new();
    for (s, a) in alpha.iter() {
        let scaled = a * (-(s.len() as f64)).exp2();
        for t in s.subsets() {
            let sign = if t.len() % 2 == 0 { 1.0 } else { -1.0 };
            *acc.entry(t).or_insert(0.0) += sign * scaled;
        }
    }
    Ok(CoefficientMap::from_accumulator(
        alpha.d,
        Basis::Fourier,
        acc,
    ))
}

/// `α_S = (-2)^{|S|} Σ_{T⊇S} β_T`, summed over the downward closure of the support.
pub fn fourier_to_mobius(beta: &CoefficientMap) -> Result<CoefficientMap> {
    expect_basis(beta, Basis::Fourier)?;
    let mut acc: HashMap<Coalition, f64> = HashMap::new();
    for (t, b) in beta.iter() {
        for s in t.subsets() {
            *acc.entry(s).or_insert(0.0) += (-2.0f64).powi(s.len() as i32) * b;
        }
    }
    Ok(CoefficientMap::from_accumulator(beta.d, Basis::Mobius, acc))
}

/// `φ_i = Σ_{T∋i} α_T / |T|`.
pub fn shapley_from_mobius(alpha: &CoefficientMap) -> Result<Attribution> {
    expect_basis(alpha, Basis::Mobius)?;
    let mut phi = vec![0.0; alpha.d];
    for (t, a) in alpha.iter() {
        let k = t.len();
        if k == 0 {
            continue;
        }
        let share = a / k as f64;
        for i in t.players() {
            phi[i] += share;
        }
    }
    Ok(Attribution {
        basis_size: alpha.len(),
        ..Attribution::new(phi)
    })
}

/// `φ_i = -2 Σ_{T∋i, |T| odd} β_T / |T|`; even terms carry no Shapley value.
pub fn shapley_from_fourier(beta: &CoefficientMap) -> Result<Attribution> {
    expect_basis(beta, Basis::Fourier)?;
    let mut phi = vec![0.0; beta.d];
    for (t, b) in beta.iter() {
        let k = t.len();
        if k % 2 == 0 {
            continue;
        }
        let share = -2.0 * b / k as f64;
        for i in t.players() {
            phi[i] += share;
        }
    }
    Ok(Attribution {
        basis_size: beta.len(),
        ..Attribution::new(phi)
    })
}
