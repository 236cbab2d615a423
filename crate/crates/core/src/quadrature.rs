//! Deterministic adaptive quadrature.
//!
//! Globally adaptive bisection driven by a 10/21-point Gauss–Kronrod pair,
//! with QUADPACK-style error scaling. The engine integrates fixed-size
//! vector integrands so that several quantities sharing expensive
//! intermediate values can be refined on one mesh. Subdivision always
//! bisects the interval with the largest error estimate, ties broken by
//! position, so results are reproducible bit for bit.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::thermal_frequency;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
         (best estimate {value:e}, error {error:e})"
    )]
    NonConvergence {
        value: f64,
        error: f64,
        subdivisions: usize,
    },
    #[error("invalid integration interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("integrand is not finite at x = {x}")]
    NonFinite { x: f64 },
    #[error("invalid quadrature settings: {0}")]
    InvalidSpec(&'static str),
}

/// What the relative tolerance is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelativeTo {
    /// |∫f|, the usual choice.
    #[default]
    Value,
    /// ∫|f|; stays meaningful when the integral cancels to near zero.
    Magnitude,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Abscissae where the interval is always split.
    #[serde(default)]
    pub breakpoints: Vec<f64>,
    #[serde(default)]
    pub relative_to: RelativeTo,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            abs_tol: 0.0,
            max_subdivisions: 2000,
            breakpoints: Vec::new(),
            relative_to: RelativeTo::Value,
        }
    }
}

impl QuadratureSpec {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    pub fn breakpoints(mut self, breakpoints: Vec<f64>) -> Self {
        self.breakpoints = breakpoints;
        self
    }

    fn validate(&self) -> Result<(), QuadratureError> {
        if !(self.rel_tol > 0.0) {
            return Err(QuadratureError::InvalidSpec("rel_tol must be > 0"));
        }
        if !(self.abs_tol >= 0.0) {
            return Err(QuadratureError::InvalidSpec("abs_tol must be >= 0"));
        }
        if self.max_subdivisions == 0 {
            return Err(QuadratureError::InvalidSpec("max_subdivisions must be > 0"));
        }
        if self.breakpoints.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(QuadratureError::InvalidSpec("breakpoints must be sorted"));
        }
        Ok(())
    }
}

/// An integral value with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Component-wise estimate for vector integrands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VecEstimate<const N: usize> {
    pub value: [f64; N],
    pub error: [f64; N],
    pub evaluations: usize,
}

impl<const N: usize> VecEstimate<N> {
    pub fn total_error(&self) -> f64 {
        self.error.iter().sum()
    }
}

// Nodes and weights as tabulated, to more digits than f64 holds.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Debug, Clone, Copy)]
struct Panel<const N: usize> {
    lo: f64,
    hi: f64,
    value: [f64; N],
    error: [f64; N],
    magnitude: [f64; N],
}

/// Heap entry ordered by its share of the normalized error, then by
/// position (leftmost first).
struct Ranked<const N: usize> {
    key: f64,
    panel: Panel<N>,
}

impl<const N: usize> PartialEq for Ranked<N> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<const N: usize> Eq for Ranked<N> {}
impl<const N: usize> PartialOrd for Ranked<N> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<const N: usize> Ord for Ranked<N> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key
            .total_cmp(&other.key)
            .then_with(|| other.panel.lo.total_cmp(&self.panel.lo))
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut e = err.abs();
    if res_asc != 0.0 && e != 0.0 {
        let scale = (200.0 * e / res_asc).powf(1.5);
        e = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        e = e.max(50.0 * f64::EPSILON * res_abs);
    }
    e
}

fn gauss_kronrod<const N: usize, E, F>(f: &mut F, lo: f64, hi: f64) -> Result<Panel<N>, E>
where
    F: FnMut(f64) -> Result<[f64; N], E>,
    E: From<QuadratureError>,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut fv = [[0.0; N]; 21];
    let eval = |f: &mut F, x: f64| -> Result<[f64; N], E> {
        let v = f(x)?;
        if v.iter().any(|c| !c.is_finite()) {
            return Err(QuadratureError::NonFinite { x }.into());
        }
        Ok(v)
    };
    fv[10] = eval(f, center)?;
    for j in 0..10 {
        let dx = half * XGK[j];
        fv[j] = eval(f, center - dx)?;
        fv[20 - j] = eval(f, center + dx)?;
    }
    let mut value = [0.0; N];
    let mut error = [0.0; N];
    let mut magnitude = [0.0; N];
    for c in 0..N {
        let mut kron = WGK[10] * fv[10][c];
        let mut gauss = 0.0;
        let mut abs = WGK[10] * fv[10][c].abs();
        for j in 0..10 {
            let pair = fv[j][c] + fv[20 - j][c];
            kron += WGK[j] * pair;
            abs += WGK[j] * (fv[j][c].abs() + fv[20 - j][c].abs());
            if j % 2 == 1 {
                gauss += WG[j / 2] * pair;
            }
        }
        let mean = 0.5 * kron;
        let mut asc = WGK[10] * (fv[10][c] - mean).abs();
        for j in 0..10 {
            asc += WGK[j] * ((fv[j][c] - mean).abs() + (fv[20 - j][c] - mean).abs());
        }
        let h = half.abs();
        value[c] = kron * half;
        magnitude[c] = abs * h;
        error[c] = rescale_error((kron - gauss) * half, abs * h, asc * h);
    }
    Ok(Panel {
        lo,
        hi,
        value,
        error,
        magnitude,
    })
}

/// Vector-valued adaptive integration over `[lo, hi]`. The integrand may
/// fail; its error type must absorb [`QuadratureError`]. Every component
/// gets its own tolerance max(abs_tol, rel_tol·scale); refinement stops
/// once the component errors, each divided by its tolerance, sum to at
/// most one.
pub fn integrate_vec<const N: usize, E, F>(f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<VecEstimate<N>, E>
where
    F: FnMut(f64) -> Result<[f64; N], E>,
    E: From<QuadratureError>,
{
    integrate_vec_controlled(f, lo, hi, spec, N)
}

/// As [`integrate_vec`], but only the first `controlled` components steer
/// refinement and the stopping test; the rest are integrated on the same
/// mesh as passengers (e.g. propagated error bounds).
pub fn integrate_vec_controlled<const N: usize, E, F>(
    mut f: F,
    lo: f64,
    hi: f64,
    spec: &QuadratureSpec,
    controlled: usize,
) -> Result<VecEstimate<N>, E>
where
    F: FnMut(f64) -> Result<[f64; N], E>,
    E: From<QuadratureError>,
{
    let controlled = controlled.min(N);
    spec.validate()?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(QuadratureError::InvalidInterval { lo, hi }.into());
    }
    let mut edges = vec![lo];
    edges.extend(spec.breakpoints.iter().copied().filter(|&b| b > lo && b < hi));
    edges.push(hi);
    edges.dedup();

    let mut totals = Totals::<N>::new(controlled, spec);
    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Panel<N>> = Vec::new();
    let mut fresh = Vec::with_capacity(edges.len());
    for w in edges.windows(2) {
        fresh.push(gauss_kronrod(&mut f, w[0], w[1])?);
    }
    for p in &fresh {
        totals.add(p);
    }
    for p in fresh {
        heap.push(Ranked {
            key: totals.key(&p),
            panel: p,
        });
    }
    let mut evaluations = 21 * heap.len();

    loop {
        // The running totals pick the moment; an exact recount confirms it.
        if totals.normalized_error() <= 1.0 || heap.is_empty() {
            totals.recount(heap.iter().map(|r| &r.panel).chain(frozen.iter()));
            if totals.normalized_error() <= 1.0 {
                break;
            }
            if heap.is_empty() {
                return Err(non_convergence(&heap, &frozen).into());
            }
        }
        if heap.len() + frozen.len() >= spec.max_subdivisions {
            return Err(non_convergence(&heap, &frozen).into());
        }
        let worst = heap.pop().expect("heap is non-empty").panel;
        let mid = 0.5 * (worst.lo + worst.hi);
        if !(mid > worst.lo && mid < worst.hi) || (worst.hi - worst.lo) <= 1e-13 * mid.abs() {
            frozen.push(worst);
            continue;
        }
        let left = gauss_kronrod(&mut f, worst.lo, mid)?;
        let right = gauss_kronrod(&mut f, mid, worst.hi)?;
        totals.remove(&worst);
        totals.add(&left);
        totals.add(&right);
        heap.push(Ranked {
            key: totals.key(&left),
            panel: left,
        });
        heap.push(Ranked {
            key: totals.key(&right),
            panel: right,
        });
        evaluations += 42;
    }

    let (value, error) = collapse(&heap, &frozen);
    Ok(VecEstimate {
        value,
        error,
        evaluations,
    })
}

/// Running sums of the controlled components.
struct Totals<const N: usize> {
    controlled: usize,
    rel_tol: f64,
    abs_tol: f64,
    relative_to: RelativeTo,
    value: [f64; N],
    magnitude: [f64; N],
    error: [f64; N],
}

impl<const N: usize> Totals<N> {
    fn new(controlled: usize, spec: &QuadratureSpec) -> Self {
        Self {
            controlled,
            rel_tol: spec.rel_tol,
            abs_tol: spec.abs_tol,
            relative_to: spec.relative_to,
            value: [0.0; N],
            magnitude: [0.0; N],
            error: [0.0; N],
        }
    }

    fn add(&mut self, p: &Panel<N>) {
        for c in 0..self.controlled {
            self.value[c] += p.value[c];
            self.magnitude[c] += p.magnitude[c];
            self.error[c] += p.error[c];
        }
    }

    fn remove(&mut self, p: &Panel<N>) {
        for c in 0..self.controlled {
            self.value[c] -= p.value[c];
            self.magnitude[c] -= p.magnitude[c];
            self.error[c] -= p.error[c];
        }
    }

    fn recount<'a>(&mut self, panels: impl Iterator<Item = &'a Panel<N>>) {
        let mut panels: Vec<&Panel<N>> = panels.collect();
        panels.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        self.value = [0.0; N];
        self.magnitude = [0.0; N];
        self.error = [0.0; N];
        for p in panels {
            self.add(p);
        }
    }

    fn tolerance(&self, c: usize) -> f64 {
        let scale = match self.relative_to {
            RelativeTo::Value => self.value[c].abs(),
            RelativeTo::Magnitude => self.magnitude[c].abs(),
        };
        self.abs_tol.max(self.rel_tol * scale)
    }

    fn share(&self, c: usize, err: f64) -> f64 {
        let tol = self.tolerance(c);
        if tol > 0.0 {
            err / tol
        } else if err > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    }

    fn normalized_error(&self) -> f64 {
        (0..self.controlled)
            .map(|c| self.share(c, self.error[c].max(0.0)))
            .sum()
    }

    fn key(&self, p: &Panel<N>) -> f64 {
        (0..self.controlled).map(|c| self.share(c, p.error[c])).sum()
    }
}

fn non_convergence<const N: usize>(heap: &BinaryHeap<Ranked<N>>, frozen: &[Panel<N>]) -> QuadratureError {
    let (value, error) = collapse(heap, frozen);
    QuadratureError::NonConvergence {
        value: value.iter().sum(),
        error: error.iter().sum(),
        subdivisions: heap.len() + frozen.len(),
    }
}

/// Sum panels in order of position so the result does not depend on heap
/// layout.
fn collapse<const N: usize>(heap: &BinaryHeap<Ranked<N>>, frozen: &[Panel<N>]) -> ([f64; N], [f64; N]) {
    let mut panels: Vec<&Panel<N>> = heap.iter().map(|r| &r.panel).chain(frozen.iter()).collect();
    panels.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let mut value = [0.0; N];
    let mut error = [0.0; N];
    for p in panels {
        for c in 0..N {
            value[c] += p.value[c];
            error[c] += p.error[c];
        }
    }
    (value, error)
}

/// Adaptive integral of a scalar function over `[lo, hi]`.
pub fn integrate_adaptive<F>(mut f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<Estimate, QuadratureError>
where
    F: FnMut(f64) -> f64,
{
    let est = integrate_vec::<1, QuadratureError, _>(|x| Ok([f(x)]), lo, hi, spec)?;
    Ok(Estimate {
        value: est.value[0],
        error: est.error[0],
    })
}

/// Integral over `[lo, ∞)` of a function that decays at least like
/// `exp(−(x − lo)/decay_scale)`. The range is truncated where that envelope
/// has fallen far below the relative tolerance; the neglected tail, bounded
/// by `|f(hi)|·decay_scale`, is added to the error.
pub fn integrate_semi_infinite<F>(
    mut f: F,
    lo: f64,
    decay_scale: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate, QuadratureError>
where
    F: FnMut(f64) -> f64,
{
    if !(decay_scale > 0.0 && decay_scale.is_finite() && lo.is_finite()) {
        return Err(QuadratureError::InvalidInterval { lo, hi: f64::INFINITY });
    }
    let span = 2.0 * (1.0 / spec.rel_tol.min(0.1)).ln() + 20.0;
    let hi = lo + span * decay_scale;
    let mut local = spec.clone();
    let mut bps: Vec<f64> = [0.25, 1.0, 4.0, 16.0].iter().map(|m| lo + m * decay_scale).collect();
    bps.extend(spec.breakpoints.iter().copied());
    bps.sort_by(f64::total_cmp);
    local.breakpoints = bps;
    let mut est = integrate_adaptive(&mut f, lo, hi, &local)?;
    est.error += (f(hi) * decay_scale).abs();
    Ok(est)
}

/// One rung of the Matsubara ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatsubaraTerm {
    pub index: usize,
    /// ξ_n = 2πn k_B T/ħ in rad/s.
    pub xi: f64,
    /// ½ for n = 0, 1 otherwise.
    pub weight: f64,
}

/// The imaginary frequencies ξ_n = 2πn k_B T/ħ at temperature `temperature`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatsubaraLadder {
    spacing: f64,
}

/// Result of a truncated Matsubara sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatsubaraSum {
    pub value: f64,
    /// Truncation estimate plus the summed per-term errors.
    pub error: f64,
    pub terms: usize,
}

impl MatsubaraLadder {
    pub fn new(temperature: f64) -> Result<Self, QuadratureError> {
        if !(temperature > 0.0 && temperature.is_finite()) {
            return Err(QuadratureError::InvalidSpec("temperature must be > 0"));
        }
        Ok(Self {
            spacing: 2.0 * std::f64::consts::PI * thermal_frequency(temperature),
        })
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn term(&self, index: usize) -> MatsubaraTerm {
        MatsubaraTerm {
            index,
            xi: self.spacing * index as f64,
            weight: if index == 0 { 0.5 } else { 1.0 },
        }
    }

    /// The first `count` rungs.
    pub fn frequencies(&self, count: usize) -> Vec<MatsubaraTerm> {
        (0..count).map(|n| self.term(n)).collect()
    }

    /// Primed sum Σ'_n f(ξ_n). `f` returns a term value and its error.
    /// Summation stops once the geometric extrapolation of the remaining
    /// terms falls below `rel_tail_tol` of the running sum, or the terms
    /// vanish identically.
    pub fn sum<E, F>(&self, rel_tail_tol: f64, max_terms: usize, mut f: F) -> Result<MatsubaraSum, E>
    where
        F: FnMut(f64) -> Result<Estimate, E>,
    {
        let mut total = 0.0;
        let mut err = 0.0;
        let mut prev = f64::NAN;
        let mut zeros = 0usize;
        let mut tail = f64::INFINITY;
        let mut n = 0usize;
        while n < max_terms {
            let term = self.term(n);
            let est = f(term.xi)?;
            let t = term.weight * est.value;
            total += t;
            err += term.weight * est.error;
            n += 1;
            if t == 0.0 {
                zeros += 1;
                if zeros >= 3 && n >= 3 {
                    tail = 0.0;
                    break;
                }
            } else {
                zeros = 0;
            }
            if n >= 3 && t != 0.0 && prev.is_finite() && prev != 0.0 {
                let ratio = (t / prev).abs();
                if ratio < 1.0 {
                    tail = t.abs() * ratio / (1.0 - ratio);
                    if tail <= rel_tail_tol * total.abs() {
                        break;
                    }
                }
            }
            prev = t;
        }
        if n >= max_terms {
            log::warn!("Matsubara sum truncated at {max_terms} terms");
        }
        let tail = if tail.is_finite() { tail } else { prev.abs() };
        Ok(MatsubaraSum {
            value: total,
            error: err + tail,
            terms: n,
        })
    }
}

/// Convenience wrapper returning the first `count` Matsubara rungs at
/// `temperature`.
pub fn matsubara_frequencies(temperature: f64, count: usize) -> Result<Vec<MatsubaraTerm>, QuadratureError> {
    Ok(MatsubaraLadder::new(temperature)?.frequencies(count))
}
