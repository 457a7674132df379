use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::zeta::{zeta_tail, DEFAULT_TOL};
use crate::error::{Error, Result};

/// Maximum number of whole-sequence redraws when conditioning on even sum.
pub const PARITY_REJECTION_CAP: usize = 1000;

/// Degrees sorted ascending, with prefix sums `ℓ_m = d_1 + … + d_m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct DegreeSequence {
    degrees: Vec<u32>,
    prefix: Vec<u64>,
}

impl TryFrom<Vec<u32>> for DegreeSequence {
    type Error = Error;

    fn try_from(degrees: Vec<u32>) -> Result<Self> {
        Self::new(degrees)
    }
}

impl From<DegreeSequence> for Vec<u32> {
    fn from(seq: DegreeSequence) -> Self {
        seq.degrees
    }
}

impl DegreeSequence {
    /// Canonicalises (sorts) the degrees. Every degree must be positive and
    /// the sum even.
    pub fn new(mut degrees: Vec<u32>) -> Result<Self> {
        if degrees.is_empty() {
            return Err(Error::InvalidParameter("empty degree sequence".into()));
        }
        if degrees.contains(&0) {
            return Err(Error::InvalidParameter("degrees must be >= 1".into()));
        }
        degrees.sort_unstable();
        let seq = Self::from_sorted_unchecked(degrees);
        if !seq.total().is_multiple_of(2) {
            return Err(Error::OddTotalDegree(seq.total()));
        }
        Ok(seq)
    }

    fn from_sorted_unchecked(degrees: Vec<u32>) -> Self {
        let mut prefix = Vec::with_capacity(degrees.len() + 1);
        prefix.push(0u64);
        let mut acc = 0u64;
        for &d in &degrees {
            acc += u64::from(d);
            prefix.push(acc);
        }
        Self { degrees, prefix }
    }

    pub fn regular(n: usize, r: u32) -> Result<Self> {
        Self::new(vec![r; n])
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    /// `ℓ_m`, with `ℓ_0 = 0` and `ℓ_n` the total degree.
    pub fn ell(&self, m: usize) -> u64 {
        self.prefix[m]
    }

    pub fn total(&self) -> u64 {
        self.prefix[self.degrees.len()]
    }

    pub fn d_min(&self) -> u32 {
        self.degrees[0]
    }

    pub fn d_max(&self) -> u32 {
        *self.degrees.last().unwrap()
    }

    pub fn d_ave(&self) -> f64 {
        self.total() as f64 / self.n() as f64
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut degrees = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let d = line.parse::<u32>().map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                msg: format!("line {}: {e}", lineno + 1),
            })?;
            degrees.push(d);
        }
        Self::new(degrees)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut out = String::with_capacity(self.n() * 3);
        for d in &self.degrees {
            out.push_str(&d.to_string());
            out.push('\n');
        }
        std::fs::write(path, out)?;
        Ok(())
    }
}

/// Degree law of the Configuration Model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DegreeDistribution {
    /// Every vertex has degree `r`.
    Dirac { r: u32 },
    /// `P[d = δ + k] ∝ (δ + k)^{-τ}`, `k ≥ 0`.
    PowerLaw { tau: f64, delta: u32 },
}

impl DegreeDistribution {
    /// Checks the support conditions. `allow_low_degree` lifts the
    /// minimum-degree-three requirement for small test graphs.
    pub fn validate(&self, allow_low_degree: bool) -> Result<()> {
        let min_degree = if allow_low_degree { 1 } else { 3 };
        match *self {
            DegreeDistribution::Dirac { r } if r < min_degree => Err(Error::InvalidParameter(
                format!("dirac degree {r} below minimum {min_degree}"),
            )),
            DegreeDistribution::PowerLaw { tau, .. } if !(tau > 2.0) => Err(
                Error::InvalidParameter(format!("power-law exponent {tau} must exceed 2")),
            ),
            DegreeDistribution::PowerLaw { delta, .. } if delta < min_degree => Err(
                Error::InvalidParameter(format!("power-law shift {delta} below {min_degree}")),
            ),
            _ => Ok(()),
        }
    }

    /// Probability that a degree equals `d`.
    pub fn pmf(&self, d: u32) -> Result<f64> {
        match *self {
            DegreeDistribution::Dirac { r } => Ok(if d == r { 1.0 } else { 0.0 }),
            DegreeDistribution::PowerLaw { tau, delta } => {
                if d < delta {
                    return Ok(0.0);
                }
                let z = zeta_tail(tau, u64::from(delta), DEFAULT_TOL)?;
                Ok(f64::from(d).powf(-tau) / z)
            }
        }
    }

    pub fn mean(&self) -> Result<f64> {
        match *self {
            DegreeDistribution::Dirac { r } => Ok(f64::from(r)),
            DegreeDistribution::PowerLaw { tau, delta } => {
                let delta = u64::from(delta);
                Ok(zeta_tail(tau - 1.0, delta, DEFAULT_TOL)? / zeta_tail(tau, delta, DEFAULT_TOL)?)
            }
        }
    }
}

impl fmt::Display for DegreeDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DegreeDistribution::Dirac { r } => write!(f, "dirac {r}"),
            DegreeDistribution::PowerLaw { tau, delta } => write!(f, "powerlaw {tau} {delta}"),
        }
    }
}

impl FromStr for DegreeDistribution {
    type Err = Error;

    /// `"dirac 3"` or `"powerlaw 3.0 3"`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        let bad = || Error::Config(format!("bad degree distribution `{s}`"));
        match parts.as_slice() {
            ["dirac", r] => Ok(DegreeDistribution::Dirac {
                r: r.parse().map_err(|_| bad())?,
            }),
            ["powerlaw", tau, delta] => Ok(DegreeDistribution::PowerLaw {
                tau: tau.parse().map_err(|_| bad())?,
                delta: delta.parse().map_err(|_| bad())?,
            }),
            _ => Err(bad()),
        }
    }
}

/// Inverse-CDF sampler for the shifted power law.
struct PowerLawSampler {
    tau: f64,
    delta: u64,
    norm: f64,
    // tails[k] = ξ_τ(δ + k)
    tails: Vec<f64>,
}

const TAIL_TABLE: usize = 4096;

impl PowerLawSampler {
    fn new(tau: f64, delta: u32) -> Result<Self> {
        let delta = u64::from(delta);
        let norm = zeta_tail(tau, delta, DEFAULT_TOL)?;
        let mut tails = Vec::with_capacity(TAIL_TABLE + 1);
        let mut tail = norm;
        tails.push(tail);
        for k in 0..TAIL_TABLE as u64 {
            tail -= ((delta + k) as f64).powf(-tau);
            tails.push(tail.max(0.0));
        }
        Ok(Self {
            tau,
            delta,
            norm,
            tails,
        })
    }

    /// Smallest `k` with `ξ_τ(δ + k + 1) <= v · ξ_τ(δ)`.
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<u32> {
        let v = 1.0 - rng.random::<f64>();
        let target = v * self.norm;
        if let Some(k) = self.tails[1..].iter().position(|&t| t <= target) {
            return Ok(k as u32);
        }
        // Beyond the table: bracket, then bisect on the exact tail.
        let tail_at = |k: u64| zeta_tail(self.tau, self.delta + k, DEFAULT_TOL);
        let mut lo = TAIL_TABLE as u64;
        let mut hi = lo * 2;
        while tail_at(hi + 1)? > target {
            lo = hi;
            hi *= 2;
            if hi > u64::from(u32::MAX) {
                return Err(Error::Numeric("power-law draw exceeds u32 degree".into()));
            }
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if tail_at(mid + 1)? <= target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi as u32)
    }
}

/// `count` i.i.d. degrees in draw order, with no parity condition; used for
/// vertices added one at a time.
pub fn sample_raw_degrees<R: Rng + ?Sized>(
    dist: &DegreeDistribution,
    count: usize,
    rng: &mut R,
) -> Result<Vec<u32>> {
    dist.validate(true)?;
    match *dist {
        DegreeDistribution::Dirac { r } => Ok(vec![r; count]),
        DegreeDistribution::PowerLaw { tau, delta } => {
            let sampler = PowerLawSampler::new(tau, delta)?;
            (0..count)
                .map(|_| Ok(delta + sampler.sample(rng)?))
                .collect()
        }
    }
}

/// Draws `n` i.i.d. degrees and redraws the whole sequence until the sum is
/// even. The result is sorted ascending.
pub fn sample_degrees<R: Rng + ?Sized>(
    dist: &DegreeDistribution,
    n: usize,
    allow_low_degree: bool,
    rng: &mut R,
) -> Result<DegreeSequence> {
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one vertex".into()));
    }
    dist.validate(allow_low_degree)?;
    match *dist {
        DegreeDistribution::Dirac { r } => {
            if r % 2 == 1 && n % 2 == 1 {
                return Err(Error::ParityImpossible(format!(
                    "{n} vertices of odd degree {r}"
                )));
            }
            DegreeSequence::new(vec![r; n])
        }
        DegreeDistribution::PowerLaw { tau, delta } => {
            let sampler = PowerLawSampler::new(tau, delta)?;
            for _ in 0..PARITY_REJECTION_CAP {
                let mut degrees = Vec::with_capacity(n);
                for _ in 0..n {
                    degrees.push(delta + sampler.sample(rng)?);
                }
                let total: u64 = degrees.iter().map(|&d| u64::from(d)).sum();
                if total.is_multiple_of(2) {
                    return DegreeSequence::new(degrees);
                }
            }
            Err(Error::RejectionBudget {
                attempts: PARITY_REJECTION_CAP,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn dirac_even_sum() {
        let seq = sample_degrees(
            &DegreeDistribution::Dirac { r: 3 },
            4,
            false,
            &mut rng::master(1),
        )
        .unwrap();
        assert_eq!(seq.degrees(), &[3, 3, 3, 3]);
        assert_eq!(seq.total(), 12);
        assert_eq!(seq.ell(4), 12);
    }

    #[test]
    fn dirac_odd_parity_is_an_error() {
        let err = sample_degrees(
            &DegreeDistribution::Dirac { r: 3 },
            5,
            false,
            &mut rng::master(1),
        )
        .unwrap_err();
        assert!(matches!(err, Error::ParityImpossible(_)));
    }

    #[test]
    fn low_degree_needs_override() {
        let d = DegreeDistribution::Dirac { r: 2 };
        assert!(sample_degrees(&d, 4, false, &mut rng::master(1)).is_err());
        assert!(sample_degrees(&d, 4, true, &mut rng::master(1)).is_ok());
    }

    #[test]
    fn power_law_pmf_at_shift() {
        let d = DegreeDistribution::PowerLaw { tau: 3.0, delta: 3 };
        let p = d.pmf(3).unwrap();
        // 3^{-3} / (ζ(3) − 1 − 1/8)
        let expected = (1.0 / 27.0) / (1.202_056_903_159_594_2 - 1.125);
        assert!((p - expected).abs() < 1e-12);
        assert!((p - 0.48064).abs() < 1e-4);
    }

    #[test]
    fn power_law_sample_frequencies() {
        let d = DegreeDistribution::PowerLaw { tau: 3.0, delta: 3 };
        let sampler = PowerLawSampler::new(3.0, 3).unwrap();
        let mut rng = rng::master(11);
        let draws = 200_000;
        let mut counts = [0usize; 3];
        for _ in 0..draws {
            let k = sampler.sample(&mut rng).unwrap() as usize;
            if k < 3 {
                counts[k] += 1;
            }
        }
        for (k, &c) in counts.iter().enumerate() {
            let p = d.pmf(3 + k as u32).unwrap();
            let se = (p * (1.0 - p) / draws as f64).sqrt();
            let freq = c as f64 / draws as f64;
            assert!((freq - p).abs() < 4.0 * se, "k={k}: {freq} vs {p}");
        }
    }

    #[test]
    fn power_law_far_tail_uses_exact_tails() {
        let sampler = PowerLawSampler::new(2.2, 3).unwrap();
        let mut rng = rng::master(5);
        let mut max = 0;
        for _ in 0..20_000 {
            max = max.max(sampler.sample(&mut rng).unwrap());
        }
        assert!(
            max > TAIL_TABLE as u32,
            "heavy tail should leave the table, max = {max}"
        );
    }

    #[test]
    fn power_law_sequence_is_sorted_and_even() {
        let d = DegreeDistribution::PowerLaw { tau: 2.5, delta: 3 };
        for seed in 0..20 {
            let seq = sample_degrees(&d, 51, false, &mut rng::master(seed)).unwrap();
            assert_eq!(seq.total() % 2, 0);
            assert!(seq.degrees().windows(2).all(|w| w[0] <= w[1]));
            assert!(seq.d_min() >= 3);
        }
    }

    #[test]
    fn parse_distribution() {
        assert_eq!(
            "dirac 4".parse::<DegreeDistribution>().unwrap(),
            DegreeDistribution::Dirac { r: 4 }
        );
        assert_eq!(
            "powerlaw 2.5 3".parse::<DegreeDistribution>().unwrap(),
            DegreeDistribution::PowerLaw { tau: 2.5, delta: 3 }
        );
        assert!("gauss 1".parse::<DegreeDistribution>().is_err());
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("deg.txt");
        let seq = DegreeSequence::new(vec![5, 3, 4, 4]).unwrap();
        seq.write(&path).unwrap();
        assert_eq!(DegreeSequence::read(&path).unwrap(), seq);
    }
}
