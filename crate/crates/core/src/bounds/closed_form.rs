use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const INT_TOL: f64 = 1e-9;

fn is_integer(x: f64) -> bool {
    (x - x.round()).abs() < INT_TOL
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum ClosedFormFamily {
    Torus {
        l: usize,
    },
    Hypercube {
        dim: usize,
    },
    Complete {
        n: usize,
    },
    /// Complete graph with pair potential `J'/n`; `J` is read as `J'`.
    ScaledComplete {
        n: usize,
    },
    /// Dense Erdős–Rényi graph, leading order only.
    ErdosRenyi {
        n: usize,
        p: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedForm {
    pub gamma_star: f64,
    pub k_star: Option<f64>,
    pub n_star: Option<usize>,
    /// The displayed expression where it differs from `gamma_star`.
    pub gamma_as_printed: Option<f64>,
    pub warnings: Vec<String>,
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

fn complete(n: usize, j: f64, h: f64) -> Result<ClosedForm> {
    if is_integer(h / j) {
        return Err(Error::InvalidParameter(format!(
            "complete graph needs h/J not an integer, got {}",
            h / j
        )));
    }
    let n_star = ((n as f64 - 1.0 - h / j) / 2.0).ceil();
    if n_star < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "no metastable regime on K_{n} at h/J = {}",
            h / j
        )));
    }
    let ns = n_star as usize;
    Ok(ClosedForm {
        gamma_star: n_star * (j * (n as f64 - n_star) - h),
        k_star: Some(n as f64 / (binomial(n, ns) * (n - ns) as f64)),
        n_star: Some(ns),
        gamma_as_printed: None,
        warnings: Vec::new(),
    })
}

/// Barrier (and prefactor where known) of the reference families.
pub fn closed_form_reference(family: ClosedFormFamily, j: f64, h: f64) -> Result<ClosedForm> {
    if !(j > 0.0 && h > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need J, h > 0, got J={j}, h={h}"
        )));
    }
    match family {
        ClosedFormFamily::Torus { l } => {
            let r = 2.0 * j / h;
            if is_integer(r) {
                return Err(Error::InvalidParameter(format!(
                    "torus needs 2J/h not an integer, got {r}"
                )));
            }
            let lc = r.ceil();
            if lc <= 1.0 {
                return Err(Error::InvalidParameter(
                    "torus has no metastable regime for 2J/h < 1".into(),
                ));
            }
            Ok(ClosedForm {
                gamma_star: 4.0 * j * lc - h * (lc * (lc - 1.0) + 1.0),
                k_star: Some(1.0 / ((l * l) as f64 * 4.0 / 3.0 * (2.0 * lc - 1.0))),
                n_star: Some(lc as usize),
                gamma_as_printed: None,
                warnings: Vec::new(),
            })
        }
        ClosedFormFamily::Hypercube { dim } => {
            let r = h / j;
            if is_integer(r) {
                return Err(Error::InvalidParameter(format!(
                    "hypercube needs h/J not an integer, got {r}"
                )));
            }
            let mut warnings = Vec::new();
            if let Some(b) = (2..=1usize << dim.min(20)).find(|&b| is_integer(r * b as f64)) {
                warnings.push(format!(
                    "h/J = {r} is a ratio with denominator {b} <= 2^{dim}"
                ));
            }
            let eps = ((dim as f64 - h).ceil() as i64).rem_euclid(2) as f64;
            let cr = r.ceil();
            let gamma =
                (1.0 - r + cr) / 3.0 * (2f64.powf((dim as f64 - r).ceil()) - 4.0 + 2.0 * eps) - eps;
            let k =
                factorial(cr as usize) / (factorial(dim) * 2f64.powi(dim as i32 - 4) * (3.0 - eps));
            Ok(ClosedForm {
                gamma_star: gamma,
                k_star: Some(k),
                n_star: None,
                gamma_as_printed: None,
                warnings,
            })
        }
        ClosedFormFamily::Complete { n } => complete(n, j, h),
        ClosedFormFamily::ScaledComplete { n } => {
            let jp = j;
            let nf = n as f64;
            if !(h / jp < 1.0 - 1.0 / nf) {
                return Err(Error::InvalidParameter(format!(
                    "scaled complete graph is metastable only for h/J' < 1 - 1/n, got {}",
                    h / jp
                )));
            }
            let mut out = complete(n, jp / nf, h)?;
            let ns = out.n_star.unwrap() as f64;
            out.gamma_as_printed = Some(ns * jp * ((nf - ns) / nf - h));
            Ok(out)
        }
        ClosedFormFamily::ErdosRenyi { n, p } => Ok(ClosedForm {
            gamma_star: 0.25 * j * (n * n) as f64 * p,
            k_star: None,
            n_star: None,
            gamma_as_printed: None,
            warnings: vec!["leading order only".into()],
        }),
    }
}
