//! Full-diversity rotations of the integer lattice `Z^λ`.
//!
//! Two algebraic recipes are used, both orthonormal embeddings of a ring of
//! integers of a totally real number field (every nonzero algebraic integer
//! has only nonzero conjugates, which is the full-diversity property):
//!
//! - `λ = 2^e`: the DCT-IV matrix `sqrt(2/λ) cos((2k-1)(2j-1)π / 4λ)`,
//!   whose columns are the conjugates of `cos((2j-1)π/4λ)` in the real
//!   subfield of a cyclotomic field of 2-power conductor.
//! - `p = 2λ + 1` prime: the real subfield of `Q(ζ_p)` with basis
//!   `b_j = Σ_{l ≥ j} (ζ^l + ζ^-l)` and twisting element `2 - ζ - ζ^-1`,
//!   for which the twisted trace form is `p · I`.
//!
//! Every matrix handed out is certified numerically by [`certify_rotation`].

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::{RMatrix, Result, StbcError};

/// Coordinates of `Q a` below this magnitude count as zero.
pub const DELTA_THRESHOLD: f64 = 1e-9;

/// Default PAM difference bound; covers 16-QAM.
pub const DEFAULT_BOUND: i64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RotationRecipe {
    /// DCT-IV, λ a power of two (including λ = 1).
    PowerOfTwoCyclotomic,
    /// Real subfield of the `(2λ+1)`-th cyclotomic field.
    PrimeCyclotomic,
    /// Caller-supplied entries.
    Explicit,
}

/// Outcome of an exhaustive scan over `{-B..B}^λ \ {0}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    pub pass: bool,
    pub delta_min: f64,
    pub bound: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RotationMatrix {
    entries: RMatrix,
    recipe: RotationRecipe,
    certificate: Certificate,
}

impl RotationMatrix {
    /// Wraps arbitrary orthogonal entries and records their certificate at
    /// `bound`. The certificate may fail; see [`RotationMatrix::is_certified`].
    pub fn from_entries(entries: RMatrix, bound: i64) -> Result<Self> {
        if !entries.is_square() || entries.nrows() == 0 {
            return Err(StbcError::Dimension(format!("rotation must be square, got {:?}", entries.shape())));
        }
        let n = entries.nrows();
        let dev = (&entries * entries.transpose() - RMatrix::identity(n, n)).amax();
        if dev > 1e-10 {
            return Err(StbcError::Dimension(format!("matrix is not orthogonal (max deviation {dev:e})")));
        }
        let certificate = certify_rotation(&entries, bound);
        Ok(Self { entries, recipe: RotationRecipe::Explicit, certificate })
    }

    /// The identity: orthogonal but not full-diversity for λ ≥ 2.
    pub fn identity(dimension: usize) -> Self {
        let entries = RMatrix::identity(dimension, dimension);
        let certificate = certify_rotation(&entries, DEFAULT_BOUND);
        Self { entries, recipe: RotationRecipe::Explicit, certificate }
    }

    pub fn dimension(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &RMatrix {
        &self.entries
    }

    pub fn recipe(&self) -> RotationRecipe {
        self.recipe
    }

    pub fn certificate(&self) -> Certificate {
        self.certificate
    }

    pub fn is_certified(&self) -> bool {
        self.certificate.pass
    }

    /// Re-runs certification at a (possibly larger) bound.
    pub fn recertify(&mut self, bound: i64) -> Certificate {
        self.certificate = certify_rotation(&self.entries, bound);
        self.certificate
    }

    /// `Q x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dimension();
        (0..n).map(|r| (0..n).map(|c| self.entries[(r, c)] * x[c]).sum()).collect()
    }

    pub fn to_doc(&self) -> RotationDoc {
        let n = self.dimension();
        RotationDoc {
            lambda: n,
            entries: (0..n).map(|r| (0..n).map(|c| self.entries[(r, c)]).collect()).collect(),
            delta_min: self.certificate.delta_min,
            bound: self.certificate.bound,
            certified: self.certificate.pass,
            recipe: self.recipe,
        }
    }
}

/// JSON audit record of a rotation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotationDoc {
    pub lambda: usize,
    pub entries: Vec<Vec<f64>>,
    pub delta_min: f64,
    #[serde(rename = "B")]
    pub bound: i64,
    pub certified: bool,
    pub recipe: RotationRecipe,
}

/// Dimensions [`build_rotation`] can produce.
pub const SUPPORTED_DIMENSIONS: [usize; 7] = [1, 2, 3, 4, 5, 6, 8];

fn is_prime(p: usize) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

fn dct_iv(n: usize) -> RMatrix {
    if n == 1 {
        return RMatrix::identity(1, 1);
    }
    let scale = (2.0 / n as f64).sqrt();
    RMatrix::from_fn(n, n, |k, j| {
        let (k, j) = ((2 * k + 1) as f64, (2 * j + 1) as f64);
        scale * (PI * k * j / (4.0 * n as f64)).cos()
    })
}

fn prime_cyclotomic(n: usize) -> RMatrix {
    let p = (2 * n + 1) as f64;
    RMatrix::from_fn(n, n, |k, j| {
        // conjugate σ_{k+1}: ζ -> ζ^{k+1}
        let angle = 2.0 * PI * (k + 1) as f64 / p;
        let twist = ((2.0 - 2.0 * angle.cos()) / p).sqrt();
        let basis: f64 = (j + 1..=n).map(|l| 2.0 * (angle * l as f64).cos()).sum();
        twist * basis
    })
}

/// Builds and certifies (at [`DEFAULT_BOUND`]) a rotation of dimension `lambda`.
pub fn build_rotation(lambda: usize) -> Result<RotationMatrix> {
    build_rotation_with_bound(lambda, DEFAULT_BOUND)
}

pub fn build_rotation_with_bound(lambda: usize, bound: i64) -> Result<RotationMatrix> {
    let (entries, recipe) = if lambda >= 1 && lambda.is_power_of_two() {
        (dct_iv(lambda), RotationRecipe::PowerOfTwoCyclotomic)
    } else if lambda >= 1 && is_prime(2 * lambda + 1) {
        (prime_cyclotomic(lambda), RotationRecipe::PrimeCyclotomic)
    } else {
        return Err(StbcError::UnsupportedRotation(lambda));
    };
    if !SUPPORTED_DIMENSIONS.contains(&lambda) {
        return Err(StbcError::UnsupportedRotation(lambda));
    }
    let certificate = certify_rotation(&entries, bound.max(1));
    if !certificate.pass {
        return Err(StbcError::Uncertified(format!(
            "λ = {lambda} failed at B = {bound} with δ_min = {:e}",
            certificate.delta_min
        )));
    }
    Ok(RotationMatrix { entries, recipe, certificate })
}

/// Exhaustively scans every nonzero `a ∈ {-B..B}^λ` and returns the smallest
/// coordinate magnitude of `Q a`. Passes iff that minimum exceeds
/// [`DELTA_THRESHOLD`].
pub fn certify_rotation(q: &RMatrix, bound: i64) -> Certificate {
    let n = q.nrows();
    let bound = bound.max(1);
    if n == 0 {
        return Certificate { pass: false, delta_min: 0.0, bound };
    }
    // Odometer over a, maintaining Q a incrementally.
    let mut a = vec![-bound; n];
    let mut qa: Vec<f64> = (0..n).map(|r| -(bound as f64) * q.row(r).sum()).collect();
    let mut delta_min = f64::INFINITY;
    loop {
        if a.iter().any(|&v| v != 0) {
            let m = qa.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
            delta_min = delta_min.min(m);
        }
        let mut pos = 0;
        loop {
            if pos == n {
                return Certificate { pass: delta_min > DELTA_THRESHOLD, delta_min, bound };
            }
            if a[pos] < bound {
                a[pos] += 1;
                for (r, v) in qa.iter_mut().enumerate() {
                    *v += q[(r, pos)];
                }
                break;
            }
            for (r, v) in qa.iter_mut().enumerate() {
                *v -= 2.0 * bound as f64 * q[(r, pos)];
            }
            a[pos] = -bound;
            pos += 1;
        }
    }
}
