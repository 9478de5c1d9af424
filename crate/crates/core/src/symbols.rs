//! QPSK symbol vectors.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{invalid, Result};

/// Transmit power of a QPSK symbol from {±1 ± j}.
pub const SIGMA_S2: f64 = 2.0;

/// The QPSK alphabet in lexicographic order.
pub const QPSK: [Complex64; 4] = [
    Complex64::new(1.0, 1.0),
    Complex64::new(1.0, -1.0),
    Complex64::new(-1.0, 1.0),
    Complex64::new(-1.0, -1.0),
];

pub(crate) fn is_qpsk(z: Complex64) -> bool {
    z.re.abs() == 1.0 && z.im.abs() == 1.0
}

/// A length-K vector of user symbols, each in {±1 ± j}.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolVector(DVector<Complex64>);

impl SymbolVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(invalid("symbol vector must not be empty"));
        }
        if let Some(bad) = entries.iter().find(|z| !is_qpsk(**z)) {
            return Err(invalid(format!("{bad} is not a QPSK symbol")));
        }
        Ok(Self(DVector::from_vec(entries)))
    }

    /// Draws `k` independent, equally likely QPSK symbols.
    pub fn random<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Self {
        let entries = (0..k)
            .map(|_| {
                let re = if rng.random::<bool>() { 1.0 } else { -1.0 };
                let im = if rng.random::<bool>() { 1.0 } else { -1.0 };
                Complex64::new(re, im)
            })
            .collect::<Vec<_>>();
        Self(DVector::from_vec(entries))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_vector(&self) -> &DVector<Complex64> {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = &Complex64> {
        self.0.iter()
    }

    /// Multiplies every symbol by `j`; the alphabet is closed under this rotation.
    pub fn rotate_j(&self) -> Self {
        Self(self.0.map(|z| z * Complex64::i()))
    }
}

impl std::ops::Index<usize> for SymbolVector {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}
