use std::fmt;

use crate::error::{Error, Result};

/// One of the four qubits taking part in switched teleportation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Qubit {
    /// The quantum switch.
    S,
    /// Alice's unknown input qubit.
    APrime,
    /// Alice's half of the singlet.
    A,
    /// Bob's half of the singlet.
    B,
}

impl fmt::Display for Qubit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Qubit::S => "S",
            Qubit::APrime => "A'",
            Qubit::A => "A",
            Qubit::B => "B",
        };
        f.write_str(s)
    }
}

/// Ordered tensor-factor layout. The first label is the most significant bit of
/// a basis index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsystemLayout {
    labels: Vec<Qubit>,
}

impl SubsystemLayout {
    pub fn new(labels: Vec<Qubit>) -> Result<Self> {
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::DuplicateLabel(l.to_string()));
            }
        }
        Ok(Self { labels })
    }

    /// `S ⊗ A′ ⊗ A ⊗ B`.
    pub fn full() -> Self {
        Self {
            labels: vec![Qubit::S, Qubit::APrime, Qubit::A, Qubit::B],
        }
    }

    /// `A′ ⊗ A ⊗ B`.
    pub fn register() -> Self {
        Self {
            labels: vec![Qubit::APrime, Qubit::A, Qubit::B],
        }
    }

    pub fn labels(&self) -> &[Qubit] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        1 << self.labels.len()
    }

    pub fn position(&self, q: Qubit) -> Option<usize> {
        self.labels.iter().position(|&l| l == q)
    }

    /// Sub-layout containing only `keep`, in this layout's order.
    pub fn restrict(&self, keep: &[Qubit]) -> Result<Self> {
        for q in keep {
            if self.position(*q).is_none() {
                return Err(Error::UnknownLabel(q.to_string()));
            }
        }
        Ok(Self {
            labels: self
                .labels
                .iter()
                .copied()
                .filter(|l| keep.contains(l))
                .collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates() {
        assert!(matches!(
            SubsystemLayout::new(vec![Qubit::A, Qubit::B, Qubit::A]),
            Err(Error::DuplicateLabel(_))
        ));
    }

    #[test]
    fn dims() {
        assert_eq!(SubsystemLayout::full().dim(), 16);
        assert_eq!(SubsystemLayout::register().dim(), 8);
    }

    #[test]
    fn restrict_keeps_layout_order() {
        let l = SubsystemLayout::full()
            .restrict(&[Qubit::B, Qubit::S])
            .unwrap();
        assert_eq!(l.labels(), &[Qubit::S, Qubit::B]);
        assert!(SubsystemLayout::register().restrict(&[Qubit::S]).is_err());
    }
}
