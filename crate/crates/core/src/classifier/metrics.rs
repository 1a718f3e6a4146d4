use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rows are true classes, columns predicted classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub classes: Vec<u16>,
    pub counts: Vec<u64>,
}

impl ConfusionMatrix {
    /// Builds the matrix over the union of predicted and true labels.
    pub fn from_labels(predicted: &[u16], truth: &[u16]) -> Result<Self> {
        if predicted.len() != truth.len() {
            return Err(Error::LengthMismatch {
                left: predicted.len(),
                right: truth.len(),
            });
        }
        let mut classes: Vec<u16> = predicted.iter().chain(truth).copied().collect();
        classes.sort_unstable();
        classes.dedup();
        let c = classes.len();
        let mut counts = vec![0u64; c * c];
        for (p, t) in predicted.iter().zip(truth) {
            let row = classes.binary_search(t).unwrap();
            let col = classes.binary_search(p).unwrap();
            counts[row * c + col] += 1;
        }
        Ok(Self { classes, counts })
    }

    /// `counts` row-major, `classes.len()` squared entries.
    pub fn from_counts(classes: Vec<u16>, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != classes.len() * classes.len() {
            return Err(Error::LengthMismatch {
                left: counts.len(),
                right: classes.len() * classes.len(),
            });
        }
        Ok(Self { classes, counts })
    }

    pub fn size(&self) -> usize {
        self.classes.len()
    }

    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.counts[row * self.size() + col]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.size()).map(|i| self.get(i, i)).sum()
    }

    pub fn overall_accuracy(&self) -> f64 {
        self.trace() as f64 / self.total() as f64
    }

    /// Agreement expected by chance from the row and column marginals.
    pub fn chance_agreement(&self) -> f64 {
        let c = self.size();
        let total = self.total() as f64;
        (0..c)
            .map(|i| {
                let row: u64 = (0..c).map(|j| self.get(i, j)).sum();
                let col: u64 = (0..c).map(|j| self.get(j, i)).sum();
                row as f64 * col as f64
            })
            .sum::<f64>()
            / (total * total)
    }

    /// Cohen's kappa. When chance agreement is total, kappa is 1 for perfect
    /// agreement and 0 otherwise.
    pub fn kappa(&self) -> f64 {
        let po = self.overall_accuracy();
        let pe = self.chance_agreement();
        if pe >= 1.0 {
            return if po >= 1.0 { 1.0 } else { 0.0 };
        }
        (po - pe) / (1.0 - pe)
    }

    /// Fraction of each true class predicted correctly.
    pub fn per_class_accuracy(&self) -> Vec<(u16, f64)> {
        let c = self.size();
        self.classes
            .iter()
            .enumerate()
            .filter_map(|(i, &class)| {
                let row: u64 = (0..c).map(|j| self.get(i, j)).sum();
                (row > 0).then(|| (class, self.get(i, i) as f64 / row as f64))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub confusion: ConfusionMatrix,
    pub overall_accuracy: f64,
    pub kappa: f64,
}

pub fn evaluate(predicted: &[u16], truth: &[u16]) -> Result<Evaluation> {
    if truth.is_empty() {
        return Err(Error::NoSamples);
    }
    if truth.contains(&0) {
        return Err(Error::InvalidArgument("truth contains unlabeled pixels".into()));
    }
    let confusion = ConfusionMatrix::from_labels(predicted, truth)?;
    Ok(Evaluation {
        overall_accuracy: confusion.overall_accuracy(),
        kappa: confusion.kappa(),
        confusion,
    })
}
