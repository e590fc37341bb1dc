//! Named weight vectors for weighted STL.

use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("weight `{name}` must contain finite, strictly positive entries")]
pub struct InvalidWeight {
    pub name: String,
}

/// Map from weight name to a vector of strictly positive reals.
///
/// Logical operators index the vector by operand position; temporal operators by the offset
/// of the time step inside their interval.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WeightTable {
    entries: BTreeMap<String, Vec<f64>>,
}

impl WeightTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, weights: Vec<f64>) -> Result<(), InvalidWeight> {
        let name = name.into();
        if weights.is_empty() || weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(InvalidWeight { name });
        }
        self.entries.insert(name, weights);
        Ok(())
    }

    pub fn with(mut self, name: impl Into<String>, weights: Vec<f64>) -> Result<Self, InvalidWeight> {
        self.insert(name, weights)?;
        Ok(self)
    }

    pub fn get(&self, name: &str) -> Option<&[f64]> {
        self.entries.get(name).map(Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Every entry multiplied by `factor` (which must be positive).
    pub fn scaled(&self, factor: f64) -> Self {
        assert!(factor > 0.0 && factor.is_finite());
        Self {
            entries: self.entries.iter().map(|(k, v)| (k.clone(), v.iter().map(|w| w * factor).collect())).collect(),
        }
    }

    /// Same names, every entry replaced by one.
    pub fn ones_like(&self) -> Self {
        Self { entries: self.entries.iter().map(|(k, v)| (k.clone(), vec![1.0; v.len()])).collect() }
    }
}

impl TryFrom<BTreeMap<String, Vec<f64>>> for WeightTable {
    type Error = InvalidWeight;

    fn try_from(map: BTreeMap<String, Vec<f64>>) -> Result<Self, Self::Error> {
        let mut table = WeightTable::new();
        for (k, v) in map {
            table.insert(k, v)?;
        }
        Ok(table)
    }
}
