//! Discrete-time signal traces and per-signal value bounds.

use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TraceError {
    #[error("duplicate signal `{0}`")]
    DuplicateSignal(String),
    #[error("signal `{name}` has {got} samples, expected {expected}")]
    RaggedColumns { name: String, expected: usize, got: usize },
    #[error("bounds for `{name}` are reversed: {lower} > {upper}")]
    BadBounds { name: String, lower: f64, upper: f64 },
}

/// Signals sampled at unit period, steps `0..len()`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
}

impl Trace {
    pub fn new(signals: Vec<(String, Vec<f64>)>) -> Result<Self, TraceError> {
        let mut trace = Trace::default();
        for (name, values) in signals {
            trace.push(name, values)?;
        }
        Ok(trace)
    }

    /// Builds a trace from `(&str, values)` pairs; panics on malformed input.
    pub fn from_columns(signals: &[(&str, &[f64])]) -> Self {
        Self::new(signals.iter().map(|(n, v)| (n.to_string(), v.to_vec())).collect()).expect("well-formed trace")
    }

    pub fn push(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<(), TraceError> {
        let name = name.into();
        if self.names.contains(&name) {
            return Err(TraceError::DuplicateSignal(name));
        }
        if let Some(first) = self.columns.first() {
            if first.len() != values.len() {
                return Err(TraceError::RaggedColumns { name, expected: first.len(), got: values.len() });
            }
        }
        self.names.push(name);
        self.columns.push(values);
        Ok(())
    }

    /// Number of samples per signal.
    pub fn len(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn get(&self, name: &str) -> Option<&[f64]> {
        self.names.iter().position(|n| n == name).map(|i| self.columns[i].as_slice())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.names.iter().map(String::as_str).zip(self.columns.iter().map(Vec::as_slice))
    }
}

/// Lower and upper bound per signal.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VarBounds {
    entries: BTreeMap<String, (f64, f64)>,
}

impl VarBounds {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, lower: f64, upper: f64) -> Result<(), TraceError> {
        let name = name.into();
        if !(lower <= upper) {
            return Err(TraceError::BadBounds { name, lower, upper });
        }
        self.entries.insert(name, (lower, upper));
        Ok(())
    }

    pub fn with(mut self, name: impl Into<String>, lower: f64, upper: f64) -> Result<Self, TraceError> {
        self.insert(name, lower, upper)?;
        Ok(self)
    }

    /// Same bounds for every name in `names`.
    pub fn uniform<S: AsRef<str>>(names: &[S], lower: f64, upper: f64) -> Result<Self, TraceError> {
        let mut b = Self::new();
        for n in names {
            b.insert(n.as_ref(), lower, upper)?;
        }
        Ok(b)
    }

    pub fn get(&self, name: &str) -> Option<(f64, f64)> {
        self.entries.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, (f64, f64))> {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn columns_must_agree() {
        let mut t = Trace::new(vec![("a".into(), vec![1.0, 2.0])]).unwrap();
        assert!(matches!(t.push("b", vec![1.0]), Err(TraceError::RaggedColumns { .. })));
        assert!(matches!(t.push("a", vec![1.0, 2.0]), Err(TraceError::DuplicateSignal(_))));
        t.push("b", vec![3.0, 4.0]).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.get("b"), Some(&[3.0, 4.0][..]));
    }

    #[test]
    fn bounds_ordered() {
        assert!(VarBounds::new().with("s", 1.0, 0.0).is_err());
        assert_eq!(VarBounds::uniform(&["a", "b"], 0.0, 10.0).unwrap().get("b"), Some((0.0, 10.0)));
    }
}
