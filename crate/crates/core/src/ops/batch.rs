use thiserror::Error;

use super::{evaluate, Method, OpsError};
use crate::syntax::Formula;
use crate::trace::Trace;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("trace {index}: {source}")]
pub struct BatchError {
    pub index: usize,
    pub source: OpsError,
}

/// Robustness at step 0 of every trace, in input order.
///
/// With the `parallel` feature the traces are evaluated on the rayon pool; the result is
/// identical to [`batch_robustness_sequential`].
pub fn batch_robustness(f: &Formula, traces: &[Trace], method: Method<'_>) -> Result<Vec<f64>, BatchError> {
    #[cfg(feature = "parallel")]
    {
        batch_robustness_parallel(f, traces, method)
    }
    #[cfg(not(feature = "parallel"))]
    {
        batch_robustness_sequential(f, traces, method)
    }
}

pub fn batch_robustness_sequential(f: &Formula, traces: &[Trace], method: Method<'_>) -> Result<Vec<f64>, BatchError> {
    traces
        .iter()
        .enumerate()
        .map(|(index, tr)| evaluate(f, tr, 0, method).map_err(|source| BatchError { index, source }))
        .collect()
}

#[cfg(feature = "parallel")]
pub fn batch_robustness_parallel(f: &Formula, traces: &[Trace], method: Method<'_>) -> Result<Vec<f64>, BatchError> {
    use rayon::prelude::*;

    let results: Vec<Result<f64, OpsError>> = traces.par_iter().map(|tr| evaluate(f, tr, 0, method)).collect();
    // Report the lowest failing index, as the sequential path does.
    results.into_iter().enumerate().map(|(index, r)| r.map_err(|source| BatchError { index, source })).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::robustness;
    use crate::syntax::parse_stl;

    #[test]
    fn single_and_repeated() {
        let f = parse_stl("F[0,1] s>1").unwrap();
        let t = Trace::from_columns(&[("s", &[0.0, 3.0])]);
        assert_eq!(
            batch_robustness(&f, std::slice::from_ref(&t), Method::Classic).unwrap(),
            vec![robustness(&f, &t, 0).unwrap()]
        );
        let r = batch_robustness(&f, &[t.clone(), t], Method::Classic).unwrap();
        assert_eq!(r[0], r[1]);
    }

    #[test]
    fn error_carries_index() {
        let f = parse_stl("F[0,1] s>1").unwrap();
        let good = Trace::from_columns(&[("s", &[0.0, 3.0])]);
        let short = Trace::from_columns(&[("s", &[0.0])]);
        let err = batch_robustness(&f, &[good.clone(), short.clone(), short], Method::Classic).unwrap_err();
        assert_eq!(err.index, 1);
        assert_eq!(batch_robustness_sequential(&f, &[good], Method::Classic).unwrap(), vec![2.0]);
    }
}
