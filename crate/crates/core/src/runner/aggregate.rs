//! Pointwise aggregation of replicated metric series.

use crate::error::{Error, Result};

/// Mean and standard error per tick over a batch of series.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregatedSeries {
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    pub n: u64,
}

/// Aligns the series on their tick index and averages pointwise. Runs that
/// ended early carry their terminal value forward: the cascade is finished,
/// so its metric stays at the final level for the rest of the window.
pub fn aggregate_replications(series: &[Vec<f64>]) -> Result<AggregatedSeries> {
    if series.is_empty() {
        return Err(Error::InvalidParameter(
            "cannot aggregate zero replications".into(),
        ));
    }
    if series.iter().any(|s| s.is_empty()) {
        return Err(Error::InvalidParameter(
            "cannot aggregate an empty series".into(),
        ));
    }
    let len = series.iter().map(Vec::len).max().unwrap();
    let n = series.len();
    let mut mean = Vec::with_capacity(len);
    let mut stderr = Vec::with_capacity(len);
    for t in 0..len {
        let at = |s: &Vec<f64>| s[t.min(s.len() - 1)];
        let m = series.iter().map(&at).sum::<f64>() / n as f64;
        let se = if n < 2 {
            0.0
        } else {
            let var = series
                .iter()
                .map(|s| {
                    let d = at(s) - m;
                    d * d
                })
                .sum::<f64>()
                / (n - 1) as f64;
            (var / n as f64).sqrt()
        };
        mean.push(m);
        stderr.push(se);
    }
    Ok(AggregatedSeries {
        mean,
        stderr,
        n: n as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_series_is_its_own_mean() {
        let agg = aggregate_replications(&[vec![0.1, 0.2, 0.3]]).unwrap();
        assert_eq!(agg.mean, vec![0.1, 0.2, 0.3]);
        assert_eq!(agg.stderr, vec![0.0, 0.0, 0.0]);
        assert_eq!(agg.n, 1);
    }

    #[test]
    fn constant_series_average() {
        let agg = aggregate_replications(&[vec![0.2], vec![0.4]]).unwrap();
        assert!((agg.mean[0] - 0.3).abs() < 1e-15);
        assert!(agg.stderr[0] > 0.0);
    }

    #[test]
    fn shorter_series_carry_their_terminal_value_forward() {
        // run a: ends at 0.5 after two ticks; run b: keeps growing
        let agg =
            aggregate_replications(&[vec![0.1, 0.5], vec![0.1, 0.3, 0.7, 0.9]]).unwrap();
        assert_eq!(agg.mean.len(), 4);
        assert!((agg.mean[2] - (0.5 + 0.7) / 2.0).abs() < 1e-15);
        assert!((agg.mean[3] - (0.5 + 0.9) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(aggregate_replications(&[]).is_err());
        assert!(aggregate_replications(&[vec![]]).is_err());
    }
}
