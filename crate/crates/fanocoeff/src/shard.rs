use std::thread;

use anyhow::{anyhow, Result};
use fanocoeff_core::verify::{certify_positivity_shard, positivity_claim, prepare_positivity};
use fanocoeff_core::{Certificate, Coefficients, Method};

/// Positivity up to `n` split over `shards` threads.
///
/// One engine is warmed on the calling thread and each shard gets its own
/// clone, so shards share no mutable state. The merged certificate is the
/// same for every shard count.
pub fn certify_sharded(n: usize, method: Method, shards: usize) -> Result<Certificate> {
    certify_sharded_with(Coefficients::new(), n, method, shards)
}

/// [`certify_sharded`] starting from `warm` instead of a fresh engine.
pub fn certify_sharded_with(
    mut warm: Coefficients,
    n: usize,
    method: Method,
    shards: usize,
) -> Result<Certificate> {
    let shards = shards.max(1);
    prepare_positivity(&mut warm, n, method);
    if shards == 1 {
        return Ok(certify_positivity_shard(&mut warm, n, method, 0, 1)?);
    }
    let parts = thread::scope(|scope| {
        let handles: Vec<_> = (0..shards)
            .map(|shard| {
                let mut engine = warm.clone();
                scope.spawn(move || certify_positivity_shard(&mut engine, n, method, shard, shards))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| {
                h.join()
                    .map_err(|_| anyhow!("certification shard panicked"))?
                    .map_err(anyhow::Error::from)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(Certificate::merge(positivity_claim(n, method), parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use fanocoeff_core::certify_positivity;

    #[test]
    fn shard_counts_agree() {
        let single = certify_positivity(30, Method::ClosedForm).unwrap();
        for shards in [1, 2, 4, 9] {
            assert_eq!(
                certify_sharded(30, Method::ClosedForm, shards).unwrap(),
                single
            );
        }
    }

    #[test]
    fn zero_shards_means_one() {
        assert!(certify_sharded(5, Method::Recurrence, 0).unwrap().passed());
    }

    #[test]
    fn bad_range_is_an_error() {
        assert!(certify_sharded(1, Method::ClosedForm, 2).is_err());
    }
}
