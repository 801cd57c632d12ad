//! Multi-threaded grid screening.
//!
//! The index space is cut into fixed chunks handed out through an atomic
//! counter. Each worker folds its chunks into one ranked list and the lists
//! are merged under the screening order, which is total, so the result does
//! not depend on worker count, chunk size or scheduling.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use swh_core::screening::{attach_hlc, check_capacity, merge_ranked, scan_range, Candidate, Criterion, GridSpec, Scorer};
use swh_core::CoreError;

#[derive(Debug, Clone, Copy)]
pub struct ParallelConfig {
    pub workers: usize,
    pub chunk_size: u64,
    pub enumeration_cap: u128,
}

pub fn screen_parallel<S, T>(
    hcr: &S,
    hlc: Option<&T>,
    spec: &GridSpec,
    criterion: &Criterion,
    cfg: &ParallelConfig,
) -> swh_core::Result<Vec<Candidate>>
where
    S: Scorer + Sync + ?Sized,
    T: Scorer + ?Sized,
{
    criterion.check()?;
    if cfg.workers == 0 || cfg.chunk_size == 0 {
        return Err(CoreError::Argument("workers and chunk_size must be >= 1".into()));
    }
    let total = check_capacity(spec, cfg.enumeration_cap)?;
    let chunk = cfg.chunk_size as u128;
    let n_chunks = u64::try_from(total.div_ceil(chunk))
        .map_err(|_| CoreError::Argument("too many chunks; raise chunk_size".into()))?;
    let next = AtomicU64::new(0);
    let failure: Mutex<Option<CoreError>> = Mutex::new(None);

    let parts: Vec<Vec<Candidate>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..cfg.workers.min(n_chunks.max(1) as usize))
            .map(|_| {
                s.spawn(|| {
                    let mut kept = Vec::new();
                    loop {
                        let c = next.fetch_add(1, Ordering::Relaxed);
                        if c >= n_chunks {
                            break;
                        }
                        let start = c as u128 * chunk;
                        let end = (start + chunk).min(total);
                        match scan_range(hcr, spec, start, end, criterion) {
                            Ok(found) => match criterion {
                                Criterion::TopK { .. } => kept = merge_ranked(criterion, vec![kept, found]),
                                Criterion::Threshold { .. } => kept.extend(found),
                            },
                            Err(e) => {
                                *failure.lock().unwrap() = Some(e);
                                next.store(n_chunks, Ordering::Relaxed);
                                break;
                            }
                        }
                    }
                    kept
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("screening worker panicked")).collect()
    });
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    let mut out = merge_ranked(criterion, parts);
    if let Some(h) = hlc {
        attach_hlc(&mut out, h);
    }
    Ok(out)
}
