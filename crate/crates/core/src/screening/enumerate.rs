use crate::error::{CoreError, Result};
use crate::record::N_FEATURES;
use crate::screening::grid::GridSpec;

/// Streams `(grid_index, features)` over `[start, end)` in lexicographic
/// order (last feature fastest), holding one odometer state.
#[derive(Debug, Clone)]
pub struct GridIter<'a> {
    spec: &'a GridSpec,
    radices: [usize; N_FEATURES],
    digits: [usize; N_FEATURES],
    next: u128,
    end: u128,
}

pub fn enumerate_grid(spec: &GridSpec, start: u128, end: u128) -> Result<GridIter<'_>> {
    let total = spec.total_combinations()?;
    if !(start < end && end <= total) {
        return Err(CoreError::Argument(alloc::format!(
            "range [{start}, {end}) is not inside [0, {total})"
        )));
    }
    Ok(GridIter {
        spec,
        radices: spec.radices(),
        digits: spec.digits_at(start)?,
        next: start,
        end,
    })
}

impl Iterator for GridIter<'_> {
    type Item = (u128, [f64; N_FEATURES]);

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.end {
            return None;
        }
        let item = (self.next, self.spec.features_of(&self.digits));
        self.next += 1;
        for j in (0..N_FEATURES).rev() {
            self.digits[j] += 1;
            if self.digits[j] < self.radices[j] {
                break;
            }
            self.digits[j] = 0;
        }
        Some(item)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self.end - self.next;
        let n = usize::try_from(left).unwrap_or(usize::MAX);
        (n, usize::try_from(left).ok())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;

    fn spec() -> GridSpec {
        GridSpec::new(
            vec![vec![1.0, 2.0], vec![10.0, 20.0, 30.0], vec![1.0], vec![1.0], vec![1.0], vec![1.0], vec![1.0]],
            None,
        )
        .unwrap()
    }

    #[test]
    fn full_range_matches_product() {
        let s = spec();
        let got: Vec<_> = enumerate_grid(&s, 0, 6).unwrap().map(|(_, x)| (x[0], x[1])).collect();
        let mut brute = Vec::new();
        for a in [1.0, 2.0] {
            for b in [10.0, 20.0, 30.0] {
                brute.push((a, b));
            }
        }
        assert_eq!(got, brute);
    }

    #[test]
    fn bad_ranges() {
        let s = spec();
        assert!(enumerate_grid(&s, 3, 3).is_err());
        assert!(enumerate_grid(&s, 0, 7).is_err());
        assert_eq!(enumerate_grid(&s, 4, 6).unwrap().count(), 2);
    }
}
