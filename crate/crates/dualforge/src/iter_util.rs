//! Odometer iteration over argument tuples.

/// Call `f` on every length-`k` index tuple over `0..len` (mixed-radix
/// big-endian order). Stops early and returns `false` if `f` does. For
/// `k == 0` the single empty tuple is visited; for `len == 0` and `k > 0`
/// nothing is.
pub(crate) fn for_each_index_tuple(len: usize, k: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    if k == 0 {
        return f(&[]);
    }
    if len == 0 {
        return true;
    }
    let mut idxs = vec![0usize; k];
    loop {
        if !f(&idxs) {
            return false;
        }
        let mut j = k;
        loop {
            if j == 0 {
                return true;
            }
            j -= 1;
            idxs[j] += 1;
            if idxs[j] < len {
                break;
            }
            idxs[j] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn visits_all_tuples_in_order() {
        let mut seen = Vec::new();
        for_each_index_tuple(3, 2, |t| {
            seen.push(t.to_vec());
            true
        });
        assert_eq!(seen.len(), 9);
        assert_eq!(seen[0], vec![0, 0]);
        assert_eq!(seen[1], vec![0, 1]);
        assert_eq!(seen[8], vec![2, 2]);
    }

    #[test]
    fn degenerate_cases() {
        let mut count = 0;
        for_each_index_tuple(5, 0, |_| {
            count += 1;
            true
        });
        assert_eq!(count, 1);
        for_each_index_tuple(0, 2, |_| {
            count += 10;
            true
        });
        assert_eq!(count, 1);
    }

    #[test]
    fn early_stop() {
        let mut count = 0;
        let done = for_each_index_tuple(4, 1, |t| {
            count += 1;
            t[0] < 1
        });
        assert!(!done);
        assert_eq!(count, 2);
    }
}
