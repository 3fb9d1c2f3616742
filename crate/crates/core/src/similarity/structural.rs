use std::collections::BTreeMap;

use super::matrix::SymMatrix;

/// Structural similarity from call edges `(caller, callee, method)`.
///
/// Parallel same-method edges collapse into a count; each count is divided
/// by the total count of its `(callee, method)` group; both directions of a
/// pair are summed and divided by the pair's combined public-method count;
/// finally everything is divided by the largest pair weight.
pub fn structural_similarity<'a, I>(n: usize, calls: I, public_method_counts: &[usize]) -> SymMatrix
where
    I: IntoIterator<Item = (usize, usize, &'a str)>,
{
    assert_eq!(public_method_counts.len(), n);
    let mut collapsed: BTreeMap<(usize, usize, &str), f64> = BTreeMap::new();
    for (u, v, m) in calls {
        if u != v {
            *collapsed.entry((u, v, m)).or_insert(0.0) += 1.0;
        }
    }
    let mut group: BTreeMap<(usize, &str), f64> = BTreeMap::new();
    for (&(_, v, m), &c) in &collapsed {
        *group.entry((v, m)).or_insert(0.0) += c;
    }
    let mut pair: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (&(u, v, m), &c) in &collapsed {
        let key = (u.min(v), u.max(v));
        *pair.entry(key).or_insert(0.0) += c / group[&(v, m)];
    }
    let mut out = SymMatrix::zeros(n);
    for ((u, v), w) in pair {
        let methods = public_method_counts[u] + public_method_counts[v];
        if methods > 0 {
            out.set(u, v, w / methods as f64);
        }
    }
    let mu = out.max();
    if mu > 0.0 {
        out.scale(1.0 / mu);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn no_edges_is_all_zero() {
        let m = structural_similarity(3, std::iter::empty(), &[1, 1, 1]);
        assert_eq!(m.max(), 0.0);
    }

    #[test]
    fn repeated_single_method_call_normalizes_to_one() {
        let calls = [(0, 1, "m"), (0, 1, "m")];
        let m = structural_similarity(2, calls, &[2, 1]);
        assert_relative_eq!(m.get(0, 1), 1.0);
    }

    #[test]
    fn fan_in_splits_credit_between_callers() {
        // before normalization both pairs weigh 0.5 / 2 = 0.25
        let calls = [(0, 2, "m"), (1, 2, "m")];
        let m = structural_similarity(3, calls, &[1, 1, 1]);
        assert_relative_eq!(m.get(0, 2), 1.0);
        assert_relative_eq!(m.get(1, 2), 1.0);
        assert_eq!(m.get(0, 1), 0.0);
    }

    #[test]
    fn zero_method_pair_gets_zero() {
        let m = structural_similarity(2, [(0, 1, "m")], &[0, 0]);
        assert_eq!(m.get(0, 1), 0.0);
    }

    proptest! {
        #[test]
        fn uniform_duplication_is_invariant(
            edges in proptest::collection::vec((0usize..5, 0usize..5, 0usize..3), 0..20),
            k in 1usize..4,
        ) {
            let names = ["a", "b", "c"];
            let counts = [3, 1, 2, 0, 4];
            let base: Vec<_> = edges.iter().map(|&(u, v, m)| (u, v, names[m])).collect();
            let dup: Vec<_> = base.iter().flat_map(|&e| std::iter::repeat_n(e, k)).collect();
            let a = structural_similarity(5, base, &counts);
            let b = structural_similarity(5, dup, &counts);
            for (i, j, w) in a.upper_triangle() {
                prop_assert!((w - b.get(i, j)).abs() < 1e-12);
            }
        }
    }
}
