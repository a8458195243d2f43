/// Calls `f` on every ordered `K`-tuple of distinct indices in `0..n`.
pub(crate) fn for_each_distinct_tuple<const K: usize>(n: usize, mut f: impl FnMut(&[usize; K])) {
    fn rec<const K: usize>(
        n: usize,
        depth: usize,
        tuple: &mut [usize; K],
        used: &mut [bool],
        f: &mut impl FnMut(&[usize; K]),
    ) {
        if depth == K {
            f(tuple);
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                tuple[depth] = i;
                rec(n, depth + 1, tuple, used, f);
                used[i] = false;
            }
        }
    }
    let mut tuple = [0; K];
    let mut used = vec![false; n];
    rec(n, 0, &mut tuple, &mut used, &mut f);
}
