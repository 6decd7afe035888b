//! Rectangular min-cost assignment with dual certificates.
//!
//! Rows are matched to distinct columns; every row is assigned and there must
//! be at least as many columns as rows. The primal solver is the classic
//! shortest-augmenting-path Hungarian method. Duals for the LP with `<= 1`
//! row and column constraints and nonnegative multipliers are recovered from
//! the optimal matching by solving a system of difference constraints.

/// Minimum-cost assignment of every row to a distinct column.
///
/// Returns `row_to_col`. Panics in debug builds when `rows > cols`.
pub fn min_cost_assignment(costs: &[Vec<f64>]) -> Vec<usize> {
    let rows = costs.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = costs[0].len();
    debug_assert!(rows <= cols, "more rows than columns");

    // 1-based arrays, index 0 is the virtual root.
    let mut u = vec![0.0f64; rows + 1];
    let mut v = vec![0.0f64; cols + 1];
    let mut owner = vec![0usize; cols + 1];
    let mut way = vec![0usize; cols + 1];
    let mut min_slack = vec![0.0f64; cols + 1];
    let mut used = vec![false; cols + 1];

    for row in 1..=rows {
        owner[0] = row;
        let mut col0 = 0usize;
        min_slack.iter_mut().for_each(|m| *m = f64::INFINITY);
        used.iter_mut().for_each(|b| *b = false);
        loop {
            used[col0] = true;
            let r0 = owner[col0];
            let mut delta = f64::INFINITY;
            let mut col1 = 0usize;
            for col in 1..=cols {
                if used[col] {
                    continue;
                }
                let cur = costs[r0 - 1][col - 1] - u[r0] - v[col];
                if cur < min_slack[col] {
                    min_slack[col] = cur;
                    way[col] = col0;
                }
                if min_slack[col] < delta {
                    delta = min_slack[col];
                    col1 = col;
                }
            }
            for col in 0..=cols {
                if used[col] {
                    u[owner[col]] += delta;
                    v[col] -= delta;
                } else {
                    min_slack[col] -= delta;
                }
            }
            col0 = col1;
            if owner[col0] == 0 {
                break;
            }
        }
        loop {
            let col1 = way[col0];
            owner[col0] = owner[col1];
            col0 = col1;
            if col0 == 0 {
                break;
            }
        }
    }

    let mut row_to_col = vec![usize::MAX; rows];
    for col in 1..=cols {
        if owner[col] != 0 {
            row_to_col[owner[col] - 1] = col - 1;
        }
    }
    row_to_col
}

/// Nonnegative duals `(row_dual, col_dual)` certifying `matching` as optimal.
///
/// With weights `w = -cost`, the returned multipliers satisfy
/// `row_dual[r] + col_dual[c] >= w[r][c]`, are tight on matched pairs and
/// vanish on unmatched columns, so `sum(row_dual) + sum(col_dual)` equals the
/// matched weight. `matching` must assign every row and be optimal.
pub fn dual_certificate(costs: &[Vec<f64>], matching: &[usize]) -> (Vec<f64>, Vec<f64>) {
    let rows = costs.len();
    if rows == 0 {
        return (Vec::new(), Vec::new());
    }
    let cols = costs[0].len();
    let w = |r: usize, c: usize| -costs[r][c];

    let mut partner = vec![usize::MAX; cols];
    for (r, &c) in matching.iter().enumerate() {
        partner[c] = r;
    }

    // Difference constraints x_a - x_b <= d become edges b -> a of length d.
    // Node `rows` is the root pinned at zero.
    let root = rows;
    let mut edges: Vec<(usize, usize, f64)> = Vec::with_capacity(rows * cols + 2 * rows);
    for r in 0..rows {
        // 0 <= row_dual[r] and row_dual[r] >= w over unmatched columns.
        let mut lower = 0.0f64;
        for c in 0..cols {
            if partner[c] == usize::MAX {
                lower = lower.max(w(r, c));
            }
        }
        edges.push((r, root, -lower));
        // col_dual of the partner column stays nonnegative.
        edges.push((root, r, w(r, matching[r])));
    }
    for c in 0..cols {
        let owner = partner[c];
        if owner == usize::MAX {
            continue;
        }
        for r in 0..rows {
            if r != owner {
                edges.push((r, owner, w(owner, c) - w(r, c)));
            }
        }
    }

    let mut dist = vec![f64::INFINITY; rows + 1];
    dist[root] = 0.0;
    for _ in 0..=rows {
        let mut changed = false;
        for &(from, to, len) in &edges {
            if dist[from] + len < dist[to] {
                dist[to] = dist[from] + len;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let shift = dist[root];
    let row_dual: Vec<f64> = (0..rows).map(|r| (dist[r] - shift).max(0.0)).collect();
    let mut col_dual = vec![0.0; cols];
    for (r, &c) in matching.iter().enumerate() {
        col_dual[c] = (w(r, c) - row_dual[r]).max(0.0);
    }
    (row_dual, col_dual)
}
