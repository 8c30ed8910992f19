//! Desk-scale acceptance checks, runnable both from `cargo test` and from
//! the CLI `selftest` subcommand.

pub mod oracles {
    use crate::grassmann::AdjacencyBits;

    /// Breadth-first distances from one source; `None` for unreachable
    /// vertices. Kept as the permanent independent oracle for the
    /// `k - dim(X ∩ Y)` distance formula.
    pub fn bfs_distances(adj: &AdjacencyBits, src: usize) -> Vec<Option<usize>> {
        let n = adj.len();
        let mut dist = vec![None; n];
        dist[src] = Some(0);
        let mut frontier = vec![src];
        let mut d = 0usize;
        while !frontier.is_empty() {
            d += 1;
            let mut next = Vec::new();
            for &v in &frontier {
                for u in adj.neighbors(v) {
                    if dist[u].is_none() {
                        dist[u] = Some(d);
                        next.push(u);
                    }
                }
            }
            frontier = next;
        }
        dist
    }
}
