//! Watts-Strogatz small-world networks.

use alloc::vec::Vec;

use rand::Rng;

use crate::{Error, Result};

/// Undirected simple graph as per-agent neighbor lists.
#[derive(Debug, Clone)]
pub struct Network {
    adjacency: Vec<Vec<u32>>,
}

impl Network {
    pub fn n_agents(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, agent: usize) -> &[u32] {
        &self.adjacency[agent]
    }

    pub fn degree(&self, agent: usize) -> usize {
        self.adjacency[agent].len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].contains(&(j as u32))
    }
}

/// Ring lattice with `k` nearest neighbors, each original edge rewired with
/// probability `p_rewire` from its far endpoint to a uniformly random agent
/// that is neither the near endpoint nor already a neighbor of it.
///
/// Edge count `n_agents * k / 2` is preserved; the graph stays simple.
pub fn build_watts_strogatz<R: Rng>(
    n_agents: usize,
    k: usize,
    p_rewire: f64,
    rng: &mut R,
) -> Result<Network> {
    if k % 2 != 0 {
        return Err(Error::InvalidConfig("k must be even"));
    }
    if k < 2 || k >= n_agents - 1 {
        return Err(Error::InvalidConfig("k must satisfy 2 <= k < n_agents - 1"));
    }
    if !(0.0..=1.0).contains(&p_rewire) {
        return Err(Error::InvalidConfig("p_rewire must lie in [0, 1]"));
    }

    let mut adjacency: Vec<Vec<u32>> = (0..n_agents).map(|_| Vec::with_capacity(k)).collect();
    let add = |adj: &mut Vec<Vec<u32>>, i: usize, j: usize| {
        adj[i].push(j as u32);
        adj[j].push(i as u32);
    };
    let remove = |adj: &mut Vec<Vec<u32>>, i: usize, j: usize| {
        let pos = adj[i].iter().position(|&x| x == j as u32).expect("edge present");
        adj[i].swap_remove(pos);
        let pos = adj[j].iter().position(|&x| x == i as u32).expect("edge present");
        adj[j].swap_remove(pos);
    };

    for i in 0..n_agents {
        for offset in 1..=k / 2 {
            add(&mut adjacency, i, (i + offset) % n_agents);
        }
    }

    if p_rewire > 0.0 {
        for i in 0..n_agents {
            for offset in 1..=k / 2 {
                let old = (i + offset) % n_agents;
                if !rng.gen_bool(p_rewire) {
                    continue;
                }
                // The edge may already have been rewired away from this slot.
                if !adjacency[i].contains(&(old as u32)) {
                    continue;
                }
                // A fully connected endpoint has no legal target left.
                if adjacency[i].len() >= n_agents - 1 {
                    continue;
                }
                let new = loop {
                    let candidate = rng.gen_range(0..n_agents);
                    if candidate != i && !adjacency[i].contains(&(candidate as u32)) {
                        break candidate;
                    }
                };
                remove(&mut adjacency, i, old);
                add(&mut adjacency, i, new);
            }
        }
    }

    Ok(Network { adjacency })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn regular_lattice_without_rewiring() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let net = build_watts_strogatz(100, 8, 0.0, &mut rng).unwrap();
        for i in 0..100 {
            assert_eq!(net.degree(i), 8);
        }
        assert!(net.has_edge(0, 1) && net.has_edge(0, 4) && net.has_edge(0, 96));
        assert!(!net.has_edge(0, 5));
    }

    #[test]
    fn rewiring_preserves_edge_count_and_simplicity() {
        for seed in 0..5u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let net = build_watts_strogatz(500, 8, 0.3, &mut rng).unwrap();
            assert_eq!(net.edge_count(), 500 * 8 / 2);
            for i in 0..500 {
                let mut seen: std::vec::Vec<u32> = net.neighbors(i).to_vec();
                seen.sort_unstable();
                seen.dedup();
                assert_eq!(seen.len(), net.degree(i), "duplicate edge at {i}");
                assert!(!seen.contains(&(i as u32)), "self loop at {i}");
                for &j in net.neighbors(i) {
                    assert!(net.has_edge(j as usize, i), "asymmetric edge {i}-{j}");
                }
            }
        }
    }

    #[test]
    fn invalid_configs_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(build_watts_strogatz(100, 7, 0.0, &mut rng).is_err());
        assert!(build_watts_strogatz(10, 10, 0.0, &mut rng).is_err());
        assert!(build_watts_strogatz(100, 8, 1.5, &mut rng).is_err());
    }
}
