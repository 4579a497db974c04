use dashmap::DashMap;

use super::{check_universe, Coalition, CoalitionGame, Graph};
use crate::error::Result;

/// `v(u) = 1` when the subgraph induced by `u` is connected, else 0. The empty
/// coalition is worth 0 and singletons are connected.
pub struct ConnectivityGame {
    graph: Graph,
    memo: Option<DashMap<Coalition, f64>>,
}

impl ConnectivityGame {
    pub fn new(graph: Graph) -> Self {
        Self { graph, memo: None }
    }

    /// Caches coalition values in a concurrent map.
    pub fn with_memo(mut self) -> Self {
        self.memo = Some(DashMap::new());
        self
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    fn induced_connected(&self, coalition: &Coalition) -> bool {
        let Some(start) = coalition.iter().next() else { return false };
        let target = coalition.len();
        let mut seen = Coalition::empty(coalition.universe());
        seen.insert(start);
        let mut stack = vec![start];
        let mut reached = 1;
        while let Some(v) = stack.pop() {
            for &w in self.graph.neighbors(v) {
                if coalition.contains(w) && !seen.contains(w) {
                    seen.insert(w);
                    reached += 1;
                    stack.push(w);
                }
            }
        }
        reached == target
    }
}

impl CoalitionGame for ConnectivityGame {
    fn num_players(&self) -> usize {
        self.graph.node_count()
    }

    fn value(&self, coalition: &Coalition) -> Result<f64> {
        check_universe(self, coalition)?;
        if let Some(memo) = &self.memo {
            if let Some(v) = memo.get(coalition) {
                return Ok(*v);
            }
        }
        let v = if self.induced_connected(coalition) { 1.0 } else { 0.0 };
        if let Some(memo) = &self.memo {
            memo.insert(coalition.clone(), v);
        }
        Ok(v)
    }

    fn name(&self) -> &str {
        "connectivity"
    }
}
