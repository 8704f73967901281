//! Device connectivity and logical→physical assignments.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::TranspileError;

/// Undirected coupling graph over physical qubits `0..num_qubits`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GraphFile", into = "GraphFile")]
pub struct CouplingGraph {
    num_qubits: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

/// On-disk shape: `{"qubits": 5, "edges": [[0,1],[1,2],[1,3],[3,4]]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct GraphFile {
    qubits: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<GraphFile> for CouplingGraph {
    type Error = TranspileError;

    fn try_from(file: GraphFile) -> Result<Self, Self::Error> {
        CouplingGraph::new(file.qubits, file.edges.iter().map(|e| (e[0], e[1])))
    }
}

impl From<CouplingGraph> for GraphFile {
    fn from(g: CouplingGraph) -> Self {
        GraphFile {
            qubits: g.num_qubits,
            edges: g.edges.iter().map(|&(a, b)| [a, b]).collect(),
        }
    }
}

impl CouplingGraph {
    pub fn new(num_qubits: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, TranspileError> {
        if num_qubits == 0 {
            return Err(TranspileError::BadGraph("graph has no qubits".into()));
        }
        let mut adjacency = vec![Vec::new(); num_qubits];
        let mut list = Vec::new();
        for (a, b) in edges {
            if a >= num_qubits || b >= num_qubits {
                return Err(TranspileError::BadGraph(format!(
                    "edge {a}-{b} references a qubit outside 0..{num_qubits}"
                )));
            }
            if a == b {
                return Err(TranspileError::BadGraph(format!("self-loop on qubit {a}")));
            }
            let e = (a.min(b), a.max(b));
            if !list.contains(&e) {
                list.push(e);
                adjacency[a].push(b);
                adjacency[b].push(a);
            }
        }
        adjacency.iter_mut().for_each(|n| n.sort_unstable());
        let g = CouplingGraph {
            num_qubits,
            edges: list,
            adjacency,
        };
        if (1..num_qubits).any(|q| g.shortest_path(0, q).is_none()) {
            return Err(TranspileError::BadGraph("graph is not connected".into()));
        }
        Ok(g)
    }

    /// `Q0 – Q1 – Q2`.
    pub fn linear3() -> Self {
        Self::new(3, [(0, 1), (1, 2)]).expect("valid built-in")
    }

    /// The 5-qubit T shape: `Q0–Q1, Q1–Q2, Q1–Q3, Q3–Q4`.
    pub fn quito() -> Self {
        Self::new(5, [(0, 1), (1, 2), (1, 3), (3, 4)]).expect("valid built-in")
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "linear3" => Some(Self::linear3()),
            "quito" => Some(Self::quito()),
            _ => None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, TranspileError> {
        serde_json::from_str(text).map_err(|e| TranspileError::BadGraph(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph serializes")
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Edges with the smaller endpoint first.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.num_qubits && self.adjacency[a].binary_search(&b).is_ok()
    }

    /// Breadth-first shortest path, preferring lower-numbered neighbours.
    pub fn shortest_path(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        if from >= self.num_qubits || to >= self.num_qubits {
            return None;
        }
        let mut prev = vec![usize::MAX; self.num_qubits];
        prev[from] = from;
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            if u == to {
                let mut path = vec![to];
                let mut cur = to;
                while cur != from {
                    cur = prev[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for &v in &self.adjacency[u] {
                if prev[v] == usize::MAX {
                    prev[v] = u;
                    queue.push_back(v);
                }
            }
        }
        None
    }

    pub fn distance(&self, a: usize, b: usize) -> Option<usize> {
        self.shortest_path(a, b).map(|p| p.len() - 1)
    }
}

/// Injective map from logical qubit `k` (1-based) to physical qubit
/// `physical[k − 1]` (0-based).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QubitMapping {
    physical: Vec<usize>,
}

impl QubitMapping {
    pub fn new(physical: Vec<usize>, device_qubits: usize) -> Result<Self, TranspileError> {
        for (k, &p) in physical.iter().enumerate() {
            if p >= device_qubits {
                return Err(TranspileError::BadMapping(format!(
                    "logical qubit {} mapped to Q{p}, device has {device_qubits}",
                    k + 1
                )));
            }
            if physical[..k].contains(&p) {
                return Err(TranspileError::BadMapping(format!("Q{p} assigned twice")));
            }
        }
        Ok(QubitMapping { physical })
    }

    pub fn identity(width: usize) -> Self {
        QubitMapping {
            physical: (0..width).collect(),
        }
    }

    /// Physical qubit (0-based) of logical qubit `k` (1-based).
    pub fn physical(&self, logical: usize) -> usize {
        self.physical[logical - 1]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.physical
    }

    pub fn width(&self) -> usize {
        self.physical.len()
    }

    /// Gathers the logical bits (qubit 1 most significant) out of a basis
    /// index over `device_qubits` physical qubits (Q0 most significant).
    pub fn logical_index(&self, physical_index: usize, device_qubits: usize) -> usize {
        self.physical.iter().fold(0, |acc, &p| {
            (acc << 1) | ((physical_index >> (device_qubits - 1 - p)) & 1)
        })
    }

    /// Every injective mapping of `width` logical qubits onto `device_qubits`
    /// physical ones, in lexicographic order.
    pub fn enumerate(width: usize, device_qubits: usize) -> Vec<QubitMapping> {
        fn go(width: usize, n: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<QubitMapping>) {
            if cur.len() == width {
                out.push(QubitMapping { physical: cur.clone() });
                return;
            }
            for p in 0..n {
                if !used[p] {
                    used[p] = true;
                    cur.push(p);
                    go(width, n, cur, used, out);
                    cur.pop();
                    used[p] = false;
                }
            }
        }
        let mut out = Vec::new();
        if width <= device_qubits {
            go(
                width,
                device_qubits,
                &mut Vec::new(),
                &mut vec![false; device_qubits],
                &mut out,
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins() {
        let q = CouplingGraph::quito();
        assert_eq!(q.num_qubits(), 5);
        assert!(q.has_edge(1, 3) && q.has_edge(3, 1));
        assert!(!q.has_edge(0, 2));
        assert_eq!(q.shortest_path(0, 4).unwrap(), vec![0, 1, 3, 4]);
        assert_eq!(q.distance(2, 4), Some(3));
        assert_eq!(CouplingGraph::linear3().distance(0, 2), Some(2));
        assert!(CouplingGraph::by_name("heavyhex").is_none());
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"qubits": 5, "edges": [[0,1],[1,2],[1,3],[3,4]]}"#;
        let g = CouplingGraph::from_json(text).unwrap();
        assert_eq!(g, CouplingGraph::quito());
        assert_eq!(CouplingGraph::from_json(&g.to_json()).unwrap(), g);
    }

    #[test]
    fn invalid_graphs() {
        assert!(CouplingGraph::new(3, [(0, 1)]).is_err());
        assert!(CouplingGraph::new(2, [(0, 2)]).is_err());
        assert!(CouplingGraph::new(2, [(1, 1)]).is_err());
        assert!(CouplingGraph::from_json(r#"{"qubits": 2}"#).is_err());
    }

    #[test]
    fn mappings() {
        assert!(QubitMapping::new(vec![0, 0], 3).is_err());
        assert!(QubitMapping::new(vec![0, 3], 3).is_err());
        let all = QubitMapping::enumerate(4, 5);
        assert_eq!(all.len(), 120);
        assert_eq!(all[0].as_slice(), &[0, 1, 2, 3]);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(QubitMapping::enumerate(3, 3).len(), 6);
        assert!(QubitMapping::enumerate(4, 3).is_empty());
        let m = QubitMapping::new(vec![2, 0], 3).unwrap();
        assert_eq!(m.logical_index(0b001, 3), 0b10);
        assert_eq!(m.logical_index(0b100, 3), 0b01);
    }
}
