//! Brute-force ground truth on explicit finite graphs. Nothing here reads a
//! symbolic set; inputs are plain vertex and edge lists.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// A finite bipartite graph with vertex labels. Edges index into `a` and `b`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExplicitGraph {
    pub a: Vec<u64>,
    pub b: Vec<u64>,
    pub edges: Vec<(usize, usize)>,
    /// Vertices whose neighborhood may extend past the expansion window.
    pub a_boundary: Vec<bool>,
    pub b_boundary: Vec<bool>,
}

/// A vertex of an explicit graph: side and index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Vertex {
    A(usize),
    B(usize),
}

impl ExplicitGraph {
    /// Unlabeled graph with `na + nb` vertices labeled by index.
    pub fn new(na: usize, nb: usize, edges: Vec<(usize, usize)>) -> Self {
        ExplicitGraph {
            a: (0..na as u64).collect(),
            b: (0..nb as u64).collect(),
            edges,
            a_boundary: vec![false; na],
            b_boundary: vec![false; nb],
        }
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.a.len()];
        for &(x, y) in &self.edges {
            adj[x].push(y);
        }
        for row in &mut adj {
            row.sort_unstable();
            row.dedup();
        }
        adj
    }

    /// Index pairs for a matching given by vertex labels.
    pub fn matching_from_labels(&self, pairs: &[(u64, u64)]) -> Result<Vec<(usize, usize)>> {
        let ai: HashMap<u64, usize> = self.a.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let bi: HashMap<u64, usize> = self.b.iter().enumerate().map(|(i, &y)| (y, i)).collect();
        pairs
            .iter()
            .map(|&(x, y)| match (ai.get(&x), bi.get(&y)) {
                (Some(&i), Some(&j)) => Ok((i, j)),
                _ => Err(Error::malformed(format!("matched pair ({x},{y}) is not a pair of graph vertices"))),
            })
            .collect()
    }

    /// Edge-list text: a header `na nb`, then one `a b` index pair per line.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("{} {}\n", self.a.len(), self.b.len());
        for &(x, y) in &self.edges {
            writeln!(s, "{x} {y}").expect("string write");
        }
        s
    }

    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::malformed("empty edge list"))?;
        let nums = |l: &str| -> Result<Vec<usize>> {
            l.split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|e| Error::malformed(format!("{l:?}: {e}"))))
                .collect()
        };
        let h = nums(header)?;
        let [na, nb] = h[..] else {
            return Err(Error::malformed("edge list header must be `na nb`"));
        };
        let mut edges = Vec::new();
        for l in lines {
            let e = nums(l)?;
            match e[..] {
                [x, y] if x < na && y < nb => edges.push((x, y)),
                _ => return Err(Error::malformed(format!("bad edge line {l:?}"))),
            }
        }
        Ok(ExplicitGraph::new(na, nb, edges))
    }
}

/// Maximum matching by Hopcroft–Karp. Returns `(size, pairs)` with pairs sorted.
pub fn max_matching(g: &ExplicitGraph) -> (usize, Vec<(usize, usize)>) {
    const FREE: usize = usize::MAX;
    let adj = g.adjacency();
    let (na, nb) = (g.a.len(), g.b.len());
    let mut mate_a = vec![FREE; na];
    let mut mate_b = vec![FREE; nb];
    let mut dist = vec![0usize; na];
    loop {
        // layered BFS from free A vertices
        let mut queue = VecDeque::new();
        for x in 0..na {
            if mate_a[x] == FREE {
                dist[x] = 0;
                queue.push_back(x);
            } else {
                dist[x] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                let z = mate_b[y];
                if z == FREE {
                    found = true;
                } else if dist[z] == usize::MAX {
                    dist[z] = dist[x] + 1;
                    queue.push_back(z);
                }
            }
        }
        if !found {
            break;
        }
        let mut next = vec![0usize; na];
        fn dfs(
            x: usize,
            adj: &[Vec<usize>],
            mate_a: &mut [usize],
            mate_b: &mut [usize],
            dist: &mut [usize],
            next: &mut [usize],
        ) -> bool {
            while next[x] < adj[x].len() {
                let y = adj[x][next[x]];
                next[x] += 1;
                let z = mate_b[y];
                if z == usize::MAX || (dist[z] == dist[x] + 1 && dfs(z, adj, mate_a, mate_b, dist, next)) {
                    mate_a[x] = y;
                    mate_b[y] = x;
                    return true;
                }
            }
            dist[x] = usize::MAX;
            false
        }
        let mut grew = false;
        for x in 0..na {
            if mate_a[x] == FREE && dfs(x, &adj, &mut mate_a, &mut mate_b, &mut dist, &mut next) {
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
    let pairs: Vec<(usize, usize)> =
        mate_a.iter().enumerate().filter(|(_, &y)| y != FREE).map(|(x, &y)| (x, y)).collect();
    (pairs.len(), pairs)
}

/// Checks that `matching` is a set of disjoint edges of `g`.
pub fn check_matching(g: &ExplicitGraph, matching: &[(usize, usize)]) -> Result<()> {
    let adj = g.adjacency();
    let mut used_a = vec![false; g.a.len()];
    let mut used_b = vec![false; g.b.len()];
    for &(x, y) in matching {
        if x >= g.a.len() || y >= g.b.len() || adj[x].binary_search(&y).is_err() {
            return Err(Error::precondition(format!("({x},{y}) is not an edge")));
        }
        if std::mem::replace(&mut used_a[x], true) || std::mem::replace(&mut used_b[y], true) {
            return Err(Error::precondition(format!("edge ({x},{y}) shares a vertex with another matched edge")));
        }
    }
    Ok(())
}

/// A shortest augmenting path with at most `max_len` edges, starting at a
/// free non-boundary `A` vertex and ending at a free non-boundary `B` vertex.
pub fn aug_path_exists(g: &ExplicitGraph, matching: &[(usize, usize)], max_len: usize) -> Result<Option<Vec<Vertex>>> {
    check_matching(g, matching)?;
    if max_len % 2 == 0 {
        return Err(Error::precondition("augmenting path length bound must be odd"));
    }
    let adj = g.adjacency();
    let mut mate_a = vec![None; g.a.len()];
    let mut mate_b = vec![None; g.b.len()];
    for &(x, y) in matching {
        mate_a[x] = Some(y);
        mate_b[y] = Some(x);
    }
    // BFS over A vertices; parent[x] = (previous A vertex, B vertex between)
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; g.a.len()];
    let mut depth = vec![usize::MAX; g.a.len()];
    let mut queue = VecDeque::new();
    for x in 0..g.a.len() {
        if mate_a[x].is_none() && !g.a_boundary[x] {
            depth[x] = 0;
            queue.push_back(x);
        }
    }
    while let Some(x) = queue.pop_front() {
        let len_to_b = 2 * depth[x] + 1;
        if len_to_b > max_len {
            continue;
        }
        for &y in &adj[x] {
            if mate_a[x] == Some(y) {
                continue;
            }
            match mate_b[y] {
                None if !g.b_boundary[y] => {
                    let mut path = vec![Vertex::B(y), Vertex::A(x)];
                    let mut cur = x;
                    while let Some((prev, via)) = parent[cur] {
                        path.push(Vertex::B(via));
                        path.push(Vertex::A(prev));
                        cur = prev;
                    }
                    path.reverse();
                    return Ok(Some(path));
                }
                None => {}
                Some(z) => {
                    if depth[z] == usize::MAX {
                        depth[z] = depth[x] + 1;
                        parent[z] = Some((x, y));
                        queue.push_back(z);
                    }
                }
            }
        }
    }
    Ok(None)
}

/// True iff each `x ∈ xs` can be sent by one of `isos` into `ys` injectively.
/// Exhaustive; `|xs| ≤ 8` and at most 16 maps.
pub fn brute_embedding(xs: &[u64], ys: &[u64], isos: &[Vec<(u64, u64)>]) -> Result<bool> {
    if xs.len() > 8 {
        return Err(Error::Resource { what: "brute-force source size", value: xs.len() as u64, cap: 8 });
    }
    if isos.len() > 16 {
        return Err(Error::Resource { what: "brute-force map count", value: isos.len() as u64, cap: 16 });
    }
    let tables: Vec<HashMap<u64, u64>> = isos.iter().map(|t| t.iter().copied().collect()).collect();
    let mut xs = xs.to_vec();
    xs.sort_unstable();
    xs.dedup();
    let mut used: Vec<u64> = Vec::new();
    fn go(k: usize, xs: &[u64], ys: &[u64], tables: &[HashMap<u64, u64>], used: &mut Vec<u64>) -> bool {
        if k == xs.len() {
            return true;
        }
        for t in tables {
            if let Some(&y) = t.get(&xs[k]) {
                if ys.contains(&y) && !used.contains(&y) {
                    used.push(y);
                    if go(k + 1, xs, ys, tables, used) {
                        return true;
                    }
                    used.pop();
                }
            }
        }
        false
    }
    Ok(go(0, &xs, ys, &tables, &mut used))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> ExplicitGraph {
        ExplicitGraph::new(n, n, (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).collect())
    }

    #[test]
    fn max_matching_examples() {
        let c4 = ExplicitGraph::new(2, 2, vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
        assert_eq!(max_matching(&c4).0, 2);
        assert_eq!(max_matching(&complete(3)).0, 3);
        // path a0-b0-a1-b1-a2
        let p5 = ExplicitGraph::new(3, 2, vec![(0, 0), (1, 0), (1, 1), (2, 1)]);
        assert_eq!(max_matching(&p5).0, 2);
    }

    #[test]
    fn aug_path_examples() {
        let c4 = ExplicitGraph::new(2, 2, vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
        for l in [1, 3, 5] {
            assert_eq!(aug_path_exists(&c4, &[(0, 0), (1, 1)], l).unwrap(), None);
        }
        let p = aug_path_exists(&c4, &[], 1).unwrap().unwrap();
        assert_eq!(p.len(), 2);
        // path 0–1–2–3 as a0 b0 a1 b1, matching {(b0,a1)}
        let path = ExplicitGraph::new(2, 2, vec![(0, 0), (1, 0), (1, 1)]);
        let p = aug_path_exists(&path, &[(1, 0)], 3).unwrap().unwrap();
        assert_eq!(p, vec![Vertex::A(0), Vertex::B(0), Vertex::A(1), Vertex::B(1)]);
        assert_eq!(aug_path_exists(&path, &[(1, 0)], 1).unwrap(), None);
        assert!(aug_path_exists(&path, &[(0, 1)], 3).is_err());
    }

    #[test]
    fn boundary_vertices_are_not_endpoints() {
        let mut g = ExplicitGraph::new(1, 1, vec![(0, 0)]);
        g.b_boundary[0] = true;
        assert_eq!(aug_path_exists(&g, &[], 1).unwrap(), None);
    }

    #[test]
    fn brute_embedding_examples() {
        let plus1: Vec<(u64, u64)> = (0..10).map(|x| (x, x + 1)).collect();
        assert!(brute_embedding(&[0], &[1], &[plus1.clone()]).unwrap());
        assert!(!brute_embedding(&[0, 1], &[5], &[plus1]).unwrap());
        let plus2: Vec<(u64, u64)> = (0..10).map(|x| (x, x + 2)).collect();
        let id: Vec<(u64, u64)> = (0..10).map(|x| (x, x)).collect();
        assert!(!brute_embedding(&[0], &[1], &[plus2, id]).unwrap());
        assert!(brute_embedding(&[0; 9], &[], &[]).is_err());
    }

    #[test]
    fn edge_list_round_trip() {
        let g = ExplicitGraph::new(2, 3, vec![(0, 1), (1, 2)]);
        let text = g.to_edge_list();
        assert_eq!(text, "2 3\n0 1\n1 2\n");
        assert_eq!(ExplicitGraph::from_edge_list(&text).unwrap(), g);
        assert!(ExplicitGraph::from_edge_list("1 1\n0 5\n").is_err());
    }
}
