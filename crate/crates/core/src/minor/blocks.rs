use crate::graph::{Graph, Vertex};

/// Biconnected blocks with at least one edge, each sorted; blocks ordered
/// lexicographically. Iterative Hopcroft–Tarjan.
pub fn biconnected_blocks(g: &Graph) -> Vec<Vec<Vertex>> {
    let n = g.n();
    let adj: Vec<Vec<Vertex>> = (0..n).map(|v| g.neighbors(v).ones().collect()).collect();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut timer = 0;
    let mut edge_stack: Vec<(Vertex, Vertex)> = Vec::new();
    let mut blocks = Vec::new();

    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        // (vertex, parent, next neighbor index)
        let mut stack: Vec<(Vertex, Vertex, usize)> = vec![(root, usize::MAX, 0)];
        while let Some(&mut (v, parent, ref mut idx)) = stack.last_mut() {
            if *idx < adj[v].len() {
                let w = adj[v][*idx];
                *idx += 1;
                if disc[w] == usize::MAX {
                    edge_stack.push((v, w));
                    disc[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    stack.push((w, v, 0));
                } else if w != parent && disc[w] < disc[v] {
                    edge_stack.push((v, w));
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&(p, _, _)) = stack.last() {
                    low[p] = low[p].min(low[v]);
                    if low[v] >= disc[p] {
                        let mut block = Vec::new();
                        while let Some((a, b)) = edge_stack.pop() {
                            block.push(a);
                            block.push(b);
                            if (a, b) == (p, v) {
                                break;
                            }
                        }
                        block.sort_unstable();
                        block.dedup();
                        blocks.push(block);
                    }
                }
            }
        }
    }
    blocks.sort();
    blocks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_triangles_sharing_a_vertex() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)]).unwrap();
        assert_eq!(biconnected_blocks(&g), vec![vec![0, 1, 2], vec![2, 3, 4]]);
    }

    #[test]
    fn path_blocks_are_edges() {
        assert_eq!(biconnected_blocks(&Graph::path(3)), vec![vec![0, 1], vec![1, 2]]);
    }

    #[test]
    fn petersen_is_one_block() {
        assert_eq!(biconnected_blocks(&Graph::petersen()), vec![(0..10).collect::<Vec<_>>()]);
    }
}
