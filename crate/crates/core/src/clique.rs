//! Exact `k`-clique enumeration on small dense graphs.
//!
//! Cliques are reported as strictly increasing vertex lists, in lexicographic
//! order.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    words: usize,
    adj: Vec<u64>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Self { n, words, adj: vec![0; n * words] }
    }

    /// Builds the graph with an edge `{i, j}` wherever `edge(i, j)` holds for
    /// `i < j`.
    pub fn from_fn(n: usize, mut edge: impl FnMut(usize, usize) -> bool) -> Self {
        let mut g = Self::new(n);
        for i in 0..n {
            for j in i + 1..n {
                if edge(i, j) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn add_edge(&mut self, i: usize, j: usize) {
        assert!(i != j && i < self.n && j < self.n);
        self.adj[i * self.words + j / 64] |= 1 << (j % 64);
        self.adj[j * self.words + i / 64] |= 1 << (i % 64);
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adj[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn degree(&self, i: usize) -> usize {
        self.row(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.adj[i * self.words..(i + 1) * self.words]
    }

    /// Calls `visit` on every `k`-clique in lexicographic order. Returning
    /// `false` from `visit` stops the enumeration. Returns whether it ran to
    /// completion.
    pub fn for_each_clique(&self, k: usize, mut visit: impl FnMut(&[usize]) -> bool) -> bool {
        if k == 0 {
            return visit(&[]);
        }
        let mut all = vec![0u64; self.words];
        for v in 0..self.n {
            all[v / 64] |= 1 << (v % 64);
        }
        let mut stack = Vec::with_capacity(k);
        self.extend(&all, k, &mut stack, &mut visit)
    }

    fn extend(&self, cand: &[u64], k: usize, stack: &mut Vec<usize>, visit: &mut impl FnMut(&[usize]) -> bool) -> bool {
        let need = k - stack.len();
        let mut remaining: usize = cand.iter().map(|w| w.count_ones() as usize).sum();
        if remaining < need {
            return true;
        }
        let mut next = vec![0u64; self.words];
        for (wi, &word) in cand.iter().enumerate() {
            let mut w = word;
            while w != 0 {
                if remaining < need {
                    return true;
                }
                let v = wi * 64 + w.trailing_zeros() as usize;
                w &= w - 1;
                remaining -= 1;
                stack.push(v);
                let go_on = if need == 1 {
                    visit(stack)
                } else {
                    // later candidates adjacent to v
                    let row = self.row(v);
                    for (i, slot) in next.iter_mut().enumerate() {
                        *slot = if i < wi {
                            0
                        } else if i == wi {
                            w & row[i]
                        } else {
                            cand[i] & row[i]
                        };
                    }
                    self.extend(&next, k, stack, visit)
                };
                stack.pop();
                if !go_on {
                    return false;
                }
            }
        }
        true
    }

    pub fn cliques(&self, k: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        self.for_each_clique(k, |c| {
            out.push(c.to_vec());
            true
        });
        out
    }

    pub fn count_cliques(&self, k: usize) -> usize {
        let mut count = 0;
        self.for_each_clique(k, |_| {
            count += 1;
            true
        });
        count
    }

    pub fn first_clique(&self, k: usize) -> Option<Vec<usize>> {
        let mut found = None;
        self.for_each_clique(k, |c| {
            found = Some(c.to_vec());
            false
        });
        found
    }
}
