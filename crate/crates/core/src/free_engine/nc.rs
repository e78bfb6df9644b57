use super::{EngineConfig, EngineError};

/// A non-crossing partition of `{1, …, n}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NcPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl NcPartition {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Blocks as sorted 1-based point lists, ordered by smallest element.
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// True when no `a < b < c < d` has `a, c` and `b, d` in two different
    /// blocks.
    pub fn is_noncrossing(&self) -> bool {
        let mut label = vec![usize::MAX; self.n + 1];
        for (i, block) in self.blocks.iter().enumerate() {
            for &p in block {
                label[p] = i;
            }
        }
        for a in 1..=self.n {
            for b in a + 1..=self.n {
                for c in b + 1..=self.n {
                    for d in c + 1..=self.n {
                        if label[a] == label[c] && label[b] == label[d] && label[a] != label[b] {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

/// Calls `visit` with the blocks (0-based points) of every non-crossing
/// partition of `n` points.
///
/// Points are placed left to right. Open blocks form a stack; a point may
/// start a new block or join any open block, which closes every block opened
/// after it. Each partition arises from exactly one sequence of choices.
pub fn for_each_nc<F: FnMut(&[Vec<usize>])>(n: usize, mut visit: F) {
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut open: Vec<usize> = Vec::new();
    place(0, n, &mut blocks, &mut open, &mut visit);
}

fn place<F: FnMut(&[Vec<usize>])>(
    point: usize,
    n: usize,
    blocks: &mut Vec<Vec<usize>>,
    open: &mut Vec<usize>,
    visit: &mut F,
) {
    if point == n {
        visit(blocks);
        return;
    }
    blocks.push(vec![point]);
    open.push(blocks.len() - 1);
    place(point + 1, n, blocks, open, visit);
    open.pop();
    blocks.pop();

    for depth in (0..open.len()).rev() {
        let b = open[depth];
        let closed: Vec<usize> = open.drain(depth + 1..).collect();
        blocks[b].push(point);
        place(point + 1, n, blocks, open, visit);
        blocks[b].pop();
        open.extend(closed);
    }
}

/// All non-crossing partitions of `{1, …, n}`; there are Catalan(n) of them.
pub fn enumerate_nc(n: usize, config: &EngineConfig) -> Result<Vec<NcPartition>, EngineError> {
    if n > config.max_partition_points {
        return Err(EngineError::NTooLarge {
            n,
            cap: config.max_partition_points,
        });
    }
    let mut out = Vec::new();
    for_each_nc(n, |blocks| {
        out.push(NcPartition {
            n,
            blocks: blocks
                .iter()
                .map(|b| b.iter().map(|p| p + 1).collect())
                .collect(),
        });
    });
    Ok(out)
}
