//! Dense bit-packed matrices over the two-element field, used only for ranks.

pub(crate) struct BitMatrix {
    words_per_row: usize,
    rows: Vec<Vec<u64>>,
}

impl BitMatrix {
    pub(crate) fn zeros(n_rows: usize, n_cols: usize) -> Self {
        let words_per_row = n_cols.div_ceil(64);
        Self {
            words_per_row,
            rows: vec![vec![0; words_per_row]; n_rows],
        }
    }

    pub(crate) fn set(&mut self, row: usize, col: usize) {
        self.rows[row][col / 64] |= 1 << (col % 64);
    }

    fn get(&self, row: usize, col: usize) -> bool {
        self.rows[row][col / 64] >> (col % 64) & 1 == 1
    }

    /// Rank by Gaussian elimination; consumes the matrix.
    pub(crate) fn rank(mut self) -> usize {
        let n_rows = self.rows.len();
        let n_cols = self.words_per_row * 64;
        let mut rank = 0;
        for col in 0..n_cols {
            if rank == n_rows {
                break;
            }
            let Some(pivot) = (rank..n_rows).find(|&r| self.get(r, col)) else {
                continue;
            };
            self.rows.swap(rank, pivot);
            let pivot_row = self.rows[rank].clone();
            for r in 0..n_rows {
                if r != rank && self.get(r, col) {
                    for (w, p) in self.rows[r].iter_mut().zip(&pivot_row) {
                        *w ^= p;
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}
