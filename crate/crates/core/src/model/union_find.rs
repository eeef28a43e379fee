/// Union-find without path compression so that every union can be undone.
///
/// Union by size keeps `find` logarithmic; `rollback(t)` restores the state observed
/// when `time()` returned `t`.
#[derive(Clone, Debug)]
pub struct RollbackUnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
    marked: Vec<usize>,
    components: usize,
    marked_components: usize,
    history: Vec<(usize, usize)>,
}

impl RollbackUnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
            marked: vec![0; n],
            components: n,
            marked_components: 0,
            history: Vec::new(),
        }
    }

    /// Like [`new`](Self::new) but tracks how many components contain a marked vertex.
    pub fn with_marks(n: usize, marks: &[bool]) -> Self {
        let mut uf = Self::new(n);
        for (v, &m) in marks.iter().enumerate() {
            if m {
                uf.marked[v] = 1;
                uf.marked_components += 1;
            }
        }
        uf
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn find(&self, mut v: usize) -> usize {
        while self.parent[v] != v {
            v = self.parent[v];
        }
        v
    }

    pub fn same(&self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    pub fn components(&self) -> usize {
        self.components
    }

    /// Components that contain at least one marked vertex.
    pub fn marked_components(&self) -> usize {
        self.marked_components
    }

    /// Components without marked vertices.
    pub fn unmarked_components(&self) -> usize {
        self.components - self.marked_components
    }

    pub fn time(&self) -> usize {
        self.history.len()
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut x, mut y) = (self.find(a), self.find(b));
        if x == y {
            return false;
        }
        if self.size[x] < self.size[y] {
            std::mem::swap(&mut x, &mut y);
        }
        // y hangs below x
        self.history.push((y, self.marked[x]));
        if self.marked[x] > 0 && self.marked[y] > 0 {
            self.marked_components -= 1;
        }
        self.parent[y] = x;
        self.size[x] += self.size[y];
        self.marked[x] += self.marked[y];
        self.components -= 1;
        true
    }

    pub fn rollback(&mut self, t: usize) {
        while self.history.len() > t {
            let (y, old_marked_x) = self.history.pop().unwrap();
            let x = self.parent[y];
            self.parent[y] = y;
            self.size[x] -= self.size[y];
            self.marked[x] = old_marked_x;
            if self.marked[x] > 0 && self.marked[y] > 0 {
                self.marked_components += 1;
            }
            self.components += 1;
        }
    }

    /// Canonical block labels (restricted growth string over `0..len`).
    pub fn labels(&self) -> Vec<usize> {
        let n = self.len();
        let mut root_label = vec![usize::MAX; n];
        let mut next = 0;
        (0..n)
            .map(|v| {
                let r = self.find(v);
                if root_label[r] == usize::MAX {
                    root_label[r] = next;
                    next += 1;
                }
                root_label[r]
            })
            .collect()
    }
}
