//! Binary min-heap addressable by a dense integer id, holding at most one
//! entry per id.

const ABSENT: usize = usize::MAX;

#[derive(Debug, Clone)]
pub struct AddressableHeap<K> {
    entries: Vec<(K, usize)>,
    pos: Vec<usize>,
}

impl<K: Ord> Default for AddressableHeap<K> {
    fn default() -> Self {
        Self::new()
    }
}

impl<K: Ord> AddressableHeap<K> {
    pub fn new() -> Self {
        AddressableHeap { entries: Vec::new(), pos: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, id: usize) -> bool {
        self.pos.get(id).is_some_and(|&p| p != ABSENT)
    }

    pub fn key(&self, id: usize) -> Option<&K> {
        match self.pos.get(id) {
            Some(&p) if p != ABSENT => Some(&self.entries[p].0),
            _ => None,
        }
    }

    pub fn peek(&self) -> Option<(usize, &K)> {
        self.entries.first().map(|(k, id)| (*id, k))
    }

    /// Inserts `id`, which must not already be present.
    pub fn push(&mut self, id: usize, key: K) {
        if id >= self.pos.len() {
            self.pos.resize(id + 1, ABSENT);
        }
        assert_eq!(self.pos[id], ABSENT, "id {id} already queued");
        let at = self.entries.len();
        self.entries.push((key, id));
        self.pos[id] = at;
        self.sift_up(at);
    }

    /// Replaces the key of a queued `id` with a no-greater one.
    pub fn decrease_key(&mut self, id: usize, key: K) {
        let at = self.pos[id];
        assert_ne!(at, ABSENT, "id {id} not queued");
        debug_assert!(key <= self.entries[at].0);
        self.entries[at].0 = key;
        self.sift_up(at);
    }

    pub fn pop(&mut self) -> Option<(usize, K)> {
        if self.entries.is_empty() {
            return None;
        }
        let last = self.entries.len() - 1;
        self.swap(0, last);
        let (key, id) = self.entries.pop().expect("nonempty");
        self.pos[id] = ABSENT;
        if !self.entries.is_empty() {
            self.sift_down(0);
        }
        Some((id, key))
    }

    /// Heap order holds and the position index matches the entries exactly.
    pub fn is_consistent(&self) -> bool {
        let ordered = (1..self.entries.len()).all(|i| self.entries[(i - 1) / 2].0 <= self.entries[i].0);
        let indexed = self.entries.iter().enumerate().all(|(i, (_, id))| self.pos[*id] == i);
        let queued = self.pos.iter().filter(|&&p| p != ABSENT).count();
        ordered && indexed && queued == self.entries.len()
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.entries.swap(a, b);
        self.pos[self.entries[a].1] = a;
        self.pos[self.entries[b].1] = b;
    }

    fn sift_up(&mut self, mut i: usize) {
        while i > 0 {
            let parent = (i - 1) / 2;
            if self.entries[i].0 < self.entries[parent].0 {
                self.swap(i, parent);
                i = parent;
            } else {
                break;
            }
        }
    }

    fn sift_down(&mut self, mut i: usize) {
        let len = self.entries.len();
        loop {
            let (l, r) = (2 * i + 1, 2 * i + 2);
            let mut best = i;
            if l < len && self.entries[l].0 < self.entries[best].0 {
                best = l;
            }
            if r < len && self.entries[r].0 < self.entries[best].0 {
                best = r;
            }
            if best == i {
                break;
            }
            self.swap(i, best);
            i = best;
        }
    }
}
