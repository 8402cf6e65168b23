//! Containers for the set of currently unsatisfied clauses.
//!
//! [`SlottedUnsatBuffer`] keeps clauses in insertion order and leaves holes on
//! removal; it backs second-best breadth-first selection. [`DenseUnsatBuffer`]
//! is the classic array + position index with swap-removal, used by the
//! pseudo breadth-first and uniform random strategies.

use rand::Rng;

/// Marks a slot with no clause in it.
pub const EMPTY: u32 = u32::MAX;
/// Position of a clause that is not in the buffer.
pub const ABSENT: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub struct SlottedUnsatBuffer {
    slots: Vec<u32>,
    pos: Vec<u32>,
    head: usize,
    live: usize,
    max_tail: usize,
    defrags: u64,
}

impl SlottedUnsatBuffer {
    /// `max_tail` is the logical length that triggers defragmentation.
    pub fn new(num_clauses: usize, max_tail: usize) -> Self {
        SlottedUnsatBuffer {
            slots: Vec::new(),
            pos: vec![ABSENT; num_clauses],
            head: 0,
            live: 0,
            max_tail: max_tail.max(1),
            defrags: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.live
    }

    pub fn is_empty(&self) -> bool {
        self.live == 0
    }

    /// One past the last used slot.
    pub fn tail(&self) -> usize {
        self.slots.len()
    }

    pub fn head(&self) -> usize {
        self.head
    }

    pub fn max_tail(&self) -> usize {
        self.max_tail
    }

    pub fn defrag_count(&self) -> u64 {
        self.defrags
    }

    pub fn contains(&self, clause: usize) -> bool {
        self.pos[clause] != ABSENT
    }

    pub fn slots(&self) -> &[u32] {
        &self.slots
    }

    pub fn insert(&mut self, clause: usize) {
        debug_assert_eq!(self.pos[clause], ABSENT);
        self.pos[clause] = self.slots.len() as u32;
        self.slots.push(clause as u32);
        self.live += 1;
    }

    pub fn remove(&mut self, clause: usize) {
        let p = self.pos[clause];
        debug_assert_ne!(p, ABSENT);
        self.slots[p as usize] = EMPTY;
        self.pos[clause] = ABSENT;
        self.live -= 1;
    }

    fn skip_empty_from(&self, mut index: usize) -> usize {
        while self.slots[index] == EMPTY {
            index += 1;
        }
        index
    }

    /// Returns the second live clause and rotates the first one to the back.
    ///
    /// With a single live clause that clause is returned and nothing moves.
    /// Returns `None` when the buffer is empty.
    pub fn pick(&mut self) -> Option<usize> {
        if self.live == 0 {
            return None;
        }
        self.head = self.skip_empty_from(self.head);
        let first = self.slots[self.head];
        if self.live == 1 {
            return Some(first as usize);
        }
        let second_at = self.skip_empty_from(self.head + 1);
        let second = self.slots[second_at];

        self.slots[self.head] = EMPTY;
        self.pos[first as usize] = self.slots.len() as u32;
        self.slots.push(first);
        self.head = second_at;

        if self.slots.len() > self.max_tail {
            self.defragment();
        }
        Some(second as usize)
    }

    /// Compacts live clauses to the front, keeping their order.
    pub fn defragment(&mut self) {
        self.slots.retain(|&c| c != EMPTY);
        for (i, &c) in self.slots.iter().enumerate() {
            self.pos[c as usize] = i as u32;
        }
        self.head = 0;
        self.defrags += 1;
    }

    /// Live clauses in queue order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.slots[self.head..]
            .iter()
            .filter(|&&c| c != EMPTY)
            .map(|&c| c as usize)
    }

    /// Checks every structural invariant; used by tests.
    pub fn check_invariants(&self) -> Result<(), String> {
        if self.head > self.slots.len() {
            return Err(format!("head {} past tail {}", self.head, self.slots.len()));
        }
        if self.slots[..self.head].iter().any(|&c| c != EMPTY) {
            return Err("live clause before head".into());
        }
        let mut live = 0;
        for (i, &c) in self.slots.iter().enumerate() {
            if c == EMPTY {
                continue;
            }
            live += 1;
            if self.pos[c as usize] != i as u32 {
                return Err(format!("pos[{c}] = {} but clause sits in slot {i}", self.pos[c as usize]));
            }
        }
        if live != self.live {
            return Err(format!("live counter {} but {live} occupied slots", self.live));
        }
        let tracked = self.pos.iter().filter(|&&p| p != ABSENT).count();
        if tracked != self.live {
            return Err(format!("{tracked} clauses have a position but {} are live", self.live));
        }
        Ok(())
    }

    /// Text dump of the slot array, `.` for empty slots.
    pub fn dump(&self) -> String {
        let cells: Vec<String> = self
            .slots
            .iter()
            .map(|&c| if c == EMPTY { ".".to_string() } else { c.to_string() })
            .collect();
        format!("head={} tail={} live={} [{}]", self.head, self.slots.len(), self.live, cells.join(" "))
    }
}

#[derive(Clone, Debug)]
pub struct DenseUnsatBuffer {
    arr: Vec<u32>,
    pos: Vec<u32>,
    steps: u64,
}

impl DenseUnsatBuffer {
    pub fn new(num_clauses: usize) -> Self {
        DenseUnsatBuffer {
            arr: Vec::new(),
            pos: vec![ABSENT; num_clauses],
            steps: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.arr.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arr.is_empty()
    }

    pub fn contains(&self, clause: usize) -> bool {
        self.pos[clause] != ABSENT
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.arr
    }

    pub fn insert(&mut self, clause: usize) {
        debug_assert_eq!(self.pos[clause], ABSENT);
        self.pos[clause] = self.arr.len() as u32;
        self.arr.push(clause as u32);
    }

    pub fn remove(&mut self, clause: usize) {
        let p = self.pos[clause] as usize;
        debug_assert_ne!(p as u32, ABSENT);
        let last = *self.arr.last().expect("remove from empty buffer");
        self.arr.swap_remove(p);
        if last as usize != clause {
            self.pos[last as usize] = p as u32;
        }
        self.pos[clause] = ABSENT;
    }

    /// Pseudo breadth-first: element `s mod len` where `s` counts calls.
    pub fn pick_pbfs(&mut self) -> Option<usize> {
        if self.arr.is_empty() {
            return None;
        }
        let c = self.arr[(self.steps % self.arr.len() as u64) as usize];
        self.steps += 1;
        Some(c as usize)
    }

    pub fn pick_random<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<usize> {
        if self.arr.is_empty() {
            return None;
        }
        Some(self.arr[rng.gen_range(0..self.arr.len())] as usize)
    }

    pub fn check_invariants(&self) -> Result<(), String> {
        for (i, &c) in self.arr.iter().enumerate() {
            if self.pos[c as usize] != i as u32 {
                return Err(format!("pos[{c}] = {} but clause sits at {i}", self.pos[c as usize]));
            }
        }
        let tracked = self.pos.iter().filter(|&&p| p != ABSENT).count();
        if tracked != self.arr.len() {
            return Err(format!("{tracked} clauses have a position but {} are stored", self.arr.len()));
        }
        Ok(())
    }
}
