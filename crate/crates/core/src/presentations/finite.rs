//! Coset enumeration (HLT strategy) for presentations of finite groups.

use crate::error::{Error, Result};
use crate::word::Word;

/// Multiplication data of a finite group: the regular permutation action
/// on cosets of the trivial subgroup, plus a canonical word per element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct FiniteTable {
    /// `table[c][2g]` is `c·g`, `table[c][2g+1]` is `c·g⁻¹`.
    table: Vec<Vec<usize>>,
    words: Vec<Word>,
}

fn col(g: usize, e: i64) -> usize {
    if e > 0 {
        2 * g
    } else {
        2 * g + 1
    }
}

fn inv(c: usize) -> usize {
    c ^ 1
}

struct Enumerator {
    cols: usize,
    tau: Vec<Vec<Option<usize>>>,
    parent: Vec<usize>,
    limit: usize,
}

impl Enumerator {
    fn rep(&mut self, mut k: usize) -> usize {
        let mut root = k;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[k] != root {
            let next = self.parent[k];
            self.parent[k] = root;
            k = next;
        }
        root
    }

    fn define(&mut self, c: usize, x: usize) -> Result<()> {
        if self.tau.len() >= self.limit {
            return Err(Error::ResourceLimit(format!(
                "coset enumeration exceeded {} cosets",
                self.limit
            )));
        }
        let d = self.tau.len();
        self.tau.push(vec![None; self.cols]);
        self.parent.push(d);
        self.tau[c][x] = Some(d);
        self.tau[d][inv(x)] = Some(c);
        Ok(())
    }

    fn merge(&mut self, k: usize, l: usize, queue: &mut Vec<usize>) {
        let a = self.rep(k);
        let b = self.rep(l);
        if a != b {
            let (lo, hi) = (a.min(b), a.max(b));
            self.parent[hi] = lo;
            queue.push(hi);
        }
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        let mut queue = Vec::new();
        self.merge(a, b, &mut queue);
        let mut i = 0;
        while i < queue.len() {
            let g = queue[i];
            i += 1;
            for x in 0..self.cols {
                if let Some(d) = self.tau[g][x] {
                    self.tau[g][x] = None;
                    if self.tau[d][inv(x)] == Some(g) {
                        self.tau[d][inv(x)] = None;
                    }
                    let m = self.rep(g);
                    let n = self.rep(d);
                    if let Some(t) = self.tau[m][x] {
                        self.merge(n, t, &mut queue);
                    } else if let Some(t) = self.tau[n][inv(x)] {
                        self.merge(m, t, &mut queue);
                    } else {
                        self.tau[m][x] = Some(n);
                        self.tau[n][inv(x)] = Some(m);
                    }
                }
            }
        }
    }

    fn scan_and_fill(&mut self, alpha: usize, rel: &[usize]) -> Result<()> {
        if rel.is_empty() {
            return Ok(());
        }
        let mut f = alpha;
        let mut b = alpha;
        let mut i = 0usize;
        let mut j = rel.len() as isize - 1;
        loop {
            while (i as isize) <= j {
                match self.tau[f][rel[i]] {
                    Some(n) => {
                        f = n;
                        i += 1;
                    }
                    None => break,
                }
            }
            if (i as isize) > j {
                if f != alpha {
                    self.coincidence(f, alpha);
                }
                return Ok(());
            }
            while j >= i as isize {
                match self.tau[b][inv(rel[j as usize])] {
                    Some(n) => {
                        b = n;
                        j -= 1;
                    }
                    None => break,
                }
            }
            if j < i as isize {
                self.coincidence(f, b);
                return Ok(());
            } else if j == i as isize {
                self.tau[f][rel[i]] = Some(b);
                self.tau[b][inv(rel[i])] = Some(f);
                return Ok(());
            } else {
                self.define(f, rel[i])?;
            }
        }
    }
}

impl FiniteTable {
    pub fn enumerate(rank: usize, relators: &[Word], limit: usize) -> Result<FiniteTable> {
        let cols = 2 * rank;
        let rels: Vec<Vec<usize>> = relators
            .iter()
            .map(|r| r.letters().map(|(g, e)| col(g, e)).collect())
            .collect();
        let mut en = Enumerator {
            cols,
            tau: vec![vec![None; cols]],
            parent: vec![0],
            limit,
        };
        let mut alpha = 0;
        while alpha < en.tau.len() {
            for r in &rels {
                if en.parent[alpha] != alpha {
                    break;
                }
                en.scan_and_fill(alpha, r)?;
            }
            if en.parent[alpha] == alpha {
                for x in 0..cols {
                    if en.tau[alpha][x].is_none() {
                        en.define(alpha, x)?;
                    }
                }
            }
            alpha += 1;
        }

        // Renumber live cosets by a breadth-first walk from the identity coset;
        // the first word reaching a coset is its canonical representative.
        let mut order = vec![usize::MAX; en.tau.len()];
        let mut words = vec![Word::identity()];
        let mut live = vec![0usize];
        order[0] = 0;
        let mut head = 0;
        while head < live.len() {
            let c = live[head];
            for g in 0..rank {
                for e in [-1i64, 1] {
                    let raw =
                        en.tau[c][col(g, e)].ok_or_else(|| Error::Invalid("incomplete coset table".to_string()))?;
                    let d = en.rep(raw);
                    if order[d] == usize::MAX {
                        order[d] = live.len();
                        live.push(d);
                        let mut w = words[order[c]].clone();
                        w.push(g, e);
                        words.push(w);
                    }
                }
            }
            head += 1;
        }
        let mut table = vec![vec![0; cols]; live.len()];
        for (new, &old) in live.iter().enumerate() {
            for (x, slot) in table[new].iter_mut().enumerate() {
                *slot = order[en.rep(en.tau[old][x].expect("complete table"))];
            }
        }
        Ok(FiniteTable { table, words })
    }

    pub fn order(&self) -> usize {
        self.words.len()
    }

    pub fn normal_form(&self, w: &Word) -> Word {
        let mut c = 0;
        for (g, e) in w.letters() {
            c = self.table[c][col(g, e)];
        }
        self.words[c].clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_and_klein_four() {
        let t = FiniteTable::enumerate(1, &[Word::power_of(0, 3)], 1000).unwrap();
        assert_eq!(t.order(), 3);
        assert_eq!(t.normal_form(&Word::power_of(0, 4)), Word::gen(0));
        let rels = [
            Word::power_of(0, 2),
            Word::power_of(1, 2),
            Word::from_pairs([(0, 1), (1, 1), (0, 1), (1, 1)]),
        ];
        let t = FiniteTable::enumerate(2, &rels, 1000).unwrap();
        assert_eq!(t.order(), 4);
        let s3 = [
            Word::power_of(0, 2),
            Word::power_of(1, 3),
            Word::from_pairs([(0, 1), (1, 1), (0, 1), (1, 1)]),
        ];
        assert_eq!(FiniteTable::enumerate(2, &s3, 1000).unwrap().order(), 6);
    }

    #[test]
    fn infinite_group_hits_limit() {
        let r = FiniteTable::enumerate(2, &[Word::from_pairs([(0, 1), (1, 1), (0, -1), (1, -1)])], 200);
        assert!(matches!(r, Err(Error::ResourceLimit(_))));
    }
}
