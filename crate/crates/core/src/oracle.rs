//! Exhaustive branch-and-bound search for `c_Z(n, d)`, the largest contact
//! number of `n` unit-diameter balls centred in `Z^d`.
//!
//! Connected animals are enumerated once each with Redelmeier's method: the
//! lexicographically least cell is the origin, and a cell enters the untried
//! set at most once along any branch. The search tree is split at a fixed depth
//! into independent tasks; each task runs sequentially with its own incumbent,
//! and the task results are reduced by (contacts, smallest witness), so the
//! answer does not depend on the thread schedule.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::thm1_bound;
use crate::error::{Error, Result};
use crate::lattice::{adjacency_count, quasicube, LatticeShape};

/// Bumped whenever cached witnesses could change meaning.
pub const CACHE_VERSION: u32 = 1;

/// Largest `n` searched without `allow_large`, indexed by dimension.
pub fn desk_limit(d: usize) -> Option<usize> {
    match d {
        2 => Some(14),
        3 => Some(9),
        _ => None,
    }
}

#[derive(Debug, Clone)]
pub struct OracleOptions {
    pub connected_only: bool,
    pub prune: bool,
    pub allow_large: bool,
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            connected_only: true,
            prune: true,
            allow_large: false,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult {
    /// Always `"c_Z"`: the search covers lattice packings only.
    pub quantity: &'static str,
    pub n: usize,
    pub d: usize,
    pub max_contacts: usize,
    pub witness: LatticeShape,
    pub shapes_explored: u64,
    pub pruned: u64,
}

impl SearchResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("search result serializes")
    }
}

/// Maximum contact number over `n`-cell subsets of `Z^d`.
pub fn max_contacts_lattice(n: usize, d: usize, opts: &OracleOptions) -> Result<SearchResult> {
    if n == 0 || d < 2 {
        return Err(Error::Domain(format!("oracle needs n >= 1 and d >= 2 (n = {n}, d = {d})")));
    }
    if !opts.allow_large && desk_limit(d).is_none_or(|limit| n > limit) {
        return Err(Error::Limit { n, d });
    }
    let run = || {
        if opts.connected_only {
            search_connected(n, d, opts.prune)
        } else {
            search_any(n, d, opts.prune)
        }
    };
    match opts.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Domain(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    }
}

/// Allows disconnected shapes. Contacts add up over components, so the best
/// shape combines the best connected animals over a partition of `n`.
fn search_any(n: usize, d: usize, prune: bool) -> Result<SearchResult> {
    let parts: Vec<SearchResult> = (1..=n)
        .map(|m| search_connected(m, d, prune))
        .collect::<Result<_>>()?;
    // best[m] = (contacts, part sizes) over partitions of m
    let mut best: Vec<(usize, Vec<usize>)> = vec![(0, vec![])];
    for m in 1..=n {
        let mut choice: Option<(usize, Vec<usize>)> = None;
        for first in (1..=m).rev() {
            let (rest, sizes) = &best[m - first];
            let total = parts[first - 1].max_contacts + rest;
            if choice.as_ref().is_none_or(|c| total > c.0) {
                let mut s = vec![first];
                s.extend(sizes);
                choice = Some((total, s));
            }
        }
        best.push(choice.expect("m >= 1 has a partition"));
    }
    let (max_contacts, sizes) = best[n].clone();
    let mut cells = Vec::new();
    let mut shift = 0i64;
    for size in sizes {
        let w = &parts[size - 1].witness;
        let extent = w.cells().iter().map(|c| c[0]).max().unwrap_or(0);
        cells.extend(w.cells().iter().map(|c| {
            let mut c = c.clone();
            c[0] += shift;
            c
        }));
        shift += extent + 2;
    }
    let witness = LatticeShape::new(d, cells)?.canonical();
    Ok(SearchResult {
        quantity: "c_Z",
        n,
        d,
        max_contacts,
        witness,
        shapes_explored: parts.iter().map(|p| p.shapes_explored).sum(),
        pruned: parts.iter().map(|p| p.pruned).sum(),
    })
}

/// Padded grid holding every cell an `n`-cell animal rooted at the origin can
/// reach, plus one layer of neighbours.
struct Grid {
    d: usize,
    lo: Vec<i64>,
    size: Vec<usize>,
    stride: Vec<usize>,
    /// `±stride` per axis.
    steps: Vec<isize>,
    /// Cell is lexicographically ≥ the origin and may join the animal.
    allowed: Vec<bool>,
    origin: usize,
}

impl Grid {
    fn new(n: usize, d: usize) -> Self {
        let n = n as i64;
        let lo: Vec<i64> = (0..d).map(|a| if a == 0 { -1 } else { -n }).collect();
        let size: Vec<usize> = (0..d)
            .map(|a| if a == 0 { (n + 2) as usize } else { (2 * n + 1) as usize })
            .collect();
        let mut stride = vec![1usize; d];
        for a in (0..d.saturating_sub(1)).rev() {
            stride[a] = stride[a + 1] * size[a + 1];
        }
        let total: usize = size.iter().product();
        let mut grid = Grid {
            d,
            lo,
            size,
            stride: stride.clone(),
            steps: stride.iter().flat_map(|&s| [s as isize, -(s as isize)]).collect(),
            allowed: vec![false; total],
            origin: 0,
        };
        grid.origin = grid.index(&vec![0; d]);
        for idx in 0..total {
            let c = grid.coords(idx);
            let interior = (0..d).all(|a| {
                let off = c[a] - grid.lo[a];
                off > 0 && (off as usize) + 1 < grid.size[a]
            });
            let lex_nonneg = c.iter().find(|&&x| x != 0).is_none_or(|&x| x > 0);
            grid.allowed[idx] = interior && lex_nonneg;
        }
        grid
    }

    fn index(&self, c: &[i64]) -> usize {
        (0..self.d)
            .map(|a| (c[a] - self.lo[a]) as usize * self.stride[a])
            .sum()
    }

    fn coords(&self, mut idx: usize) -> Vec<i64> {
        let mut c = vec![0; self.d];
        for a in 0..self.d {
            c[a] = (idx / self.stride[a]) as i64 + self.lo[a];
            idx %= self.stride[a];
        }
        c
    }
}

#[derive(Clone)]
struct Task {
    occupied: Vec<bool>,
    marked: Vec<bool>,
    cells: Vec<usize>,
    contacts: usize,
    untried: Vec<usize>,
}

struct Outcome {
    best: usize,
    witness: Option<Vec<usize>>,
    explored: u64,
    pruned: u64,
}

struct Search<'g> {
    grid: &'g Grid,
    n: usize,
    prune: bool,
    cap: usize,
    /// `thm1[r]` bounds the contacts among any `r` cells.
    thm1: Vec<usize>,
    occupied: Vec<bool>,
    marked: Vec<bool>,
    cells: Vec<usize>,
    contacts: usize,
    best: usize,
    witness: Option<Vec<usize>>,
    explored: u64,
    pruned: u64,
    /// When set, partial animals of this size are emitted as tasks.
    split_at: Option<usize>,
    tasks: Vec<Task>,
}

impl Search<'_> {
    /// Admissible bound on the final contacts of any completion of the
    /// current animal.
    fn upper_bound(&self) -> usize {
        let m = self.cells.len();
        let c = self.contacts;
        let r = self.n - m;
        if r == 0 {
            return c;
        }
        let two_d = 2 * self.grid.d;
        // each new cell touches at most min(2d, cells already present)
        let per_cell: usize = (0..r).map(|i| two_d.min(m + i)).sum();
        // contacts among the new cells, plus at most one per exposed facet
        let exposed = two_d * m - 2 * c;
        let by_surface = self.thm1[r] + exposed.min(two_d * r);
        (c + per_cell.min(by_surface)).min(self.cap)
    }

    fn place(&mut self, cell: usize) -> usize {
        let gained = self
            .grid
            .steps
            .iter()
            .filter(|&&s| self.occupied[(cell as isize + s) as usize])
            .count();
        self.occupied[cell] = true;
        self.cells.push(cell);
        self.contacts += gained;
        gained
    }

    fn unplace(&mut self, cell: usize, gained: usize) {
        self.occupied[cell] = false;
        self.cells.pop();
        self.contacts -= gained;
    }

    fn run(&mut self, mut untried: Vec<usize>) {
        while let Some(cell) = untried.pop() {
            if self.prune && self.best >= self.cap {
                return;
            }
            let gained = self.place(cell);
            self.explored += 1;
            if self.cells.len() == self.n {
                if self.witness.is_none() || self.contacts > self.best {
                    self.best = self.contacts;
                    self.witness = Some(self.cells.clone());
                }
            } else if self.prune && self.upper_bound() <= self.best && self.witness.is_some() {
                self.pruned += 1;
            } else {
                let mut next = untried.clone();
                let start = next.len();
                for &s in &self.grid.steps {
                    let nb = (cell as isize + s) as usize;
                    if self.grid.allowed[nb] && !self.marked[nb] {
                        self.marked[nb] = true;
                        next.push(nb);
                    }
                }
                if Some(self.cells.len()) == self.split_at {
                    self.tasks.push(Task {
                        occupied: self.occupied.clone(),
                        marked: self.marked.clone(),
                        cells: self.cells.clone(),
                        contacts: self.contacts,
                        untried: next.clone(),
                    });
                } else {
                    self.run(next.clone());
                }
                for &nb in &next[start..] {
                    self.marked[nb] = false;
                }
            }
            self.unplace(cell, gained);
        }
    }
}

fn search_connected(n: usize, d: usize, prune: bool) -> Result<SearchResult> {
    let grid = Grid::new(n, d);
    let thm1: Vec<usize> = (0..=n)
        .map(|r| if r < 2 { Ok(0) } else { thm1_bound(r as i64, d as u32).map(|v| v as usize) })
        .collect::<Result<_>>()?;
    let cap = if prune { thm1[n] } else { usize::MAX };

    // Pruned runs start from the quasi-cube, so only strictly better shapes
    // are recorded; unpruned runs start empty and see every animal.
    let seed: Option<(usize, Vec<Vec<i64>>)> = prune.then(|| {
        let q = quasicube(n, d).expect("valid n, d").canonical();
        (adjacency_count(&q), q.cells().to_vec())
    });
    let seeded_best = seed.as_ref().map_or(0, |s| s.0);

    let total = grid.allowed.len();
    let fresh = |split_at: Option<usize>| Search {
        grid: &grid,
        n,
        prune,
        cap,
        thm1: thm1.clone(),
        occupied: vec![false; total],
        marked: vec![false; total],
        cells: Vec::with_capacity(n),
        contacts: 0,
        best: seeded_best,
        witness: None,
        explored: 0,
        pruned: 0,
        split_at,
        tasks: Vec::new(),
    };

    let mut root = fresh(Some(4.min(n.saturating_sub(1)).max(1)));
    // the seeded incumbent counts as a witness for pruning purposes
    let seeded_marker = seed.as_ref().map(|_| Vec::new());
    root.witness = seeded_marker.clone();
    root.marked[grid.origin] = true;
    root.run(vec![grid.origin]);

    let tasks = std::mem::take(&mut root.tasks);
    let outcomes: Vec<Outcome> = tasks
        .into_par_iter()
        .map(|task| {
            let mut s = fresh(None);
            s.witness = seeded_marker.clone();
            s.occupied = task.occupied;
            s.marked = task.marked;
            s.cells = task.cells;
            s.contacts = task.contacts;
            s.run(task.untried);
            Outcome {
                best: s.best,
                witness: s.witness,
                explored: s.explored,
                pruned: s.pruned,
            }
        })
        .collect();

    let mut explored = root.explored;
    let mut pruned = root.pruned;
    let mut best: Option<(usize, Vec<Vec<i64>>)> = None;
    let mut consider = |contacts: usize, cells: Vec<Vec<i64>>| {
        let better = match &best {
            None => true,
            Some((b, w)) => contacts > *b || (contacts == *b && cells < *w),
        };
        if better {
            best = Some((contacts, cells));
        }
    };
    let to_cells = |idx: &[usize]| -> Vec<Vec<i64>> {
        let mut c: Vec<Vec<i64>> = idx.iter().map(|&i| grid.coords(i)).collect();
        c.sort();
        c
    };
    if let Some(w) = root.witness.as_ref().filter(|w| !w.is_empty()) {
        consider(root.best, to_cells(w));
    }
    for o in outcomes {
        explored += o.explored;
        pruned += o.pruned;
        if let Some(w) = o.witness.as_ref().filter(|w| !w.is_empty()) {
            consider(o.best, to_cells(w));
        }
    }
    if let Some((contacts, cells)) = seed {
        if best.as_ref().is_none_or(|(b, _)| contacts >= *b) {
            best = Some((contacts, cells));
        }
    }
    let (max_contacts, cells) = best.expect("at least one animal exists");
    let witness = LatticeShape::new(d, cells)?.canonical();
    debug_assert_eq!(adjacency_count(&witness), max_contacts);
    Ok(SearchResult {
        quantity: "c_Z",
        n,
        d,
        max_contacts,
        witness,
        shapes_explored: explored,
        pruned,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormulaRow {
    pub n: usize,
    pub oracle: usize,
    pub formula: i64,
    pub equal: bool,
}

/// Oracle against `⌊2n − 2√n⌋` for `2 ≤ n ≤ n_max`.
pub fn verify_formula_2d(n_max: usize) -> Result<Vec<FormulaRow>> {
    if n_max > 14 {
        return Err(Error::Limit { n: n_max, d: 2 });
    }
    (2..=n_max)
        .map(|n| {
            let oracle = max_contacts_lattice(n, 2, &OracleOptions::default())?.max_contacts;
            let formula = crate::bounds::harborth_ts(n as i64)?;
            Ok(FormulaRow {
                n,
                oracle,
                formula,
                equal: oracle as i64 == formula,
            })
        })
        .collect()
}

pub fn cache_path(dir: &Path, n: usize, d: usize) -> PathBuf {
    dir.join(format!("cz_n{n}_d{d}_v{CACHE_VERSION}.txt"))
}

/// Cached witness for `(n, d)`, re-counted on load. Files that do not parse
/// or have the wrong size are ignored.
pub fn load_cached(dir: &Path, n: usize, d: usize) -> Option<SearchResult> {
    let text = std::fs::read_to_string(cache_path(dir, n, d)).ok()?;
    let witness = LatticeShape::from_text(d, &text).ok()?;
    if witness.len() != n {
        return None;
    }
    let witness = witness.canonical();
    Some(SearchResult {
        quantity: "c_Z",
        n,
        d,
        max_contacts: adjacency_count(&witness),
        witness,
        shapes_explored: 0,
        pruned: 0,
    })
}

pub fn store_cached(dir: &Path, result: &SearchResult) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(cache_path(dir, result.n, result.d), result.witness.to_text())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::block;

    fn run(n: usize, d: usize, prune: bool) -> SearchResult {
        max_contacts_lattice(
            n,
            d,
            &OracleOptions {
                prune,
                ..Default::default()
            },
        )
        .unwrap()
    }

    /// Fixed polyomino / polycube counts: with pruning off every animal is a leaf.
    #[test]
    fn unpruned_enumeration_counts_fixed_animals() {
        let leaves = |n: usize, d: usize| {
            let grid = Grid::new(n, d);
            let total = grid.allowed.len();
            let mut s = Search {
                grid: &grid,
                n,
                prune: false,
                cap: usize::MAX,
                thm1: vec![0; n + 1],
                occupied: vec![false; total],
                marked: vec![false; total],
                cells: vec![],
                contacts: 0,
                best: 0,
                witness: None,
                explored: 0,
                pruned: 0,
                split_at: None,
                tasks: vec![],
            };
            s.marked[grid.origin] = true;
            // count leaves by running with n and tallying explored at size n
            let mut count = 0u64;
            fn walk(s: &mut Search, untried: Vec<usize>, count: &mut u64) {
                let mut untried = untried;
                while let Some(cell) = untried.pop() {
                    let g = s.place(cell);
                    if s.cells.len() == s.n {
                        *count += 1;
                    } else {
                        let mut next = untried.clone();
                        let start = next.len();
                        for &st in &s.grid.steps.clone() {
                            let nb = (cell as isize + st) as usize;
                            if s.grid.allowed[nb] && !s.marked[nb] {
                                s.marked[nb] = true;
                                next.push(nb);
                            }
                        }
                        walk(s, next.clone(), count);
                        for &nb in &next[start..] {
                            s.marked[nb] = false;
                        }
                    }
                    s.unplace(cell, g);
                }
            }
            walk(&mut s, vec![grid.origin], &mut count);
            count
        };
        // OEIS A001168 and A001931
        let planar = [1, 2, 6, 19, 63, 216, 760, 2725];
        for (i, &want) in planar.iter().enumerate() {
            assert_eq!(leaves(i + 1, 2), want, "n = {}", i + 1);
        }
        let spatial = [1, 3, 15, 86, 534, 3481];
        for (i, &want) in spatial.iter().enumerate() {
            assert_eq!(leaves(i + 1, 3), want, "n = {}", i + 1);
        }
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(run(5, 2, true).max_contacts, 5);
        let r = run(5, 3, true);
        assert_eq!(r.max_contacts, 5);
        assert_eq!(adjacency_count(&r.witness), 5);
        let r = run(8, 3, true);
        assert_eq!(r.max_contacts, 12);
        assert_eq!(r.witness, block(&[2, 2, 2]));
        assert_eq!(run(1, 2, true).max_contacts, 0);
        assert_eq!(run(2, 3, false).max_contacts, 1);
    }

    #[test]
    fn pruning_is_sound() {
        for d in 2..=3 {
            for n in 1..=7 {
                let a = run(n, d, true);
                let b = run(n, d, false);
                assert_eq!(a.max_contacts, b.max_contacts, "n = {n}, d = {d}");
                assert_eq!(adjacency_count(&b.witness), b.max_contacts);
                assert!(a.shapes_explored <= b.shapes_explored);
            }
        }
    }

    #[test]
    fn disconnected_shapes_do_not_help() {
        for n in 1..=8 {
            let connected = run(n, 2, true);
            let any = max_contacts_lattice(
                n,
                2,
                &OracleOptions {
                    connected_only: false,
                    ..Default::default()
                },
            )
            .unwrap();
            assert_eq!(any.max_contacts, connected.max_contacts, "n = {n}");
            assert_eq!(adjacency_count(&any.witness), any.max_contacts);
        }
    }

    #[test]
    fn limits_are_enforced() {
        assert!(matches!(
            max_contacts_lattice(15, 2, &OracleOptions::default()),
            Err(Error::Limit { n: 15, d: 2 })
        ));
        assert!(matches!(
            max_contacts_lattice(10, 3, &OracleOptions::default()),
            Err(Error::Limit { .. })
        ));
        assert!(max_contacts_lattice(4, 4, &OracleOptions::default()).is_err());
        let r = max_contacts_lattice(
            4,
            4,
            &OracleOptions {
                allow_large: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(r.max_contacts, 4);
    }

    #[test]
    fn thread_count_does_not_change_result() {
        let a = max_contacts_lattice(
            8,
            2,
            &OracleOptions {
                threads: Some(1),
                prune: false,
                ..Default::default()
            },
        )
        .unwrap();
        let b = max_contacts_lattice(
            8,
            2,
            &OracleOptions {
                threads: Some(4),
                prune: false,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn formula_table() {
        let rows = verify_formula_2d(10).unwrap();
        assert_eq!(rows[0], FormulaRow { n: 2, oracle: 1, formula: 1, equal: true });
        assert_eq!(rows[8], FormulaRow { n: 10, oracle: 13, formula: 13, equal: true });
        assert!(verify_formula_2d(15).is_err());
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let r = run(6, 2, true);
        store_cached(dir.path(), &r).unwrap();
        let loaded = load_cached(dir.path(), 6, 2).unwrap();
        assert_eq!(loaded.max_contacts, r.max_contacts);
        assert_eq!(loaded.witness, r.witness);
        assert!(load_cached(dir.path(), 7, 2).is_none());
        std::fs::write(cache_path(dir.path(), 7, 2), "0,0\n").unwrap();
        assert!(load_cached(dir.path(), 7, 2).is_none());
    }
}
