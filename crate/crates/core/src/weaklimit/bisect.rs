use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Class {
    Inside,
    Outside,
    Unknown,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Outcome {
    pub inside: f64,
    pub unresolved: f64,
    pub complete: bool,
}

struct Cell {
    mass: f64,
    a: f64,
    b: f64,
}

impl PartialEq for Cell {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Cell {
    fn cmp(&self, o: &Self) -> Ordering {
        self.mass.total_cmp(&o.mass).then(o.a.total_cmp(&self.a))
    }
}

/// Adaptive bisection: cells are classified as inside / outside the set, and the
/// heaviest unresolved cell is halved until the unresolved mass is at most `stop`.
pub(crate) fn bisect(
    cells: &[(f64, f64)],
    mass: impl Fn(f64, f64) -> f64,
    classify: impl Fn(f64, f64) -> Class,
    stop: f64,
    max_iter: usize,
) -> Outcome {
    let mut heap = BinaryHeap::new();
    let mut inside = 0.0;
    let mut stuck = 0.0;
    // Returns the mass left unresolved by the new cell.
    let push = |heap: &mut BinaryHeap<Cell>, inside: &mut f64, a: f64, b: f64| -> f64 {
        let m = mass(a, b);
        if m <= 0.0 {
            return 0.0;
        }
        match classify(a, b) {
            Class::Inside => *inside += m,
            Class::Outside => {}
            Class::Unknown => {
                heap.push(Cell { mass: m, a, b });
                return m;
            }
        }
        0.0
    };
    for &(a, b) in cells {
        if b > a {
            push(&mut heap, &mut inside, a, b);
        }
    }
    let pending = |heap: &BinaryHeap<Cell>| heap.iter().map(|c| c.mass).sum::<f64>();
    let mut unresolved = pending(&heap);
    let mut iter = 0;
    while unresolved + stuck > stop && iter < max_iter {
        let Some(cell) = heap.pop() else { break };
        iter += 1;
        unresolved -= cell.mass;
        let mid = 0.5 * (cell.a + cell.b);
        if !(mid > cell.a && mid < cell.b) {
            stuck += cell.mass;
            continue;
        }
        unresolved += push(&mut heap, &mut inside, cell.a, mid);
        unresolved += push(&mut heap, &mut inside, mid, cell.b);
        if iter % 1024 == 0 {
            unresolved = pending(&heap);
        }
    }
    let unresolved = pending(&heap) + stuck;
    Outcome { inside, unresolved, complete: unresolved <= stop }
}
