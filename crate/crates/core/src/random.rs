//! Seeded generators of systems and Keller families for property sweeps.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::keller::{classify_fast, keller_pair, pile_rewrite, BoxFamily, DBox, Factor, PartitionStatus};
use crate::partition::{Partition, PartitionSystem};

/// Shape of random systems.
#[derive(Clone, Debug)]
pub struct SystemShape {
    pub max_dim: usize,
    pub min_size: usize,
    pub max_size: usize,
    /// Upper bound on nontrivial partitions per axis.
    pub max_partitions: usize,
}

impl Default for SystemShape {
    fn default() -> Self {
        SystemShape { max_dim: 3, min_size: 2, max_size: 6, max_partitions: 3 }
    }
}

pub struct Generator {
    rng: ChaCha8Rng,
}

impl Generator {
    pub fn new(seed: u64) -> Self {
        Generator { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// A uniformly random surjection onto a random number of blocks
    /// (at least two).
    pub fn partition(&mut self, size: usize) -> Partition {
        loop {
            let k = self.rng.gen_range(2..=size);
            let labels: Vec<usize> = (0..size).map(|_| self.rng.gen_range(0..k)).collect();
            let blocks: Vec<Vec<usize>> =
                (0..k).map(|b| (0..size).filter(|&e| labels[e] == b).collect()).collect();
            if blocks.iter().all(|b| !b.is_empty()) {
                return Partition::new(size, &blocks).expect("labels give a partition");
            }
        }
    }

    /// A unital system with at least one nontrivial partition per axis;
    /// further partitions are kept only if independent of those chosen.
    pub fn system(&mut self, shape: &SystemShape) -> PartitionSystem {
        let d = self.rng.gen_range(1..=shape.max_dim);
        let mut axes = Vec::with_capacity(d);
        for _ in 0..d {
            let size = self.rng.gen_range(shape.min_size..=shape.max_size);
            let want = self.rng.gen_range(1..=shape.max_partitions);
            let mut parts: Vec<Partition> = Vec::new();
            for _ in 0..want * 8 {
                if parts.len() == want {
                    break;
                }
                let p = self.partition(size);
                let fits = parts.iter().all(|o| *o != p && p.is_independent_of(o).expect("same axis"));
                if fits {
                    parts.push(p);
                }
            }
            parts.push(Partition::trivial(size));
            axes.push((size, parts));
        }
        PartitionSystem::new(axes).expect("partitions chosen pairwise independent")
    }

    /// A random box; each factor is the full axis with probability
    /// `full_prob`.
    pub fn dbox(&mut self, system: &PartitionSystem, full_prob: f64) -> DBox {
        let factors = (0..system.dim())
            .map(|axis| {
                let nontrivial: Vec<usize> = system.axis(axis).nontrivial().collect();
                if nontrivial.is_empty() || self.rng.gen_bool(full_prob) {
                    Factor::Full
                } else {
                    let p = *nontrivial.choose(&mut self.rng).expect("nonempty");
                    Factor::part(p, self.rng.gen_range(0..system.partition(axis, p).len()))
                }
            })
            .collect();
        DBox::new(factors)
    }

    /// Random boxes kept whenever they satisfy Keller's condition with all
    /// boxes kept so far.
    pub fn greedy(&mut self, system: &Arc<PartitionSystem>, attempts: usize) -> BoxFamily {
        let full_prob = self.rng.gen_range(0.0..0.4);
        let mut boxes: Vec<DBox> = Vec::new();
        for _ in 0..attempts {
            let k = self.dbox(system, full_prob);
            if boxes.iter().all(|l| keller_pair(&k, l)) {
                boxes.push(k);
            }
        }
        if boxes.is_empty() {
            boxes.push(DBox::full(system.dim()));
        }
        BoxFamily::new(system.clone(), boxes).expect("boxes are valid and distinct")
    }

    /// Recursive guillotine splitting of the whole space. With `distinct`,
    /// no `(axis, partition)` is used twice anywhere, which makes the result
    /// a multipile.
    pub fn guillotine(&mut self, system: &Arc<PartitionSystem>, stop_prob: f64, distinct: bool, max_boxes: usize) -> BoxFamily {
        let mut boxes = Vec::new();
        let mut used = BTreeSet::new();
        let root = DBox::full(system.dim());
        self.split(system, root, stop_prob, distinct, max_boxes, &mut used, &mut boxes, true);
        BoxFamily::new(system.clone(), boxes).expect("guillotine boxes are distinct")
    }

    #[allow(clippy::too_many_arguments)]
    fn split(
        &mut self,
        system: &PartitionSystem,
        region: DBox,
        stop_prob: f64,
        distinct: bool,
        max_boxes: usize,
        used: &mut BTreeSet<(usize, usize)>,
        out: &mut Vec<DBox>,
        root: bool,
    ) {
        let options: Vec<(usize, usize)> = (0..system.dim())
            .filter(|&a| region.factor(a) == Factor::Full)
            .flat_map(|a| system.axis(a).nontrivial().map(move |p| (a, p)))
            .filter(|key| !distinct || !used.contains(key))
            .collect();
        let stop = options.is_empty() || out.len() + 1 >= max_boxes || (!root && self.rng.gen_bool(stop_prob));
        if stop {
            out.push(region);
            return;
        }
        let (axis, p) = *options.choose(&mut self.rng).expect("nonempty");
        used.insert((axis, p));
        for b in 0..system.partition(axis, p).len() {
            let child = region.with_factor(axis, Factor::part(p, b));
            self.split(system, child, stop_prob, distinct, max_boxes, used, out, false);
        }
    }

    /// A nonempty random subfamily.
    pub fn subfamily(&mut self, g: &BoxFamily) -> BoxFamily {
        let keep = self.rng.gen_range(0.3..1.0);
        let mut sub = g.filter(|_| self.rng.gen_bool(keep));
        if sub.is_empty() {
            let k = g.boxes().choose(&mut self.rng).expect("nonempty family").clone();
            sub = g.filter(|l| *l == k);
        }
        sub
    }

    /// A rewrite chain `G_0 = g, G_1, ...`, each step replacing the pile
    /// of a random hidden partition by a random elementary aggregate.
    pub fn rewrite_chain(&mut self, g: &BoxFamily, max_steps: usize) -> Vec<BoxFamily> {
        let mut chain = vec![g.clone()];
        for _ in 0..max_steps {
            let cur = chain.last().expect("nonempty");
            let system = cur.system();
            let hidden: Vec<(usize, usize)> = (0..system.dim())
                .flat_map(|a| cur.present_partitions(a).into_iter().map(move |p| (a, p)))
                .filter(|&(a, p)| classify_fast(cur, a, p) == PartitionStatus::Hidden)
                .collect();
            let Some(&(axis, p)) = hidden.choose(&mut self.rng) else {
                break;
            };
            let block = self.rng.gen_range(0..system.partition(axis, p).len());
            let next = pile_rewrite(cur, axis, p, block).expect("partition is hidden in a Keller family");
            chain.push(next);
        }
        chain
    }

    /// A mix of greedy packings, guillotine partitions, multipiles and
    /// their subfamilies and rewrites.
    pub fn keller_family(&mut self, system: &Arc<PartitionSystem>) -> BoxFamily {
        match self.rng.gen_range(0..6) {
            0 => self.greedy(system, 40),
            1 => {
                let p = self.rng.gen_range(0.1..0.6);
                self.guillotine(system, p, false, 48)
            }
            2 => {
                let p = self.rng.gen_range(0.0..0.5);
                self.guillotine(system, p, true, 48)
            }
            3 => {
                let g = self.guillotine(system, 0.3, false, 48);
                self.subfamily(&g)
            }
            4 => {
                let distinct = self.rng.gen_bool(0.5);
                let g = self.guillotine(system, 0.2, distinct, 48);
                let steps = self.rng.gen_range(1..4);
                self.rewrite_chain(&g, steps).pop().expect("nonempty chain")
            }
            _ => {
                let g = self.greedy(system, 40);
                self.subfamily(&g)
            }
        }
    }
}
