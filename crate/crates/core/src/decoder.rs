//! Two-phase stitching decoder for the linked-loop code.
//!
//! Phase 1 stitches, from every section-0 entry, all paths whose explicit
//! symbols satisfy every parity equation, including the wrap-around ones once
//! the path is complete. Phase 2 restarts from the section-0 entries that
//! produced nothing in phase 1 and lets each path skip exactly one section;
//! the skipped section's information bits are solved from the first equation
//! that determines them and must satisfy every other equation they enter.
//!
//! Candidates for a section are looked up by their parity bits whenever the
//! equation's window is fully known, which is equivalent to testing every list
//! entry but avoids the scan.

use std::cell::RefCell;
use std::collections::BTreeSet;

use crate::channel::ChannelOutput;
use crate::code::{DecodeResult, Payload, SectionSymbol};
use crate::error::{Error, Result};
use crate::llc::{Equation, LlcSpec, Path, Slot, WindowSum};

/// Default limit on live paths per root and section.
pub const DEFAULT_PATH_CAP: usize = 1_000_000;

/// Everything phase 1 produces.
#[derive(Clone, Debug, Default)]
pub struct Phase1 {
    pub paths: Vec<Path>,
    pub payloads: BTreeSet<Payload>,
    pub surviving_roots: BTreeSet<SectionSymbol>,
}

pub fn decode_phase1(spec: &LlcSpec, output: &ChannelOutput) -> Result<Phase1> {
    Decoder::new(spec).phase1(output)
}

pub fn decode_phase2(
    spec: &LlcSpec,
    output: &ChannelOutput,
    surviving_roots: &BTreeSet<SectionSymbol>,
) -> Result<BTreeSet<Payload>> {
    Decoder::new(spec).phase2(output, surviving_roots)
}

pub fn decode(spec: &LlcSpec, output: &ChannelOutput) -> Result<DecodeResult> {
    Decoder::new(spec).decode(output)
}

#[derive(Debug)]
pub struct Decoder<'a> {
    spec: &'a LlcSpec,
    path_cap: usize,
    scratch: RefCell<Scratch>,
}

/// Buffers reused across roots.
#[derive(Debug, Default)]
struct Scratch {
    tree: Arena,
    live: Vec<usize>,
    next: Vec<usize>,
    window: Vec<Slot>,
}

/// Section lists sorted by parity bits, ties in symbol order.
struct Index<'a> {
    output: &'a ChannelOutput,
    by_parity: Vec<Vec<(u64, SectionSymbol)>>,
}

impl<'a> Index<'a> {
    fn new(spec: &LlcSpec, output: &'a ChannelOutput) -> Self {
        let m = spec.info_bits();
        let by_parity = output
            .lists()
            .iter()
            .map(|list| {
                let mut keyed: Vec<(u64, SectionSymbol)> =
                    list.iter().map(|&s| (s.parity(m), s)).collect();
                keyed.sort_unstable();
                keyed
            })
            .collect();
        Index { output, by_parity }
    }

    fn matching(&self, l: usize, parity: u64) -> impl Iterator<Item = SectionSymbol> + '_ {
        let list = &self.by_parity[l];
        let start = list.partition_point(|e| e.0 < parity);
        list[start..]
            .iter()
            .take_while(move |e| e.0 == parity)
            .map(|e| e.1)
    }
}

impl<'a> Decoder<'a> {
    pub fn new(spec: &'a LlcSpec) -> Self {
        Decoder {
            spec,
            path_cap: DEFAULT_PATH_CAP,
            scratch: RefCell::default(),
        }
    }

    pub fn with_path_cap(mut self, cap: usize) -> Self {
        self.path_cap = cap;
        self
    }

    pub fn decode(&self, output: &ChannelOutput) -> Result<DecodeResult> {
        self.spec_geometry(output)?;
        let index = Index::new(self.spec, output);
        let phase1 = self.phase1_indexed(&index)?;
        let phase2 = self.phase2_indexed(&index, &phase1.surviving_roots)?;
        let phase1_count = phase1.payloads.len();
        let mut decoded = phase1.payloads;
        let before = decoded.len();
        decoded.extend(phase2);
        Ok(DecodeResult {
            phase2_count: decoded.len() - before,
            phase1_count,
            decoded,
            surviving_roots: phase1.surviving_roots,
        })
    }

    fn spec_geometry(&self, output: &ChannelOutput) -> Result<()> {
        output.check_geometry(self.spec.sections(), self.spec.section_bits())
    }

    pub fn phase1(&self, output: &ChannelOutput) -> Result<Phase1> {
        self.spec_geometry(output)?;
        self.phase1_indexed(&Index::new(self.spec, output))
    }

    fn phase1_indexed(&self, index: &Index<'_>) -> Result<Phase1> {
        let spec = self.spec;
        let mut result = Phase1::default();
        for &root in index.output.list(0) {
            let paths = self.stitch(index, root, false)?;
            if paths.is_empty() {
                continue;
            }
            result.surviving_roots.insert(root);
            for p in &paths {
                result.payloads.insert(spec.extract_info_bits(p)?);
            }
            result.paths.extend(paths);
        }
        Ok(result)
    }

    pub fn phase2(
        &self,
        output: &ChannelOutput,
        surviving_roots: &BTreeSet<SectionSymbol>,
    ) -> Result<BTreeSet<Payload>> {
        self.spec_geometry(output)?;
        self.phase2_indexed(&Index::new(self.spec, output), surviving_roots)
    }

    fn phase2_indexed(
        &self,
        index: &Index<'_>,
        surviving_roots: &BTreeSet<SectionSymbol>,
    ) -> Result<BTreeSet<Payload>> {
        let spec = self.spec;
        let mut payloads = BTreeSet::new();
        for &root in index.output.list(0) {
            if surviving_roots.contains(&root) {
                continue;
            }
            for p in self.stitch(index, root, true)? {
                payloads.insert(spec.extract_info_bits(&p)?);
            }
        }
        Ok(payloads)
    }

    /// Breadth-first stitching from one root. With `tolerate_erasure`, every
    /// path without an erased slot also spawns a copy that skips the section.
    fn stitch(&self, index: &Index<'_>, root: SectionSymbol, tolerate_erasure: bool) -> Result<Vec<Path>> {
        let spec = self.spec;
        let sections = spec.sections();
        let memory = spec.memory();
        let last = sections - 1;
        let m = spec.info_bits();

        let mut scratch = self.scratch.borrow_mut();
        let Scratch { tree, live, next, window } = &mut *scratch;
        tree.nodes.clear();
        live.clear();
        live.push(tree.push(Node::root(root)));
        let mut done = Vec::new();
        for l in 1..sections {
            next.clear();
            for &id in live.iter() {
                let node = tree.nodes[id];
                if tolerate_erasure && !node.has_erasure {
                    next.push(tree.push(node.child(id, Slot::Erased, None)));
                }
                if l < memory {
                    // The window of section l wraps past the end: nothing to check yet.
                    for &x in index.output.list(l) {
                        next.push(tree.push(node.child(id, Slot::Symbol(x), node.recovered)));
                    }
                    continue;
                }
                tree.window(id, memory, window);
                match spec.window_sum_recent(window, node.recovered) {
                    WindowSum::Known(expected) => {
                        for x in index.matching(l, expected) {
                            next.push(tree.push(node.child(id, Slot::Symbol(x), node.recovered)));
                        }
                    }
                    WindowSum::Missing { r, partial } => {
                        for &x in index.output.list(l) {
                            if let Some(info) = spec.solve(r, x.parity(m) ^ partial) {
                                next.push(tree.push(node.child(id, Slot::Symbol(x), Some(info))));
                            }
                        }
                    }
                    WindowSum::Undetermined => unreachable!("window of section {l} precedes it"),
                }
            }
            if next.len() > self.path_cap {
                return Err(Error::PathExplosion {
                    root: root.0,
                    section: l,
                    live: next.len(),
                    cap: self.path_cap,
                });
            }
            if l == last {
                for &id in next.iter() {
                    let mut path = tree.path(id, sections);
                    if self.close_wrap(&mut path) {
                        done.push(path);
                    }
                }
                break;
            }
            std::mem::swap(live, next);
            if live.is_empty() {
                break;
            }
        }
        Ok(done)
    }

    /// Checks the wrap-around equations of a complete path, recovering the
    /// erased slot if one of them is the first to determine it.
    fn close_wrap(&self, path: &mut Path) -> bool {
        for eq in 0..self.spec.memory() {
            match self.spec.evaluate(path.slots(), eq, path.recovered()) {
                Equation::Holds | Equation::Skipped => {}
                Equation::Solved(info) => path.set_recovered(Some(info)),
                Equation::Violated | Equation::Unsolvable | Equation::Undetermined => return false,
            }
        }
        true
    }
}

/// Stitched paths stored as a tree of parent links.
#[derive(Debug, Default)]
struct Arena {
    nodes: Vec<Node>,
}

#[derive(Clone, Copy, Debug)]
struct Node {
    parent: usize,
    slot: Slot,
    has_erasure: bool,
    recovered: Option<u64>,
}

impl Node {
    fn root(symbol: SectionSymbol) -> Self {
        Node {
            parent: usize::MAX,
            slot: Slot::Symbol(symbol),
            has_erasure: false,
            recovered: None,
        }
    }

    fn child(&self, parent: usize, slot: Slot, recovered: Option<u64>) -> Node {
        Node {
            parent,
            slot,
            has_erasure: self.has_erasure || slot.is_erased(),
            recovered,
        }
    }
}

impl Arena {
    fn push(&mut self, node: Node) -> usize {
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    /// The last `memory` slots ending at `id`, most recent first.
    fn window(&self, mut id: usize, memory: usize, out: &mut Vec<Slot>) {
        out.clear();
        for _ in 0..memory {
            let node = &self.nodes[id];
            out.push(node.slot);
            id = node.parent;
        }
    }

    fn path(&self, mut id: usize, len: usize) -> Path {
        let recovered = self.nodes[id].recovered;
        let mut slots = Vec::with_capacity(len);
        while id != usize::MAX {
            slots.push(self.nodes[id].slot);
            id = self.nodes[id].parent;
        }
        slots.reverse();
        let mut path = Path::from_slots(slots);
        path.set_recovered(recovered);
        path
    }
}
