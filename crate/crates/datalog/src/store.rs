//! Partitioned fact store. Each partition owns a rule set and its
//! materialization, and may read the facts of sealed partitions.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicU32, AtomicUsize, Ordering};
use std::sync::Arc;

use indexmap::IndexSet;
use parking_lot::RwLock;

use crate::db::{Database, TermId, TermTable, Tuple};
use crate::error::EngineError;
use crate::eval::evaluate;
use crate::rule::Rule;
use crate::stratify::PredKey;
use crate::term::{Atom, Sym, Term};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartitionId(u32);

impl fmt::Display for PartitionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Default)]
pub enum Strategy {
    #[default]
    SemiNaive,
    Naive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EngineConfig {
    /// Maximum nesting of function terms before evaluation aborts.
    pub depth_bound: usize,
    pub strategy: Strategy,
}

pub const DEFAULT_DEPTH_BOUND: usize = 64;

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            depth_bound: DEFAULT_DEPTH_BOUND,
            strategy: Strategy::SemiNaive,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MaterializeStats {
    /// Facts derived by this call, excluding asserted facts.
    pub derived_count: usize,
    pub strata_count: usize,
    pub rounds: usize,
    /// Total facts held by the partition afterwards.
    pub facts: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StoreStats {
    pub partitions: usize,
    pub materializations: usize,
    pub facts: usize,
    pub terms: usize,
}

struct Partition {
    name: String,
    reads: Vec<PartitionId>,
    rules: IndexSet<Rule>,
    edb: IndexSet<(PredKey, Tuple)>,
    db: Database,
    sealed: bool,
    dirty: bool,
    runs: usize,
}

/// A set of partitions sharing one term table.
pub struct Store {
    config: EngineConfig,
    terms: TermTable,
    partitions: RwLock<BTreeMap<PartitionId, Arc<RwLock<Partition>>>>,
    next_id: AtomicU32,
    materializations: AtomicUsize,
}

impl std::fmt::Debug for Store {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Store").field("config", &self.config).field("stats", &self.stats()).finish_non_exhaustive()
    }
}

impl Default for Store {
    fn default() -> Self {
        Store::new(EngineConfig::default())
    }
}

impl Store {
    pub fn new(config: EngineConfig) -> Self {
        Store {
            config,
            terms: TermTable::default(),
            partitions: RwLock::new(BTreeMap::new()),
            next_id: AtomicU32::new(0),
            materializations: AtomicUsize::new(0),
        }
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    fn slot(&self, pid: PartitionId) -> Result<Arc<RwLock<Partition>>, EngineError> {
        self.partitions
            .read()
            .get(&pid)
            .cloned()
            .ok_or(EngineError::UnknownPartition(pid))
    }

    /// Creates an empty partition that sees the facts of every partition in
    /// `reads`. Those must already be sealed.
    pub fn create_partition(&self, name: &str, reads: &[PartitionId]) -> Result<PartitionId, EngineError> {
        let pid = PartitionId(self.next_id.fetch_add(1, Ordering::Relaxed));
        for &r in reads {
            let slot = self.slot(r).map_err(|_| EngineError::BadRead(pid, r))?;
            if !slot.read().sealed {
                return Err(EngineError::UnsealedRead(pid, r));
            }
        }
        let mut uniq = reads.to_vec();
        uniq.dedup();
        let part = Partition {
            name: name.to_string(),
            reads: uniq,
            rules: IndexSet::new(),
            edb: IndexSet::new(),
            db: Database::default(),
            sealed: false,
            dirty: true,
            runs: 0,
        };
        self.partitions.write().insert(pid, Arc::new(RwLock::new(part)));
        Ok(pid)
    }

    pub fn partition_name(&self, pid: PartitionId) -> Result<String, EngineError> {
        Ok(self.slot(pid)?.read().name.clone())
    }

    /// Stages rules and ground facts. Nothing is derived until `materialize`.
    pub fn assert<I>(&self, pid: PartitionId, rules: I) -> Result<(), EngineError>
    where
        I: IntoIterator<Item = Rule>,
    {
        let slot = self.slot(pid)?;
        let mut part = slot.write();
        if part.sealed {
            return Err(EngineError::SealedPartition(pid));
        }
        for rule in rules {
            if rule.is_fact() {
                for atom in &rule.head {
                    let tuple = self.intern_tuple(&atom.args)?;
                    if part.edb.insert((PredKey::of(atom), tuple)) {
                        part.dirty = true;
                    }
                }
            } else {
                if rule.body.is_empty() && rule.builtins.is_empty() && rule.negated.is_empty() {
                    return Err(EngineError::NonGroundFact(rule.to_string()));
                }
                rule.check_safety()?;
                if part.rules.insert(rule) {
                    part.dirty = true;
                }
            }
        }
        Ok(())
    }

    pub fn assert_facts<I>(&self, pid: PartitionId, facts: I) -> Result<(), EngineError>
    where
        I: IntoIterator<Item = Atom>,
    {
        self.assert(pid, facts.into_iter().map(Rule::fact))
    }

    /// Number of staged rules plus staged facts.
    pub fn staged_count(&self, pid: PartitionId) -> Result<usize, EngineError> {
        let slot = self.slot(pid)?;
        let part = slot.read();
        Ok(part.rules.len() + part.edb.len())
    }

    fn intern_tuple(&self, args: &[Term]) -> Result<Tuple, EngineError> {
        args.iter()
            .map(|t| self.terms.intern(t))
            .collect::<Result<Vec<_>, _>>()
            .map(Vec::into_boxed_slice)
    }

    /// Computes the least model of the partition's rules over its own facts
    /// and the facts of the partitions it reads. Recomputes from scratch when
    /// the content changed since the last call and is a no-op otherwise.
    pub fn materialize(&self, pid: PartitionId) -> Result<MaterializeStats, EngineError> {
        let slot = self.slot(pid)?;
        {
            let part = slot.read();
            if !part.dirty {
                return Ok(MaterializeStats {
                    facts: part.db.len(),
                    ..Default::default()
                });
            }
        }
        let mut part = slot.write();
        if !part.dirty {
            return Ok(MaterializeStats {
                facts: part.db.len(),
                ..Default::default()
            });
        }
        let read_slots = part
            .reads
            .iter()
            .map(|&r| self.slot(r).map_err(|_| EngineError::BadRead(pid, r)))
            .collect::<Result<Vec<_>, _>>()?;
        let guards: Vec<_> = read_slots.iter().map(|s| s.read()).collect();
        let reads: Vec<&Database> = guards.iter().map(|g| &g.db).collect();

        let mut db = Database::default();
        for (pred, tuple) in &part.edb {
            db.insert(pred, tuple.clone());
        }
        let asserted = db.len();
        let rules: Vec<Rule> = part.rules.iter().cloned().collect();
        let stats = evaluate(&rules, &mut db, &reads, &self.terms, &self.config)?;
        let facts = db.len();
        part.db = db;
        part.dirty = false;
        part.runs += 1;
        self.materializations.fetch_add(1, Ordering::Relaxed);
        Ok(MaterializeStats {
            derived_count: facts - asserted,
            strata_count: stats.strata,
            rounds: stats.rounds,
            facts,
        })
    }

    /// Materializes the partition if needed and makes it immutable.
    pub fn seal(&self, pid: PartitionId) -> Result<MaterializeStats, EngineError> {
        let stats = self.materialize(pid)?;
        self.slot(pid)?.write().sealed = true;
        Ok(stats)
    }

    pub fn is_sealed(&self, pid: PartitionId) -> Result<bool, EngineError> {
        Ok(self.slot(pid)?.read().sealed)
    }

    /// Drops the partition with all its rules and facts.
    pub fn retract_partition(&self, pid: PartitionId) -> Result<(), EngineError> {
        let mut map = self.partitions.write();
        if !map.contains_key(&pid) {
            return Err(EngineError::UnknownPartition(pid));
        }
        if let Some((&reader, _)) = map.iter().find(|(&id, p)| id != pid && p.read().reads.contains(&pid)) {
            return Err(EngineError::InUse(pid, reader));
        }
        map.remove(&pid);
        Ok(())
    }

    /// Number of materializations performed so far on this partition.
    pub fn runs(&self, pid: PartitionId) -> Result<usize, EngineError> {
        Ok(self.slot(pid)?.read().runs)
    }

    pub fn partition_facts(&self, pid: PartitionId) -> Result<usize, EngineError> {
        Ok(self.slot(pid)?.read().db.len())
    }

    /// Facts held over all partitions.
    pub fn fact_count(&self) -> usize {
        self.partitions.read().values().map(|p| p.read().db.len()).sum()
    }

    pub fn stats(&self) -> StoreStats {
        let map = self.partitions.read();
        StoreStats {
            partitions: map.len(),
            materializations: self.materializations.load(Ordering::Relaxed),
            facts: map.values().map(|p| p.read().db.len()).sum(),
            terms: self.terms.len(),
        }
    }

    /// Predicates with at least one fact visible from the partition.
    pub fn predicates(&self, pid: PartitionId) -> Result<Vec<PredKey>, EngineError> {
        self.with_view(pid, |dbs| {
            let mut out: Vec<PredKey> = Vec::new();
            for db in dbs {
                for (k, rel) in db.relations() {
                    if rel.len() > 0 && !out.contains(k) {
                        out.push(k.clone());
                    }
                }
            }
            out.sort();
            out
        })
    }

    fn with_view<T>(&self, pid: PartitionId, f: impl FnOnce(&[&Database]) -> T) -> Result<T, EngineError> {
        let slot = self.slot(pid)?;
        let part = slot.read();
        let read_slots = part
            .reads
            .iter()
            .map(|&r| self.slot(r))
            .collect::<Result<Vec<_>, _>>()?;
        let guards: Vec<_> = read_slots.iter().map(|s| s.read()).collect();
        let mut dbs: Vec<&Database> = guards.iter().map(|g| &g.db).collect();
        dbs.push(&part.db);
        Ok(f(&dbs))
    }

    /// All tuples of `pred/arity` visible from the partition, in insertion order.
    pub fn facts(&self, pid: PartitionId, pred: &str, arity: usize) -> Result<Vec<Vec<Term>>, EngineError> {
        let key = PredKey::new(pred, arity);
        self.with_view(pid, |dbs| {
            let mut seen: IndexSet<&[TermId]> = IndexSet::new();
            for db in dbs {
                if let Some(rel) = db.get(&key) {
                    for t in rel.iter() {
                        seen.insert(t);
                    }
                }
            }
            seen.iter()
                .map(|t| t.iter().map(|i| self.terms.decode(*i)).collect())
                .collect()
        })
    }

    pub fn contains(&self, pid: PartitionId, fact: &Atom) -> Result<bool, EngineError> {
        let key = PredKey::of(fact);
        let mut ids = Vec::with_capacity(fact.args.len());
        for t in &fact.args {
            match self.terms.find(t)? {
                Some(id) => ids.push(id),
                None => return Ok(false),
            }
        }
        self.with_view(pid, |dbs| dbs.iter().any(|d| d.contains(&key, &ids)))
    }

    /// Every substitution of the pattern's variables that turns it into a
    /// fact visible from the partition. Sorted, without duplicates.
    pub fn query_atoms(&self, pid: PartitionId, pattern: &Atom) -> Result<Vec<BTreeMap<Sym, Term>>, EngineError> {
        let key = PredKey::of(pattern);
        enum Slot {
            Fixed(Option<TermId>),
            Var(Sym),
        }
        let slots = pattern
            .args
            .iter()
            .map(|t| match t {
                Term::Var(v) => Ok(Slot::Var(v.clone())),
                ground => Ok(Slot::Fixed(self.terms.find(ground)?)),
            })
            .collect::<Result<Vec<_>, EngineError>>()?;
        if slots.iter().any(|s| matches!(s, Slot::Fixed(None))) {
            return Ok(Vec::new());
        }
        let mut out: Vec<BTreeMap<Sym, Term>> = self.with_view(pid, |dbs| {
            let mut out = Vec::new();
            for db in dbs {
                let Some(rel) = db.get(&key) else { continue };
                'tuples: for t in rel.iter() {
                    let mut b: BTreeMap<Sym, TermId> = BTreeMap::new();
                    for (s, v) in slots.iter().zip(t.iter()) {
                        match s {
                            Slot::Fixed(Some(c)) if c != v => continue 'tuples,
                            Slot::Fixed(_) => {}
                            Slot::Var(x) => match b.get(x) {
                                Some(prev) if prev != v => continue 'tuples,
                                Some(_) => {}
                                None => {
                                    b.insert(x.clone(), *v);
                                }
                            },
                        }
                    }
                    out.push(b.into_iter().map(|(k, v)| (k, self.terms.decode(v))).collect());
                }
            }
            out
        })?;
        out.sort();
        out.dedup();
        Ok(out)
    }
}
