//! Term interning and per-predicate fact storage.

use std::collections::HashMap;

use indexmap::{IndexMap, IndexSet};
use parking_lot::RwLock;

use crate::error::EngineError;
use crate::stratify::PredKey;
use crate::term::{Label, Sym, Term};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermId(u32);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum TermData {
    Const(Sym),
    Index(u32),
    Unode(Label),
    Vnode(Label, u8),
    Fn(Label, Box<[TermId]>),
    Packed(Box<[TermId]>),
}

#[derive(Default)]
struct TableInner {
    data: Vec<(TermData, u32)>,
    lookup: HashMap<TermData, TermId>,
}

/// Shared, append-only term table. Safe to use from several materializations at once.
#[derive(Default)]
pub(crate) struct TermTable {
    inner: RwLock<TableInner>,
}

/// Interned argument ids and the deepest nesting among them.
type IdsWithDepth = (Box<[TermId]>, u32);

impl TermTable {
    pub fn len(&self) -> usize {
        self.inner.read().data.len()
    }

    pub fn intern_data(&self, data: TermData, depth: u32) -> TermId {
        if let Some(id) = self.inner.read().lookup.get(&data) {
            return *id;
        }
        let mut inner = self.inner.write();
        if let Some(id) = inner.lookup.get(&data) {
            return *id;
        }
        let id = TermId(inner.data.len() as u32);
        inner.data.push((data.clone(), depth));
        inner.lookup.insert(data, id);
        id
    }

    pub fn find_data(&self, data: &TermData) -> Option<TermId> {
        self.inner.read().lookup.get(data).copied()
    }

    pub fn depth(&self, id: TermId) -> u32 {
        self.inner.read().data[id.0 as usize].1
    }

    pub fn unpack(&self, id: TermId) -> Option<Box<[TermId]>> {
        match &self.inner.read().data[id.0 as usize].0 {
            TermData::Packed(ids) => Some(ids.clone()),
            _ => None,
        }
    }

    /// Interns a ground term.
    pub fn intern(&self, term: &Term) -> Result<TermId, EngineError> {
        self.convert(term, &mut |data, depth| Some(self.intern_data(data, depth)))
            .map(|o| o.expect("interning always yields an id"))
    }

    /// Looks up a ground term without interning it.
    pub fn find(&self, term: &Term) -> Result<Option<TermId>, EngineError> {
        self.convert(term, &mut |data, _| self.find_data(&data))
    }

    fn convert(
        &self,
        term: &Term,
        resolve: &mut dyn FnMut(TermData, u32) -> Option<TermId>,
    ) -> Result<Option<TermId>, EngineError> {
        let mut sub = |args: &[Term]| -> Result<Option<IdsWithDepth>, EngineError> {
            let mut ids = Vec::with_capacity(args.len());
            let mut depth = 0;
            for a in args {
                match self.convert(a, resolve)? {
                    Some(id) => {
                        depth = depth.max(self.depth(id));
                        ids.push(id);
                    }
                    None => return Ok(None),
                }
            }
            Ok(Some((ids.into_boxed_slice(), depth)))
        };
        let (data, depth) = match term {
            Term::Var(v) => return Err(EngineError::NonGroundFact(format!("?{v}"))),
            Term::Const(s) => (TermData::Const(s.clone()), 0),
            Term::Index(i) => (TermData::Index(*i), 0),
            Term::Unode(l) => (TermData::Unode(l.clone()), 0),
            Term::Vnode(l, i) => (TermData::Vnode(l.clone(), *i), 0),
            Term::Fn(l, args) => match sub(args)? {
                Some((ids, d)) => (TermData::Fn(l.clone(), ids), d + 1),
                None => return Ok(None),
            },
            Term::Packed(args) => match sub(args)? {
                Some((ids, d)) => (TermData::Packed(ids), d),
                None => return Ok(None),
            },
        };
        Ok(resolve(data, depth))
    }

    pub fn decode(&self, id: TermId) -> Term {
        let inner = self.inner.read();
        decode_in(&inner, id)
    }
}

fn decode_in(inner: &TableInner, id: TermId) -> Term {
    match &inner.data[id.0 as usize].0 {
        TermData::Const(s) => Term::Const(s.clone()),
        TermData::Index(i) => Term::Index(*i),
        TermData::Unode(l) => Term::Unode(l.clone()),
        TermData::Vnode(l, i) => Term::Vnode(l.clone(), *i),
        TermData::Fn(l, args) => Term::Fn(l.clone(), args.iter().map(|a| decode_in(inner, *a)).collect()),
        TermData::Packed(args) => Term::Packed(args.iter().map(|a| decode_in(inner, *a)).collect()),
    }
}

pub(crate) type Tuple = Box<[TermId]>;

/// Append-only set of tuples with a hash index on every argument position.
/// Tuple positions in insertion order double as semi-naive delta ranges.
#[derive(Clone, Debug)]
pub(crate) struct Relation {
    tuples: IndexSet<Tuple>,
    index: Vec<HashMap<TermId, Vec<u32>>>,
}

impl Relation {
    pub fn new(arity: usize) -> Self {
        Relation {
            tuples: IndexSet::new(),
            index: vec![HashMap::new(); arity],
        }
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn insert(&mut self, tuple: Tuple) -> bool {
        let (i, new) = self.tuples.insert_full(tuple);
        if new {
            let t = &self.tuples[i];
            for (pos, v) in t.iter().enumerate() {
                self.index[pos].entry(*v).or_default().push(i as u32);
            }
        }
        new
    }

    pub fn contains(&self, tuple: &[TermId]) -> bool {
        self.tuples.contains(tuple)
    }

    pub fn get(&self, i: usize) -> &[TermId] {
        &self.tuples[i]
    }

    pub fn postings(&self, pos: usize, value: TermId) -> &[u32] {
        self.index[pos].get(&value).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn iter(&self) -> impl Iterator<Item = &Tuple> {
        self.tuples.iter()
    }
}

#[derive(Clone, Debug, Default)]
pub(crate) struct Database {
    rels: IndexMap<PredKey, Relation>,
}

impl Database {
    pub fn get(&self, pred: &PredKey) -> Option<&Relation> {
        self.rels.get(pred)
    }

    pub fn insert(&mut self, pred: &PredKey, tuple: Tuple) -> bool {
        if let Some(rel) = self.rels.get_mut(pred) {
            return rel.insert(tuple);
        }
        let mut rel = Relation::new(pred.arity);
        rel.insert(tuple);
        self.rels.insert(pred.clone(), rel);
        true
    }

    pub fn len_of(&self, pred: &PredKey) -> usize {
        self.rels.get(pred).map_or(0, Relation::len)
    }

    pub fn len(&self) -> usize {
        self.rels.values().map(Relation::len).sum()
    }

    pub fn contains(&self, pred: &PredKey, tuple: &[TermId]) -> bool {
        self.rels.get(pred).is_some_and(|r| r.contains(tuple))
    }

    pub fn relations(&self) -> impl Iterator<Item = (&PredKey, &Relation)> {
        self.rels.iter()
    }
}
