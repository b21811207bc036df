//! Approximation, augmentation and filtering wired together.

use std::sync::Arc;

use rsa_datalog::Store;

use crate::approx::{approximate_to_rsa, ApproximationProvenance};
use crate::canonical::{build_canonical_model, CanonicalModel};
use crate::error::Error;
use crate::filter::{answer, AnswerSet, FilterMode};
use crate::model::{ConjunctiveQuery, Ontology};
use crate::profile::{is_rsa, RsaReport};

/// An ontology ready for canonical materialization.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub ontology: Ontology,
    /// `None` when the input was used unchanged.
    pub provenance: Option<ApproximationProvenance>,
    /// Report on the input; absent when the input has disjunctions.
    pub input_report: Option<RsaReport>,
}

impl Prepared {
    /// Answers are exact iff nothing was removed or rewritten.
    pub fn exact(&self) -> bool {
        self.provenance.as_ref().is_none_or(ApproximationProvenance::is_identity)
    }

    pub fn canonical_model(&self, store: Arc<Store>) -> Result<CanonicalModel, Error> {
        build_canonical_model(store, &self.ontology)
    }

    pub fn answer(&self, cm: &CanonicalModel, q: &ConjunctiveQuery, mode: FilterMode) -> Result<AnswerSet, Error> {
        let mut a = answer(cm, q, mode)?;
        a.exact = self.exact();
        Ok(a)
    }
}

/// Uses `o` directly when it is RSA, and its approximation otherwise or
/// when `force` is set.
pub fn prepare(o: &Ontology, force: bool) -> Result<Prepared, Error> {
    let input_report = if o.has_disjunction() { None } else { Some(is_rsa(o)?) };
    let rsa = input_report.as_ref().is_some_and(|r| r.is_rsa);
    if rsa && !force {
        return Ok(Prepared {
            ontology: o.clone(),
            provenance: None,
            input_report,
        });
    }
    let (ontology, prov) = approximate_to_rsa(o)?;
    Ok(Prepared {
        ontology,
        provenance: Some(prov),
        input_report,
    })
}

/// One-shot convenience: prepare, materialize, answer each query.
pub fn answer_all(o: &Ontology, queries: &[ConjunctiveQuery], mode: FilterMode) -> Result<Vec<AnswerSet>, Error> {
    let p = prepare(o, false)?;
    let cm = p.canonical_model(Arc::new(Store::default()))?;
    queries.iter().map(|q| p.answer(&cm, q, mode)).collect()
}
