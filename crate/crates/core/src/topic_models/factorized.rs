use super::TopicModel;
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

const STOCHASTIC_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub cardinality: usize,
}

/// `P(child | parent)` as a `parent.cardinality x child.cardinality` table.
#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub parent: usize,
    pub child: usize,
    pub table: Matrix,
}

/// A directed tree of discrete variables,
/// `P(a_0) * prod_i P(a_i | parent(a_i))`.
///
/// Variable 0 is the root. Every other variable `i` has exactly one incoming
/// link whose parent index is smaller than `i`, so the link list (ordered by
/// child) is also a valid ancestral sampling order.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorizedModel {
    variables: Vec<Variable>,
    root: Vec<f64>,
    links: Vec<Link>,
}

impl FactorizedModel {
    pub fn new(variables: Vec<Variable>, root: Vec<f64>, mut links: Vec<Link>) -> Result<Self> {
        if variables.is_empty() {
            return Err(Error::data("factorized model needs at least one variable"));
        }
        if let Some(v) = variables.iter().find(|v| v.cardinality == 0) {
            return Err(Error::data(format!("variable `{}` has no values", v.name)));
        }
        if root.len() != variables[0].cardinality {
            return Err(Error::Dimension {
                expected: variables[0].cardinality,
                actual: root.len(),
            });
        }
        if root.iter().any(|p| !p.is_finite() || *p < 0.0)
            || (root.iter().sum::<f64>() - 1.0).abs() > STOCHASTIC_TOL
        {
            return Err(Error::data("root marginal is not a distribution"));
        }
        links.sort_by_key(|l| l.child);
        if links.len() != variables.len() - 1 {
            return Err(Error::data(format!(
                "{} variables need {} links, got {}",
                variables.len(),
                variables.len() - 1,
                links.len()
            )));
        }
        for (i, link) in links.iter().enumerate() {
            let child = i + 1;
            if link.child != child {
                return Err(Error::data(format!(
                    "variable `{}` has no unique parent link",
                    variables.get(child).map_or("?", |v| v.name.as_str())
                )));
            }
            if link.parent >= link.child {
                return Err(Error::data(format!(
                    "link {} -> {} breaks the ancestral order (cycle or forward reference)",
                    link.parent, link.child
                )));
            }
            let (p, c) = (&variables[link.parent], &variables[link.child]);
            if link.table.rows() != p.cardinality || link.table.cols() != c.cardinality {
                return Err(Error::data(format!(
                    "table for {} -> {} is {}x{}, expected {}x{}",
                    p.name,
                    c.name,
                    link.table.rows(),
                    link.table.cols(),
                    p.cardinality,
                    c.cardinality
                )));
            }
            if !link.table.is_row_stochastic(STOCHASTIC_TOL) {
                return Err(Error::data(format!(
                    "table for {} -> {} is not row-stochastic",
                    p.name, c.name
                )));
            }
        }
        Ok(FactorizedModel {
            variables,
            root,
            links,
        })
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn root(&self) -> &[f64] {
        &self.root
    }

    /// Links in ancestral order.
    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    /// Marginal distribution of every variable, by forward propagation.
    pub fn marginals(&self) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = Vec::with_capacity(self.variables.len());
        out.push(self.root.clone());
        for link in &self.links {
            let parent = &out[link.parent];
            let mut m = vec![0.0; link.table.cols()];
            for (p, &mass) in parent.iter().enumerate() {
                if mass == 0.0 {
                    continue;
                }
                for (acc, &q) in m.iter_mut().zip(link.table.row(p)) {
                    *acc += mass * q;
                }
            }
            out.push(m);
        }
        out
    }
}

fn uniform(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

fn var(name: &str, cardinality: usize) -> Variable {
    Variable {
        name: name.to_string(),
        cardinality,
    }
}

/// Chain form of a trained topic model:
///
/// - LDA: document (uniform) -> topic (theta) -> word (phi)
/// - ATM: document (uniform) -> author (uniform over the document's authors)
///   -> topic (theta_author) -> word (phi)
/// - MMSGTM: input word (empirical frequency) -> topic (theta_word) ->
///   context word (phi)
pub fn as_factorized(model: &TopicModel, corpus: &Corpus) -> Result<FactorizedModel> {
    let d = corpus.num_docs();
    let w = corpus.num_words();
    match model {
        TopicModel::Lda(p) => {
            if p.num_docs() != d || p.num_words() != w {
                return Err(Error::data("LDA model does not match the corpus"));
            }
            let k = p.num_topics();
            FactorizedModel::new(
                vec![var("document", d), var("topic", k), var("word", w)],
                uniform(d),
                vec![
                    Link { parent: 0, child: 1, table: p.theta.clone() },
                    Link { parent: 1, child: 2, table: p.phi.clone() },
                ],
            )
        }
        TopicModel::Atm(p) => {
            let a = p.num_authors();
            let k = p.num_topics();
            if p.phi.cols() != w || corpus.num_authors() != a {
                return Err(Error::data("ATM model does not match the corpus"));
            }
            let mut doc_author = Matrix::zeros(d, a);
            for (i, doc) in corpus.documents.iter().enumerate() {
                let authors = doc
                    .authors
                    .as_deref()
                    .filter(|x| !x.is_empty())
                    .ok_or_else(|| Error::data(format!("document {i} has no authors")))?;
                for &author in authors {
                    doc_author.set(i, author, 1.0 / authors.len() as f64);
                }
            }
            FactorizedModel::new(
                vec![var("document", d), var("author", a), var("topic", k), var("word", w)],
                uniform(d),
                vec![
                    Link { parent: 0, child: 1, table: doc_author },
                    Link { parent: 1, child: 2, table: p.theta_author.clone() },
                    Link { parent: 2, child: 3, table: p.phi.clone() },
                ],
            )
        }
        TopicModel::Mmsgtm(p) => {
            if p.phi.cols() != w || p.theta_word.rows() != w {
                return Err(Error::data("MMSGTM model does not match the corpus"));
            }
            let counts = corpus.word_counts();
            let n = corpus.num_tokens() as f64;
            let root = counts.iter().map(|&c| c as f64 / n).collect();
            FactorizedModel::new(
                vec![var("input_word", w), var("topic", p.num_topics()), var("context_word", w)],
                root,
                vec![
                    Link { parent: 0, child: 1, table: p.theta_word.clone() },
                    Link { parent: 1, child: 2, table: p.phi.clone() },
                ],
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Document, Vocabulary};
    use crate::topic_models::{AtmParams, LdaParams};

    fn lda_toy() -> (LdaParams, Corpus) {
        let corpus = Corpus::from_token_ids(4, vec![vec![0, 1], vec![2], vec![3, 3, 1]]).unwrap();
        let theta = Matrix::from_rows(&[vec![0.7, 0.3], vec![0.1, 0.9], vec![0.5, 0.5]]).unwrap();
        let phi = Matrix::from_rows(&[vec![0.4, 0.3, 0.2, 0.1], vec![0.05, 0.15, 0.3, 0.5]]).unwrap();
        let params = LdaParams {
            theta,
            phi,
            z: vec![0, 1, 1, 0, 1, 1],
            doc_lengths: vec![2, 1, 3],
            alpha: 0.1,
            beta: 0.01,
        };
        (params, corpus)
    }

    #[test]
    fn lda_word_marginal_matches_enumeration() {
        let (params, corpus) = lda_toy();
        let model = as_factorized(&TopicModel::Lda(params.clone()), &corpus).unwrap();
        let marginals = model.marginals();
        for w in 0..4 {
            let mut expected = 0.0;
            for d in 0..3 {
                for k in 0..2 {
                    expected += (1.0 / 3.0) * params.theta.get(d, k) * params.phi.get(k, w);
                }
            }
            assert!((marginals[2][w] - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn single_topic_chain_collapses_to_phi() {
        let (mut params, corpus) = lda_toy();
        params.theta = Matrix::filled(3, 1, 1.0);
        params.phi = Matrix::from_rows(&[vec![0.1, 0.2, 0.3, 0.4]]).unwrap();
        let model = as_factorized(&TopicModel::Lda(params.clone()), &corpus).unwrap();
        assert_eq!(model.links().len(), 2);
        for (m, p) in model.marginals()[2].iter().zip(params.phi.row(0)) {
            assert!((m - p).abs() < 1e-15);
        }
    }

    #[test]
    fn atm_single_author_link_is_deterministic() {
        let docs = vec![
            Document::new(vec![0, 1]).with_authors(vec![1]),
            Document::new(vec![1]).with_authors(vec![0]),
            Document::new(vec![0]).with_authors(vec![0, 1]),
        ];
        let corpus =
            Corpus::new(Vocabulary::synthetic(2), docs, Some(vec!["x".into(), "y".into()]), None)
                .unwrap();
        let params = AtmParams {
            theta_author: Matrix::from_rows(&[vec![0.5, 0.5], vec![0.9, 0.1]]).unwrap(),
            phi: Matrix::from_rows(&[vec![0.5, 0.5], vec![0.2, 0.8]]).unwrap(),
            z: vec![0; 4],
            a: vec![1, 1, 0, 0],
            doc_lengths: vec![2, 1, 1],
            alpha: 0.1,
            beta: 0.01,
        };
        let model = as_factorized(&TopicModel::Atm(params), &corpus).unwrap();
        let doc_author = &model.links()[0].table;
        assert_eq!(doc_author.row(0), &[0.0, 1.0]);
        assert_eq!(doc_author.row(1), &[1.0, 0.0]);
        assert_eq!(doc_author.row(2), &[0.5, 0.5]);
        assert_eq!(model.variables().len(), 4);
    }

    #[test]
    fn rejects_cycles_and_bad_tables() {
        let vars = vec![var("a", 2), var("b", 2)];
        let table = Matrix::from_rows(&[vec![0.5, 0.5], vec![1.0, 0.0]]).unwrap();
        let cyclic = FactorizedModel::new(
            vars.clone(),
            uniform(2),
            vec![Link { parent: 1, child: 1, table: table.clone() }],
        );
        assert!(cyclic.is_err());
        let bad = Matrix::from_rows(&[vec![0.5, 0.6], vec![1.0, 0.0]]).unwrap();
        assert!(FactorizedModel::new(vars.clone(), uniform(2), vec![Link { parent: 0, child: 1, table: bad }]).is_err());
        assert!(FactorizedModel::new(vars.clone(), vec![0.2, 0.2], vec![]).is_err());
        assert!(FactorizedModel::new(vars, uniform(2), vec![Link { parent: 0, child: 1, table }]).is_ok());
    }
}
