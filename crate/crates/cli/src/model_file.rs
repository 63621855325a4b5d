//! TOML model files.
//!
//! ```toml
//! states = ["q1", "q2"]
//!
//! [[transitions]]
//! from = "q1"
//! to = "q2"
//! prob = "1/2"          # rational string: int or int/int
//! density = "U(-1,0)"   # profile expression
//!
//! [distributions.start]
//! q1 = "1"
//! ```
//!
//! Every number is a quoted rational; TOML integers and floats are
//! rejected so that no value passes through binary floating point.
//! Omitted entries of a distribution are zero.

use std::collections::{BTreeMap, HashMap};
use std::ops::Range;

use cohmm_core::hmm::{ContinuousHMM, Diagnostic, InitialDistribution};
use cohmm_core::linalg::{int, parse_rational, Rational};
use cohmm_core::profile::{parse_profile, ProfileExpr};
use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::CliError;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    states: Vec<Spanned<String>>,
    #[serde(default)]
    transitions: Vec<Spanned<RawTransition>>,
    #[serde(default)]
    distributions: BTreeMap<String, Spanned<BTreeMap<String, Spanned<String>>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTransition {
    from: Spanned<String>,
    to: Spanned<String>,
    prob: Spanned<String>,
    density: Spanned<String>,
}

/// A parsed model together with the source positions needed to report
/// problems found later.
#[derive(Clone, Debug)]
pub struct ModelFile {
    pub path: String,
    pub hmm: ContinuousHMM,
    pub distributions: BTreeMap<String, InitialDistribution>,
    text: String,
    /// Byte span of each transition table, keyed by `(from, to)`.
    spans: HashMap<(usize, usize), Range<usize>>,
}

/// 1-based line and column of a byte offset.
pub fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn input_error(path: &str, text: &str, offset: usize, message: impl Into<String>) -> CliError {
    let (line, column) = line_col(text, offset);
    CliError::Input {
        path: path.to_string(),
        line,
        column,
        message: message.into(),
    }
}

impl ModelFile {
    pub fn parse(path: &str, text: &str) -> Result<ModelFile, CliError> {
        let raw: RawModel = toml::from_str(text).map_err(|e| {
            let offset = e.span().map_or(0, |s| s.start);
            input_error(path, text, offset, e.message().trim())
        })?;
        let err = |offset: usize, message: String| input_error(path, text, offset, message);

        let mut names: Vec<String> = Vec::with_capacity(raw.states.len());
        for s in &raw.states {
            if names.contains(s.get_ref()) {
                return Err(err(s.span().start, format!("duplicate state `{}`", s.get_ref())));
            }
            names.push(s.get_ref().clone());
        }
        if names.is_empty() {
            return Err(err(0, "model has no states".into()));
        }
        let state = |s: &Spanned<String>| {
            names
                .iter()
                .position(|n| n == s.get_ref())
                .ok_or_else(|| err(s.span().start, format!("unknown state `{}`", s.get_ref())))
        };
        // Offsets inside a quoted string value start one byte after its span.
        let rational = |s: &Spanned<String>| {
            parse_rational(s.get_ref()).map_err(|e| {
                let message = match e {
                    cohmm_core::Error::Parse { message, .. } => message,
                    other => other.to_string(),
                };
                err(s.span().start + 1, message)
            })
        };

        let mut hmm = ContinuousHMM::new(names.clone());
        let mut spans = HashMap::new();
        for t in &raw.transitions {
            let r = t.get_ref();
            let (i, j) = (state(&r.from)?, state(&r.to)?);
            if spans.contains_key(&(i, j)) {
                return Err(err(
                    r.from.span().start,
                    format!("duplicate transition {} -> {}", names[i], names[j]),
                ));
            }
            let prob = rational(&r.prob)?;
            let density = parse_profile(r.density.get_ref()).map_err(|e| match e {
                cohmm_core::Error::Parse { column, message } => {
                    err(r.density.span().start + column.max(1), message)
                }
                other => err(r.density.span().start + 1, other.to_string()),
            })?;
            hmm.set(i, j, prob, density);
            spans.insert((i, j), t.span());
        }

        let mut distributions = BTreeMap::new();
        for (name, table) in &raw.distributions {
            let mut weights = vec![int(0); names.len()];
            for (s, w) in table.get_ref() {
                let i = names
                    .iter()
                    .position(|n| n == s)
                    .ok_or_else(|| err(table.span().start, format!("distribution `{name}`: unknown state `{s}`")))?;
                weights[i] = rational(w)?;
            }
            let pi = InitialDistribution::new(weights)
                .map_err(|e| err(table.span().start, format!("distribution `{name}`: {e}")))?;
            distributions.insert(name.clone(), pi);
        }

        Ok(ModelFile {
            path: path.to_string(),
            hmm,
            distributions,
            text: text.to_string(),
            spans,
        })
    }

    pub fn read(path: &str) -> Result<ModelFile, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.to_string(),
            message: e.to_string(),
        })?;
        ModelFile::parse(path, &text)
    }

    /// `path:line:col` prefix for a diagnostic, pointing at the transition
    /// it names, or at the first transition leaving the state it names.
    pub fn locate(&self, d: &Diagnostic) -> String {
        let offset = d
            .entry
            .and_then(|e| self.spans.get(&e))
            .or_else(|| {
                let state = self
                    .hmm
                    .states()
                    .iter()
                    .position(|s| d.message.starts_with(&format!("state {s}:")))?;
                self.spans
                    .iter()
                    .filter(|((i, _), _)| *i == state)
                    .map(|(_, s)| s)
                    .min_by_key(|s| s.start)
            })
            .map_or(0, |s| s.start);
        let (line, column) = line_col(&self.text, offset);
        format!("{}:{line}:{column}", self.path)
    }

    /// A named distribution, or a state name meaning the point mass on it.
    pub fn distribution(&self, name: &str) -> Result<InitialDistribution, CliError> {
        if let Some(pi) = self.distributions.get(name) {
            return Ok(pi.clone());
        }
        match self.hmm.state_index(name) {
            Some(i) => Ok(InitialDistribution::dirac(self.hmm.num_states(), i)),
            None => Err(CliError::Usage(format!(
                "`{name}` is neither a distribution nor a state of {}",
                self.path
            ))),
        }
    }
}

#[derive(Serialize)]
struct OutTransition {
    from: String,
    to: String,
    prob: String,
    density: String,
}

#[derive(Serialize)]
struct OutModel {
    states: Vec<String>,
    transitions: Vec<OutTransition>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    distributions: BTreeMap<String, BTreeMap<String, String>>,
}

/// Renders a model in the file format. Distributions list non-zero
/// weights only.
pub fn render_model(h: &ContinuousHMM, distributions: &BTreeMap<String, InitialDistribution>) -> String {
    let names = h.states();
    let out = OutModel {
        states: names.to_vec(),
        transitions: h
            .transitions()
            .map(|(i, j, t)| OutTransition {
                from: names[i].clone(),
                to: names[j].clone(),
                prob: t.prob.to_string(),
                density: t.profile.to_string(),
            })
            .collect(),
        distributions: distributions
            .iter()
            .map(|(name, pi)| {
                let weights = pi
                    .weights()
                    .iter()
                    .zip(names)
                    .filter(|(w, _)| **w != int(0))
                    .map(|(w, s)| (s.clone(), w.to_string()))
                    .collect();
                (name.clone(), weights)
            })
            .collect(),
    };
    toml::to_string(&out).expect("model serializes")
}

/// `sum_k (m_k / p) Dirac(letter_k)` with `p = sum_k m_k`, or `None` when
/// every `m_k` is zero.
pub fn dirac_mixture(weights: &[(Rational, &str)]) -> Option<(Rational, ProfileExpr)> {
    let p: Rational = weights.iter().map(|(w, _)| w).sum();
    if p == int(0) {
        return None;
    }
    let mut profile = ProfileExpr::new(Vec::new());
    for (w, letter) in weights {
        if *w != int(0) {
            let atom = ProfileExpr::atom(cohmm_core::Atom::discrete(*letter).expect("letter names are identifiers"));
            profile = profile.add(&atom.scale(&(w / &p)));
        }
    }
    Some((p, profile))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"
states = ["a", "b"]

[[transitions]]
from = "a"
to = "b"
prob = "1"
density = "U(0,1)"

[[transitions]]
from = "b"
to = "a"
prob = "1"
density = "Exp(2)"

[distributions.mix]
a = "1/3"
b = "2/3"
"#;

    #[test]
    fn parses_states_transitions_distributions() {
        let m = ModelFile::parse("m.toml", SMALL).unwrap();
        assert_eq!(m.hmm.num_states(), 2);
        assert_eq!(m.hmm.transitions().count(), 2);
        assert_eq!(m.distributions["mix"].weights()[1], cohmm_core::linalg::rat(2, 3));
        assert_eq!(m.distribution("b").unwrap(), InitialDistribution::dirac(2, 1));
        assert!(m.distribution("c").is_err());
    }

    #[test]
    fn line_col_counts_from_one() {
        assert_eq!(line_col("ab\ncd", 0), (1, 1));
        assert_eq!(line_col("ab\ncd", 4), (2, 2));
    }

    fn error_at(text: &str) -> (usize, usize, String) {
        match ModelFile::parse("m.toml", text).unwrap_err() {
            CliError::Input { line, column, message, .. } => (line, column, message),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn decimal_probability_is_rejected_with_position() {
        let (line, column, message) = error_at(&SMALL.replacen("prob = \"1\"", "prob = \"0.5\"", 1));
        assert_eq!((line, column), (7, 9));
        assert!(message.contains("0.5"), "{message}");
    }

    #[test]
    fn float_literal_is_rejected() {
        let (line, _, _) = error_at(&SMALL.replacen("prob = \"1\"", "prob = 0.5", 1));
        assert_eq!(line, 7);
    }

    #[test]
    fn density_errors_point_into_the_string() {
        let (line, column, _) = error_at(&SMALL.replacen("U(0,1)", "U(0,1", 1));
        assert_eq!(line, 8);
        // `density = "` is 11 characters; the error is after the 5th character.
        assert_eq!(column, 11 + 6);
    }

    #[test]
    fn unknown_state_and_duplicates_are_rejected() {
        assert_eq!(error_at(&SMALL.replacen("to = \"b\"", "to = \"c\"", 1)).0, 6);
        let dup = format!("{SMALL}\n[[transitions]]\nfrom = \"a\"\nto = \"b\"\nprob = \"1\"\ndensity = \"U(0,1)\"\n");
        assert!(error_at(&dup).2.contains("duplicate"));
    }

    #[test]
    fn render_round_trips() {
        let m = ModelFile::parse("m.toml", SMALL).unwrap();
        let text = render_model(&m.hmm, &m.distributions);
        let again = ModelFile::parse("again.toml", &text).unwrap();
        assert_eq!(again.hmm, m.hmm);
        assert_eq!(again.distributions, m.distributions);
    }
}
