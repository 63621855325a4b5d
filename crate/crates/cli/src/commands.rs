//! Subcommand implementations. Each returns the text for stdout and the
//! exit code; nothing here prints.

use std::fmt::Write;

use cohmm_core::equivalence::{check_continuous_with, CheckOptions, EquivalenceVerdict};
use cohmm_core::hmm::{
    finite_reduction, functional_decomposition, labelling_reduction, nonneg_reduction, validate, ContinuousHMM,
    Reduction,
};
use cohmm_core::linalg::RMatrix;
use cohmm_core::profile::linear_decompose;
use cohmm_sim::ModelSampler;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::model_file::{dirac_mixture, render_model, ModelFile};
use crate::{CliError, EXIT_DIFFERENT, EXIT_OK};

pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Outcome {
        Outcome { stdout, code: EXIT_OK }
    }
}

fn core_error(model: &ModelFile, e: cohmm_core::Error) -> CliError {
    match e {
        cohmm_core::Error::InvalidModel(diagnostics) => {
            CliError::Invalid(diagnostics.iter().map(|d| format!("{}: {d}", model.locate(d))).collect())
        }
        other => CliError::Internal(other.to_string()),
    }
}

/// Exact validation errors as a `CliError`, if any.
fn require_valid(model: &ModelFile) -> Result<(), CliError> {
    let errors: Vec<String> = cohmm_core::hmm::validate_with(&model.hmm, None)
        .iter()
        .filter(|d| d.is_error())
        .map(|d| format!("{}: {d}", model.locate(d)))
        .collect();
    if errors.is_empty() {
        Ok(())
    } else {
        Err(CliError::Invalid(errors))
    }
}

pub fn validate_cmd(model: &ModelFile) -> Outcome {
    let diagnostics = validate(&model.hmm);
    let mut out = String::new();
    for d in &diagnostics {
        writeln!(out, "{}: {d}", model.locate(d)).unwrap();
    }
    let errors = diagnostics.iter().filter(|d| d.is_error()).count();
    if errors == 0 {
        writeln!(
            out,
            "ok: {} states, {} transitions, {} distributions",
            model.hmm.num_states(),
            model.hmm.transitions().count(),
            model.distributions.len()
        )
        .unwrap();
    }
    Outcome {
        stdout: out,
        code: if errors == 0 { EXIT_OK } else { crate::EXIT_INVALID },
    }
}

/// Machine-readable verdict. Field order is the output order.
#[derive(Serialize)]
struct VerdictJson<'a> {
    equivalent: bool,
    method: &'a str,
    witness: Option<&'a [String]>,
    value: Option<String>,
    basis_dimension: usize,
}

pub fn check_cmd(model: &ModelFile, d1: &str, d2: &str, fast_path: bool, json: bool) -> Result<Outcome, CliError> {
    let (pi1, pi2) = (model.distribution(d1)?, model.distribution(d2)?);
    let v = check_continuous_with(&model.hmm, &pi1, &pi2, CheckOptions { fast_path })
        .map_err(|e| core_error(model, e))?;
    let stdout = if json { verdict_json(&v) } else { verdict_text(&v, d1, d2) };
    Ok(Outcome {
        stdout,
        code: if v.equivalent { EXIT_OK } else { EXIT_DIFFERENT },
    })
}

fn verdict_json(v: &EquivalenceVerdict) -> String {
    let j = VerdictJson {
        equivalent: v.equivalent,
        method: v.method.as_str(),
        witness: v.witness.as_ref().map(|w| w.word.as_slice()),
        value: v.witness.as_ref().map(|w| w.value.to_string()),
        basis_dimension: v.basis_dimension,
    };
    serde_json::to_string(&j).expect("verdict serializes") + "\n"
}

fn verdict_text(v: &EquivalenceVerdict, d1: &str, d2: &str) -> String {
    let mut out = String::new();
    let head = if v.equivalent { "equivalent" } else { "not equivalent" };
    writeln!(
        out,
        "{head}: {d1} vs {d2} (method {}, basis dimension {})",
        v.method, v.basis_dimension
    )
    .unwrap();
    if let Some(w) = &v.witness {
        let word = if w.word.is_empty() { "(empty word)".to_string() } else { w.word.join(" ") };
        writeln!(out, "witness: {word}").unwrap();
        writeln!(out, "difference: {}", w.value).unwrap();
        let mut used: Vec<usize> = w.letters.clone();
        used.sort_unstable();
        used.dedup();
        for k in used {
            if let Some(p) = v.letter_profiles.get(k) {
                writeln!(out, "  {} = {p}", w.word[w.letters.iter().position(|&l| l == k).unwrap()]).unwrap();
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ReduceMethod {
    /// Non-negative reduction when it applies, else the theta reduction.
    Auto,
    Labelling,
    Nonneg,
    Theta,
}

/// The finite reduction re-encoded as a continuous model over point masses.
pub fn reduction_as_model(h: &ContinuousHMM, r: &Reduction) -> ContinuousHMM {
    let n = h.num_states();
    let letters = r.hmm.alphabet();
    let mut out = ContinuousHMM::new(h.states().to_vec());
    for i in 0..n {
        for j in 0..n {
            let weights: Vec<_> = r
                .hmm
                .matrices()
                .iter()
                .zip(letters)
                .map(|(m, a)| (m[(i, j)].clone(), a.as_str()))
                .collect();
            if let Some((p, profile)) = dirac_mixture(&weights) {
                out.set(i, j, p, profile);
            }
        }
    }
    out
}

pub fn reduce_cmd(model: &ModelFile, method: ReduceMethod) -> Result<Outcome, CliError> {
    require_valid(model)?;
    let h = &model.hmm;
    let reduction = match method {
        ReduceMethod::Labelling => labelling_reduction(h),
        ReduceMethod::Theta => finite_reduction(&functional_decomposition(h)),
        ReduceMethod::Nonneg => nonneg_reduction(&functional_decomposition(h)).ok_or_else(|| {
            CliError::Usage("nonneg reduction does not apply: a decomposition matrix has a negative entry".into())
        })?,
        ReduceMethod::Auto => {
            let fd = functional_decomposition(h);
            nonneg_reduction(&fd).unwrap_or_else(|| finite_reduction(&fd))
        }
    };
    let mut out = String::new();
    writeln!(out, "# letters").unwrap();
    for (a, p) in reduction.hmm.alphabet().iter().zip(&reduction.letter_profiles) {
        writeln!(out, "#   {a} = {p}").unwrap();
    }
    out.push('\n');
    out.push_str(&render_model(&reduction_as_model(h, &reduction), &model.distributions));
    Ok(Outcome::ok(out))
}

fn matrix_text(out: &mut String, names: &[String], m: &RMatrix) {
    let width = names.iter().map(String::len).max().unwrap_or(0);
    for (name, row) in names.iter().zip(0..m.rows()) {
        let cells: Vec<String> = m.row(row).iter().map(ToString::to_string).collect();
        writeln!(out, "    {name:width$}  {}", cells.join(" ")).unwrap();
    }
}

pub fn decompose_cmd(model: &ModelFile) -> Result<Outcome, CliError> {
    require_valid(model)?;
    let h = &model.hmm;
    let (profiles, _) = h.distinct_profiles();
    let d = linear_decompose(&profiles);
    let fd = functional_decomposition(h);
    let mut out = String::new();
    writeln!(out, "basis").unwrap();
    for (k, p) in fd.basis_profiles().iter().enumerate() {
        writeln!(out, "  f{} = {p}", k + 1).unwrap();
    }
    writeln!(out, "coefficients").unwrap();
    for (i, p) in profiles.iter().enumerate() {
        let mut rhs = String::new();
        for k in 0..d.basis_indices.len() {
            let c = &d.coefficients[(i, k)];
            if c.is_zero() {
                continue;
            }
            let sign = match (rhs.is_empty(), c.is_negative()) {
                (true, false) => "",
                (true, true) => "-",
                (false, false) => " + ",
                (false, true) => " - ",
            };
            let magnitude = c.abs();
            let factor = if magnitude.is_one() { String::new() } else { format!("{magnitude}*") };
            write!(rhs, "{sign}{factor}f{}", k + 1).unwrap();
        }
        writeln!(out, "  {p} = {rhs}").unwrap();
    }
    writeln!(out, "matrices").unwrap();
    for (k, m) in fd.matrices().iter().enumerate() {
        writeln!(out, "  P{}", k + 1).unwrap();
        matrix_text(&mut out, h.states(), m);
    }
    Ok(Outcome::ok(out))
}

pub fn sample_cmd(model: &ModelFile, dist: &str, n: usize, count: usize, seed: u64) -> Result<Outcome, CliError> {
    let pi = model.distribution(dist)?;
    let sampler = ModelSampler::new(&model.hmm).map_err(|e| match e {
        cohmm_sim::Error::Model(inner) => core_error(model, inner),
        refused => CliError::Usage(refused.to_string()),
    })?;
    let mut out = String::new();
    for t in sampler.traces(&pi, n, count, seed) {
        writeln!(out, "{t}").unwrap();
    }
    Ok(Outcome::ok(out))
}
