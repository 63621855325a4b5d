//! Small worked models, used by tests, benchmarks and documentation.

use crate::hmm::{ContinuousHMM, FiniteHMM};
use crate::linalg::{int, rat, RMatrix, Rational};
use crate::profile::{parse_profile, ProfileExpr};

fn p(text: &str) -> ProfileExpr {
    parse_profile(text).expect("built-in profile parses")
}

fn states(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn uniform(lo: &Rational, hi: &Rational) -> ProfileExpr {
    ProfileExpr::uniform(lo.clone(), hi.clone()).expect("lo < hi")
}

/// Two states, two letters:
/// `M(a) = [[1/8, 1/2], [1/3, 0]]`, `M(b) = [[3/8, 0], [0, 2/3]]`.
pub fn intro_finite() -> FiniteHMM {
    let m = |rows: [[Rational; 2]; 2]| RMatrix::from_rows(rows.into_iter().map(Vec::from).collect()).expect("square");
    FiniteHMM::new(
        states(&["q1", "q2"]),
        states(&["a", "b"]),
        vec![
            m([[rat(1, 8), rat(1, 2)], [rat(1, 3), int(0)]]),
            m([[rat(3, 8), int(0)], [int(0), rat(2, 3)]]),
        ],
    )
    .expect("valid")
}

/// Exponential and uniform densities on two states.
pub fn exp_uniform() -> ContinuousHMM {
    let mut h = ContinuousHMM::new(states(&["q1", "q2"]));
    h.set(0, 0, rat(1, 2), p("Exp(2)"));
    h.set(0, 1, rat(1, 2), p("U(-1,0)"));
    h.set(1, 0, rat(1, 3), p("U(0,2)"));
    h.set(1, 1, rat(2, 3), p("Exp(1)"));
    h
}

/// `q1` loops on a Gaussian mixture; `q2` and `q3` emit its components
/// separately with the mixture weights.
pub fn gaussian_mixture() -> ContinuousHMM {
    let mut h = ContinuousHMM::new(states(&["q1", "q2", "q3"]));
    h.set(0, 0, int(1), p("2/3*N(0,1) + 1/3*N(1,2)"));
    h.set(1, 1, rat(2, 3), p("N(0,1)"));
    h.set(1, 2, rat(1, 3), p("N(1,2)"));
    h.set(2, 1, rat(2, 3), p("N(0,1)"));
    h.set(2, 2, rat(1, 3), p("N(1,2)"));
    h
}

/// `q1` splits into `2x` and `2(1-x)` on `[0,1)`, whose average is the
/// uniform density `q4` emits. `q1` and `q4` are equivalent even though
/// every profile is syntactically distinct.
pub fn mixture_counterexample() -> ContinuousHMM {
    let mut h = ContinuousHMM::new(states(&["q1", "q2", "q3", "q4"]));
    h.set(0, 1, rat(1, 2), p("2*Mono(1,0,1)"));
    h.set(0, 2, rat(1, 2), p("2*Mono(0,0,1) - 2*Mono(1,0,1)"));
    h.set(1, 1, int(1), p("U(0,2)"));
    h.set(2, 1, int(1), p("U(0,2)"));
    h.set(3, 1, int(1), p("U(0,1)"));
    h
}

/// Two states whose four uniform-type profiles span a 3-dimensional space,
/// with a negative coefficient in the decomposition.
pub fn two_state_uniforms() -> ContinuousHMM {
    let mut h = ContinuousHMM::new(states(&["q1", "q2"]));
    h.set(0, 0, rat(1, 2), p("U(0,2)"));
    h.set(0, 1, rat(1, 2), p("U(1,3)"));
    h.set(1, 0, rat(1, 2), p("U(2,4)"));
    h.set(1, 1, rat(1, 2), p("1/2*Mono(0,0,1) + 1/2*Mono(0,3,4)"));
    h
}

/// Execution-time model for two keys. For key `i`, `s_i` emits the
/// function name (`a` w.p. 1/3, `b` w.p. 2/3) and the following step emits
/// the execution time, uniform on `[m - 1/2, m + 1/2)`.
///
/// State order: `s1, t1a, t1b, s2, t2a, t2b`.
pub fn timing(key1: (Rational, Rational), key2: (Rational, Rational)) -> ContinuousHMM {
    let half = rat(1, 2);
    let window = |m: &Rational| uniform(&(m - &half), &(m + &half));
    timing_with(
        [(window(&key1.0), window(&key1.1)), (window(&key2.0), window(&key2.1))],
    )
}

/// The timing model with every execution time replaced by the padded
/// density `U(w + u, w + 2u)`.
pub fn timing_padded(w: Rational, u: Rational) -> ContinuousHMM {
    let lo = &w + &u;
    let hi = &lo + &u;
    let pad = uniform(&lo, &hi);
    timing_with([(pad.clone(), pad.clone()), (pad.clone(), pad)])
}

fn timing_with(times: [(ProfileExpr, ProfileExpr); 2]) -> ContinuousHMM {
    let mut h = ContinuousHMM::new(states(&["s1", "t1a", "t1b", "s2", "t2a", "t2b"]));
    for (key, (ta, tb)) in times.into_iter().enumerate() {
        let s = 3 * key;
        h.set(s, s + 1, rat(1, 3), p("Dirac(a)"));
        h.set(s, s + 2, rat(2, 3), p("Dirac(b)"));
        h.set(s + 1, s, int(1), ta);
        h.set(s + 2, s, int(1), tb);
    }
    h
}
