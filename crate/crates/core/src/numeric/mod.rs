//! Grid evaluation of mixed norms and of both operators, with the probe
//! families used to corroborate verdicts.

pub mod families;
pub mod grid;
pub mod probe;
pub mod quad;
pub mod tail;

pub use families::{dilation_family, logpower_counterexample, translation_limit_probe, LogPower};
pub use grid::{minkowski_swap_check, mixed_norm, Axis, GridFunction, MinkowskiCheck};
pub use probe::{ratio_probe, Family, ProbeOptions, ProbeReport, ProbeTarget};
pub use quad::{eval_J, eval_T, Evaluation, Method, QuadratureSettings};
pub use tail::{tail_scaling_check, TailRow};

/// Rounds to 12 significant digits, the precision reports carry.
pub fn round_sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

pub(crate) fn ser_sig12<S: serde::Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(round_sig12(*v))
}

pub(crate) fn ser_sig12_opt<S: serde::Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_f64(round_sig12(*x)),
        None => s.serialize_none(),
    }
}
