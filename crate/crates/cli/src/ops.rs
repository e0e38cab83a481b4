//! File-based operations: load, compute, write.

use std::path::{Path, PathBuf};

use zpla::factor::lqup;
use zpla::highlevel::{inv, ldlt_factor, nullspace_right, pinv_rank_deficient};
use zpla::matmul::fgemm_mat;
use zpla::trsm::{trsm, TrsmVariant};
use zpla::{Element, Instr, Matrix, MulConfig, Repr};

use crate::{parse_levels, CliError};

fn load<E: Element>(path: &Path, repr: Repr, gamma: u32) -> Result<Matrix<E>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Matrix::from_text(&text, repr, gamma).map_err(CliError::from)
}

fn store<E: Element>(m: &Matrix<E>, out: Option<&Path>) -> Result<(), CliError> {
    let text = m.to_text();
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn report_instrumentation(mode: &str, instr: &Instr) {
    match mode {
        "off" => {}
        "opcount" | "trace" => {
            eprintln!(
                "mults={} adds={} reductions={} divisions={}",
                instr.ops.mults, instr.ops.adds, instr.ops.reductions, instr.ops.divisions
            );
            if mode == "trace" {
                eprintln!("max_intermediate={}", instr.max_abs);
            }
        }
        other => eprintln!("warning: unknown --instrument {other:?}, ignoring"),
    }
}

#[allow(clippy::too_many_arguments)]
pub fn run_op(
    operation: &str,
    inputs: &[PathBuf],
    out: Option<&Path>,
    repr: Repr,
    gamma: u32,
    levels: &str,
    instrument: &str,
    variant: &str,
) -> Result<(), CliError> {
    if gamma <= f64::NATIVE_GAMMA {
        run_op_typed::<f64>(operation, inputs, out, repr, gamma, levels, instrument, variant)
    } else {
        run_op_typed::<i64>(operation, inputs, out, repr, gamma, levels, instrument, variant)
    }
}

#[allow(clippy::too_many_arguments)]
fn run_op_typed<E: Element>(
    operation: &str,
    inputs: &[PathBuf],
    out: Option<&Path>,
    repr: Repr,
    gamma: u32,
    levels: &str,
    instrument: &str,
    variant: &str,
) -> Result<(), CliError> {
    let want_inputs = match operation {
        "mul" | "trsm" => 2,
        "lqup" | "rank" | "det" | "inv" | "nullspace" | "pinv" | "ldlt" => 1,
        other => return Err(CliError::Usage(format!("unknown operation {other:?}"))),
    };
    if inputs.len() != want_inputs {
        return Err(CliError::Usage(format!(
            "operation {operation:?} takes {want_inputs} input file(s), got {}",
            inputs.len()
        )));
    }
    let cfg = MulConfig {
        levels: parse_levels(levels)?,
        ..MulConfig::default()
    };
    let mut instr = if instrument == "trace" {
        Instr::traced()
    } else {
        Instr::new()
    };

    let a: Matrix<E> = load(&inputs[0], repr, gamma)?;
    let f = a.field();

    match operation {
        "mul" => {
            let b: Matrix<E> = load(&inputs[1], repr, gamma)?;
            if b.field() != f {
                return Err(CliError::Usage("input fields differ".into()));
            }
            if a.cols() != b.rows() {
                return Err(CliError::Usage(format!(
                    "inner dimensions differ: {}×{} by {}×{}",
                    a.rows(),
                    a.cols(),
                    b.rows(),
                    b.cols()
                )));
            }
            let mut c = Matrix::zeros(a.rows(), b.cols(), f);
            fgemm_mat(E::one(), &a, &b, E::zero(), &mut c, &cfg, &mut instr)?;
            store(&c, out)?;
        }
        "trsm" => {
            let b: Matrix<E> = load(&inputs[1], repr, gamma)?;
            if b.field() != f {
                return Err(CliError::Usage("input fields differ".into()));
            }
            if a.rows() != a.cols() || a.rows() != b.rows() {
                return Err(CliError::Usage("trsm needs square A and matching B".into()));
            }
            let v = match variant {
                "pure-recursive" => TrsmVariant::PureRecursive,
                "delayed-base" => TrsmVariant::DelayedBase,
                "double-cascade" => TrsmVariant::DoubleCascade,
                other => {
                    return Err(CliError::Usage(format!("unknown trsm variant {other:?}")))
                }
            };
            let mut x = b;
            trsm(v, &f, a.as_ref(), x.as_mut(), &cfg, &mut instr)?;
            store(&x, out)?;
        }
        "lqup" => {
            let factors = lqup(a, &cfg, &mut instr);
            println!("rank={}", factors.rank());
            let fmt = |img: &[usize]| {
                img.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
            };
            println!("q={}", fmt(factors.q().image()));
            println!("p={}", fmt(factors.p().image()));
            if out.is_some() {
                store(&factors.expand_u(), out)?;
            }
        }
        "rank" => {
            let factors = lqup(a, &cfg, &mut instr);
            println!("{}", factors.rank());
        }
        "det" => {
            if a.rows() != a.cols() {
                return Err(CliError::Usage("determinant needs a square matrix".into()));
            }
            let d = zpla::factor::det(&a, &cfg, &mut instr);
            let p = f.p() as i64;
            println!("{}", d.to_i64().rem_euclid(p));
            if out.is_some() {
                let m: Matrix<E> = Matrix::from_rows(&[vec![d.to_i64()]], f);
                store(&m, out)?;
            }
        }
        "inv" => {
            if a.rows() != a.cols() {
                return Err(CliError::Usage("inverse needs a square matrix".into()));
            }
            let x = inv(&a, &cfg, &mut instr)?;
            store(&x, out)?;
        }
        "nullspace" => {
            let basis = nullspace_right(&a, &cfg, &mut instr);
            println!("columns={}", basis.cols());
            store(&basis, out)?;
        }
        "pinv" => {
            let x = pinv_rank_deficient(&a, &cfg, &mut instr)?;
            store(&x, out)?;
        }
        "ldlt" => {
            let (l, d) = ldlt_factor(&a, &cfg, &mut instr)?;
            let p = f.p() as i64;
            let dstr = d
                .iter()
                .map(|v| v.to_i64().rem_euclid(p).to_string())
                .collect::<Vec<_>>()
                .join(" ");
            println!("d={dstr}");
            store(&l, out)?;
        }
        _ => unreachable!(),
    }
    report_instrumentation(instrument, &instr);
    Ok(())
}
