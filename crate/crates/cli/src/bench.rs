//! Benchmark harness and switch-order tuning.
//!
//! Inputs are generated from the --seed by the library's SplitMix64
//! generator, so operation counts (and results) are identical across
//! machines; wall-clock columns are informational only.

use std::time::Instant;

use zpla::factor::{det, lqup, rank};
use zpla::highlevel::{
    aat, inv, ldlt_factor, ltl, nullspace_right, pinv_rank_deficient, sym_aat, sym_inv, trinv,
    trmm, trtr_ul, trtr_uu, MulSide, Uplo,
};
use zpla::matmul::fgemm_mat;
use zpla::oracle::{random_matrix, random_nonsingular, random_symmetric, random_triangular};
use zpla::trsm::{trsm, TrsmVariant};
use zpla::{Instr, Levels, Matrix, MulConfig, PrimeField, Repr, Rng64};

use crate::{parse_levels, CliError};

pub const CSV_HEADER: &str = "operation,m,k,n,p,repr,levels,seconds,mfops,opcount,ratio_to_fgemm";

struct Cell {
    operation: String,
    n: usize,
    p: u64,
    repr: Repr,
    levels_used: u32,
    seconds: f64,
    opcount: u64,
    fgemm_opcount: Option<u64>,
}

impl Cell {
    fn to_csv(&self) -> String {
        let mfops = self.opcount as f64 / self.seconds / 1e6;
        let ratio = match self.fgemm_opcount {
            Some(base) if base > 0 => format!("{:.6}", self.opcount as f64 / base as f64),
            _ => String::new(),
        };
        format!(
            "{},{},{},{},{},{},{},{:.6},{:.2},{},{}",
            self.operation,
            self.n,
            self.n,
            self.n,
            self.p,
            self.repr.name(),
            self.levels_used,
            self.seconds,
            mfops,
            self.opcount,
            ratio
        )
    }
}

/// One benchmark cell: seeded inputs, min wall time over `reps` runs,
/// deterministic operation counts from a single instrumented pass.
fn run_cell(
    operation: &str,
    n: usize,
    f: PrimeField,
    cfg: &MulConfig,
    reps: u32,
    seed: u64,
) -> Result<Cell, CliError> {
    // one deterministic stream per (op, size)
    let cell_seed = seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ operation.len() as u64;
    let mut rng = Rng64::new(cell_seed);

    // inputs prepared once, outside the timed region
    let dense: Matrix<f64> = random_matrix(n, n, f, &mut rng);
    let dense2: Matrix<f64> = random_matrix(n, n, f, &mut rng);
    let upper: Matrix<f64> = random_triangular(n, true, false, f, &mut rng);
    let lower: Matrix<f64> = random_triangular(n, false, false, f, &mut rng);
    let unit_lower: Matrix<f64> = random_triangular(n, false, true, f, &mut rng);
    let dvec: Vec<f64> = (0..n)
        .map(|_| f.reduce(rng.range(1, f.p() - 1) as f64))
        .collect();
    let nonsing: Matrix<f64> = if operation == "inv" {
        random_nonsingular(n, f, &mut rng)
    } else {
        Matrix::zeros(1, 1, f)
    };
    let sym: Matrix<f64> = if operation == "sym_aat" {
        random_symmetric(n, f, &mut rng)
    } else {
        Matrix::zeros(1, 1, f)
    };
    let spd: Matrix<f64> = if operation == "ldlt" || operation == "sym_inv" {
        ltl(&f, unit_lower.as_ref(), &dvec, cfg, &mut Instr::new())
    } else {
        Matrix::zeros(1, 1, f)
    };

    let mut best = f64::INFINITY;
    let mut opcount = 0u64;
    let mut needs_ratio = true;
    for rep in 0..reps.max(1) {
        let mut instr = Instr::new();
        let start = Instant::now();
        match operation {
            "mul" => {
                let mut c = Matrix::zeros(n, n, f);
                fgemm_mat(1.0, &dense, &dense2, 0.0, &mut c, cfg, &mut instr)?;
                needs_ratio = false;
            }
            "trsm" => {
                let mut x = dense.clone();
                trsm(
                    TrsmVariant::DoubleCascade,
                    &f,
                    upper.as_ref(),
                    x.as_mut(),
                    cfg,
                    &mut instr,
                )?;
            }
            "lqup" => {
                lqup(dense.clone(), cfg, &mut instr);
            }
            "rank" => {
                rank(&dense, cfg, &mut instr);
            }
            "det" => {
                det(&dense, cfg, &mut instr);
            }
            "inv" => {
                inv(&nonsing, cfg, &mut instr)?;
            }
            "trinv" => {
                trinv(&f, Uplo::Upper, upper.as_ref(), cfg, &mut instr)?;
            }
            "trmm" => {
                let mut x = dense.clone();
                trmm(&f, MulSide::Left, Uplo::Upper, upper.as_ref(), x.as_mut(), cfg, &mut instr);
            }
            "trtr_ul" => {
                trtr_ul(&f, upper.as_ref(), lower.as_ref(), cfg, &mut instr);
            }
            "trtr_uu" => {
                trtr_uu(&f, upper.as_ref(), upper.as_ref(), cfg, &mut instr);
            }
            "aat" => {
                aat(&f, dense.as_ref(), None, cfg, &mut instr);
            }
            "sym_aat" => {
                sym_aat(&sym, cfg, &mut instr)?;
            }
            "ltl" => {
                ltl(&f, unit_lower.as_ref(), &dvec, cfg, &mut instr);
            }
            "ldlt" => {
                ldlt_factor(&spd, cfg, &mut instr)?;
            }
            "sym_inv" => {
                sym_inv(&spd, cfg, &mut instr)?;
            }
            "nullspace" => {
                nullspace_right(&dense, cfg, &mut instr);
            }
            "pinv" => {
                pinv_rank_deficient(&dense, cfg, &mut instr)?;
            }
            other => return Err(CliError::Usage(format!("unknown operation {other:?}"))),
        }
        let secs = start.elapsed().as_secs_f64();
        best = best.min(secs);
        if rep == 0 {
            opcount = instr.ops.muladds();
        }
    }

    let fgemm_opcount = if needs_ratio {
        let mut instr = Instr::new();
        let mut c = Matrix::zeros(n, n, f);
        fgemm_mat(1.0, &dense, &dense2, 0.0, &mut c, cfg, &mut instr)?;
        Some(instr.ops.muladds())
    } else {
        None
    };

    let levels_used = match cfg.levels {
        Levels::Exact(l) => l,
        Levels::Auto => zpla::matmul::admissible_levels(
            &f,
            n,
            zpla::bounds::winograd_levels(n, cfg.switch_order),
        ),
    };

    Ok(Cell {
        operation: operation.to_string(),
        n,
        p: f.p(),
        repr: f.repr(),
        levels_used,
        seconds: best.max(1e-9),
        opcount,
        fgemm_opcount,
    })
}

#[allow(clippy::too_many_arguments)]
pub fn run_bench(
    operation: &str,
    sizes: &[usize],
    p: u64,
    repr: Repr,
    gamma: u32,
    levels: &str,
    reps: u32,
    seed: u64,
    parallel: bool,
) -> Result<(), CliError> {
    let f = PrimeField::new(p, repr, gamma.min(f64::MANTISSA_DIGITS))?;
    let cfg = MulConfig {
        levels: parse_levels(levels)?,
        ..MulConfig::default()
    };
    println!("{CSV_HEADER}");
    if parallel {
        let results: Vec<Result<Cell, CliError>> = std::thread::scope(|s| {
            let handles: Vec<_> = sizes
                .iter()
                .map(|&n| {
                    let cfg = &cfg;
                    s.spawn(move || run_cell(operation, n, f, cfg, reps, seed))
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        for r in results {
            println!("{}", r?.to_csv());
        }
    } else {
        for &n in sizes {
            println!("{}", run_cell(operation, n, f, &cfg, reps, seed)?.to_csv());
        }
    }
    Ok(())
}

fn time_mul(f: PrimeField, n: usize, levels: Levels, reps: u32, rng: &mut Rng64) -> f64 {
    let a: Matrix<f64> = random_matrix(n, n, f, rng);
    let b: Matrix<f64> = random_matrix(n, n, f, rng);
    let cfg = MulConfig {
        levels,
        ..MulConfig::default()
    };
    let mut best = f64::INFINITY;
    for _ in 0..reps.max(1) {
        let mut c = Matrix::zeros(n, n, f);
        let mut instr = Instr::new();
        let start = Instant::now();
        fgemm_mat(1.0, &a, &b, 0.0, &mut c, &cfg, &mut instr).expect("admissible");
        best = best.min(start.elapsed().as_secs_f64());
    }
    best
}

/// Bisection for the order w where one recursive level runs as fast as the
/// classical kernel: below w the classical kernel wins, at and above w the
/// single-level cascade does.
pub fn run_tune(
    p: u64,
    repr: Repr,
    gamma: u32,
    size: usize,
    reps: u32,
    seed: u64,
) -> Result<(), CliError> {
    let f = PrimeField::new(p, repr, gamma)?;
    let mut rng = Rng64::new(seed);
    let mut lo = 64usize;
    let mut hi = size.max(lo * 2);
    let faster_at = |n: usize, rng: &mut Rng64| -> (bool, f64, f64) {
        let t0 = time_mul(f, n, Levels::Exact(0), reps, rng);
        let t1 = time_mul(f, n, Levels::Exact(1), reps, rng);
        (t1 <= t0, t0, t1)
    };
    let (lo_fast, ..) = faster_at(lo, &mut rng);
    let (hi_fast, ..) = faster_at(hi, &mut rng);
    let w = if lo_fast {
        lo
    } else if !hi_fast {
        hi // the crossover is beyond the probed range
    } else {
        while hi - lo > lo / 8 + 1 {
            let mid = (lo + hi) / 2;
            let (fast, ..) = faster_at(mid, &mut rng);
            if fast {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };
    let (_, t0, t1) = faster_at(w, &mut rng);
    let delta = (t1 - t0).abs() / t0.max(1e-9);
    println!("w={w}");
    println!("levels_for_size={}", zpla::bounds::winograd_levels(size, w));
    println!("measured_delta={delta:.3}");
    Ok(())
}
