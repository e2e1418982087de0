//! Rows of `A(x) - x/ζ(k)` and `Q(x) - x/ζ(k)`, the deviations of the window maximum
//! and of the plain `k`-free count from the main term.

use std::fmt::Write as _;
use std::time::Duration;

use sqfree::admissible_max::{admissible_max_exact, Status};
use sqfree::sieve::{density_main_term, kfree_window, PrimeTable};
use sqfree::{Error, Result};

pub const CSV_HEADER: &str = "x,a_minus_main,q_minus_main,status";

#[derive(Clone, Debug, PartialEq)]
pub struct FigureRow {
    pub x: u64,
    pub a_minus_main: f64,
    pub q_minus_main: f64,
    pub status: Status,
}

/// One row per `1 <= x <= x_max`; each `A(x)` gets `budget` before it is reported as a lower bound.
pub fn figure_shift_data(x_max: u64, k: u32, budget: Duration) -> Result<Vec<FigureRow>> {
    if x_max == 0 {
        return Err(Error::Argument("x_max must be at least 1".into()));
    }
    let table = PrimeTable::covering(x_max, k)?;
    let window = kfree_window(1, x_max, k, &table)?;
    (1..=x_max)
        .map(|x| {
            let a = admissible_max_exact(x, k, budget)?;
            let main = density_main_term(x, k);
            Ok(FigureRow {
                x,
                a_minus_main: a.value as f64 - main,
                q_minus_main: window.count_prefix(x) as f64 - main,
                status: a.status,
            })
        })
        .collect()
}

/// Ten significant digits in fixed notation; zero prints as `0`.
pub fn format_sig10(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let prec = (9 - v.abs().log10().floor() as i64).max(0) as usize;
    format!("{v:.prec$}")
}

pub fn status_label(s: Status) -> &'static str {
    match s {
        Status::Exact => "EXACT",
        Status::LowerBound => "LOWER_BOUND",
    }
}

pub fn to_csv(rows: &[FigureRow]) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{}",
            r.x,
            format_sig10(r.a_minus_main),
            format_sig10(r.q_minus_main),
            status_label(r.status)
        )
        .expect("writing to a String");
    }
    out
}
