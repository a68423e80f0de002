//! Number formatting and plot scripts shared by the file writers.

use std::fmt::Write as _;

const SIG_DIGITS: i32 = 6;

/// Formats `x` with six significant digits, like C's `%#.6g` without the
/// exponent form for ordinary magnitudes.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    // Rounding can carry into the next decade (e.g. 9.999996 -> 10.0000).
    let rounded: f64 = format!("{:.*e}", (SIG_DIGITS - 1) as usize, x)
        .parse()
        .unwrap_or(x);
    let exp = if rounded.abs() >= 10f64.powi(exp + 1) {
        exp + 1
    } else {
        exp
    };
    if !(-5..SIG_DIGITS).contains(&exp) {
        return format!("{:.*e}", (SIG_DIGITS - 1) as usize, x);
    }
    let decimals = (SIG_DIGITS - 1 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Gnuplot script drawing columns of a comma-separated file.
pub struct PlotScript {
    pub title: String,
    pub xlabel: String,
    pub ylabel: String,
    pub logx: bool,
    pub logy: bool,
    pub png: String,
    pub plots: Vec<String>,
}

impl PlotScript {
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "set datafile separator ','");
        let _ = writeln!(s, "set datafile commentschars '#'");
        let _ = writeln!(s, "set terminal pngcairo size 900,600");
        let _ = writeln!(s, "set output '{}'", self.png);
        let _ = writeln!(s, "set title '{}'", self.title);
        let _ = writeln!(s, "set xlabel '{}'", self.xlabel);
        let _ = writeln!(s, "set ylabel '{}'", self.ylabel);
        if self.logx {
            let _ = writeln!(s, "set logscale x");
        }
        if self.logy {
            let _ = writeln!(s, "set logscale y");
        }
        let _ = writeln!(s, "set key off");
        let _ = writeln!(s, "plot {}", self.plots.join(", \\\n     "));
        s
    }
}
