//! The seven figure-data grids.
//!
//! Figures 1–5 use the p = 1 families, 6–7 the p = 0 families.  The
//! abscissa is x = |z|² except for figures 3–4, which sweep a real z.
//! Figure 7 sweeps x and evaluates at z = √x.  Every grid is a pure
//! function of the flags, so repeated runs are byte-identical.

use num_complex::Complex64;

use bellstates_core::{
    mandel_q, metric_factor, snr, squeezing, weight_series, CoherentFamily, Error as CoreError,
    FamilyOptions, SeriesConfig,
};

use crate::output::{Cell, Table};
use crate::{grid, with_context, AppResult};

struct FigureSpec {
    start: f64,
    stop: f64,
    points: usize,
    default_r: &'static [u32],
    abscissa: &'static str,
}

fn lookup(id: u8) -> AppResult<FigureSpec> {
    let spec = match id {
        1 => FigureSpec {
            start: 0.0,
            stop: 35.0,
            points: 141,
            default_r: &[2, 3, 4],
            abscissa: "x",
        },
        2 | 6 => FigureSpec {
            start: 0.0,
            stop: 35.0,
            points: 141,
            default_r: &[1, 2, 3, 4],
            abscissa: "x",
        },
        3 => FigureSpec {
            start: 0.0,
            stop: 6.0,
            points: 121,
            default_r: &[1, 2, 3],
            abscissa: "re_z",
        },
        4 => FigureSpec {
            start: 0.0,
            stop: 6.0,
            points: 121,
            default_r: &[1, 2, 3, 4],
            abscissa: "re_z",
        },
        5 => FigureSpec {
            start: 0.0,
            stop: 35.0,
            points: 141,
            default_r: &[1, 2, 3, 4],
            abscissa: "x",
        },
        7 => FigureSpec {
            start: 0.0,
            stop: 35.0,
            points: 141,
            default_r: &[1, 2, 3],
            abscissa: "x",
        },
        other => {
            return Err(CoreError::InvalidParameters(format!(
                "figure id must be 1..=7, got {other}"
            ))
            .into())
        }
    };
    Ok(spec)
}

pub fn generate(
    id: u8,
    start: Option<f64>,
    stop: Option<f64>,
    points: Option<usize>,
    r_list: &[u32],
    cfg: &SeriesConfig,
) -> AppResult<Table> {
    let spec = lookup(id)?;
    let start = start.unwrap_or(spec.start);
    let stop = stop.unwrap_or(spec.stop);
    let points = points.unwrap_or(spec.points);
    let rs: Vec<u32> = if r_list.is_empty() {
        spec.default_r.to_vec()
    } else {
        r_list.to_vec()
    };
    for &r in &rs {
        let min_r = if id == 1 { 2 } else { 1 };
        if r < min_r || r > 6 {
            return Err(CoreError::InvalidParameters(format!(
                "figure {id} supports r in {min_r}..=6, got {r}"
            ))
            .into());
        }
    }
    let axis = grid(start, stop, points)?;

    // Largest |z|² any curve will be evaluated at.
    let x_need = if spec.abscissa == "re_z" {
        stop * stop
    } else {
        stop
    };
    let opts = FamilyOptions {
        x_max: (1.05 * x_need + 5.0).max(40.0),
        ..FamilyOptions::default()
    };
    let p = if id >= 6 { 0 } else { 1 };

    match id {
        1 => {
            let mut header = vec!["x".to_string()];
            header.extend(rs.iter().map(|r| format!("W_r{r}")));
            let mut table = Table::from_header(header);
            for &x in &axis {
                let mut row = vec![Cell::Float(x)];
                for &r in &rs {
                    row.push(Cell::Float(with_context(weight_series(r, x, cfg), || {
                        format!("figure 1 at x = {x}, r = {r}")
                    })?));
                }
                table.push_row(row);
            }
            Ok(table)
        }
        2 | 6 => {
            let fams = families(&rs, p, &opts)?;
            let mut header = vec!["x".to_string()];
            header.extend(rs.iter().map(|r| format!("Q_r{r}")));
            let mut table = Table::from_header(header);
            for &x in &axis {
                let mut row = vec![Cell::Float(x)];
                for (fam, &r) in fams.iter().zip(&rs) {
                    row.push(Cell::Float(with_context(mandel_q(fam, x, cfg), || {
                        format!("figure {id} at x = {x}, r = {r}")
                    })?));
                }
                table.push_row(row);
            }
            Ok(table)
        }
        3 | 7 => {
            let fams = families(&rs, p, &opts)?;
            let mut header = vec![spec.abscissa.to_string()];
            for r in &rs {
                header.push(format!("S_Q_r{r}"));
                header.push(format!("S_P_r{r}"));
            }
            let mut table = Table::from_header(header);
            for &t in &axis {
                let z = if id == 3 {
                    Complex64::new(t, 0.0)
                } else {
                    Complex64::new(t.sqrt(), 0.0)
                };
                let mut row = vec![Cell::Float(t)];
                for (fam, &r) in fams.iter().zip(&rs) {
                    let s = with_context(squeezing(fam, z, cfg), || {
                        format!("figure {id} at {} = {t}, r = {r}", spec.abscissa)
                    })?;
                    row.push(Cell::Float(s.s_q));
                    row.push(Cell::Float(s.s_p));
                }
                table.push_row(row);
            }
            Ok(table)
        }
        4 => {
            let fams = families(&rs, p, &opts)?;
            let mut header = vec!["re_z".to_string()];
            header.extend(rs.iter().map(|r| format!("sigma_bar_r{r}")));
            let mut table = Table::from_header(header);
            for &t in &axis {
                let z = Complex64::new(t, 0.0);
                let mut row = vec![Cell::Float(t)];
                for (fam, &r) in fams.iter().zip(&rs) {
                    let s = with_context(snr(fam, z, cfg), || {
                        format!("figure 4 at re_z = {t}, r = {r}")
                    })?;
                    row.push(Cell::Float(s.sigma_bar));
                }
                table.push_row(row);
            }
            Ok(table)
        }
        5 => {
            let fams = families(&rs, p, &opts)?;
            let reference = CoherentFamily::conventional(&opts)?;
            let mut header = vec!["x".to_string(), "omega_ref".to_string()];
            header.extend(rs.iter().map(|r| format!("omega_r{r}")));
            let mut table = Table::from_header(header);
            for &x in &axis {
                let mut row = vec![
                    Cell::Float(x),
                    Cell::Float(with_context(metric_factor(&reference, x, cfg), || {
                        format!("figure 5 reference at x = {x}")
                    })?),
                ];
                for (fam, &r) in fams.iter().zip(&rs) {
                    row.push(Cell::Float(with_context(metric_factor(fam, x, cfg), || {
                        format!("figure 5 at x = {x}, r = {r}")
                    })?));
                }
                table.push_row(row);
            }
            Ok(table)
        }
        _ => unreachable!("lookup rejected the id"),
    }
}

fn families(rs: &[u32], p: u32, opts: &FamilyOptions) -> AppResult<Vec<CoherentFamily>> {
    rs.iter()
        .map(|&r| CoherentFamily::bell(r, p, opts).map_err(Into::into))
        .collect()
}
