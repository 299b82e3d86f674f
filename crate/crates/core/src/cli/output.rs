use std::fs;
use std::io::Write;
use std::path::Path;

use super::Row;
use crate::error::{ConfigError, Error, Result};

pub const CSV_HEADER: &str = "sweep_param,sweep_value,scheme,engine,user_order,op,stderr,visibility_factor,seed";

/// `%.9g`: nine significant digits, trailing zeros dropped.
pub fn format_sig(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim(&format!("{v:.decimals$}")).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa), exp.abs())
    }
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn render(rows: &[Row]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let order = r.user_order.map_or_else(|| "avg".to_string(), |l| l.to_string());
        let stderr = r.stderr.map(format_sig).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.sweep_param,
            format_sig(r.sweep_value),
            r.scheme,
            r.engine,
            order,
            format_sig(r.op),
            stderr,
            format_sig(r.visibility_factor),
            r.seed
        ));
    }
    out
}

/// Writes through a sibling temporary file and renames it into place, so a
/// failed write never leaves a partial CSV behind.
pub fn write_rows(path: &Path, rows: &[Row]) -> Result<()> {
    let io = |source| Error::Io { path: path.display().to_string(), source };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = Path::new(&tmp);
    let written = fs::File::create(tmp)
        .and_then(|mut f| {
            f.write_all(render(rows).as_bytes())?;
            f.sync_all()
        })
        .and_then(|_| fs::rename(tmp, path));
    if let Err(e) = written {
        let _ = fs::remove_file(tmp);
        return Err(io(e));
    }
    Ok(())
}

/// Parses CSV text produced by [`write_rows`].
pub fn read_csv_rows(text: &str) -> Result<Vec<Row>, ConfigError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => return Err(ConfigError::invalid("header", format!("unexpected `{}`", other.unwrap_or("")))),
    }
    let num = |key: &str, v: &str| -> Result<f64, ConfigError> {
        v.parse().map_err(|_| ConfigError::Type { key: key.into(), value: v.into(), expected: "number" })
    };
    lines
        .filter(|l| !l.is_empty())
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 9 {
                return Err(ConfigError::invalid("row", format!("expected 9 fields in `{line}`")));
            }
            Ok(Row {
                sweep_param: f[0].to_string(),
                sweep_value: num("sweep_value", f[1])?,
                scheme: f[2].parse()?,
                engine: f[3].parse()?,
                user_order: match f[4] {
                    "avg" => None,
                    l => Some(num("user_order", l)? as usize),
                },
                op: num("op", f[5])?,
                stderr: if f[6].is_empty() { None } else { Some(num("stderr", f[6])?) },
                visibility_factor: num("visibility_factor", f[7])?,
                seed: f[8].parse().map_err(|_| ConfigError::Type { key: "seed".into(), value: f[8].into(), expected: "integer" })?,
            })
        })
        .collect()
}
