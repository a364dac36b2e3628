use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SCAN_HEADER: [&str; 7] = ["t_us", "realized_t_us", "family", "quantity", "mode", "value", "stderr"];

/// One estimate at one delay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    /// Requested delay.
    pub t_us: f64,
    /// Delay after quantization to whole 80 ns slices.
    pub realized_t_us: f64,
    pub family: String,
    pub quantity: String,
    pub mode: String,
    pub value: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ScanSeries {
    pub rows: Vec<ScanRow>,
}

/// 17 significant digits; parses back to the identical `f64`.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

impl ScanSeries {
    pub fn new(rows: Vec<ScanRow>) -> Self {
        Self { rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Rows of one quantity, in order.
    pub fn quantity<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a ScanRow> + 'a {
        self.rows.iter().filter(move |r| r.quantity == name)
    }

    /// `(realized_t_us, value)` pairs of one quantity.
    pub fn points(&self, name: &str) -> Vec<(f64, f64)> {
        self.quantity(name).map(|r| (r.realized_t_us, r.value)).collect()
    }

    pub fn quantity_names(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.quantity) {
                out.push(r.quantity.clone());
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        for w in self.rows.windows(2) {
            if w[1].t_us < w[0].t_us {
                return Err(Error::Csv(format!(
                    "t_us decreases from {} to {}",
                    w[0].t_us, w[1].t_us
                )));
            }
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::Csv(e.to_string());
        w.write_record(SCAN_HEADER).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record([
                format_f64(r.t_us),
                format_f64(r.realized_t_us),
                r.family.clone(),
                r.quantity.clone(),
                r.mode.clone(),
                format_f64(r.value),
                format_f64(r.stderr),
            ])
            .map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::Csv(e.to_string()))
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(input);
        let headers = rdr.headers().map_err(|e| Error::Csv(e.to_string()))?.clone();
        if headers.iter().collect::<Vec<_>>() != SCAN_HEADER {
            return Err(Error::Csv(format!("expected header {}", SCAN_HEADER.join(","))));
        }
        let mut rows = Vec::new();
        for (i, rec) in rdr.deserialize::<ScanRow>().enumerate() {
            // header is line 1
            rows.push(rec.map_err(|e| Error::Csv(format!("line {}: {e}", i + 2)))?);
        }
        let s = Self { rows };
        s.validate()?;
        Ok(s)
    }
}

/// Outcome of the state-preparation-error protocol.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrepErrorResult {
    pub family: String,
    pub n: usize,
    /// `100 · (1 − F̂)` per repetition.
    pub per_rep_percent: Vec<f64>,
    pub mean_percent: f64,
    pub stderr_percent: f64,
    /// `100 · (1 − ⟨ψ|ρ|ψ⟩)` averaged over repetitions, from the simulated states.
    pub exact_percent: f64,
}

impl PrepErrorResult {
    /// `rep,error_percent` rows followed by a `#` summary line.
    pub fn to_csv_string(&self) -> String {
        let mut s = String::from("rep,error_percent\n");
        for (i, e) in self.per_rep_percent.iter().enumerate() {
            s.push_str(&format!("{i},{}\n", format_f64(*e)));
        }
        s.push_str(&format!(
            "# family={} n={} reps={} mean_error_percent={} stderr_percent={} exact_error_percent={}\n",
            self.family,
            self.n,
            self.per_rep_percent.len(),
            format_f64(self.mean_percent),
            format_f64(self.stderr_percent),
            format_f64(self.exact_percent)
        ));
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(t: f64, v: f64) -> ScanRow {
        ScanRow {
            t_us: t,
            realized_t_us: t,
            family: "ghz".into(),
            quantity: "E3".into(),
            mode: "real-approximation".into(),
            value: v,
            stderr: 0.0,
        }
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let s = ScanSeries::new(vec![
            row(0.0, 1.0),
            row(0.1, 0.1 + 0.2),
            row(0.2, -1e-300),
            row(0.3, 2.0 / 3.0),
        ]);
        let text = s.to_csv_string();
        assert!(text.starts_with("t_us,realized_t_us,family,quantity,mode,value,stderr\n"));
        assert!(text.contains("3.0000000000000004e-1"));
        let back = ScanSeries::read_csv(text.as_bytes()).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.to_csv_string(), text);
    }

    #[test]
    fn rejects_bad_csv() {
        assert!(ScanSeries::read_csv("a,b\n1,2\n".as_bytes()).is_err());
        let bad = "t_us,realized_t_us,family,quantity,mode,value,stderr\n0,0,ghz,E3,x,oops,0\n";
        let err = ScanSeries::read_csv(bad.as_bytes()).unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
        let backwards = "t_us,realized_t_us,family,quantity,mode,value,stderr\n1,1,g,E3,x,0,0\n0,0,g,E3,x,0,0\n";
        assert!(ScanSeries::read_csv(backwards.as_bytes()).is_err());
    }

    #[test]
    fn prep_error_csv_shape() {
        let r = PrepErrorResult {
            family: "ghz".into(),
            n: 3,
            per_rep_percent: vec![1.0, 2.0],
            mean_percent: 1.5,
            stderr_percent: 0.5,
            exact_percent: 1.4,
        };
        let text = r.to_csv_string();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "rep,error_percent");
        assert_eq!(lines[1], "0,1.0000000000000000e0");
        assert!(lines[3].starts_with("# family=ghz n=3 reps=2 mean_error_percent=1.5"));
    }
}
