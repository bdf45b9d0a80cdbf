//! Result rows, summary rows and their CSV encodings.
//!
//! Floats are written in scientific notation with 17 significant digits so
//! that re-parsing reproduces them bit-for-bit; bodies carry no timestamps,
//! which makes reruns byte-comparable.

use rlmc::metrics::SlopeFit;

/// Scientific notation with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// One statistic of one parameter point.
#[derive(Debug, Clone)]
pub struct ResultRecord {
    pub experiment: &'static str,
    /// Up to two named parameter coordinates (e.g. `eta` and `x`).
    pub params: Vec<(&'static str, f64)>,
    pub statistic: String,
    pub value: f64,
    pub std_error: Option<f64>,
    pub pass: Option<bool>,
}

impl ResultRecord {
    pub fn new(experiment: &'static str, statistic: impl Into<String>, value: f64) -> Self {
        ResultRecord {
            experiment,
            params: Vec::new(),
            statistic: statistic.into(),
            value,
            std_error: None,
            pass: None,
        }
    }

    pub fn param(mut self, name: &'static str, value: f64) -> Self {
        self.params.push((name, value));
        self
    }

    pub fn se(mut self, se: f64) -> Self {
        self.std_error = Some(se);
        self
    }

    pub fn pass(mut self, pass: bool) -> Self {
        self.pass = Some(pass);
        self
    }
}

/// Encode records under the fixed header
/// `experiment,param1,value1,param2,value2,statistic,value,std_error,pass`.
pub fn records_to_csv(records: &[ResultRecord]) -> String {
    let mut out = String::from("experiment,param1,value1,param2,value2,statistic,value,std_error,pass\n");
    for r in records {
        let p = |i: usize| -> (String, String) {
            r.params
                .get(i)
                .map(|(n, v)| (n.to_string(), fmt_f64(*v)))
                .unwrap_or_default()
        };
        let (p1, v1) = p(0);
        let (p2, v2) = p(1);
        let se = r.std_error.map(fmt_f64).unwrap_or_default();
        let pass = r.pass.map(|b| b.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{p1},{v1},{p2},{v2},{},{},{se},{pass}\n",
            r.experiment,
            r.statistic,
            fmt_f64(r.value)
        ));
    }
    out
}

/// One line of the summary footer: a fitted slope and/or a scalar with its
/// pass flag.
#[derive(Debug, Clone)]
pub struct SummaryRow {
    pub label: String,
    pub fit: Option<SlopeFit>,
    pub value: Option<f64>,
    pub pass: bool,
}

impl SummaryRow {
    pub fn scalar(label: impl Into<String>, value: f64, pass: bool) -> Self {
        SummaryRow { label: label.into(), fit: None, value: Some(value), pass }
    }

    pub fn fitted(label: impl Into<String>, fit: SlopeFit, pass: bool) -> Self {
        SummaryRow { label: label.into(), fit: Some(fit), value: None, pass }
    }
}

/// Encode summary rows under the header
/// `label,slope,intercept,r_squared,slope_std_error,value,pass`.
pub fn summary_to_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from("label,slope,intercept,r_squared,slope_std_error,value,pass\n");
    for row in rows {
        let (s, i, r2, se) = row
            .fit
            .map(|f| {
                (fmt_f64(f.slope), fmt_f64(f.intercept), fmt_f64(f.r_squared), fmt_f64(f.std_error))
            })
            .unwrap_or_default();
        let value = row.value.map(fmt_f64).unwrap_or_default();
        out.push_str(&format!("{},{s},{i},{r2},{se},{value},{}\n", row.label, row.pass));
    }
    out
}

/// Human-oriented one-liner for stdout.
pub fn summary_line(row: &SummaryRow) -> String {
    let verdict = if row.pass { "PASS" } else { "FAIL" };
    let mut line = format!("[{verdict}] {}", row.label);
    if let Some(fit) = &row.fit {
        line.push_str(&format!(
            ": slope = {:.4}, r_squared = {:.4}, se = {:.2e}",
            fit.slope, fit.r_squared, fit.std_error
        ));
    }
    if let Some(v) = row.value {
        line.push_str(&format!(": value = {v:.6e}"));
    }
    line
}
