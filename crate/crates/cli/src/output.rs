use std::error::Error;
use std::io::Write;

use clap::ValueEnum;
use nrep::conditions::ConditionReport;
use nrep::io::report_json_line;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

/// Left-aligned text table with a header rule.
pub fn render_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c:<w$}"))
            .collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(header.to_vec());
    let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
    out += &line(rule.iter().map(String::as_str).collect());
    for row in rows {
        out += &line(row.iter().map(String::as_str).collect());
    }
    out
}

pub fn write_csv(out: &mut dyn Write, header: &[&str], rows: &[Vec<String>]) -> Result<(), Box<dyn Error>> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

pub const REPORT_HEADER: [&str; 7] = ["condition", "probe", "value", "bound", "margin", "passed", "tol"];

pub fn report_rows(reports: &[ConditionReport]) -> Vec<Vec<String>> {
    reports
        .iter()
        .map(|r| {
            vec![
                r.condition.name().to_string(),
                r.probe.clone(),
                format!("{:.10}", r.value),
                format!("{:.10}", r.bound),
                format!("{:+.3e}", r.margin),
                if r.passed { "pass" } else { "FAIL" }.to_string(),
                format!("{:.0e}", r.tol),
            ]
        })
        .collect()
}

pub fn report_csv_rows(reports: &[ConditionReport]) -> Vec<Vec<String>> {
    reports
        .iter()
        .map(|r| {
            vec![
                r.condition.name().to_string(),
                r.probe.clone(),
                nrep::io::format_f64(r.value),
                nrep::io::format_f64(r.bound),
                nrep::io::format_f64(r.margin),
                r.passed.to_string(),
                nrep::io::format_f64(r.tol),
            ]
        })
        .collect()
}

pub fn json_lines(reports: &[ConditionReport]) -> nrep::Result<String> {
    let mut s = String::new();
    for r in reports {
        s += &report_json_line(r)?;
        s.push('\n');
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_columns_align() {
        let rows = vec![vec!["1".to_string(), "long cell".to_string()], vec!["22".into(), "x".into()]];
        let text = render_table(&["a", "b"], &rows);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "a   b");
        assert_eq!(lines[1], "--  ---------");
        assert_eq!(lines[2], "1   long cell");
        assert_eq!(lines[3], "22  x");
    }

    #[test]
    fn csv_quotes_commas() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &["a", "b"], &[vec!["x,y".into(), "1".into()]]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b\n\"x,y\",1\n");
    }
}
