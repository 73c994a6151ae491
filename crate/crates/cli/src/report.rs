use compmatch::balance::{render_certificate, CycleCertificate, Hypergraph};
use compmatch::{Certificate, Market, Matching, ZeroOneMatrix};
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Pass,
    Inconclusive,
    Fail,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Inconclusive => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        }
    }
}

/// Output of one command: text for people, JSON for machines, and the
/// overall verdict (the worst of its parts).
pub struct Report {
    pub text: String,
    pub json: Value,
    pub status: Status,
}

impl Report {
    pub fn new(status: Status, text: String, json: Value) -> Self {
        Report { text, json, status }
    }
}

/// Collects named sections of a report.
#[derive(Default)]
pub struct Sections {
    text: Vec<String>,
    json: serde_json::Map<String, Value>,
    status: Option<Status>,
}

impl Sections {
    pub fn push(&mut self, key: &str, status: Status, text: String, json: Value) {
        self.status = Some(self.status.map_or(status, |s| s.max(status)));
        self.text.push(text);
        self.json.insert(key.to_string(), json);
    }

    pub fn note(&mut self, key: &str, text: String, json: Value) {
        self.text.push(text);
        self.json.insert(key.to_string(), json);
    }

    pub fn finish(mut self) -> Report {
        let status = self.status.unwrap_or(Status::Pass);
        self.json.insert("status".into(), json!(status.label()));
        Report::new(status, self.text.join("\n"), Value::Object(self.json))
    }
}

pub fn certificate_status(cert: &Certificate) -> Status {
    match cert {
        Certificate::Holds => Status::Pass,
        Certificate::Violated(_) => Status::Fail,
        Certificate::Inconclusive { .. } => Status::Inconclusive,
    }
}

pub fn certificate(name: &str, m: &ZeroOneMatrix, cert: &Certificate) -> (Status, String, Value) {
    let status = certificate_status(cert);
    let mut value = json!({
        "verdict": status.label(),
        "matrix": m.to_rows(),
        "row_labels": m.row_labels(),
        "col_labels": m.col_labels(),
    });
    match cert {
        Certificate::Violated(w) => {
            value["witness"] = json!({
                "rows": w.rows,
                "cols": w.cols,
                "row_labels": w.rows.iter().map(|&r| &m.row_labels()[r]).collect::<Vec<_>>(),
                "col_labels": w.cols.iter().map(|&c| &m.col_labels()[c]).collect::<Vec<_>>(),
                "determinant": w.determinant,
                "submatrix": m.submatrix(&w.rows, &w.cols).to_rows(),
            });
        }
        Certificate::Inconclusive { rows, cols, cap } => {
            value["reduced_core"] = json!([rows, cols]);
            value["cap"] = json!(cap);
        }
        Certificate::Holds => {}
    }
    (status, render_certificate(name, m, cert), value)
}

pub fn cycle_certificate(name: &str, h: &Hypergraph, cert: &CycleCertificate) -> (Status, String, Value) {
    let edges: Vec<String> =
        h.edges().iter().map(|(label, e)| format!("{label}={}", h.format_edge(*e))).collect();
    match cert {
        CycleCertificate::Holds => (
            Status::Pass,
            format!("{name}: PASS ({} edges)", edges.len()),
            json!({"verdict": "PASS", "edges": edges}),
        ),
        CycleCertificate::Violated(c) => {
            let rendered = c.render(h);
            (
                Status::Fail,
                format!("{name}: FAIL, odd cycle of length {}\n{rendered}", c.len()),
                json!({
                    "verdict": "FAIL",
                    "edges": edges,
                    "cycle": {
                        "vertices": c.vertices.iter().map(|&v| &h.vertices()[v]).collect::<Vec<_>>(),
                        "edges": c.edges.iter().map(|&e| h.format_edge(h.edges()[e].1)).collect::<Vec<_>>(),
                        "rendered": rendered,
                    },
                }),
            )
        }
    }
}

pub fn matching(m: &Market, mu: &Matching) -> Value {
    let mut map = serde_json::Map::new();
    for f in m.firm_ids() {
        map.insert(m.firm_name(f).to_string(), json!(m.set_names(mu.employees(f))));
    }
    map.insert("ø".into(), json!(m.set_names(mu.unmatched())));
    Value::Object(map)
}
