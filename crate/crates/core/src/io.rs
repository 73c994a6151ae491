//! Market files: JSON with `workers`, `firms` (each a chain of worker sets,
//! best first) and `worker_prefs` (each a list of firms, best first).
//! Object keys keep their file order and duplicates are rejected.

use std::fmt;
use std::marker::PhantomData;

use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::model::Market;

/// A JSON object read as ordered pairs, so that duplicate keys surface.
#[derive(Debug, Default)]
struct Pairs<T>(Vec<(String, T)>);

impl<'de, T: Deserialize<'de>> Deserialize<'de> for Pairs<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V<T>(PhantomData<T>);
        impl<'de, T: Deserialize<'de>> Visitor<'de> for V<T> {
            type Value = Pairs<T>;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an object")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> std::result::Result<Self::Value, A::Error> {
                let mut out: Vec<(String, T)> = Vec::new();
                while let Some((k, v)) = map.next_entry::<String, T>()? {
                    if out.iter().any(|(x, _)| *x == k) {
                        return Err(de::Error::custom(format!("duplicate key `{k}`")));
                    }
                    out.push((k, v));
                }
                Ok(Pairs(out))
            }
        }
        d.deserialize_map(V(PhantomData))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MarketFile {
    workers: Vec<String>,
    firms: Pairs<Vec<Vec<String>>>,
    #[serde(default)]
    worker_prefs: Pairs<Vec<String>>,
}

/// Parses a market file. Syntax errors carry line and column; semantic
/// errors (unknown names, duplicates) are reported as such.
pub fn parse_market(text: &str) -> Result<Market> {
    let file: MarketFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let mut b = Market::builder().workers(file.workers);
    for (name, chain) in file.firms.0 {
        b = b.firm_owned(name, chain);
    }
    for (w, list) in file.worker_prefs.0 {
        b = b.prefs_owned(w, list);
    }
    b.build()
}

/// Serializes a market, one chain or preference list per line; workers
/// with empty lists are omitted from `worker_prefs`.
pub fn market_to_json(m: &Market) -> String {
    fn list<'a>(items: impl IntoIterator<Item = &'a str>) -> String {
        let quoted: Vec<String> =
            items.into_iter().map(|s| serde_json::to_string(s).expect("string")).collect();
        format!("[{}]", quoted.join(", "))
    }
    let firms: Vec<String> = m
        .firm_ids()
        .map(|f| {
            let chain: Vec<String> = m.firm_pref(f).chain().iter().map(|s| list(m.set_names(*s))).collect();
            format!("    {}: [{}]", serde_json::to_string(m.firm_name(f)).expect("string"), chain.join(", "))
        })
        .collect();
    let prefs: Vec<String> = m
        .worker_ids()
        .filter(|w| !m.worker_prefs(*w).is_empty())
        .map(|w| {
            let names = m.worker_prefs(w).iter().map(|f| m.firm_name(*f));
            format!("    {}: {}", serde_json::to_string(m.worker_name(w)).expect("string"), list(names))
        })
        .collect();
    let block = |rows: Vec<String>| {
        if rows.is_empty() {
            "{}".to_string()
        } else {
            format!("{{\n{}\n  }}", rows.join(",\n"))
        }
    };
    format!(
        "{{\n  \"workers\": {},\n  \"firms\": {},\n  \"worker_prefs\": {}\n}}\n",
        list(m.workers().iter().map(String::as_str)),
        block(firms),
        block(prefs)
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn corpus_round_trips() {
        for (name, m) in corpus::markets() {
            let text = market_to_json(&m);
            assert_eq!(parse_market(&text).unwrap(), m, "{name}");
        }
    }

    #[test]
    fn syntax_errors_have_positions() {
        let e = parse_market("{\n  \"workers\": [\"w1\",]\n}").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn duplicates_and_unknowns_are_rejected() {
        let dup = r#"{"workers": ["w1"], "firms": {"f": [["w1"]], "f": [["w1"]]}}"#;
        assert!(matches!(parse_market(dup), Err(Error::Parse { .. })));
        let unknown = r#"{"workers": ["w1"], "firms": {"f": [["w2"]]}}"#;
        assert!(matches!(parse_market(unknown), Err(Error::UnknownWorker(_))));
        let set_twice = r#"{"workers": ["w1"], "firms": {"f": [["w1"], ["w1"]]}}"#;
        assert!(matches!(parse_market(set_twice), Err(Error::DuplicateSet { .. })));
        let firm_twice =
            r#"{"workers": ["w1"], "firms": {"f": [["w1"]]}, "worker_prefs": {"w1": ["f", "f"]}}"#;
        assert!(matches!(parse_market(firm_twice), Err(Error::DuplicatePreference { .. })));
        let extra = r#"{"workers": [], "firms": {}, "nonsense": 1}"#;
        assert!(parse_market(extra).is_err());
    }
}
