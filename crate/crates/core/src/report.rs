//! Canonical serialization: stable identifiers for endoscopic classes and
//! byte-exact rendering of formal sums.  Digests are functions of a
//! normalized record, never of construction order, so isomorphic classes
//! entered differently agree across runs and platforms.

use crate::endoscopy::*;
use crate::lattice::*;
use crate::root_datum::*;
use num::BigInt;
use sha2::{Digest, Sha256};
use std::collections::BTreeSet;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ReportError {
    #[error("unknown report format {0:?} (expected \"tsv\" or \"json\")")]
    UnknownFormat(String),
}

/// Stable identifier of an endoscopic class: hex digest of the canonical
/// record.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassId(pub String);

impl std::fmt::Display for ClassId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn push_int(buf: &mut String, n: &BigInt) {
    buf.push_str(&n.to_string());
    buf.push(',');
}

fn push_vec(buf: &mut String, v: &[BigInt]) {
    buf.push('[');
    for x in v {
        push_int(buf, x);
    }
    buf.push(']');
}

fn push_torsion(buf: &mut String, t: &TorsionVec) {
    buf.push('(');
    for q in t.coords() {
        buf.push_str(&q.to_string());
        buf.push(',');
    }
    buf.push(')');
}

fn push_matrix(buf: &mut String, m: &LatAut) {
    buf.push('{');
    for row in m.rows() {
        push_vec(buf, row);
    }
    buf.push('}');
}

/// Normalized record of the ambient group: rank, canonically sorted root
/// datum, base, and Galois generators with declared orders.
fn form_record(form: &crate::galois::GaloisForm) -> String {
    let mut buf = String::from("form:");
    buf.push_str(&form.rank().to_string());
    buf.push(';');
    for (r, c) in form.brd.datum.roots.iter().zip(&form.brd.datum.coroots) {
        push_vec(&mut buf, r);
        push_vec(&mut buf, c);
    }
    buf.push(';');
    for &b in &form.brd.base {
        buf.push_str(&b.to_string());
        buf.push(',');
    }
    buf.push(';');
    for g in &form.gens {
        push_matrix(&mut buf, &g.x_action);
        buf.push_str(&g.order.to_string());
        buf.push(';');
    }
    buf
}

/// Canonical record of a triple: the lexicographically least conjugate of
/// `(s, twists)` over the ambient Weyl group, twists reduced to their least
/// subsystem-Weyl coset representatives.
fn triple_record(amb: &Ambient, t: &EndoTriple) -> String {
    let mut best: Option<(TorsionVec, Vec<LatAut>)> = None;
    for w in amb.weyl.iter() {
        let s = w.x_action.apply_torsion(&t.s);
        if let Some((bs, _)) = &best {
            if s > *bs {
                continue;
            }
        }
        let winv = w.x_action.inverse();
        let h = kernel_subsystem(&t.form, &s);
        let wh = reflection_subgroup(&t.form.brd.datum, &h, WEYL_BOUND);
        let twists: Vec<LatAut> = t
            .twists
            .iter()
            .map(|c| {
                let conj = w.x_action.compose(&c.compose(&winv));
                wh.iter().map(|om| om.compose(&conj)).min().expect("nonempty subgroup")
            })
            .collect();
        let cand = (s, twists);
        if best.as_ref().is_none_or(|b| cand < *b) {
            best = Some(cand);
        }
    }
    let (s, twists) = best.expect("Weyl group is nonempty");
    let mut buf = String::from("triple:");
    push_torsion(&mut buf, &s);
    for m in &twists {
        push_matrix(&mut buf, m);
    }
    buf
}

fn digest(record: &str) -> ClassId {
    let mut h = Sha256::new();
    h.update(record.as_bytes());
    ClassId(format!("{:x}", h.finalize()))
}

/// Stable identifier of a refined triple class: isomorphic triples of the
/// same form receive equal ids.
pub fn class_id(t: &EndoTriple) -> ClassId {
    let amb = Ambient::new(t.form.clone());
    class_id_in(&amb, t)
}

pub fn class_id_in(amb: &Ambient, t: &EndoTriple) -> ClassId {
    let mut record = form_record(&t.form);
    record.push_str(&triple_record(amb, t));
    digest(&record)
}

/// Stable identifier of an embedded datum class over `(triple, Levi)`:
/// derived from the ambient class, the Levi subset, and the restricted
/// class.
pub fn embedded_id(e: &crate::levi::EmbeddedDatum) -> ClassId {
    let amb = Ambient::new(e.triple.form.clone());
    let mut record = form_record(&e.triple.form);
    record.push_str(&triple_record(&amb, &e.triple));
    record.push_str(";levi:");
    for &p in &e.ambient_levi.subset {
        record.push_str(&p.to_string());
        record.push(',');
    }
    let tm = crate::levi::x_map_in(&amb, e);
    let m_amb = Ambient::new(tm.form.clone());
    record.push_str(&triple_record(&m_amb, &tm));
    digest(&record)
}

/// One row of a rendered report.
#[derive(Clone, Debug)]
pub struct ReportRow {
    pub columns: Vec<String>,
}

/// A deterministic tabular report: header plus rows already in final order.
#[derive(Clone, Debug)]
pub struct Report {
    pub header: Vec<String>,
    pub rows: Vec<ReportRow>,
}

impl Report {
    pub fn new(header: &[&str]) -> Self {
        Report { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, columns: Vec<String>) {
        assert_eq!(columns.len(), self.header.len(), "row width matches header");
        self.rows.push(ReportRow { columns });
    }

    /// Tab-separated rendering: header row, LF line endings.
    pub fn to_tsv(&self) -> String {
        let mut out = self.header.join("\t");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.columns.join("\t"));
            out.push('\n');
        }
        out
    }

    /// JSON rendering: array of objects with sorted keys, no floats (all
    /// values are strings or integers rendered as strings upstream).
    pub fn to_json(&self) -> String {
        let mut keys: Vec<(usize, &String)> = self.header.iter().enumerate().collect();
        keys.sort_by(|a, b| a.1.cmp(b.1));
        let mut out = String::from("[");
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push('{');
            for (j, (col, key)) in keys.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                out.push_str(&format!("{}:{}", json_string(key), json_string(&row.columns[*col])));
            }
            out.push('}');
        }
        out.push(']');
        out.push('\n');
        out
    }

    pub fn render(&self, format: &str) -> Result<String, ReportError> {
        match format {
            "tsv" => Ok(self.to_tsv()),
            "json" => Ok(self.to_json()),
            other => Err(ReportError::UnknownFormat(other.to_string())),
        }
    }
}

fn json_string(s: &str) -> String {
    let mut out = String::from("\"");
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Render a formal sum as a report: one row per term, sorted by class id
/// then Levi subset then cocharacter, coefficients as signed decimals.
pub fn sum_report(sum: &crate::kottwitz::EndoCochainSum) -> Report {
    let mut report = Report::new(&["class", "levi", "mu", "coeff"]);
    for (term, coeff) in sum.terms() {
        report.push(vec![
            term.class_id.0.clone(),
            format_subset(&term.levi.subset),
            format_lat_vec(&term.mu),
            coeff.to_string(),
        ]);
    }
    report
}

pub fn format_subset(s: &BTreeSet<usize>) -> String {
    let parts: Vec<String> = s.iter().map(|p| p.to_string()).collect();
    format!("{{{}}}", parts.join(" "))
}

pub fn format_lat_vec(v: &[BigInt]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    parts.join(",")
}

pub fn format_rat_vec(v: &[num::BigRational]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    parts.join(",")
}
