//! Job specification, pipeline driver and the versioned JSON report.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::artin_schreier::check_a4_conditions;
use crate::decomp::{
    hkg_decomposition, kg_decomposition, kh_decomposition, restrict_decomposition, KgDecomposition,
    KgLabel, KhDecomposition, KhLabel, Star,
};
use crate::error::{Error, Result};
use crate::families;
use crate::gf::{FieldSpec, Gf, Proj};
use crate::oracle::{decompose_kg, decompose_kh};
use crate::ramification::{analyze, RamData};
use crate::ratfunc::{RatFunc, RatFuncJson};
use crate::repbuilder::{build_global_rep, orbit_context};

pub const SCHEMA: u32 = 1;

/// Which worked family to synthesize α from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExampleSpec {
    pub which: u8,
    pub n: i64,
    #[serde(default = "one")]
    pub x: i64,
    /// ψ as an element mask (family 3).
    #[serde(default)]
    pub psi: Option<u64>,
    /// μ = ψ³ as an element mask (family 3); the field is enlarged if needed.
    #[serde(default)]
    pub mu: Option<u64>,
}

fn one() -> i64 {
    1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Analyze,
    Hkg,
}

#[derive(Clone, Debug)]
pub struct JobSpec {
    pub field: Gf,
    pub alpha: RatFunc,
    pub mode: Mode,
    pub verify: bool,
    /// Number of Laurent coefficients of α̃ reported per branch point; 0 omits them.
    pub trunc: usize,
    pub example: Option<ExampleSpec>,
}

/// Wire form of a job, as read from a batch file.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobJson {
    #[serde(default)]
    pub alpha: Option<RatFuncJson>,
    #[serde(default)]
    pub m: Option<u32>,
    /// Modulus bits, low to high.
    #[serde(default)]
    pub modulus: Option<Vec<u8>>,
    #[serde(default)]
    pub example: Option<ExampleSpec>,
    #[serde(default)]
    pub hkg: bool,
    #[serde(default)]
    pub trunc: usize,
}

/// Field from `m` and an optional modulus given as bits low to high.
pub fn field_from(m: u32, modulus: Option<&[u8]>) -> Result<Gf> {
    match modulus {
        None => Gf::new(m),
        Some(bits) => Gf::from_spec(&FieldSpec {
            m,
            modulus: bits.to_vec(),
        }),
    }
}

/// α and the field it lives over for one of the worked families.
pub fn example_alpha(f: &Gf, ex: &ExampleSpec) -> Result<(Gf, RatFunc)> {
    if ex.n < 1 {
        return Err(Error::Parse(format!("n = {} must be at least 1", ex.n)));
    }
    match ex.which {
        1 => {
            if ex.x < 1 || ex.x % 3 == 0 {
                return Err(Error::Parse(format!(
                    "x = {} must be positive and prime to 3",
                    ex.x
                )));
            }
            Ok((*f, families::example1(f, ex.n, ex.x)))
        }
        2 => Ok((*f, families::example2(f, ex.n))),
        3 => {
            let (g, psi) = match (ex.psi, ex.mu) {
                (Some(p), None) => {
                    let psi = f.elem(p)?;
                    if !families::admissible_psi(f, psi) {
                        return Err(Error::Parse(format!(
                            "psi = {p} must avoid 0, 1, zeta and zeta^2"
                        )));
                    }
                    (*f, psi)
                }
                (None, Some(mu)) => {
                    let (g, _, psi) = families::psi_from_mu(f, f.elem(mu)?)?;
                    (g, psi)
                }
                _ => return Err(Error::Parse("family 3 needs exactly one of psi, mu".into())),
            };
            Ok((g, families::example3(&g, ex.n, psi)))
        }
        w => Err(Error::Parse(format!(
            "unknown family {w}; expected 1, 2 or 3"
        ))),
    }
}

impl JobJson {
    pub fn into_spec(self, default_m: u32, verify: bool) -> Result<JobSpec> {
        let f = field_from(self.m.unwrap_or(default_m), self.modulus.as_deref())?;
        let (field, alpha) = match (&self.alpha, &self.example) {
            (Some(a), None) => (f, RatFunc::from_json(&f, a)?),
            (None, Some(ex)) => example_alpha(&f, ex)?,
            _ => {
                return Err(Error::Parse(
                    "a job needs exactly one of alpha, example".into(),
                ))
            }
        };
        Ok(JobSpec {
            field,
            alpha,
            mode: if self.hkg { Mode::Hkg } else { Mode::Analyze },
            verify,
            trunc: self.trunc,
            example: self.example,
        })
    }
}

/// Outcome of the oracle comparison.
#[derive(Clone, Debug)]
pub struct Verification {
    pub kh_match: bool,
    pub kg_match: bool,
    pub restriction_match: bool,
    pub json: Value,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.kh_match && self.kg_match && self.restriction_match
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub field: Gf,
    pub data: RamData,
    pub kh: KhDecomposition,
    pub kg: KgDecomposition,
    pub verification: Option<Verification>,
    pub timings_ms: Vec<(&'static str, f64)>,
    json: Value,
}

impl Report {
    /// Deterministic report; timings are added only on request.
    pub fn to_json(&self, timings: bool) -> Value {
        let mut v = self.json.clone();
        if timings {
            let t: serde_json::Map<String, Value> = self
                .timings_ms
                .iter()
                .map(|(k, ms)| (k.to_string(), json!(ms)))
                .collect();
            v["timings_ms"] = Value::Object(t);
        }
        v
    }

    pub fn verified(&self) -> Option<bool> {
        self.verification.as_ref().map(Verification::passed)
    }

    /// Human-readable summary.
    pub fn render(&self) -> String {
        let d = &self.data;
        let mut out = String::new();
        out.push_str(&format!("field      {}\n", self.field));
        out.push_str(&format!("genus      {}\n", d.genus));
        out.push_str(&format!(
            "branch     r = {}, orbits = {}{}\n",
            d.r(),
            d.orbits.len(),
            if d.inverted {
                ", coordinate inverted"
            } else {
                ""
            }
        ));
        for bp in d.points() {
            out.push_str(&format!(
                "  {:<8} m = {}, M = {}, delta = {}, lambda = {}, d = {}\n",
                bp.place.key(),
                bp.m,
                bp.big_m,
                bp.delta,
                proj_str(bp.lambda),
                bp.different
            ));
        }
        out.push_str(&format!("kH         {}\n", pretty_kh(&self.kh)));
        out.push_str(&format!("kG         {}\n", pretty_kg(&self.kg)));
        match &self.verification {
            None => out.push_str("verify     skipped\n"),
            Some(v) => out.push_str(&format!(
                "verify     {} (kH {}, kG {}, restriction {})\n",
                if v.passed() { "PASS" } else { "FAIL" },
                ok(v.kh_match),
                ok(v.kg_match),
                ok(v.restriction_match)
            )),
        }
        let t: Vec<String> = self
            .timings_ms
            .iter()
            .map(|(k, ms)| format!("{k} {ms:.1} ms"))
            .collect();
        out.push_str(&format!("timings    {}\n", t.join(", ")));
        out
    }
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "mismatch"
    }
}

fn proj_str(p: Proj) -> String {
    match p {
        Proj::Fin(a) => a.0.to_string(),
        Proj::Inf => "∞".into(),
    }
}

fn with_mult(s: String, m: u64) -> String {
    if m == 1 {
        s
    } else {
        format!("{s}^{m}")
    }
}

/// kH labels as k, M_{2n+1,x}, N_{2n,λ}.
pub fn pretty_kh_label(l: &KhLabel) -> String {
    match *l {
        KhLabel::Triv => "k".into(),
        KhLabel::String { dim, x } => format!("M_{{{dim},{x}}}"),
        KhLabel::EvenDim { dim, lambda } => format!("N_{{{dim},{}}}", proj_str(lambda)),
    }
}

/// kG labels as S_i, M_{2n+1,x,i}, N_{2n,∗,i}, B_{6n,μ}.
pub fn pretty_kg_label(l: &KgLabel) -> String {
    match *l {
        KgLabel::Simple { i } => format!("S_{i}"),
        KgLabel::OddString { dim, x, i } => format!("M_{{{dim},{x},{i}}}"),
        KgLabel::EvenString { dim, star, i } => {
            let s = match star {
                Star::Zero => "0",
                Star::Inf => "∞",
            };
            format!("N_{{{dim},{s},{i}}}")
        }
        KgLabel::Band { dim, mu } => format!("B_{{{dim},{}}}", mu.0),
    }
}

pub fn pretty_kh(d: &KhDecomposition) -> String {
    join(
        d.entries()
            .iter()
            .map(|(l, m)| with_mult(pretty_kh_label(l), *m)),
    )
}

pub fn pretty_kg(d: &KgDecomposition) -> String {
    join(
        d.entries()
            .iter()
            .map(|(l, m)| with_mult(pretty_kg_label(l), *m)),
    )
}

fn join(parts: impl Iterator<Item = String>) -> String {
    let v: Vec<String> = parts.collect();
    if v.is_empty() {
        "0".into()
    } else {
        v.join(" ⊕ ")
    }
}

fn ram_json(d: &RamData, trunc: usize) -> Value {
    let f = &d.field;
    let mut points = Vec::new();
    for bp in d.points() {
        let mut p = serde_json::to_value(bp).expect("branch point serializes");
        if trunc > 0 {
            let ch = d.alpha.laurent_at(f, bp.place, trunc);
            p["laurent"] = json!({
                "ord": ch.ord,
                "coeffs": ch.coeffs.iter().map(|a| a.0).collect::<Vec<_>>(),
            });
        }
        points.push(p);
    }
    let orbits: Vec<Value> = d
        .orbits
        .iter()
        .map(|o| {
            json!({
                "psi": o.psi.0,
                "lambda": o.lambda,
                "phi": o.phi,
                "class": o.klass,
            })
        })
        .collect();
    json!({
        "genus": d.genus,
        "inverted": d.inverted,
        "r": d.r(),
        "alpha_reduced": d.alpha.to_json(),
        "points": points,
        "orbits": orbits,
    })
}

fn timed<T>(log: &mut Vec<(&'static str, f64)>, key: &'static str, go: impl FnOnce() -> T) -> T {
    let t = Instant::now();
    let out = go();
    log.push((key, t.elapsed().as_secs_f64() * 1e3));
    out
}

/// Build the global representation and compare the oracle's multiplicities
/// with the closed forms.
pub fn verify(data: &RamData, kh: &KhDecomposition, kg: &KgDecomposition) -> Result<Verification> {
    let f = &data.field;
    let g = build_global_rep(data)?;
    let ctx = orbit_context(data);
    let sg = decompose_kg(f, &g.rep, &ctx)?;
    let sh = decompose_kh(f, &g.rep, &ctx)?;
    let restricted = restrict_decomposition(f, kg)?;
    let v = Verification {
        kh_match: sh.multiplicities == *kh && sh.residual_zero,
        kg_match: sg.multiplicities == *kg && sg.residual_zero,
        restriction_match: restricted == *kh,
        json: Value::Null,
    };
    let json = json!({
        "status": if v.passed() { "PASS" } else { "FAIL" },
        "dim": g.rep.dim(),
        "kh_match": v.kh_match,
        "kg_match": v.kg_match,
        "restriction_match": v.restriction_match,
        "kH": sh.to_json(),
        "kG": sg.to_json(),
        "notes": g.notes,
    });
    Ok(Verification { json, ..v })
}

/// Run one job end to end.
pub fn run_job(job: &JobSpec) -> Result<Report> {
    let f = &job.field;
    let mut t = Vec::new();
    let a4 = timed(&mut t, "conditions", || check_a4_conditions(f, &job.alpha))?;
    if !a4.trace_zero {
        return Err(Error::TraceNonzero);
    }
    for (ok, which) in [
        (a4.nontrivial_alpha, "alpha"),
        (a4.nontrivial_rho_alpha, "rho(alpha)"),
        (a4.nontrivial_sum, "alpha + rho(alpha)"),
    ] {
        if !ok {
            return Err(Error::TrivialAlpha {
                which: which.into(),
            });
        }
    }
    let data = timed(&mut t, "analyze", || analyze(f, &job.alpha))?;
    let kh = timed(&mut t, "kh", || kh_decomposition(&data))?;
    let kg = timed(&mut t, "kg", || match job.mode {
        Mode::Analyze => kg_decomposition(&data),
        Mode::Hkg => hkg_decomposition(&data),
    })?;
    let verification = if job.verify {
        Some(timed(&mut t, "verify", || verify(&data, &kh, &kg))?)
    } else {
        None
    };
    let json = json!({
        "schema": SCHEMA,
        "mode": match job.mode { Mode::Analyze => "analyze", Mode::Hkg => "hkg" },
        "field": f.spec(),
        "alpha": job.alpha.to_json(),
        "example": job.example,
        "conditions": a4,
        "ram": ram_json(&data, job.trunc),
        "kH": kh.to_json(),
        "kG": kg.to_json(),
        "verification": verification.as_ref().map_or(json!("skipped"), |v| v.json.clone()),
    });
    Ok(Report {
        field: *f,
        data,
        kh,
        kg,
        verification,
        timings_ms: t,
        json,
    })
}
