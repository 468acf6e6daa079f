//! JSON and CSV formats.
//!
//! Matrices are row-major nested arrays of `[re, im]` pairs. Tables are
//! `{m, n, values}` with `values[r][s][k][l]` and outcome index `0` for `-1`,
//! `1` for `+1`. Floats are written with 9 significant digits.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::{Error, Result};
use crate::instrument::Instrument;
use crate::linalg::{ComplexMatrix, C64};
use crate::operator::{DichotomicObservable, Outcome, PureState, UnitaryMatrix};
use crate::scenario::{CorrelatorMatrix, ProbabilityTable, TemporalScenario};

pub type MatrixJson = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(m: &ComplexMatrix) -> MatrixJson {
    (0..m.dim())
        .map(|i| (0..m.dim()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn matrix_from_json(rows: &MatrixJson) -> Result<ComplexMatrix> {
    let rows: Vec<Vec<C64>> = rows
        .iter()
        .map(|r| r.iter().map(|&[re, im]| C64::new(re, im)).collect())
        .collect();
    ComplexMatrix::from_rows(&rows)
}

fn vector_to_json(v: &[C64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioJson {
    pub dim: usize,
    pub psi: Vec<[f64; 2]>,
    pub alice: Vec<MatrixJson>,
    pub bob: Vec<MatrixJson>,
    #[serde(default)]
    pub dynamics: Option<MatrixJson>,
}

impl From<&TemporalScenario> for ScenarioJson {
    fn from(sc: &TemporalScenario) -> Self {
        Self {
            dim: sc.dim(),
            psi: vector_to_json(sc.psi().amplitudes()),
            alice: sc
                .alice()
                .iter()
                .map(|a| matrix_to_json(a.matrix()))
                .collect(),
            bob: sc
                .bob()
                .iter()
                .map(|b| matrix_to_json(b.matrix()))
                .collect(),
            dynamics: sc.dynamics().map(|u| matrix_to_json(u.matrix())),
        }
    }
}

impl ScenarioJson {
    /// Validates every operator and the declared dimension.
    pub fn to_scenario(&self) -> Result<TemporalScenario> {
        if self.psi.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: self.psi.len(),
            });
        }
        let psi = PureState::new(self.psi.iter().map(|&[re, im]| C64::new(re, im)).collect())?;
        let observables = |ms: &[MatrixJson]| -> Result<Vec<DichotomicObservable>> {
            ms.iter()
                .map(|m| {
                    let m = matrix_from_json(m)?;
                    if m.dim() != self.dim {
                        return Err(Error::DimensionMismatch {
                            expected: self.dim,
                            found: m.dim(),
                        });
                    }
                    DichotomicObservable::new(m)
                })
                .collect()
        };
        let dynamics = self
            .dynamics
            .as_ref()
            .map(|m| matrix_from_json(m).and_then(UnitaryMatrix::new))
            .transpose()?;
        TemporalScenario::new(
            psi,
            observables(&self.alice)?,
            observables(&self.bob)?,
            dynamics,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableJson {
    pub m: usize,
    pub n: usize,
    pub values: Vec<Vec<Vec<Vec<f64>>>>,
}

impl From<&ProbabilityTable> for TableJson {
    fn from(t: &ProbabilityTable) -> Self {
        Self {
            m: t.m(),
            n: t.n(),
            values: t.to_nested(),
        }
    }
}

impl TableJson {
    pub fn to_table(&self) -> Result<ProbabilityTable> {
        ProbabilityTable::from_nested(self.m, self.n, &self.values)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InstrumentJson {
    pub dim: usize,
    /// `kraus[k][r]`, a list of operators per outcome.
    pub kraus: Vec<Vec<Vec<MatrixJson>>>,
    /// `povm[l][s]`.
    pub povm: Vec<Vec<MatrixJson>>,
}

impl From<&Instrument> for InstrumentJson {
    fn from(inst: &Instrument) -> Self {
        Self {
            dim: inst.dim(),
            kraus: (0..inst.m())
                .map(|k| {
                    Outcome::BOTH
                        .iter()
                        .map(|&r| inst.kraus(k, r).iter().map(matrix_to_json).collect())
                        .collect()
                })
                .collect(),
            povm: (0..inst.n())
                .map(|l| {
                    Outcome::BOTH
                        .iter()
                        .map(|&s| matrix_to_json(inst.povm(l, s)))
                        .collect()
                })
                .collect(),
        }
    }
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

pub fn parse_scenario(text: &str) -> Result<TemporalScenario> {
    parse::<ScenarioJson>(text, "scenario")?.to_scenario()
}

pub fn parse_table(text: &str) -> Result<ProbabilityTable> {
    parse::<TableJson>(text, "table")?.to_table()
}

/// An array of rows.
pub fn parse_correlators(text: &str) -> Result<CorrelatorMatrix> {
    let rows: Vec<Vec<f64>> = parse(text, "correlators")?;
    CorrelatorMatrix::from_rows(&rows)
}

/// `x` with 9 significant digits in the shortest of fixed and exponent
/// notation, trailing zeros removed, like C's `%.9g`.
pub fn format_g9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-4..9).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa), exp.abs())
    } else {
        trim(&format!("{x:.*}", (8 - exp) as usize))
    }
}

/// Pretty JSON with floats through [`format_g9`].
struct G9Formatter<'a>(PrettyFormatter<'a>);

impl Formatter for G9Formatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(format_g9(value).as_bytes())
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut out, G9Formatter(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("in-memory serialization");
    out.push(b'\n');
    String::from_utf8(out).expect("JSON is UTF-8")
}

/// `E1,E2` rows with LF line endings.
pub fn write_region_csv<W: Write>(points: &[[f64; 2]], w: W) -> Result<()> {
    let mut csv = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w);
    let io_err = |e: csv::Error| Error::Parse(format!("csv: {e}"));
    csv.write_record(["E1", "E2"]).map_err(io_err)?;
    for [e1, e2] in points {
        csv.write_record([format_g9(*e1), format_g9(*e2)])
            .map_err(io_err)?;
    }
    csv.flush().map_err(|e| Error::Parse(format!("csv: {e}")))
}

pub fn read_region_csv(text: &str) -> Result<Vec<[f64; 2]>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let bad = |e: String| Error::Parse(format!("csv: {e}"));
    let header = r.headers().map_err(|e| bad(e.to_string()))?;
    if header != vec!["E1", "E2"] {
        return Err(bad(format!("unexpected header {header:?}")));
    }
    r.records()
        .map(|rec| {
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            let num = |i: usize| {
                rec.get(i)
                    .unwrap_or("")
                    .parse::<f64>()
                    .map_err(|e| bad(e.to_string()))
            };
            Ok([num(0)?, num(1)?])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_scenario, rng_from_seed};

    #[test]
    fn g9_matches_printf() {
        let cases = [
            (2.0 * std::f64::consts::SQRT_2, "2.82842712"),
            (0.321928094887, "0.321928095"),
            (0.25, "0.25"),
            (1.0, "1"),
            (-0.5, "-0.5"),
            (1e-7, "1e-07"),
            (123456789.0, "123456789"),
            (1234567890.0, "1.23456789e+09"),
            (0.0001, "0.0001"),
            (0.00001234, "1.234e-05"),
            (9.9999999999, "10"),
        ];
        for (x, want) in cases {
            assert_eq!(format_g9(x), want, "{x}");
        }
    }

    #[test]
    fn g9_values_reparse_to_nine_digits() {
        let mut rng = rng_from_seed(81);
        for _ in 0..1000 {
            let x: f64 = rand::Rng::random_range(&mut rng, -1e3..1e3);
            let y: f64 = format_g9(x).parse().unwrap();
            assert!((x - y).abs() <= 5e-9 * x.abs().max(1e-300));
        }
    }

    #[test]
    fn json_uses_short_floats_and_null_for_nan() {
        let s = to_json(&vec![0.1 + 0.2, f64::NAN]);
        assert!(s.contains("0.3\n") || s.contains("0.3,"), "{s}");
        assert!(s.contains("null"));
    }

    #[test]
    fn scenario_round_trip() {
        let mut rng = rng_from_seed(82);
        for i in 0..20 {
            let sc = random_scenario(2 + i % 3, 2, 2, i % 2 == 0, &mut rng);
            let text = serde_json::to_string(&ScenarioJson::from(&sc)).unwrap();
            assert_eq!(parse_scenario(&text).unwrap(), sc);
        }
    }

    #[test]
    fn scenario_errors_are_reported() {
        let bad = r#"{"dim": 2, "psi": [[1,0],[0,0]], "alice": [[[[1,0],[0,0]],[[0,0],[2,0]]]], "bob": [], "dynamics": null}"#;
        assert!(matches!(
            parse_scenario(bad),
            Err(Error::NotInvolution { .. })
        ));
        let e = parse_scenario("{\n  \"dim\": 2,\n  \"psi\": oops\n}").unwrap_err();
        assert!(
            matches!(&e, Error::Parse(msg) if msg.contains("line 3")),
            "{e}"
        );
        let wrong_dim = r#"{"dim": 3, "psi": [[1,0],[0,0]], "alice": [], "bob": []}"#;
        assert!(matches!(
            parse_scenario(wrong_dim),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn table_round_trip() {
        let t = crate::instrument::pr_box_table();
        let text = to_json(&TableJson::from(&t));
        assert_eq!(parse_table(&text).unwrap(), t);
    }

    #[test]
    fn correlator_parsing() {
        let c = parse_correlators("[[-1,-1],[-1,1]]").unwrap();
        assert_eq!(c.get(1, 1), 1.0);
        assert!(parse_correlators("[[2,0],[0,0]]").is_err());
    }

    #[test]
    fn csv_round_trip_with_lf() {
        let pts = vec![[0.5, -0.25], [1.0, 0.0]];
        let mut buf = Vec::new();
        write_region_csv(&pts, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "E1,E2\n0.5,-0.25\n1,0\n");
        assert_eq!(read_region_csv(&text).unwrap(), pts);
    }
}
