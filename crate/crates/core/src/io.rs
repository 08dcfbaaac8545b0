//! State files, report serialization, and trajectory output.
//!
//! State files are sparse JSON listing Fock-basis entries by occupation
//! vector; unlisted elements are zero. Loading validates the schema and
//! every physical invariant, so a loaded state is a valid state. Saving is
//! canonical: entries sorted by flat index, exact zeros omitted, floats
//! printed with 17 significant digits so that save ∘ load is the identity
//! on canonical files and every double survives the round trip bit for
//! bit.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::criteria::{ClassificationVerdict, MinorDiagnostics, SeparableCertificate, Verdict};
use crate::error::{Error, Result};
use crate::fock::{FockBasis, ModeBipartition};
use crate::negativity::{NegativityMethod, NegativityReport};
use crate::numerics::TolerancePolicy;
use crate::states::{DensityMatrix, PureState};

/// JSON formatter that prints every float with 17 significant digits,
/// enough to reproduce any f64 exactly on parse.
#[derive(Debug, Default, Clone, Copy)]
pub struct SigFigFormatter;

impl serde_json::ser::Formatter for SigFigFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        if value.is_finite() {
            write!(writer, "{:.16e}", value)
        } else {
            // Validated payloads never carry non-finite values; emit the
            // JSON null rather than an unparseable token if one slips by.
            writer.write_all(b"null")
        }
    }
}

/// Serialize with the 17-significant-digit float format.
pub fn to_json_17<T: Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigFigFormatter);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(out).expect("JSON serializer emits UTF-8"))
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq, Clone, Copy)]
#[serde(rename_all = "lowercase")]
enum KindDto {
    Pure,
    Density,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryDto {
    row: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    col: Option<Vec<u32>>,
    re: f64,
    im: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFileDto {
    #[serde(rename = "N")]
    n: u32,
    #[serde(rename = "M")]
    modes: usize,
    m: usize,
    kind: KindDto,
    entries: Vec<EntryDto>,
}

/// A state loaded from a file, either kind.
#[derive(Debug, Clone)]
pub enum LoadedState {
    Pure(PureState),
    Density(DensityMatrix),
}

impl LoadedState {
    pub fn basis(&self) -> &Arc<FockBasis> {
        match self {
            LoadedState::Pure(psi) => psi.basis(),
            LoadedState::Density(rho) => rho.basis(),
        }
    }

    /// View as a density matrix, promoting a pure state to its projector.
    pub fn to_density(&self) -> DensityMatrix {
        match self {
            LoadedState::Pure(psi) => crate::states::pure_to_density(psi),
            LoadedState::Density(rho) => rho.clone(),
        }
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::StateFile(msg.into())
}

/// Parse and validate a state file. Schema violations, occupation errors,
/// duplicates, and physically invalid states are all rejected.
pub fn parse_state(json: &str, policy: &TolerancePolicy) -> Result<LoadedState> {
    let dto: StateFileDto = serde_json::from_str(json)?;
    let bipartition = ModeBipartition::new(dto.modes, dto.m)?;
    let basis = FockBasis::new(dto.n, bipartition)?;
    match dto.kind {
        KindDto::Pure => {
            let mut amplitudes = DVector::zeros(basis.dim());
            let mut seen = std::collections::BTreeSet::new();
            for entry in &dto.entries {
                if entry.col.is_some() {
                    return Err(bad("pure entries must omit \"col\""));
                }
                let (k, s, sp) = basis.index_of(&entry.row)?;
                let flat = basis.flat_index(k, s, sp)?;
                if !seen.insert(flat) {
                    return Err(bad(format!("duplicate entry for row {:?}", entry.row)));
                }
                amplitudes[flat] = Complex64::new(entry.re, entry.im);
            }
            Ok(LoadedState::Pure(PureState::new(basis, amplitudes, policy)?))
        }
        KindDto::Density => {
            let dim = basis.dim();
            let mut dense = DMatrix::zeros(dim, dim);
            let mut seen = std::collections::BTreeSet::new();
            for entry in &dto.entries {
                let col = entry
                    .col
                    .as_ref()
                    .ok_or_else(|| bad("density entries require \"col\""))?;
                let (rk, rs, rsp) = basis.index_of(&entry.row)?;
                let (ck, cs, csp) = basis.index_of(col)?;
                let r = basis.flat_index(rk, rs, rsp)?;
                let c = basis.flat_index(ck, cs, csp)?;
                if !seen.insert((r, c)) {
                    return Err(bad(format!(
                        "duplicate entry for row {:?}, col {:?}",
                        entry.row, col
                    )));
                }
                dense[(r, c)] = Complex64::new(entry.re, entry.im);
            }
            Ok(LoadedState::Density(DensityMatrix::from_dense(
                basis, &dense, policy,
            )?))
        }
    }
}

/// Load a state file from disk.
pub fn load_state(path: &Path, policy: &TolerancePolicy) -> Result<LoadedState> {
    let json = std::fs::read_to_string(path)?;
    parse_state(&json, policy)
}

fn file_header(basis: &Arc<FockBasis>, kind: KindDto) -> StateFileDto {
    StateFileDto {
        n: basis.n_particles(),
        modes: basis.bipartition().modes(),
        m: basis.bipartition().left(),
        kind,
        entries: Vec::new(),
    }
}

/// Canonical JSON for a pure state: entries in flat-index order, exact
/// zeros omitted.
pub fn save_pure(psi: &PureState) -> Result<String> {
    let basis = psi.basis();
    let mut dto = file_header(basis, KindDto::Pure);
    for (flat, amp) in psi.amplitudes().iter().enumerate() {
        if amp.re == 0.0 && amp.im == 0.0 {
            continue;
        }
        dto.entries.push(EntryDto {
            row: basis.occupation_at(flat)?,
            col: None,
            re: amp.re,
            im: amp.im,
        });
    }
    to_json_17(&dto)
}

/// Canonical JSON for a density matrix: entries in (row, col) flat order,
/// exact zeros omitted.
pub fn save_density(rho: &DensityMatrix) -> Result<String> {
    let basis = rho.basis();
    let dense = rho.to_dense();
    let mut dto = file_header(basis, KindDto::Density);
    for r in 0..dense.nrows() {
        for c in 0..dense.ncols() {
            let value = dense[(r, c)];
            if value.re == 0.0 && value.im == 0.0 {
                continue;
            }
            dto.entries.push(EntryDto {
                row: basis.occupation_at(r)?,
                col: Some(basis.occupation_at(c)?),
                re: value.re,
                im: value.im,
            });
        }
    }
    to_json_17(&dto)
}

/// Canonical JSON for either kind.
pub fn save_state(state: &LoadedState) -> Result<String> {
    match state {
        LoadedState::Pure(psi) => save_pure(psi),
        LoadedState::Density(rho) => save_density(rho),
    }
}

#[derive(Debug, Serialize)]
struct MinorNegativityDto {
    k: usize,
    negativity: f64,
}

#[derive(Debug, Serialize)]
struct MinorValueDto {
    k: usize,
    value: f64,
}

#[derive(Debug, Serialize)]
struct OffDiagonalDto {
    k: usize,
    l: usize,
    trace_norm: f64,
}

#[derive(Debug, Serialize)]
struct NegativityReportDto {
    total: f64,
    method: &'static str,
    per_minor: Vec<MinorNegativityDto>,
    off_diagonal: Vec<OffDiagonalDto>,
}

fn method_name(method: NegativityMethod) -> &'static str {
    match method {
        NegativityMethod::SectorDecomposition => "sector",
        NegativityMethod::TwoModeClosedForm => "two-mode",
        NegativityMethod::BruteForceOracle => "oracle",
    }
}

/// Negativity report as a JSON value (floats stay exact until the final
/// 17-digit serialization).
pub fn negativity_report_value(report: &NegativityReport) -> Result<serde_json::Value> {
    let dto = NegativityReportDto {
        total: report.total,
        method: method_name(report.method),
        per_minor: report
            .per_minor
            .iter()
            .map(|(&k, &negativity)| MinorNegativityDto { k, negativity })
            .collect(),
        off_diagonal: report
            .off_diagonal
            .iter()
            .map(|(&(k, l), &trace_norm)| OffDiagonalDto { k, l, trace_norm })
            .collect(),
    };
    Ok(serde_json::to_value(dto)?)
}

/// Negativity report as a canonical JSON string.
pub fn negativity_report_json(report: &NegativityReport) -> Result<String> {
    to_json_17(&negativity_report_value(report)?)
}

#[derive(Debug, Serialize)]
struct ComplexDto {
    re: f64,
    im: f64,
}

fn complex_vec(v: &DVector<Complex64>) -> Vec<ComplexDto> {
    v.iter().map(|z| ComplexDto { re: z.re, im: z.im }).collect()
}

#[derive(Debug, Serialize)]
struct ComponentDto {
    weight: f64,
    k: usize,
    left: Vec<ComplexDto>,
    right: Vec<ComplexDto>,
}

#[derive(Debug, Serialize)]
struct CertificateDto {
    components: Vec<ComponentDto>,
}

#[derive(Debug, Serialize)]
struct DiagnosticsDto {
    off_diagonal_frobenius: Vec<OffDiagonalValueDto>,
    minor_min_pt_eigenvalues: Vec<MinorValueDto>,
    minor_realignment: Vec<MinorValueDto>,
}

#[derive(Debug, Serialize)]
struct OffDiagonalValueDto {
    k: usize,
    l: usize,
    value: f64,
}

#[derive(Debug, Serialize)]
struct VerdictDto {
    verdict: &'static str,
    negativity: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<CertificateDto>,
    #[serde(skip_serializing_if = "Option::is_none")]
    diagnostics: Option<DiagnosticsDto>,
}

fn verdict_name(verdict: Verdict) -> &'static str {
    match verdict {
        Verdict::SeparableCertified => "SeparableCertified",
        Verdict::EntangledNpt => "EntangledNPT",
        Verdict::PptUndecided => "PPTUndecided",
    }
}

fn certificate_dto(cert: &SeparableCertificate) -> CertificateDto {
    CertificateDto {
        components: cert
            .components
            .iter()
            .map(|c| ComponentDto {
                weight: c.weight,
                k: c.k,
                left: complex_vec(&c.left),
                right: complex_vec(&c.right),
            })
            .collect(),
    }
}

fn minor_values(map: &BTreeMap<usize, f64>) -> Vec<MinorValueDto> {
    map.iter()
        .map(|(&k, &value)| MinorValueDto { k, value })
        .collect()
}

fn diagnostics_dto(diag: &MinorDiagnostics) -> DiagnosticsDto {
    DiagnosticsDto {
        off_diagonal_frobenius: diag
            .off_diagonal_frobenius
            .iter()
            .map(|(&(k, l), &value)| OffDiagonalValueDto { k, l, value })
            .collect(),
        minor_min_pt_eigenvalues: minor_values(&diag.minor_min_pt_eigenvalues),
        minor_realignment: minor_values(&diag.minor_realignment),
    }
}

/// Classification verdict as a JSON value.
pub fn verdict_value(verdict: &ClassificationVerdict) -> Result<serde_json::Value> {
    let dto = VerdictDto {
        verdict: verdict_name(verdict.verdict),
        negativity: verdict.negativity,
        certificate: verdict.certificate.as_ref().map(certificate_dto),
        diagnostics: verdict.diagnostics.as_ref().map(diagnostics_dto),
    };
    Ok(serde_json::to_value(dto)?)
}

/// Classification verdict as a canonical JSON string.
pub fn verdict_json(verdict: &ClassificationVerdict) -> Result<String> {
    to_json_17(&verdict_value(verdict)?)
}

/// Trajectory CSV: header plus one `t,negativity` row per grid point,
/// floats with 17 significant digits.
pub fn trajectory_csv(points: &[(f64, f64)]) -> String {
    let mut out = String::from("t,negativity\n");
    for &(t, neg) in points {
        out.push_str(&format!("{:.16e},{:.16e}\n", t, neg));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::classify;
    use crate::negativity::{negativity_general, negativity_oracle};
    use crate::partial_transpose::DEFAULT_EXTENDED_CAP;
    use crate::states::{
        from_fock_occupation, mix, pure_to_density, random_density, random_pure,
        test_fixtures::noon,
    };

    fn policy() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    fn basis(n: u32, modes: usize, left: usize) -> Arc<FockBasis> {
        FockBasis::new(n, ModeBipartition::new(modes, left).unwrap()).unwrap()
    }

    #[test]
    fn pure_state_round_trips_exactly() {
        for seed in 0..10u64 {
            let b = basis(3, 4, 2);
            let psi = random_pure(&b, 5000 + seed).unwrap();
            let json = save_pure(&psi).unwrap();
            let loaded = match parse_state(&json, &policy()).unwrap() {
                LoadedState::Pure(p) => p,
                LoadedState::Density(_) => panic!("kind preserved"),
            };
            assert_eq!(loaded.amplitudes(), psi.amplitudes(), "bitwise round trip");
            assert_eq!(save_pure(&loaded).unwrap(), json, "canonical fixed point");
        }
    }

    #[test]
    fn density_round_trips_exactly() {
        for seed in 0..6u64 {
            let b = basis(2, 3, 1);
            let rho = random_density(&b, 3, 40 + seed).unwrap();
            let json = save_density(&rho).unwrap();
            let loaded = match parse_state(&json, &policy()).unwrap() {
                LoadedState::Density(d) => d,
                LoadedState::Pure(_) => panic!("kind preserved"),
            };
            assert_eq!(loaded.to_dense(), rho.to_dense());
            assert_eq!(save_density(&loaded).unwrap(), json);
        }
    }

    #[test]
    fn parses_handwritten_noon_file() {
        let json = r#"{
            "N": 2, "M": 2, "m": 1, "kind": "pure",
            "entries": [
                {"row": [2, 0], "re": 0.7071067811865476, "im": 0.0},
                {"row": [0, 2], "re": 0.7071067811865476, "im": 0.0}
            ]
        }"#;
        let state = parse_state(json, &policy()).unwrap();
        let rho = state.to_density();
        let report = negativity_general(&rho, &policy()).unwrap();
        assert!((report.total - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_schema_violations() {
        let p = policy();
        // Unknown field.
        assert!(matches!(
            parse_state(r#"{"N":1,"M":2,"m":1,"kind":"pure","entries":[],"extra":0}"#, &p),
            Err(Error::Json(_))
        ));
        // Malformed JSON.
        assert!(matches!(parse_state("{", &p), Err(Error::Json(_))));
        // Pure entry with col.
        let with_col = r#"{"N":1,"M":2,"m":1,"kind":"pure","entries":[
            {"row":[1,0],"col":[1,0],"re":1.0,"im":0.0}]}"#;
        assert!(matches!(parse_state(with_col, &p), Err(Error::StateFile(_))));
        // Density entry without col.
        let no_col = r#"{"N":1,"M":2,"m":1,"kind":"density","entries":[
            {"row":[1,0],"re":1.0,"im":0.0}]}"#;
        assert!(matches!(parse_state(no_col, &p), Err(Error::StateFile(_))));
        // Occupation of the wrong length.
        let short = r#"{"N":1,"M":2,"m":1,"kind":"pure","entries":[
            {"row":[1],"re":1.0,"im":0.0}]}"#;
        assert!(matches!(
            parse_state(short, &p),
            Err(Error::OccupationLength { .. })
        ));
        // Occupation with the wrong particle count.
        let wrong_sum = r#"{"N":1,"M":2,"m":1,"kind":"pure","entries":[
            {"row":[2,0],"re":1.0,"im":0.0}]}"#;
        assert!(matches!(
            parse_state(wrong_sum, &p),
            Err(Error::ParticleCount { .. })
        ));
        // Duplicate entry.
        let dup = r#"{"N":1,"M":2,"m":1,"kind":"pure","entries":[
            {"row":[1,0],"re":0.8,"im":0.0},{"row":[1,0],"re":0.6,"im":0.0}]}"#;
        assert!(matches!(parse_state(dup, &p), Err(Error::StateFile(_))));
        // Invalid bipartition.
        let bad_m = r#"{"N":1,"M":2,"m":5,"kind":"pure","entries":[
            {"row":[1,0],"re":1.0,"im":0.0}]}"#;
        assert!(matches!(
            parse_state(bad_m, &p),
            Err(Error::InvalidBipartition { .. })
        ));
    }

    #[test]
    fn rejects_unphysical_states() {
        let p = policy();
        let unnormalized = r#"{"N":1,"M":2,"m":1,"kind":"pure","entries":[
            {"row":[1,0],"re":0.5,"im":0.0}]}"#;
        assert!(matches!(
            parse_state(unnormalized, &p),
            Err(Error::NotNormalized { .. })
        ));
        let non_hermitian = r#"{"N":1,"M":2,"m":1,"kind":"density","entries":[
            {"row":[1,0],"col":[1,0],"re":0.5,"im":0.0},
            {"row":[0,1],"col":[0,1],"re":0.5,"im":0.0},
            {"row":[1,0],"col":[0,1],"re":0.4,"im":0.0}]}"#;
        assert!(matches!(
            parse_state(non_hermitian, &p),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn seventeen_digits_reproduce_doubles() {
        for value in [
            1.0 / 3.0,
            std::f64::consts::PI,
            0.1 + 0.2,
            f64::MIN_POSITIVE,
            -7.234_567_890_123_456e300,
            0.0,
        ] {
            let json = to_json_17(&value).unwrap();
            let back: f64 = serde_json::from_str(&json).unwrap();
            assert_eq!(back, value, "{json}");
        }
    }

    #[test]
    fn negativity_report_schema() {
        let rho = pure_to_density(&noon(2));
        let report = negativity_general(&rho, &policy()).unwrap();
        let json = negativity_report_json(&report).unwrap();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["method"], "sector");
        assert!((value["total"].as_f64().unwrap() - 0.5).abs() < 1e-12);
        let per_minor = value["per_minor"].as_array().unwrap();
        assert_eq!(per_minor.len(), 3, "one entry per sector");
        assert_eq!(per_minor[0]["k"], 0);
        let off = value["off_diagonal"].as_array().unwrap();
        assert_eq!(off.len(), 1);
        assert_eq!(off[0]["k"], 0);
        assert_eq!(off[0]["l"], 2);
        assert!((off[0]["trace_norm"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn oracle_report_has_empty_decomposition() {
        let rho = pure_to_density(&noon(2));
        let report = negativity_oracle(&rho, &policy(), DEFAULT_EXTENDED_CAP).unwrap();
        let value = negativity_report_value(&report).unwrap();
        assert_eq!(value["method"], "oracle");
        assert!(value["per_minor"].as_array().unwrap().is_empty());
        assert!(value["off_diagonal"].as_array().unwrap().is_empty());
    }

    #[test]
    fn verdict_schema_carries_certificate_only_when_certified() {
        let p = policy();
        let entangled = classify(&pure_to_density(&noon(2)), &p).unwrap();
        let value = verdict_value(&entangled).unwrap();
        assert_eq!(value["verdict"], "EntangledNPT");
        assert!(value.get("certificate").is_none());
        assert!(value.get("diagnostics").is_none());

        let b = basis(2, 2, 1);
        let separable = mix(
            &[0.5, 0.5],
            &[
                from_fock_occupation(&b, &[2, 0]).unwrap(),
                from_fock_occupation(&b, &[0, 2]).unwrap(),
            ],
            &p,
        )
        .unwrap();
        let verdict = classify(&separable, &p).unwrap();
        let value = verdict_value(&verdict).unwrap();
        assert_eq!(value["verdict"], "SeparableCertified");
        let components = value["certificate"]["components"].as_array().unwrap();
        assert_eq!(components.len(), 2);
        assert!(components[0]["left"].as_array().unwrap()[0]["re"].is_number());
    }

    #[test]
    fn trajectory_csv_is_parseable_and_exact() {
        let points = vec![(0.0, 0.5), (0.5, 0.5 * (-2.0f64).exp())];
        let csv = trajectory_csv(&points);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("t,negativity"));
        for (line, &(t, neg)) in lines.zip(&points) {
            let mut fields = line.split(',');
            let t_back: f64 = fields.next().unwrap().parse().unwrap();
            let n_back: f64 = fields.next().unwrap().parse().unwrap();
            assert_eq!(t_back, t);
            assert_eq!(n_back, neg);
        }
    }

    #[test]
    fn save_load_save_is_identity_for_mixed_blocks() {
        let p = policy();
        let b = basis(2, 4, 2);
        let rho = mix(
            &[0.6, 0.4],
            &[
                from_fock_occupation(&b, &[1, 0, 1, 0]).unwrap(),
                from_fock_occupation(&b, &[0, 2, 0, 0]).unwrap(),
            ],
            &p,
        )
        .unwrap();
        let first = save_density(&rho).unwrap();
        let reloaded = parse_state(&first, &p).unwrap();
        let second = save_state(&reloaded).unwrap();
        assert_eq!(first, second);
    }
}
