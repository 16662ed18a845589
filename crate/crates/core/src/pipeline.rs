//! Single-`c` verification, disk scans, threshold recomputation, reduction jobs and index sweeps.

use std::cmp::Ordering;

use rug::{Integer, Rational};
use serde::Serialize;

use crate::ball::{with_adaptive_prec, Ball, Modulus};
use crate::bennett::{
    bennett_params, resolve_large_c, thue_from_triples, trivial_solution_set, BennettReport,
    LAMBDA_WINDOW, LARGE_C,
};
use crate::error::{Error, Result};
use crate::forms::{normalize_generator, GeneratorTriple, QuarticParams};
use crate::linforms::{bw_global_bounds, normalize_c, BwBounds};
use crate::oracle::{
    brute_system, brute_thue_units, generators_of, intersection_roots, merged_generators,
    special_case_c1, MuCase, SpecialStatus,
};
use crate::pell::admissible_mu_eps;
use crate::reduce::{
    default_schedule, finish_small_indices, reduce_for_c, zero_index_hits, ReductionOutcome,
};
use crate::ring::{QuadInt, RingSpec};

pub const SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Classification {
    #[serde(rename = "Excluded_0_pm2")]
    Excluded,
    InSc,
    #[serde(rename = "ReZero_Closed")]
    ReZero,
    #[serde(rename = "LargeC_Bennett")]
    LargeC,
    #[serde(rename = "Reduced_And_Searched")]
    Reduced,
}

/// The fixed dispatch order: excluded, exceptional, purely imaginary, large, reduced.
pub fn classify(c: &QuadInt) -> Result<Classification> {
    let ring = c.ring();
    if c.is_zero() || *c == ring.int(2) || *c == ring.int(-2) {
        return Ok(Classification::Excluded);
    }
    if c.in_sc() {
        return Ok(Classification::InSc);
    }
    if c.re_sign() == Ordering::Equal {
        return Ok(Classification::ReZero);
    }
    if c.modulus().cmp_i64(LARGE_C) != Ordering::Less {
        return Ok(Classification::LargeC);
    }
    Ok(Classification::Reduced)
}

#[derive(Clone, Debug, Serialize)]
pub struct FinishRecord {
    /// Both indices were searched up to this value.
    pub bound: u64,
    pub hits: Vec<(u64, u64, i8)>,
    pub zero_index_hits: Vec<(u64, u64, i8)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub schema: u32,
    pub ring: RingSpec,
    pub c: QuadInt,
    pub classification: Classification,
    pub closed: bool,
    pub mu_cases: Vec<MuCase>,
    pub bennett: Option<BennettReport>,
    pub reductions: Option<(ReductionOutcome, ReductionOutcome)>,
    pub finish: Option<FinishRecord>,
    pub generators: Vec<GeneratorTriple>,
    pub witness: Option<String>,
}

/// Per-`mu` records once only the trivial Pellian solutions remain.
fn trivial_cases(params: &QuarticParams) -> Result<Vec<MuCase>> {
    let ring = params.ring();
    admissible_mu_eps(&ring)
        .into_iter()
        .map(|me| {
            let triples = trivial_solution_set(&ring, &me.mu)?;
            MuCase::from_triples(params, &me.mu, Some(me.eps), triples)
        })
        .collect()
}

/// The unit orbits of `xi` and `2 xi - 2c xi^2 + xi^3`, normalized.
pub fn expected_generators(params: &QuarticParams) -> Vec<GeneratorTriple> {
    let ring = params.ring();
    let mut out = vec![
        normalize_generator(&GeneratorTriple::xi(&ring)),
        normalize_generator(&GeneratorTriple::second(params)),
    ];
    out.dedup();
    out
}

fn check_generators(params: &QuarticParams, got: &[GeneratorTriple]) -> Result<()> {
    let want = expected_generators(params);
    let same = got.len() == want.len() && want.iter().all(|g| got.contains(g));
    if !same {
        let list: Vec<String> = got.iter().map(|g| g.to_string()).collect();
        return Err(Error::Anomaly(format!(
            "c = {}: generators [{}] differ from the expected two classes",
            params.c(),
            list.join(", ")
        )));
    }
    Ok(())
}

/// Full verification of one parameter.
pub fn verify(c: &QuadInt, prec: u32) -> Result<VerifyReport> {
    let ring = *c.ring();
    let classification = classify(c)?;
    let mut report = VerifyReport {
        schema: SCHEMA,
        ring,
        c: c.clone(),
        classification,
        closed: false,
        mu_cases: Vec::new(),
        bennett: None,
        reductions: None,
        finish: None,
        generators: Vec::new(),
        witness: None,
    };
    if classification == Classification::Excluded {
        report.witness = Some("the quartic is not irreducible with distinct roots".into());
        return Ok(report);
    }
    let params = QuarticParams::new(c.clone())?;
    match classification {
        Classification::Excluded => unreachable!(),
        Classification::InSc => {
            if c.is_unit() && c.is_rational() {
                let sc = special_case_c1(c)?;
                report.witness = sc.witness;
                if sc.status == SpecialStatus::Resolved {
                    report.mu_cases = sc.mu_cases;
                    report.generators = sc.generators;
                    report.closed = true;
                }
            } else {
                report.witness = Some("additional Pellian solution classes not resolved".into());
            }
        }
        Classification::ReZero => {
            report.mu_cases = trivial_cases(&params)?;
            report.closed = true;
        }
        Classification::LargeC => {
            let modulus = c.modulus();
            if !resolve_large_c(&modulus)? {
                return Err(Error::Anomaly(format!(
                    "approximation bound fails to exclude |c| = {modulus}"
                )));
            }
            report.bennett = Some(with_adaptive_prec(prec, |p| bennett_params(&modulus, p))?);
            report.mu_cases = trivial_cases(&params)?;
            report.closed = true;
        }
        Classification::Reduced => {
            let (pos, _) = normalize_c(c);
            let bw = bw_global_bounds(prec.max(128));
            let schedule: Vec<u32> = default_schedule()
                .into_iter()
                .filter(|&p| p >= prec.min(crate::ball::MAX_PREC))
                .collect();
            let (a, b) = reduce_for_c(&pos, &bw, &schedule)?;
            let finish = finish_for(&pos, &a, &b)?;
            report.reductions = Some((a, b));
            if !finish.hits.is_empty() || !finish.zero_index_hits.is_empty() {
                return Err(Error::Anomaly(format!(
                    "c = {c}: nontrivial intersections {:?} {:?}",
                    finish.hits, finish.zero_index_hits
                )));
            }
            report.finish = Some(finish);
            report.mu_cases = trivial_cases(&params)?;
            report.closed = true;
        }
    }
    if report.closed {
        if report.generators.is_empty() {
            report.generators = merged_generators(&report.mu_cases);
        }
        check_generators(&params, &report.generators)?;
    }
    Ok(report)
}

/// Searches both indices up to the larger reduced bound: the solution region is
/// `{m >= n, m <= Bm} u {n >= m, n <= Bn}`, which the rectangle `Bm x Bn` does not cover.
pub fn finish_for(c: &QuadInt, a: &ReductionOutcome, b: &ReductionOutcome) -> Result<FinishRecord> {
    let big = a.final_bound_int().max(b.final_bound_int());
    let bound = big.to_u64().filter(|&v| v <= 4096).ok_or_else(|| {
        Error::Contract(format!(
            "reduced bound {big} too large for the direct search"
        ))
    })?;
    Ok(FinishRecord {
        bound,
        hits: finish_small_indices(c, bound, bound),
        zero_index_hits: zero_index_hits(c, bound, bound),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanItem {
    pub c: QuadInt,
    pub classification: Classification,
    /// Extra Pellian or Thue solutions, or generators outside the expected classes.
    pub anomalies: Vec<String>,
    /// Pellian solutions outside the trivial set that no Thue solution lifts to.
    pub unlifted_pellian: Vec<(QuadInt, QuadInt, QuadInt, QuadInt)>,
    pub pellian_solutions: usize,
    pub thue_solutions: usize,
}

/// Brute-force checks for one `c` of a scan. Exceptional `c` are flagged and not held to the emptiness claims.
pub fn scan_c(c: &QuadInt, h: &Rational) -> Result<ScanItem> {
    let ring = *c.ring();
    let classification = classify(c)?;
    let mut item = ScanItem {
        c: c.clone(),
        classification,
        anomalies: Vec::new(),
        unlifted_pellian: Vec::new(),
        pellian_solutions: 0,
        thue_solutions: 0,
    };
    if classification == Classification::Excluded {
        return Ok(item);
    }
    let params = QuarticParams::new(c.clone())?;
    let strict = classification != Classification::InSc;
    let admissible = admissible_mu_eps(&ring);
    let mut gens: Vec<GeneratorTriple> = Vec::new();
    let all_thue = brute_thue_units(&params, h);
    for mu in ring.units() {
        let sys = brute_system(c, &mu, h)?;
        let thue: Vec<(QuadInt, QuadInt)> = all_thue
            .iter()
            .filter(|t| t.0 == mu)
            .map(|t| (t.1.clone(), t.2.clone()))
            .collect();
        item.pellian_solutions += sys.len();
        item.thue_solutions += thue.len();
        if !strict {
            continue;
        }
        let trivial = if admissible.iter().any(|me| me.mu == mu) {
            trivial_solution_set(&ring, &mu)?
        } else {
            Vec::new()
        };
        if trivial.iter().any(|t| !sys.contains(t)) {
            item.anomalies
                .push(format!("mu = {mu}: a trivial Pellian solution is missing"));
        }
        for t in sys.iter().filter(|t| !trivial.contains(t)) {
            if thue_from_triples(&params, &mu, std::slice::from_ref(t)).is_empty() {
                item.unlifted_pellian
                    .push((mu.clone(), t.0.clone(), t.1.clone(), t.2.clone()));
            } else {
                item.anomalies.push(format!(
                    "mu = {mu}: nontrivial Pellian solution ({}, {}, {}) with a Thue preimage",
                    t.0, t.1, t.2
                ));
            }
        }
        let lifted = thue_from_triples(&params, &mu, &trivial);
        if thue.iter().any(|pq| !lifted.contains(pq)) {
            item.anomalies
                .push(format!("mu = {mu}: Thue solution outside the trivial lift"));
        }
        for g in generators_of(&params, &thue)? {
            if !gens.contains(&g) {
                gens.push(g);
            }
        }
    }
    if strict && h >= &1 {
        if let Err(e) = check_generators(&params, &gens) {
            item.anomalies.push(e.to_string());
        }
    }
    Ok(item)
}

#[derive(Clone, Debug, Serialize)]
pub struct IntersectionItem {
    pub m: u64,
    pub n: u64,
    pub sign: i8,
    pub roots: Vec<QuadInt>,
    /// Roots outside `{0, +-1, +-2}`.
    pub unexpected: Vec<QuadInt>,
}

pub fn intersection_item(
    ring: &RingSpec,
    r: &Rational,
    m: u64,
    n: u64,
    sign: i8,
) -> Result<IntersectionItem> {
    let roots = intersection_roots(m, n, sign, ring, r)?;
    let allowed = [0i64, 1, -1, 2, -2].map(|k| ring.int(k));
    let unexpected = roots
        .iter()
        .filter(|c| !allowed.contains(c))
        .cloned()
        .collect();
    Ok(IntersectionItem {
        m,
        n,
        sign,
        roots,
        unexpected,
    })
}

/// `(m, n, sign)` for `1 <= m, n <= m_max`.
pub fn intersection_grid(m_max: u64) -> Vec<(u64, u64, i8)> {
    let mut out = Vec::new();
    for m in 1..=m_max {
        for n in 1..=m_max {
            out.push((m, n, 1));
            out.push((m, n, -1));
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct ThresholdPoint {
    pub c_abs: i64,
    pub two_minus_lambda: Ball,
    pub positive: bool,
    pub upper_log_u: Option<Ball>,
    pub lower_log_u: Ball,
    pub excludes: bool,
    /// Upper minus lower bound; negative means exclusion.
    pub margin: Option<Ball>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ThresholdsReport {
    pub schema: u32,
    pub prec_bits: u32,
    pub sign_change: (ThresholdPoint, ThresholdPoint),
    pub exclusion_fails_below: ThresholdPoint,
    pub exclusion_at: ThresholdPoint,
    pub samples: Vec<ThresholdPoint>,
    pub bw: BwBounds,
    pub m_cap: String,
    pub n_cap: String,
}

pub fn threshold_point(t: i64, prec: u32) -> Result<ThresholdPoint> {
    let rep = bennett_params(&Modulus::from_i64(t), prec)?;
    let margin = rep.upper_log_u.as_ref().map(|u| u - &rep.lower_log_u);
    Ok(ThresholdPoint {
        c_abs: t,
        positive: rep.two_minus_lambda_positive,
        two_minus_lambda: rep.two_minus_lambda,
        upper_log_u: rep.upper_log_u,
        lower_log_u: rep.lower_log_u,
        excludes: rep.excludes_nontrivial,
        margin,
    })
}

/// Sampled `|c| >= 159108` checked by the thresholds report.
pub const THRESHOLD_SAMPLES: &[i64] = &[
    LARGE_C,
    LARGE_C + 1,
    160_000,
    200_000,
    500_000,
    1_000_000,
    10_000_000,
    1_000_000_000,
];

pub fn thresholds(prec: u32) -> Result<ThresholdsReport> {
    let samples = THRESHOLD_SAMPLES
        .iter()
        .map(|&t| threshold_point(t, prec))
        .collect::<Result<Vec<_>>>()?;
    let bw = bw_global_bounds(prec);
    Ok(ThresholdsReport {
        schema: SCHEMA,
        prec_bits: prec,
        sign_change: (
            threshold_point(LAMBDA_WINDOW - 1, prec)?,
            threshold_point(LAMBDA_WINDOW, prec)?,
        ),
        exclusion_fails_below: threshold_point(LARGE_C - 1, prec)?,
        exclusion_at: threshold_point(LARGE_C, prec)?,
        samples,
        m_cap: format!("{:.3e}", bw.m_max_int().to_f64()),
        n_cap: format!("{:.4e}", bw.n_max_int().to_f64()),
        bw,
    })
}

/// One line of a reduction job file: `D element`.
#[derive(Clone, Debug)]
pub struct Job {
    pub line: usize,
    pub c: QuadInt,
}

/// Parses a job file; blank lines and `#` comments are skipped.
pub fn parse_jobs(text: &str) -> Result<Vec<Job>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse(format!("line {}: {msg}", i + 1));
        let mut parts = line.splitn(2, char::is_whitespace);
        let d: u64 = parts
            .next()
            .unwrap_or("")
            .parse()
            .map_err(|_| err(format!("bad D in {line:?}")))?;
        let elem = parts.next().ok_or_else(|| err("missing element".into()))?;
        let ring = RingSpec::new(d).map_err(|e| err(e.to_string()))?;
        let c = ring.parse(elem).map_err(|e| err(e.to_string()))?;
        out.push(Job { line: i + 1, c });
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct JobOutcome {
    pub schema: u32,
    pub line: usize,
    pub d: u64,
    pub c: QuadInt,
    pub ok: bool,
    pub m_bound: Option<String>,
    pub n_bound: Option<String>,
    pub finish: Option<FinishRecord>,
    pub prec_bits: Option<u32>,
    pub error: Option<String>,
    #[serde(skip)]
    pub failure: Option<Error>,
}

/// Reduction plus direct search for one job.
pub fn run_job(job: &Job) -> JobOutcome {
    let mut out = JobOutcome {
        schema: SCHEMA,
        line: job.line,
        d: job.c.ring().d(),
        c: job.c.clone(),
        ok: false,
        m_bound: None,
        n_bound: None,
        finish: None,
        prec_bits: None,
        error: None,
        failure: None,
    };
    let run = || -> Result<(ReductionOutcome, ReductionOutcome, FinishRecord)> {
        let (pos, _) = normalize_c(&job.c);
        let bw = bw_global_bounds(256);
        let (a, b) = reduce_for_c(&pos, &bw, &default_schedule())?;
        let finish = finish_for(&pos, &a, &b)?;
        if !finish.hits.is_empty() || !finish.zero_index_hits.is_empty() {
            return Err(Error::Anomaly(format!(
                "c = {}: nontrivial intersections {:?}",
                job.c, finish.hits
            )));
        }
        Ok((a, b, finish))
    };
    match run() {
        Ok((a, b, finish)) => {
            out.ok = true;
            out.m_bound = Some(a.final_bound.clone());
            out.n_bound = Some(b.final_bound.clone());
            out.prec_bits = Some(a.prec_bits.max(b.prec_bits));
            out.finish = Some(finish);
        }
        Err(e) => {
            out.error = Some(e.to_string());
            out.failure = Some(e);
        }
    }
    out
}

/// Exit status for a failure: 2 anomaly, 3 precision, 4 input.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Anomaly(_) | Error::Contract(_) => 2,
        Error::Precision { .. } => 3,
        _ => 4,
    }
}

/// `|c| <= r` elements of the ring with `Re(c) > 0`, `|c| >= sqrt 2` and outside the exceptional set.
pub fn reduction_sample(ring: &RingSpec, r: i64) -> Vec<QuadInt> {
    ring.enumerate_disk(&Rational::from(r * r))
        .into_iter()
        .filter(|c| c.re_sign() == Ordering::Greater && c.norm() >= 2 && !c.in_sc())
        .collect()
}

/// Bound values as integers, for callers comparing against fixed caps.
pub fn bounds_of(a: &ReductionOutcome, b: &ReductionOutcome) -> (Integer, Integer) {
    (a.final_bound_int().clone(), b.final_bound_int().clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(d: u64) -> RingSpec {
        RingSpec::new(d).unwrap()
    }

    #[test]
    fn classification_order() {
        let g = r(1);
        assert_eq!(classify(&g.int(2)).unwrap(), Classification::Excluded);
        assert_eq!(classify(&g.one()).unwrap(), Classification::InSc);
        assert_eq!(classify(&g.ab(0, 2)).unwrap(), Classification::ReZero);
        assert_eq!(classify(&g.ab(0, 200_000)).unwrap(), Classification::ReZero);
        assert_eq!(classify(&g.int(159_200)).unwrap(), Classification::LargeC);
        assert_eq!(classify(&g.int(3)).unwrap(), Classification::Reduced);
    }

    #[test]
    fn verify_paths() {
        let f = r(5);
        let rep = verify(&f.int(3), 512).unwrap();
        assert_eq!(rep.classification, Classification::Reduced);
        assert!(rep.closed);
        let p = QuarticParams::new(f.int(3)).unwrap();
        assert_eq!(rep.generators, expected_generators(&p));

        let g = r(1);
        let rep = verify(&g.int(159_200), 128).unwrap();
        assert_eq!(rep.classification, Classification::LargeC);
        assert_eq!(rep.generators.len(), 2);

        let rep = verify(&g.one(), 128).unwrap();
        assert!(rep.closed);
        assert_eq!(rep.generators.len(), 2);

        let rep = verify(&r(7).one(), 128).unwrap();
        assert!(!rep.closed);
        assert_eq!(rep.witness.as_deref(), Some("U^2+Z^2=2"));

        let rep = verify(&g.ab(-3, 1), 512).unwrap();
        assert!(rep.closed);
    }

    #[test]
    fn deterministic_json() {
        let f = r(2);
        let c = f.ab(3, -1);
        let a = serde_json::to_string(&verify(&c, 512).unwrap()).unwrap();
        let b = serde_json::to_string(&verify(&c, 512).unwrap()).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("\"schema\":1"));
    }

    #[test]
    fn scan_small_disk() {
        let e = r(3);
        let h = Rational::from(2);
        for c in e.enumerate_disk(&Rational::from(9)) {
            let item = scan_c(&c, &h).unwrap();
            assert!(item.anomalies.is_empty(), "{c}: {:?}", item.anomalies);
        }
    }

    #[test]
    fn jobs() {
        let jobs = parse_jobs("# sample\n2 1+66*w\n\n5 3\n").unwrap();
        assert_eq!(jobs.len(), 2);
        assert_eq!(jobs[1].line, 4);
        assert!(parse_jobs("").unwrap().is_empty());
        let err = parse_jobs("2 1+1*w\nx 3\n").unwrap_err();
        assert!(err.to_string().contains("line 2"));
        let out = run_job(&jobs[1]);
        assert!(out.ok, "{:?}", out.error);
    }

    #[test]
    fn thresholds_report() {
        let t = thresholds(256).unwrap();
        assert!(!t.sign_change.0.positive && t.sign_change.1.positive);
        assert!(!t.exclusion_fails_below.excludes && t.exclusion_at.excludes);
        assert!(t.samples.iter().all(|s| s.excludes));
        assert_eq!(t.m_cap, "6.700e36");
        assert_eq!(t.n_cap, "1.7150e37");
    }
}
