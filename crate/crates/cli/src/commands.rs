use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use caterpillar_core::asymptotics::{self, ExpectedMode, UnorderedConstants};
use caterpillar_core::counts::{self, Family};
use caterpillar_core::newick::{parse_newick, read_newick_lines, to_newick};
use caterpillar_core::perm::{self, ExtractionFamily, Permutation};
use caterpillar_core::real::Real;
use caterpillar_core::tree::{self, BinaryTree, DEFAULT_ORDERED_CAP, DEFAULT_UNORDERED_CAP};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::json;

use crate::output::{CliError, Fmt, Out, EXIT_GUARD, EXIT_REJECTED};
use crate::{ExpectedModeArg, FamilyArg, ProbMode, Which};

/// Sizes up to this are scored with the exact probability.
const SCORE_EXACT_LIMIT: usize = 1000;
const SCORE_TRUNCATION: usize = 30;
const CAP_ENV: &str = "CATERPILLAR_MAX_N";

fn family(f: FamilyArg) -> Family {
    match f {
        FamilyArg::Ordered => Family::Ordered,
        FamilyArg::Unordered => Family::Unordered,
    }
}

fn enumeration_cap(default: usize) -> Result<usize, CliError> {
    match std::env::var(CAP_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| {
            CliError::new(
                EXIT_REJECTED,
                "InvalidEnvironment",
                format!("{CAP_ENV}={v:?} is not a size"),
            )
        }),
        Err(_) => Ok(default),
    }
}

fn usage(message: impl Into<String>) -> CliError {
    CliError::new(EXIT_REJECTED, "InvalidArgument", message)
}

pub fn counts(fam: FamilyArg, k: usize, which: Which, n_max: usize) -> Result<(), CliError> {
    let mut out = Out::default();
    out.line("n,count");
    for n in 1..=n_max {
        let c = match (family(fam), which) {
            (Family::Ordered, Which::Minus) => counts::f_minus(k, n),
            (Family::Ordered, Which::Plus) => counts::f_plus(k, n),
            (Family::Ordered, Which::Exact) => counts::f_exact(k, n),
            (Family::Unordered, Which::Minus) => counts::w_minus(k, n),
            (Family::Unordered, Which::Plus) => {
                counts::wedderburn(n) - counts::w_minus(k.saturating_sub(1), n)
            }
            (Family::Unordered, Which::Exact) => counts::w_exact(k, n),
        };
        out.row([n.to_string(), c.to_string()]);
    }
    out.flush()
}

pub fn expected(
    ns: &[usize],
    mode: ExpectedModeArg,
    max_n: usize,
    fmt: Fmt,
) -> Result<(), CliError> {
    let fmt = fmt.or_places(3);
    let mut out = Out::default();
    out.line("n,value");
    for &n in ns {
        if n > max_n && !matches!(mode, ExpectedModeArg::Log2) {
            return Err(CliError::new(
                EXIT_GUARD,
                "GuardExceeded",
                format!("n = {n} is above --max-n {max_n}"),
            )
            .with_detail(json!({"n": n, "max_n": max_n})));
        }
        let value = match mode {
            ExpectedModeArg::Exact => {
                if n == 0 {
                    return Err(usage("sizes start at 1"));
                }
                fmt.ratio(&counts::expected_gamma_exact(n))
            }
            ExpectedModeArg::Approx => {
                fmt.real(&asymptotics::expected_gamma_approx(n, ExpectedMode::Ratio)?)
            }
            ExpectedModeArg::Log2 => {
                fmt.real(&asymptotics::expected_gamma_approx(n, ExpectedMode::Log2)?)
            }
        };
        out.row([n.to_string(), value]);
    }
    out.flush()
}

pub fn asympt(fam: FamilyArg, k: usize, m: usize, fmt: Fmt) -> Result<(), CliError> {
    let mut out = Out::default();
    match family(fam) {
        Family::Ordered => {
            let model = asymptotics::ordered_model(k)?;
            out.line("family=ordered");
            out.line(format!("k={k}"));
            out.line(format!("rho={}", fmt.real(&model.rho)));
            out.line(format!("amplitude={}", fmt.real(&model.amplitude)));
        }
        Family::Unordered => {
            let c = asymptotics::rho_lambda_unordered(k, m)?;
            out.line("family=unordered");
            out.line(format!("k={k}"));
            out.line(format!("m={m}"));
            out.line(format!("rho={}", fmt.real(&c.rho)));
            out.line(format!("w_prime={}", fmt.real(&c.w_prime)));
            out.line(format!("lambda={}", fmt.real(&c.lambda)));
            out.line(format!("amplitude={}", fmt.real(&c.amplitude)));
        }
    }
    out.flush()
}

fn clip(v: Real) -> Real {
    if v.is_negative() {
        Real::zero()
    } else if v > Real::one() {
        Real::one()
    } else {
        v
    }
}

pub fn prob_curve(
    ks: &[usize],
    n_min: usize,
    n_max: usize,
    step: usize,
    m: usize,
    mode: ProbMode,
    fmt: Fmt,
) -> Result<(), CliError> {
    if step == 0 || n_min == 0 || n_min > n_max {
        return Err(usage("need 1 <= n-min <= n-max and step >= 1"));
    }
    let constants: Vec<Option<UnorderedConstants>> = match mode {
        ProbMode::Asym => ks
            .iter()
            .map(|&k| asymptotics::rho_lambda_unordered(k, m).map(Some))
            .collect::<Result<_, _>>()?,
        ProbMode::Exact => vec![None; ks.len()],
    };
    let mut out = Out::default();
    out.line("n,k,prob");
    for n in (n_min..=n_max).step_by(step) {
        for (&k, c) in ks.iter().zip(&constants) {
            let le = match c {
                Some(c) => asymptotics::prob_from_constants(c, n),
                None => Real::from_ratio(&asymptotics::prob_gamma_le_exact(n, k)),
            };
            let prob = clip(Real::one() - le);
            out.row([n.to_string(), k.to_string(), fmt.real(&prob)]);
        }
    }
    out.flush()
}

/// Probability that a uniform unordered tree of size `n` has gamma at most
/// `k`: exact up to [`SCORE_EXACT_LIMIT`] leaves, asymptotic above when the
/// truncation allows it, otherwise unknown.
fn score_probability(
    n: usize,
    k: usize,
    cache: &mut BTreeMap<usize, UnorderedConstants>,
    fmt: Fmt,
) -> String {
    if n <= SCORE_EXACT_LIMIT {
        return fmt.ratio(&asymptotics::prob_gamma_le_exact(n, k));
    }
    if (2..SCORE_TRUNCATION).contains(&k) {
        let constants = match cache.entry(k) {
            Entry::Occupied(e) => e.into_mut(),
            Entry::Vacant(slot) => match asymptotics::rho_lambda_unordered(k, SCORE_TRUNCATION) {
                Ok(c) => slot.insert(c),
                Err(_) => return String::new(),
            },
        };
        return fmt.real(&clip(asymptotics::prob_from_constants(constants, n)));
    }
    String::new()
}

pub fn score(path: &Path, fmt: Fmt) -> Result<(), CliError> {
    let file = File::open(path)
        .map_err(|e| CliError::from(e).with_detail(json!({"path": path.display().to_string()})))?;
    let docs = read_newick_lines(BufReader::new(file))?;
    let mut out = Out::default();
    out.line("line,n,gamma,colless,prob_gamma_le_exact_or_asym");
    let mut failed = 0usize;
    let mut cache = BTreeMap::new();
    for (line, doc) in docs {
        match doc {
            Ok(doc) => {
                let t = &doc.parsed;
                let n = t.size();
                let gamma = t.gamma();
                let colless = t.colless_index().map(|c| fmt.ratio(&c)).unwrap_or_default();
                let prob = score_probability(n, gamma, &mut cache, fmt);
                out.row([
                    line.to_string(),
                    n.to_string(),
                    gamma.to_string(),
                    colless,
                    prob,
                ]);
            }
            Err(e) => {
                failed += 1;
                let err = CliError::from(e);
                let mut env = err.envelope();
                env["line"] = json!(line);
                eprintln!("{env}");
            }
        }
    }
    out.flush()?;
    if failed > 0 {
        return Err(CliError::new(
            EXIT_REJECTED,
            "LinesFailed",
            format!("{failed} line(s) could not be parsed"),
        )
        .with_detail(json!({"failed": failed})));
    }
    Ok(())
}

fn family_rows(out: &mut Out, p: &Permutation) {
    out.line("i,value,rtilde,avoids_231");
    for (i, r) in ExtractionFamily::new(p).members {
        let value = p.entries()[i - 1];
        out.row([
            i.to_string(),
            value.to_string(),
            r.to_string(),
            perm::avoids_231(&r).to_string(),
        ]);
    }
}

pub fn map_perm_from_perm(text: &str) -> Result<(), CliError> {
    let p: Permutation = text.parse()?;
    let t = perm::phi_inverse(&p)?;
    let mut out = Out::default();
    out.line(format!("permutation={p}"));
    out.line(format!("tree={}", to_newick::<&str>(&t, None)?));
    out.line(format!("gamma={}", t.gamma()));
    out.line(format!("gamma_from_perm={}", perm::gamma_from_perm(&p)?));
    family_rows(&mut out, &p);
    out.flush()
}

pub fn map_perm_from_newick(text: &str) -> Result<(), CliError> {
    let doc = parse_newick(text)?;
    let t = doc.parsed;
    let p = perm::phi(&t)?;
    let mut out = Out::default();
    out.line(format!(
        "tree={}",
        to_newick(
            &t,
            doc.leaf_names
                .as_deref()
                .filter(|n| n.iter().all(|s| !s.is_empty()))
        )?
    ));
    out.line(format!("permutation={p}"));
    out.line(format!("gamma={}", t.gamma()));
    out.line(format!("gamma_from_perm={}", perm::gamma_from_perm(&p)?));
    family_rows(&mut out, &p);
    out.flush()
}

pub fn rtilde(text: &str) -> Result<(), CliError> {
    let p: Permutation = text.parse()?;
    let mut out = Out::default();
    family_rows(&mut out, &p);
    out.flush()
}

pub fn histogram(fam: FamilyArg, n: usize) -> Result<(), CliError> {
    if n == 0 {
        return Err(usage("sizes start at 1"));
    }
    let family = family(fam);
    let mut enumerated: BTreeMap<usize, u64> = BTreeMap::new();
    match family {
        Family::Ordered => {
            let cap = enumeration_cap(DEFAULT_ORDERED_CAP)?;
            for t in tree::enumerate_ordered_capped(n, cap)? {
                *enumerated.entry(t.gamma()).or_default() += 1;
            }
        }
        Family::Unordered => {
            let cap = enumeration_cap(DEFAULT_UNORDERED_CAP)?;
            for t in tree::enumerate_unordered_capped(n, cap)? {
                *enumerated.entry(t.gamma()).or_default() += 1;
            }
        }
    }
    let mut out = Out::default();
    out.line("gamma,enumerated,predicted");
    for (g, predicted) in counts::gamma_histogram(n, family) {
        let e = enumerated.get(&g).copied().unwrap_or(0);
        out.row([g.to_string(), e.to_string(), predicted.to_string()]);
    }
    out.flush()
}

pub fn seed_tables(max_exact_n: usize, fmt: Fmt) -> Result<(), CliError> {
    let mut out = Out::default();

    out.line("# ordered trees by gamma, k = 5");
    out.line("n,f_minus,f_plus,f_exact");
    for n in 1..=10 {
        out.row([
            n.to_string(),
            counts::f_minus(5, n).to_string(),
            counts::f_plus(5, n).to_string(),
            counts::f_exact(5, n).to_string(),
        ]);
    }

    out.line("");
    out.line("# ordered dominant singularities");
    out.line("k,rho,amplitude");
    for k in 2..=7 {
        let model = asymptotics::ordered_model(k)?;
        out.row([
            k.to_string(),
            fmt.real(&model.rho),
            fmt.real(&model.amplitude),
        ]);
    }

    out.line("");
    out.line("# pitchfork-free trees, exact over asymptotic");
    out.line("n,ratio");
    let ratio = Real::from_bigint(&counts::f_minus(2, 100)) / asymptotics::asym_f_minus(2, 100)?;
    out.row(["100".to_string(), fmt.real(&ratio)]);

    out.line("");
    out.line("# mean gamma of ordered trees");
    out.line("n,exact,approx,log2");
    let three = fmt.or_places(3);
    for n in [10usize, 20, 50, 100, 200, 500, 1000] {
        let exact = if n <= max_exact_n {
            three.ratio(&counts::expected_gamma_exact(n))
        } else {
            String::new()
        };
        let approx = three.real(&asymptotics::expected_gamma_approx(n, ExpectedMode::Ratio)?);
        let log2 = three.real(&asymptotics::expected_gamma_approx(n, ExpectedMode::Log2)?);
        out.row([n.to_string(), exact, approx, log2]);
    }

    out.line("");
    out.line("# unordered trees with gamma <= k");
    out.line(format!(
        "k,{}",
        (1..=10)
            .map(|i| format!("w{i}"))
            .collect::<Vec<_>>()
            .join(",")
    ));
    for k in 1..=5 {
        let row: Vec<String> = std::iter::once(k.to_string())
            .chain((1..=10).map(|n| counts::w_minus(k, n).to_string()))
            .collect();
        out.row(row);
    }

    out.line("");
    out.line("# unordered singularities, m = 10");
    out.line("k,rho,w_prime,amplitude,ratio_n50");
    for k in 2..=5 {
        let c = asymptotics::rho_lambda_unordered(k, 10)?;
        let r = Real::from_bigint(&counts::w_minus(k, 50)) / c.model().estimate(50);
        out.row([
            k.to_string(),
            fmt.real(&c.rho),
            fmt.real(&c.w_prime),
            fmt.real(&c.amplitude),
            fmt.real(&r),
        ]);
    }

    out.line("");
    out.line("# unordered singularities, m = 30");
    out.line("k,rho,amplitude");
    for k in 2..=10 {
        let c = asymptotics::rho_lambda_unordered(k, 30)?;
        out.row([k.to_string(), fmt.real(&c.rho), fmt.real(&c.amplitude)]);
    }

    out.line("");
    out.line("# unordered trees of size 100 with gamma <= 5");
    out.line("asymptotic_m10,exact");
    let asym = asymptotics::prob_gamma_le(100, 5, 10)?;
    let exact: BigRational = asymptotics::prob_gamma_le_exact(100, 5);
    out.row([fmt.real(&asym), fmt.ratio(&exact)]);

    out.line("");
    out.line("# 132-avoiders whose extractions of size > 1 all contain 231");
    out.line("n,count");
    for n in 1..=15 {
        let c: BigInt = counts::f_minus(2, n + 1);
        out.row([n.to_string(), c.to_string()]);
    }
    out.flush()
}
