//! The circuit description language: a line-oriented directive list.
//!
//! ```text
//! rail loops=<int> timebins=<int>
//! bs t=<int> loop=<int> theta=<float> [gamma=<float>] [rho=<float>] [tau=<float>]
//! prepare t=<int> (n=<int> | coherent=<float>[,<float>])
//! measure t=<int>
//! postselect t=<int> n=<int>
//! feedforward when t=<int> n=<int> set t=<int> loop=<int> theta=<float> ...
//! encode d=<int> alpha=<float>[,<float>]
//! ```
//!
//! `#` starts a comment; keywords are case-sensitive. Splitters not given a
//! `bs` line stay mirrors, and omitted phases are zero. Every time-bin must
//! carry exactly one `prepare` and one `measure`. Printing a parsed program
//! and parsing it again is the identity.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use fockrail_core::circuit::BeamSplitterConfig;
use num_complex::Complex64;

use crate::error::{ErrorClass, ProgramError};

/// Preparation of one time-bin's input edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Prep {
    Number(u32),
    Coherent(Complex64),
}

/// One feed-forward rule: when bin `when_t` measures `when_n`, reconfigure
/// the splitter at (`set_t`, `set_loop`).
#[derive(Debug, Clone, PartialEq)]
pub struct FeedForwardRule {
    pub when_t: usize,
    pub when_n: u32,
    pub set_t: usize,
    pub set_loop: usize,
    pub config: BeamSplitterConfig,
}

/// A parsed and validated program.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitProgram {
    pub loops: usize,
    pub timebins: usize,
    /// Explicit splitter settings; anything absent is a mirror.
    pub splitters: BTreeMap<(usize, usize), BeamSplitterConfig>,
    pub preps: BTreeMap<usize, Prep>,
    pub measures: BTreeSet<usize>,
    pub postselects: BTreeMap<usize, u32>,
    pub feedforwards: Vec<FeedForwardRule>,
    pub encoding: Option<(usize, Complex64)>,
}

impl CircuitProgram {
    /// Preparations in time-bin order.
    pub fn prep_list(&self) -> Vec<Prep> {
        (0..self.timebins).map(|t| self.preps[&t]).collect()
    }

    /// The first time-bin any feed-forward rule reconfigures, if any.
    pub fn feedforward_split(&self) -> Option<usize> {
        self.feedforwards.iter().map(|r| r.set_t).min()
    }
}

struct Cursor<'a> {
    line_no: usize,
    line: &'a str,
}

impl Cursor<'_> {
    fn error(&self, class: ErrorClass, token: &str, message: impl Into<String>) -> ProgramError {
        let column = self.line.find(token).map(|i| i + 1).unwrap_or(1);
        ProgramError::at(class, self.line_no, column, message)
    }
}

fn parse_kv<'a>(cur: &Cursor<'_>, token: &'a str, key: &str) -> Result<&'a str, ProgramError> {
    match token.split_once('=') {
        Some((k, v)) if k == key => Ok(v),
        _ => Err(cur.error(
            ErrorClass::Syntax,
            token,
            format!("expected `{key}=<value>`, found `{token}`"),
        )),
    }
}

fn parse_usize(cur: &Cursor<'_>, token: &str, key: &str) -> Result<usize, ProgramError> {
    let v = parse_kv(cur, token, key)?;
    v.parse().map_err(|_| {
        cur.error(ErrorClass::Syntax, token, format!("`{key}` needs a non-negative integer"))
    })
}

fn parse_u32(cur: &Cursor<'_>, token: &str, key: &str) -> Result<u32, ProgramError> {
    let v = parse_kv(cur, token, key)?;
    v.parse().map_err(|_| {
        cur.error(ErrorClass::Syntax, token, format!("`{key}` needs a non-negative integer"))
    })
}

fn parse_f64(cur: &Cursor<'_>, token: &str, key: &str) -> Result<f64, ProgramError> {
    let v = parse_kv(cur, token, key)?;
    let x: f64 = v
        .parse()
        .map_err(|_| cur.error(ErrorClass::Syntax, token, format!("`{key}` needs a number")))?;
    if !x.is_finite() {
        return Err(cur.error(ErrorClass::InvalidValue, token, format!("`{key}` must be finite")));
    }
    Ok(x)
}

fn parse_complex(cur: &Cursor<'_>, token: &str, key: &str) -> Result<Complex64, ProgramError> {
    let v = parse_kv(cur, token, key)?;
    let (re, im) = match v.split_once(',') {
        Some((re, im)) => (re, im),
        None => (v, "0"),
    };
    let re: f64 = re.parse().map_err(|_| {
        cur.error(ErrorClass::Syntax, token, format!("`{key}` needs one or two numbers"))
    })?;
    let im: f64 = im.parse().map_err(|_| {
        cur.error(ErrorClass::Syntax, token, format!("`{key}` needs one or two numbers"))
    })?;
    if !re.is_finite() || !im.is_finite() {
        return Err(cur.error(ErrorClass::InvalidValue, token, format!("`{key}` must be finite")));
    }
    Ok(Complex64::new(re, im))
}

/// Reads optional angle tokens (`gamma=`, `rho=`, `tau=`) after `theta`.
fn parse_angles(
    cur: &Cursor<'_>,
    tokens: &[&str],
) -> Result<BeamSplitterConfig, ProgramError> {
    let theta = parse_f64(cur, tokens.first().copied().unwrap_or("theta"), "theta")?;
    let mut cfg = BeamSplitterConfig::new(theta, 0.0, 0.0, 0.0);
    let mut seen = BTreeSet::new();
    for token in &tokens[1..] {
        let key = token.split('=').next().unwrap_or(token);
        if !seen.insert(key.to_string()) {
            return Err(cur.error(
                ErrorClass::DuplicateDirective,
                token,
                format!("angle `{key}` given twice"),
            ));
        }
        match key {
            "gamma" => cfg.gamma = parse_f64(cur, token, "gamma")?,
            "rho" => cfg.rho = parse_f64(cur, token, "rho")?,
            "tau" => cfg.tau = parse_f64(cur, token, "tau")?,
            _ => {
                return Err(cur.error(
                    ErrorClass::Syntax,
                    token,
                    format!("unknown angle `{key}` (expected gamma, rho, or tau)"),
                ))
            }
        }
    }
    Ok(cfg)
}

/// Parses a program from text, reporting the first error with its position.
pub fn parse(text: &str) -> Result<CircuitProgram, ProgramError> {
    let mut layout: Option<(usize, usize)> = None;
    let mut splitters: BTreeMap<(usize, usize), BeamSplitterConfig> = BTreeMap::new();
    let mut preps: BTreeMap<usize, Prep> = BTreeMap::new();
    let mut measures: BTreeSet<usize> = BTreeSet::new();
    let mut postselects: BTreeMap<usize, u32> = BTreeMap::new();
    let mut feedforwards: Vec<FeedForwardRule> = Vec::new();
    let mut encoding: Option<(usize, Complex64)> = None;
    let mut coherent_bins = 0usize;

    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim_end();
        let cur = Cursor { line_no: idx + 1, line: raw };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let Some((&keyword, rest)) = tokens.split_first() else { continue };

        if keyword != "rail" && layout.is_none() {
            return Err(cur.error(
                ErrorClass::MissingLayout,
                keyword,
                "the program must declare `rail loops=<int> timebins=<int>` first",
            ));
        }
        let (loops, timebins) = layout.unwrap_or((0, 0));
        let check_bin = |cur: &Cursor<'_>, token: &str, t: usize| {
            if t >= timebins {
                Err(cur.error(
                    ErrorClass::IndexRange,
                    token,
                    format!("time-bin {t} outside 0..{timebins}"),
                ))
            } else {
                Ok(())
            }
        };
        let check_loop = |cur: &Cursor<'_>, token: &str, k: usize| {
            if k >= loops {
                Err(cur.error(ErrorClass::IndexRange, token, format!("loop {k} outside 0..{loops}")))
            } else {
                Ok(())
            }
        };

        match keyword {
            "rail" => {
                if layout.is_some() {
                    return Err(cur.error(
                        ErrorClass::DuplicateDirective,
                        keyword,
                        "`rail` given twice",
                    ));
                }
                if rest.len() != 2 {
                    return Err(cur.error(
                        ErrorClass::Syntax,
                        keyword,
                        "expected `rail loops=<int> timebins=<int>`",
                    ));
                }
                let loops = parse_usize(&cur, rest[0], "loops")?;
                let timebins = parse_usize(&cur, rest[1], "timebins")?;
                if loops == 0 || timebins == 0 {
                    return Err(cur.error(
                        ErrorClass::InvalidValue,
                        rest[0],
                        "loops and timebins must be at least 1",
                    ));
                }
                layout = Some((loops, timebins));
            }
            "bs" => {
                if rest.len() < 3 {
                    return Err(cur.error(
                        ErrorClass::Syntax,
                        keyword,
                        "expected `bs t=<int> loop=<int> theta=<float> ...`",
                    ));
                }
                let t = parse_usize(&cur, rest[0], "t")?;
                check_bin(&cur, rest[0], t)?;
                let k = parse_usize(&cur, rest[1], "loop")?;
                check_loop(&cur, rest[1], k)?;
                let cfg = parse_angles(&cur, &rest[2..])?;
                if splitters.insert((t, k), cfg).is_some() {
                    return Err(cur.error(
                        ErrorClass::DuplicateDirective,
                        keyword,
                        format!("splitter (t={t}, loop={k}) configured twice"),
                    ));
                }
            }
            "prepare" => {
                if rest.len() != 2 {
                    return Err(cur.error(
                        ErrorClass::Syntax,
                        keyword,
                        "expected `prepare t=<int> (n=<int> | coherent=<float>[,<float>])`",
                    ));
                }
                let t = parse_usize(&cur, rest[0], "t")?;
                check_bin(&cur, rest[0], t)?;
                let prep = if rest[1].starts_with("n=") {
                    Prep::Number(parse_u32(&cur, rest[1], "n")?)
                } else if rest[1].starts_with("coherent=") {
                    coherent_bins += 1;
                    if coherent_bins > 1 {
                        return Err(cur.error(
                            ErrorClass::MultiCoherent,
                            rest[1],
                            "only one time-bin may carry a coherent preparation",
                        ));
                    }
                    Prep::Coherent(parse_complex(&cur, rest[1], "coherent")?)
                } else {
                    return Err(cur.error(
                        ErrorClass::Syntax,
                        rest[1],
                        "preparation needs `n=<int>` or `coherent=<float>[,<float>]`",
                    ));
                };
                if preps.insert(t, prep).is_some() {
                    return Err(cur.error(
                        ErrorClass::DuplicateDirective,
                        keyword,
                        format!("time-bin {t} prepared twice"),
                    ));
                }
            }
            "measure" => {
                if rest.len() != 1 {
                    return Err(cur.error(ErrorClass::Syntax, keyword, "expected `measure t=<int>`"));
                }
                let t = parse_usize(&cur, rest[0], "t")?;
                check_bin(&cur, rest[0], t)?;
                if !measures.insert(t) {
                    return Err(cur.error(
                        ErrorClass::DuplicateDirective,
                        keyword,
                        format!("time-bin {t} measured twice"),
                    ));
                }
            }
            "postselect" => {
                if rest.len() != 2 {
                    return Err(cur.error(
                        ErrorClass::Syntax,
                        keyword,
                        "expected `postselect t=<int> n=<int>`",
                    ));
                }
                let t = parse_usize(&cur, rest[0], "t")?;
                check_bin(&cur, rest[0], t)?;
                let n = parse_u32(&cur, rest[1], "n")?;
                if postselects.insert(t, n).is_some() {
                    return Err(cur.error(
                        ErrorClass::DuplicateDirective,
                        keyword,
                        format!("time-bin {t} post-selected twice"),
                    ));
                }
            }
            "feedforward" => {
                if rest.len() < 6 || rest[0] != "when" || rest[3] != "set" {
                    return Err(cur.error(
                        ErrorClass::Syntax,
                        keyword,
                        "expected `feedforward when t=<int> n=<int> set t=<int> loop=<int> theta=<float> ...`",
                    ));
                }
                let when_t = parse_usize(&cur, rest[1], "t")?;
                check_bin(&cur, rest[1], when_t)?;
                let when_n = parse_u32(&cur, rest[2], "n")?;
                let set_t = parse_usize(&cur, rest[4], "t")?;
                check_bin(&cur, rest[4], set_t)?;
                let set_loop = parse_usize(&cur, rest[5], "loop")?;
                check_loop(&cur, rest[5], set_loop)?;
                if when_t >= set_t {
                    return Err(cur.error(
                        ErrorClass::FeedForwardOrder,
                        rest[1],
                        format!("rule watches bin {when_t} but reconfigures bin {set_t}; the watched bin must come first"),
                    ));
                }
                let config = parse_angles(&cur, &rest[6..])?;
                let rule = FeedForwardRule { when_t, when_n, set_t, set_loop, config };
                if feedforwards.iter().any(|r| {
                    (r.when_t, r.when_n, r.set_t, r.set_loop)
                        == (when_t, when_n, set_t, set_loop)
                }) {
                    return Err(cur.error(
                        ErrorClass::DuplicateDirective,
                        keyword,
                        "feed-forward rule given twice",
                    ));
                }
                feedforwards.push(rule);
            }
            "encode" => {
                if rest.len() != 2 {
                    return Err(cur.error(
                        ErrorClass::Syntax,
                        keyword,
                        "expected `encode d=<int> alpha=<float>[,<float>]`",
                    ));
                }
                if encoding.is_some() {
                    return Err(cur.error(
                        ErrorClass::DuplicateDirective,
                        keyword,
                        "`encode` given twice",
                    ));
                }
                let d = parse_usize(&cur, rest[0], "d")?;
                if d < 2 {
                    return Err(cur.error(
                        ErrorClass::InvalidValue,
                        rest[0],
                        "encoding arity must be at least 2",
                    ));
                }
                let alpha = parse_complex(&cur, rest[1], "alpha")?;
                if alpha == Complex64::new(0.0, 0.0) {
                    return Err(cur.error(
                        ErrorClass::InvalidValue,
                        rest[1],
                        "encoding amplitude must be non-zero",
                    ));
                }
                encoding = Some((d, alpha));
            }
            other => {
                return Err(cur.error(
                    ErrorClass::UnknownDirective,
                    other,
                    format!("unknown directive `{other}`"),
                ));
            }
        }
    }

    let Some((loops, timebins)) = layout else {
        return Err(ProgramError::global(
            ErrorClass::MissingLayout,
            "the program never declares a `rail` layout",
        ));
    };

    for t in 0..timebins {
        if !preps.contains_key(&t) {
            return Err(ProgramError::global(
                ErrorClass::ScheduleIncomplete,
                format!("time-bin {t} has no preparation"),
            ));
        }
        if !measures.contains(&t) {
            return Err(ProgramError::global(
                ErrorClass::ScheduleIncomplete,
                format!("time-bin {t} has no measurement"),
            ));
        }
    }

    // Feed-forward must split the run: every watched bin strictly before
    // every reconfigured bin.
    if let Some(split) = feedforwards.iter().map(|r| r.set_t).min() {
        for rule in &feedforwards {
            if rule.when_t >= split {
                return Err(ProgramError::global(
                    ErrorClass::FeedForwardOrder,
                    format!(
                        "rule watches bin {} but bin {split} is already reconfigured; watched bins must precede every reconfigured bin",
                        rule.when_t
                    ),
                ));
            }
        }
        // Feed-forward runs branch on number-state outcomes.
        for t in 0..timebins {
            if matches!(preps.get(&t), Some(Prep::Coherent(_))) {
                return Err(ProgramError::global(
                    ErrorClass::InvalidValue,
                    format!("time-bin {t} is prepared coherently, but feed-forward programs need number states"),
                ));
            }
        }
    }

    let mut feedforwards = feedforwards;
    feedforwards.sort_by_key(|r| (r.set_t, r.set_loop, r.when_t, r.when_n));

    Ok(CircuitProgram {
        loops,
        timebins,
        splitters,
        preps,
        measures,
        postselects,
        feedforwards,
        encoding,
    })
}

/// Canonical text form; `parse(print(p)) == p`.
pub fn print(p: &CircuitProgram) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "rail loops={} timebins={}", p.loops, p.timebins);
    for ((t, k), cfg) in &p.splitters {
        let _ = writeln!(
            out,
            "bs t={t} loop={k} theta={:?} gamma={:?} rho={:?} tau={:?}",
            cfg.theta, cfg.gamma, cfg.rho, cfg.tau
        );
    }
    for (t, prep) in &p.preps {
        match prep {
            Prep::Number(n) => {
                let _ = writeln!(out, "prepare t={t} n={n}");
            }
            Prep::Coherent(alpha) => {
                let _ = writeln!(out, "prepare t={t} coherent={:?},{:?}", alpha.re, alpha.im);
            }
        }
    }
    for t in &p.measures {
        let _ = writeln!(out, "measure t={t}");
    }
    for (t, n) in &p.postselects {
        let _ = writeln!(out, "postselect t={t} n={n}");
    }
    for rule in &p.feedforwards {
        let _ = writeln!(
            out,
            "feedforward when t={} n={} set t={} loop={} theta={:?} gamma={:?} rho={:?} tau={:?}",
            rule.when_t,
            rule.when_n,
            rule.set_t,
            rule.set_loop,
            rule.config.theta,
            rule.config.gamma,
            rule.config.rho,
            rule.config.tau
        );
    }
    if let Some((d, alpha)) = &p.encoding {
        let _ = writeln!(out, "encode d={d} alpha={:?},{:?}", alpha.re, alpha.im);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const MIRROR_LOOP: &str = "rail loops=1 timebins=1\n\
                               bs t=0 loop=0 theta=1.5707963 gamma=1.5707963 rho=1.5707963\n\
                               prepare t=0 n=0\n\
                               measure t=0\n";

    #[test]
    fn parses_the_mirror_single_loop_program() {
        let p = parse(MIRROR_LOOP).unwrap();
        assert_eq!((p.loops, p.timebins), (1, 1));
        let cfg = p.splitters[&(0, 0)];
        assert!((cfg.theta - 1.5707963).abs() < 1e-12);
        assert_eq!(cfg.tau, 0.0);
        assert_eq!(p.preps[&0], Prep::Number(0));
        assert!(p.measures.contains(&0));
    }

    #[test]
    fn missing_rail_is_classified() {
        let err = parse("prepare t=0 n=0\n").unwrap_err();
        assert_eq!(err.class, ErrorClass::MissingLayout);
        let err = parse("# only comments\n").unwrap_err();
        assert_eq!(err.class, ErrorClass::MissingLayout);
    }

    #[test]
    fn out_of_range_bin_is_classified() {
        let err = parse(
            "rail loops=1 timebins=6\nbs t=9 loop=0 theta=0.5\n",
        )
        .unwrap_err();
        assert_eq!(err.class, ErrorClass::IndexRange);
        assert_eq!(err.line, Some(2));
    }

    #[test]
    fn duplicates_are_classified() {
        let text = "rail loops=1 timebins=1\nprepare t=0 n=0\nprepare t=0 n=1\n";
        assert_eq!(parse(text).unwrap_err().class, ErrorClass::DuplicateDirective);
    }

    #[test]
    fn incomplete_schedule_is_classified() {
        let text = "rail loops=1 timebins=2\nprepare t=0 n=0\nmeasure t=0\nmeasure t=1\n";
        let err = parse(text).unwrap_err();
        assert_eq!(err.class, ErrorClass::ScheduleIncomplete);
    }

    #[test]
    fn feedforward_must_look_backwards() {
        let text = "rail loops=1 timebins=2\nprepare t=0 n=0\nprepare t=1 n=0\nmeasure t=0\nmeasure t=1\nfeedforward when t=1 n=0 set t=1 loop=0 theta=0.5\n";
        assert_eq!(parse(text).unwrap_err().class, ErrorClass::FeedForwardOrder);
    }

    #[test]
    fn second_coherent_bin_is_rejected() {
        let text = "rail loops=1 timebins=2\nprepare t=0 coherent=0.5\nprepare t=1 coherent=0.5\nmeasure t=0\nmeasure t=1\n";
        assert_eq!(parse(text).unwrap_err().class, ErrorClass::MultiCoherent);
    }

    #[test]
    fn unknown_keyword_is_classified() {
        let text = "rail loops=1 timebins=1\nprepare t=0 n=0\nmeasure t=0\nwobble x=1\n";
        assert_eq!(parse(text).unwrap_err().class, ErrorClass::UnknownDirective);
    }

    #[test]
    fn print_then_parse_is_identity() {
        let coherent = "rail loops=2 timebins=3\n\
                        bs t=0 loop=0 theta=0.5 gamma=0.25\n\
                        bs t=2 loop=1 theta=-1.25 rho=0.75 tau=0.1\n\
                        prepare t=0 n=1\n\
                        prepare t=1 coherent=0.4,-0.2\n\
                        prepare t=2 n=0\n\
                        measure t=0\nmeasure t=1\nmeasure t=2\n\
                        postselect t=0 n=1\n\
                        encode d=3 alpha=0.7\n";
        let dynamic = "rail loops=1 timebins=3\n\
                       bs t=0 loop=0 theta=0.7853981633974483\n\
                       prepare t=0 n=1\nprepare t=1 n=0\nprepare t=2 n=0\n\
                       measure t=0\nmeasure t=1\nmeasure t=2\n\
                       feedforward when t=0 n=0 set t=2 loop=0 theta=0.9 tau=0.2\n\
                       feedforward when t=0 n=1 set t=1 loop=0 theta=0.3\n";
        for text in [coherent, dynamic] {
            let p = parse(text).unwrap();
            let reparsed = parse(&print(&p)).unwrap();
            assert_eq!(p, reparsed);
            // And printing is a fixpoint.
            assert_eq!(print(&p), print(&reparsed));
        }
    }
}
