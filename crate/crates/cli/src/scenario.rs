//! Scenario files: sectioned plain text describing a region, algebra
//! fixtures, a `φ` model, a transport, an integrand and configuration.
//!
//! ```text
//! # comments run to the end of the line
//! [region]
//! interval 0 1        # c d
//! split 1/2           # optional splitting point, defaults to the midpoint
//! dim 1
//!
//! [algebra A]
//! file = algebra_a.alg   # relative to the scenario file
//!
//! [phi]
//! phi piecewise
//! piece 0 1 x^2
//! jump 1/2 1/4
//!
//! [transport]
//! kind bijection         # injection | bijection
//! forward x^2            # one expression per coordinate, separated by `;`
//! inverse sqrt(x)
//! link x
//! target 0 1
//! # forward standard-iso A B pairing a ; e2 ; e1 - a ; ab ; b - ab
//! # box-image explicit
//! # map [0,1/2) -> [1/2,1]
//!
//! [integrand]
//! vars x                 # defaults to x in one dimension, x1 … xn otherwise
//! f = x
//! # step
//! # piece [0,1/2) = 1
//!
//! [config]
//! tolerance 1e-9
//! max-level 20
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use stieltjes_core::algebra::{parse_fixture, AlgebraElement, AlgebraFixture};
use stieltjes_core::expr::Expression;
use stieltjes_core::func::{PointFn, PointMap, UnaryFn};
use stieltjes_core::integrator::{Integrand, IntegratorConfig};
use stieltjes_core::measure::{Measure, PhiModel, PhiPiece};
use stieltjes_core::region::{BoxSet, CoordBox, OrderedInterval, Region};
use stieltjes_core::scalar::parse_rational;
use stieltjes_core::step::{Sampling, StepFunction};
use stieltjes_core::transport::{TransportKind, TransportMap, VerifyOptions};
use stieltjes_core::Rational;

use crate::error::{CliError, Result};
use crate::stieltjes::TagRule;

/// Which measure a command integrates against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureChoice {
    Lebesgue,
    /// The Lebesgue-Stieltjes measure of the `[phi]` block.
    Phi,
}

impl std::str::FromStr for MeasureChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "lebesgue" => Ok(MeasureChoice::Lebesgue),
            "phi" | "stieltjes" => Ok(MeasureChoice::Phi),
            other => Err(format!("unknown measure `{other}` (lebesgue|phi)")),
        }
    }
}

/// Values from the `[config]` block; unset keys fall back to defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigOverrides {
    pub tolerance: Option<f64>,
    pub min_level: Option<u32>,
    pub max_level: Option<u32>,
    pub p: Option<f64>,
    pub exact: Option<bool>,
    pub sampling: Option<Sampling>,
    pub tag: Option<TagRule>,
    pub measure: Option<MeasureChoice>,
    pub source_measure: Option<MeasureChoice>,
    pub target_measure: Option<MeasureChoice>,
    pub verify_level: Option<u32>,
    pub verify_tolerance: Option<f64>,
    pub unions: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub source: Option<PathBuf>,
    pub region: Region,
    pub algebras: BTreeMap<String, AlgebraFixture>,
    pub phi: Option<PhiModel>,
    pub transport: Option<TransportMap>,
    /// Per-coordinate forward expressions, kept for one-dimensional drivers.
    pub forward_exprs: Vec<UnaryFn>,
    pub inverse_exprs: Vec<UnaryFn>,
    pub integrand: Option<Integrand>,
    pub config: ConfigOverrides,
}

struct Section {
    name: String,
    arg: Option<String>,
    header_line: usize,
    lines: Vec<(usize, String)>,
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

fn split_sections(path: &str, src: &str) -> Result<Vec<Section>> {
    let mut sections: Vec<Section> = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let lineno = i + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        if let Some(head) = line.strip_prefix('[') {
            let Some(head) = head.strip_suffix(']') else {
                return Err(CliError::Scenario {
                    path: path.into(),
                    line: lineno,
                    msg: format!("malformed section header `{line}`"),
                });
            };
            let mut words = head.split_whitespace();
            let name = words.next().unwrap_or("").to_string();
            let arg = words.next().map(str::to_string);
            sections.push(Section {
                name,
                arg,
                header_line: lineno,
                lines: Vec::new(),
            });
            continue;
        }
        match sections.last_mut() {
            Some(s) => s.lines.push((lineno, line.to_string())),
            None => {
                return Err(CliError::Scenario {
                    path: path.into(),
                    line: lineno,
                    msg: "content before the first section".into(),
                })
            }
        }
    }
    Ok(sections)
}

fn key_rest(line: &str) -> (&str, &str) {
    match line.split_once(char::is_whitespace) {
        Some((k, v)) => (k, v.trim()),
        None => (line, ""),
    }
}

/// Splits `key = value` or `key value`.
fn key_value(line: &str) -> (&str, &str) {
    if let Some((k, v)) = line.split_once('=') {
        let k = k.trim();
        if !k.contains(char::is_whitespace) {
            return (k, v.trim());
        }
    }
    key_rest(line)
}

struct Ctx<'a> {
    path: &'a str,
    dir: PathBuf,
}

impl Ctx<'_> {
    fn err(&self, line: usize, msg: impl Into<String>) -> CliError {
        CliError::Scenario {
            path: self.path.into(),
            line,
            msg: msg.into(),
        }
    }

    fn at<T, E: std::fmt::Display>(&self, line: usize, r: std::result::Result<T, E>) -> Result<T> {
        r.map_err(|e| self.err(line, e.to_string()))
    }

    fn rational(&self, line: usize, s: &str) -> Result<Rational> {
        self.at(line, parse_rational(s))
    }

    fn parse<T: std::str::FromStr>(&self, line: usize, s: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        self.at(line, s.parse::<T>())
    }
}

fn parse_bool(s: &str) -> std::result::Result<bool, String> {
    match s {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        other => Err(format!("expected true or false, got `{other}`")),
    }
}

fn unary_list(src: &str) -> std::result::Result<Vec<UnaryFn>, String> {
    src.split(';')
        .map(|e| UnaryFn::parse(e.trim()).map_err(|e| e.to_string()))
        .collect()
}

fn point_map(src: &str, vars: &[String]) -> std::result::Result<PointMap, String> {
    let exprs = src
        .split(';')
        .map(|e| Expression::parse(e.trim(), vars).map_err(|e| e.to_string()))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(PointMap::new(src.trim(), move |x| {
        exprs.iter().map(|e| e.eval(x)).collect()
    }))
}

fn default_vars(dim: usize) -> Vec<String> {
    if dim == 1 {
        vec!["x".into()]
    } else {
        (1..=dim).map(|i| format!("x{i}")).collect()
    }
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Scenario> {
        let src = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut s = Self::parse_str(&src, &path.display().to_string(), path.parent())?;
        s.source = Some(path.to_path_buf());
        Ok(s)
    }

    /// Parses scenario text; `dir` resolves relative fixture paths.
    pub fn parse_str(src: &str, label: &str, dir: Option<&Path>) -> Result<Scenario> {
        let ctx = Ctx {
            path: label,
            dir: dir.map(Path::to_path_buf).unwrap_or_default(),
        };
        let sections = split_sections(label, src)?;
        for s in &sections {
            if !matches!(
                s.name.as_str(),
                "region" | "algebra" | "phi" | "transport" | "integrand" | "config"
            ) {
                return Err(ctx.err(s.header_line, format!("unknown section `[{}]`", s.name)));
            }
            if s.name != "algebra" {
                let repeats = sections.iter().filter(|t| t.name == s.name).count();
                if repeats > 1 {
                    return Err(ctx.err(
                        s.header_line,
                        format!("section `[{}]` appears twice", s.name),
                    ));
                }
            }
        }
        let find = |name: &str| sections.iter().find(|s| s.name == name);

        let region = match find("region") {
            Some(s) => parse_region(&ctx, s)?,
            None => Region::unit_cube(1),
        };
        let mut algebras = BTreeMap::new();
        for s in sections.iter().filter(|s| s.name == "algebra") {
            let name = s.arg.clone().ok_or_else(|| {
                ctx.err(s.header_line, "algebra section needs a name: [algebra A]")
            })?;
            algebras.insert(name, parse_algebra(&ctx, s)?);
        }
        let phi = find("phi").map(|s| parse_phi(&ctx, s)).transpose()?;
        let config = match find("config") {
            Some(s) => parse_config(&ctx, s)?,
            None => ConfigOverrides::default(),
        };
        let (transport, forward_exprs, inverse_exprs) = match find("transport") {
            Some(s) => parse_transport(&ctx, s, &region, &algebras)?,
            None => (None, Vec::new(), Vec::new()),
        };
        let integrand = find("integrand")
            .map(|s| parse_integrand(&ctx, s, &region))
            .transpose()?;
        Ok(Scenario {
            source: None,
            region,
            algebras,
            phi,
            transport,
            forward_exprs,
            inverse_exprs,
            integrand,
            config,
        })
    }

    /// The scenario's integrator settings.
    pub fn integrator_config(&self) -> IntegratorConfig {
        let d = IntegratorConfig::default();
        let c = &self.config;
        IntegratorConfig {
            p: c.p.unwrap_or(d.p),
            tolerance: c.tolerance.unwrap_or(d.tolerance),
            min_level: c.min_level.unwrap_or(d.min_level),
            max_level: c.max_level.unwrap_or(d.max_level),
            sampling: c.sampling.unwrap_or(d.sampling),
            exact: c.exact.unwrap_or(d.exact),
            max_cells: d.max_cells,
        }
    }

    pub fn verify_options(&self) -> VerifyOptions {
        let d = VerifyOptions::default();
        let c = &self.config;
        VerifyOptions {
            level: c.verify_level.unwrap_or(d.level),
            tolerance: c.verify_tolerance.unwrap_or(d.tolerance),
            unions: c.unions.unwrap_or(d.unions),
            seed: c.seed.unwrap_or(d.seed),
        }
    }

    pub fn measure(&self, choice: MeasureChoice) -> Result<Measure> {
        match choice {
            MeasureChoice::Lebesgue => Ok(Measure::Lebesgue),
            MeasureChoice::Phi => self
                .phi
                .clone()
                .map(Measure::stieltjes)
                .ok_or_else(|| CliError::Validation("the scenario has no [phi] block".into())),
        }
    }

    pub fn require_phi(&self) -> Result<&PhiModel> {
        self.phi
            .as_ref()
            .ok_or_else(|| CliError::Validation("the scenario has no [phi] block".into()))
    }

    pub fn require_transport(&self) -> Result<&TransportMap> {
        self.transport
            .as_ref()
            .ok_or_else(|| CliError::Validation("the scenario has no [transport] block".into()))
    }

    pub fn require_integrand(&self) -> Result<&Integrand> {
        self.integrand
            .as_ref()
            .ok_or_else(|| CliError::Validation("the scenario has no [integrand] block".into()))
    }
}

fn parse_region(ctx: &Ctx, s: &Section) -> Result<Region> {
    let mut bounds: Option<(Rational, Rational)> = None;
    let mut split: Option<Rational> = None;
    let mut dim = 1usize;
    for (n, line) in &s.lines {
        let (key, rest) = key_value(line);
        match key {
            "interval" => {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                let [c, d] = parts[..] else {
                    return Err(ctx.err(*n, "expected `interval <c> <d>`"));
                };
                bounds = Some((ctx.rational(*n, c)?, ctx.rational(*n, d)?));
            }
            "split" => split = Some(ctx.rational(*n, rest)?),
            "dim" => {
                dim = ctx.parse(*n, rest)?;
                if dim == 0 {
                    return Err(ctx.err(*n, "dim must be positive"));
                }
            }
            other => return Err(ctx.err(*n, format!("unknown region key `{other}`"))),
        }
    }
    let (c, d) = bounds.unwrap_or((
        Rational::from_integer(0.into()),
        Rational::from_integer(1.into()),
    ));
    let iv = match split {
        Some(xi) => OrderedInterval::with_split(c, d, xi),
        None => OrderedInterval::bisection(c, d),
    };
    Ok(Region::new(ctx.at(s.header_line, iv)?, dim))
}

fn parse_algebra(ctx: &Ctx, s: &Section) -> Result<AlgebraFixture> {
    let mut file: Option<(usize, String)> = None;
    for (n, line) in &s.lines {
        match key_value(line) {
            ("file", v) if !v.is_empty() => file = Some((*n, v.to_string())),
            (other, _) => return Err(ctx.err(*n, format!("unknown algebra key `{other}`"))),
        }
    }
    let (n, file) =
        file.ok_or_else(|| ctx.err(s.header_line, "algebra section needs `file = <path>`"))?;
    let path = ctx.dir.join(&file);
    let text = std::fs::read_to_string(&path)
        .map_err(|e| ctx.err(n, format!("cannot read {}: {e}", path.display())))?;
    ctx.at(n, parse_fixture(&text))
}

fn parse_phi(ctx: &Ctx, s: &Section) -> Result<PhiModel> {
    let mut pieces = Vec::new();
    let mut jumps = Vec::new();
    for (n, line) in &s.lines {
        let (key, rest) = key_rest(line);
        match key {
            "phi" => {
                if rest != "piecewise" {
                    return Err(ctx.err(*n, format!("unsupported phi model `{rest}`")));
                }
            }
            "piece" => {
                let mut parts = rest.splitn(3, char::is_whitespace);
                let (Some(lo), Some(hi), Some(expr)) = (parts.next(), parts.next(), parts.next())
                else {
                    return Err(ctx.err(*n, "expected `piece <lo> <hi> <expression>`"));
                };
                pieces.push(PhiPiece {
                    lo: ctx.rational(*n, lo)?,
                    hi: ctx.rational(*n, hi)?,
                    f: ctx.at(*n, UnaryFn::parse(expr.trim()))?,
                });
            }
            "jump" => {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                let [at, h] = parts[..] else {
                    return Err(ctx.err(*n, "expected `jump <at> <height>`"));
                };
                jumps.push((ctx.rational(*n, at)?, ctx.rational(*n, h)?));
            }
            other => return Err(ctx.err(*n, format!("unknown phi key `{other}`"))),
        }
    }
    ctx.at(s.header_line, PhiModel::new(pieces, jumps))
}

fn parse_config(ctx: &Ctx, s: &Section) -> Result<ConfigOverrides> {
    let mut c = ConfigOverrides::default();
    for (n, line) in &s.lines {
        let n = *n;
        let (key, v) = key_value(line);
        match key {
            "tolerance" => c.tolerance = Some(ctx.parse(n, v)?),
            "min-level" => c.min_level = Some(ctx.parse(n, v)?),
            "max-level" => c.max_level = Some(ctx.parse(n, v)?),
            "p" => c.p = Some(ctx.parse(n, v)?),
            "exact" => c.exact = Some(ctx.at(n, parse_bool(v))?),
            "sampling" => c.sampling = Some(ctx.parse(n, v)?),
            "tag" => c.tag = Some(ctx.parse(n, v)?),
            "measure" => c.measure = Some(ctx.parse(n, v)?),
            "source-measure" => c.source_measure = Some(ctx.parse(n, v)?),
            "target-measure" => c.target_measure = Some(ctx.parse(n, v)?),
            "verify-level" => c.verify_level = Some(ctx.parse(n, v)?),
            "verify-tolerance" => c.verify_tolerance = Some(ctx.parse(n, v)?),
            "unions" => c.unions = Some(ctx.parse(n, v)?),
            "seed" => c.seed = Some(ctx.parse(n, v)?),
            other => return Err(ctx.err(n, format!("unknown config key `{other}`"))),
        }
    }
    Ok(c)
}

type TransportParts = (Option<TransportMap>, Vec<UnaryFn>, Vec<UnaryFn>);

fn parse_transport(
    ctx: &Ctx,
    s: &Section,
    region: &Region,
    algebras: &BTreeMap<String, AlgebraFixture>,
) -> Result<TransportParts> {
    let mut kind = TransportKind::Bijection;
    let mut forward: Option<(usize, String)> = None;
    let mut inverse: Option<(usize, String)> = None;
    let mut link: Option<UnaryFn> = None;
    let mut target: Option<(Rational, Rational)> = None;
    let mut explicit = false;
    let mut table: Vec<(CoordBox, BoxSet)> = Vec::new();
    let dim = region.dim();

    for (n, line) in &s.lines {
        let n = *n;
        let (key, rest) = key_rest(line);
        match key {
            "kind" => {
                kind = match rest {
                    "injection" => TransportKind::Injection,
                    "bijection" => TransportKind::Bijection,
                    other => return Err(ctx.err(n, format!("unknown transport kind `{other}`"))),
                }
            }
            "forward" => forward = Some((n, rest.to_string())),
            "inverse" => inverse = Some((n, rest.to_string())),
            "link" => link = Some(ctx.at(n, UnaryFn::parse(rest))?),
            "target" => {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                let [c, d] = parts[..] else {
                    return Err(ctx.err(n, "expected `target <c> <d>`"));
                };
                target = Some((ctx.rational(n, c)?, ctx.rational(n, d)?));
            }
            "box-image" => {
                if rest != "explicit" {
                    return Err(ctx.err(n, format!("unknown box-image mode `{rest}`")));
                }
                explicit = true;
            }
            "map" => {
                let (b, imgs) = rest
                    .split_once("->")
                    .ok_or_else(|| ctx.err(n, "expected `map <box> -> <box> | <box> …`"))?;
                let b = ctx.at(n, CoordBox::parse(b.trim()))?;
                let boxes = imgs
                    .split('|')
                    .map(|t| CoordBox::parse(t.trim()))
                    .collect::<std::result::Result<Vec<_>, _>>();
                let img = ctx.at(n, BoxSet::from_boxes(dim, ctx.at(n, boxes)?))?;
                table.push((b, img));
            }
            other => return Err(ctx.err(n, format!("unknown transport key `{other}`"))),
        }
    }
    if !table.is_empty() && !explicit {
        return Err(ctx.err(s.header_line, "`map` lines need `box-image explicit`"));
    }
    let (fwd_line, fwd) =
        forward.ok_or_else(|| ctx.err(s.header_line, "transport needs a `forward` line"))?;

    if let Some(rest) = fwd.strip_prefix("standard-iso") {
        let (names, pairing) = rest.split_once("pairing").ok_or_else(|| {
            ctx.err(
                fwd_line,
                "expected `forward standard-iso <A> <B> pairing <e> ; …`",
            )
        })?;
        let names: Vec<&str> = names.split_whitespace().collect();
        let [a, b] = names[..] else {
            return Err(ctx.err(fwd_line, "standard-iso needs two algebra names"));
        };
        let get = |name: &str| {
            algebras
                .get(name)
                .map(|f| Arc::clone(&f.algebra))
                .ok_or_else(|| ctx.err(fwd_line, format!("unknown algebra `{name}`")))
        };
        let (a, b) = (get(a)?, get(b)?);
        let pairing = pairing
            .split(';')
            .map(|e| AlgebraElement::parse(&a, e.trim()))
            .collect::<std::result::Result<Vec<_>, _>>();
        let pairing = ctx.at(fwd_line, pairing)?;
        let mut t = ctx.at(
            fwd_line,
            TransportMap::standard_iso(&a, &b, &pairing, region.clone()),
        )?;
        if let Some(link) = link {
            t = t.with_link(link);
        }
        return Ok((Some(t), Vec::new(), Vec::new()));
    }

    let target_region = match target {
        Some((c, d)) => Region::new(
            ctx.at(s.header_line, OrderedInterval::bisection(c, d))?,
            dim,
        ),
        None => region.clone(),
    };
    let link = link.unwrap_or_else(UnaryFn::identity);
    let (inv_line, inv) =
        inverse.ok_or_else(|| ctx.err(s.header_line, "transport needs an `inverse` line"))?;

    if explicit {
        let vars = default_vars(dim);
        let f = ctx.at(fwd_line, point_map(&fwd, &vars))?;
        let g = ctx.at(inv_line, point_map(&inv, &vars))?;
        let t = TransportMap::explicit(region.clone(), target_region, f, g, table, link, kind);
        return Ok((Some(ctx.at(s.header_line, t)?), Vec::new(), Vec::new()));
    }

    let broadcast = |line: usize, src: &str| -> Result<Vec<UnaryFn>> {
        let fs = ctx.at(line, unary_list(src))?;
        match fs.len() {
            1 => Ok(vec![fs[0].clone(); dim]),
            k if k == dim => Ok(fs),
            k => Err(ctx.err(line, format!("{k} expressions for {dim} coordinates"))),
        }
    };
    let f = broadcast(fwd_line, &fwd)?;
    let g = broadcast(inv_line, &inv)?;
    let t = TransportMap::coordinatewise(
        region.clone(),
        target_region,
        f.clone(),
        g.clone(),
        link,
        kind,
    );
    Ok((Some(ctx.at(s.header_line, t)?), f, g))
}

fn parse_integrand(ctx: &Ctx, s: &Section, region: &Region) -> Result<Integrand> {
    let mut vars = default_vars(region.dim());
    let mut expr: Option<(usize, String)> = None;
    let mut step: Option<Vec<String>> = None;
    for (n, line) in &s.lines {
        let (key, rest) = key_value(line);
        match key {
            "vars" => {
                vars = rest.split_whitespace().map(str::to_string).collect();
                if vars.len() != region.dim() {
                    return Err(ctx.err(
                        *n,
                        format!(
                            "{} variables for a {}-dimensional region",
                            vars.len(),
                            region.dim()
                        ),
                    ));
                }
            }
            "f" => expr = Some((*n, rest.to_string())),
            "step" => step = Some(Vec::new()),
            "piece" => match step.as_mut() {
                Some(lines) => lines.push(line.clone()),
                None => return Err(ctx.err(*n, "`piece` lines must follow `step`")),
            },
            other => return Err(ctx.err(*n, format!("unknown integrand key `{other}`"))),
        }
    }
    match (expr, step) {
        (Some(_), Some(_)) => Err(ctx.err(
            s.header_line,
            "give either `f = …` or a `step` block, not both",
        )),
        (Some((n, src)), None) => {
            let e = ctx.at(n, Expression::parse(&src, &vars))?;
            Ok(Integrand::Point(PointFn::new(src.clone(), move |x| {
                e.eval(x)
            })))
        }
        (None, Some(lines)) => {
            let f = StepFunction::parse_block(region.clone(), &lines.join("\n"));
            Ok(Integrand::Step(ctx.at(s.header_line, f)?))
        }
        (None, None) => Err(ctx.err(
            s.header_line,
            "integrand needs `f = <expression>` or a `step` block",
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use stieltjes_core::rational;
    use stieltjes_core::Scalar;

    #[test]
    fn full_scenario() {
        let src = "
            [region]
            interval 0 1
            dim 1
            [phi]
            phi piecewise
            piece 0 1 x^2   # smooth part
            jump 1/2 1/4
            [transport]
            forward x^2
            inverse sqrt(x)
            [integrand]
            f = 2*x + 1
            [config]
            tolerance 1e-7
            exact = true
            measure phi
            tag left
        ";
        let s = Scenario::parse_str(src, "test.scn", None).unwrap();
        assert_eq!(s.region.dim(), 1);
        let phi = s.phi.as_ref().unwrap();
        assert_eq!(phi.eval(&Scalar::ratio(1, 2)).unwrap(), Scalar::ratio(1, 2));
        assert_eq!(s.forward_exprs.len(), 1);
        let f = s.integrand.as_ref().unwrap().as_point_fn();
        assert_eq!(f.call(&[Scalar::ratio(1, 2)]).unwrap(), Scalar::int(2));
        let cfg = s.integrator_config();
        assert!(cfg.exact);
        assert_eq!(cfg.tolerance, 1e-7);
        assert_eq!(s.config.measure, Some(MeasureChoice::Phi));
        assert_eq!(s.config.tag, Some(TagRule::Left));
    }

    #[test]
    fn step_integrand_and_split() {
        let src = "
            [region]
            interval 0 2
            split 1/2
            [integrand]
            step
            piece [0,1) = 3
            piece [1,2] = -1
        ";
        let s = Scenario::parse_str(src, "t", None).unwrap();
        assert_eq!(s.region.interval().xi(), &rational(1, 2));
        let Some(Integrand::Step(f)) = &s.integrand else {
            panic!()
        };
        assert_eq!(f.value_at(&[rational(3, 2)]).unwrap(), &Scalar::int(-1));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("[region]\ninterval 0\n", 2),
            ("[config]\n\ntolerance abc\n", 3),
            ("[integrand]\nf = x +\n", 2),
            ("x = 1\n", 1),
            ("[bogus]\n", 1),
            ("[phi]\npiece 0 1 1 - x\n", 1),
        ];
        for (src, line) in cases {
            match Scenario::parse_str(src, "t", None) {
                Err(CliError::Scenario { line: l, .. }) => assert_eq!(l, line, "{src}"),
                other => panic!("{src}: {other:?}"),
            }
        }
    }

    #[test]
    fn explicit_table() {
        let src = "
            [transport]
            forward 1 - x
            inverse 1 - x
            box-image explicit
            map [0,1/2) -> (1/2,1]
            map [1/2,1] -> [0,1/2]
        ";
        let s = Scenario::parse_str(src, "t", None).unwrap();
        let t = s.transport.unwrap();
        let img = t.box_image(&CoordBox::parse("[0,1/2)").unwrap()).unwrap();
        assert_eq!(img.volume(), rational(1, 2));
    }

    #[test]
    fn multi_dimensional_variables() {
        let src = "
            [region]
            dim 2
            [integrand]
            f = x1 * x2
        ";
        let s = Scenario::parse_str(src, "t", None).unwrap();
        let f = s.integrand.unwrap().as_point_fn();
        assert_eq!(
            f.call(&[Scalar::int(2), Scalar::int(3)]).unwrap(),
            Scalar::int(6)
        );
    }
}
