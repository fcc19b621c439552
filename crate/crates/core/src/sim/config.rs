use std::collections::BTreeSet;
use std::str::FromStr;

use crate::error::{HartError, Result};
use crate::model::{EffectLaw, GaussianComponent, MixtureModel, Noise, ScaleLaw};
use crate::procedures::Procedure;

/// Largest correlated block used by the dependence scenarios.
pub const FULL_BLOCK: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dependence {
    Independent,
    /// Lag-1 correlation 0.5 and lag-2 correlation 0.4 inside the block.
    BandedBlock,
    /// Correlation `0.5^|i-j|` inside the block.
    AR1Block,
}

/// Null law used by the data-driven procedures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NullMode {
    Theoretical,
    /// Null scale estimated from the central `coverage` of the z-values.
    Empirical { coverage: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub model: MixtureModel,
    pub m: usize,
    pub alpha: f64,
    pub reps: usize,
    pub seed: u64,
    pub dependence: Dependence,
    /// Replicates averaged per hypothesis; above one, `σ` is replaced by the
    /// sample standard deviation.
    pub replicates_per_unit: usize,
    pub sigma_known: bool,
    pub procedures: Vec<Procedure>,
    pub null_mode: NullMode,
    pub lambda: f64,
    pub jackknife: bool,
}

impl ScenarioConfig {
    pub fn new(model: MixtureModel, m: usize, reps: usize, seed: u64) -> Self {
        Self {
            model,
            m,
            alpha: 0.1,
            reps,
            seed,
            dependence: Dependence::Independent,
            replicates_per_unit: 1,
            sigma_known: true,
            procedures: vec![Procedure::Hart, Procedure::Bh, Procedure::Az],
            null_mode: NullMode::Theoretical,
            lambda: 0.5,
            jackknife: true,
        }
    }

    pub fn with_procedures(mut self, procedures: &[Procedure]) -> Self {
        self.procedures = procedures.to_vec();
        self
    }

    /// Size of the correlated block: `min(m / 5, 4000)`.
    pub fn block_size(&self) -> usize {
        (self.m / 5).min(FULL_BLOCK)
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |msg: String| Err(HartError::Config(msg));
        self.model.validate().map_err(|e| HartError::Config(e.to_string()))?;
        if self.m == 0 {
            return cfg("m must be at least 1".into());
        }
        if self.reps == 0 {
            return cfg("reps must be at least 1".into());
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return cfg(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return cfg(format!("lambda must lie in (0, 1), got {}", self.lambda));
        }
        if self.replicates_per_unit == 0 {
            return cfg("replicates must be at least 1".into());
        }
        if self.replicates_per_unit > 1 && self.sigma_known {
            return cfg("replicates > 1 means sigma is estimated; set sigma_known = false".into());
        }
        if self.replicates_per_unit == 1 && !self.sigma_known {
            return cfg("sigma_known = false needs replicates > 1".into());
        }
        if self.dependence != Dependence::Independent && self.model.noise != Noise::Gaussian {
            return cfg("block dependence is only available with Gaussian noise".into());
        }
        if let NullMode::Empirical { coverage } = self.null_mode {
            if !(coverage > 0.0 && coverage < 1.0) {
                return cfg(format!("coverage must lie in (0, 1), got {coverage}"));
            }
        }
        if self.procedures.is_empty() {
            return cfg("no procedures requested".into());
        }
        let unique: BTreeSet<&str> = self.procedures.iter().map(|p| p.tag()).collect();
        if unique.len() != self.procedures.len() {
            return cfg("procedure list has duplicates".into());
        }
        for p in &self.procedures {
            if p.is_oracle() {
                if !self.sigma_known {
                    return cfg(format!("procedure {p} needs sigma_known = true"));
                }
                if self.model.noise != Noise::Gaussian {
                    return cfg(format!("procedure {p} needs Gaussian noise"));
                }
            }
        }
        Ok(())
    }

    /// Parses the sectioned `key = value` format.
    ///
    /// ```text
    /// [scenario]
    /// m = 5000
    /// reps = 20
    /// procedures = hart, bh, az
    /// [model]
    /// pi = 0.1
    /// [effect]
    /// law = point
    /// mu = 2
    /// [scale]
    /// law = uniform
    /// lo = 0
    /// hi = 4
    /// ```
    pub fn parse(text: &str) -> Result<Self> {
        let entries = parse_sections(text)?;
        let mut b = Builder::default();
        for e in &entries {
            b.apply(e)?;
        }
        let cfg = b.finish()?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Inverse of [`ScenarioConfig::parse`].
    pub fn to_config_string(&self) -> String {
        let mut s = String::from("[scenario]\n");
        s += &format!("m = {}\nalpha = {}\nreps = {}\nseed = {}\n", self.m, self.alpha, self.reps, self.seed);
        let dep = match self.dependence {
            Dependence::Independent => "independent",
            Dependence::BandedBlock => "banded",
            Dependence::AR1Block => "ar1",
        };
        s += &format!("dependence = {dep}\nreplicates = {}\nsigma_known = {}\n", self.replicates_per_unit, self.sigma_known);
        let procs: Vec<&str> = self.procedures.iter().map(|p| p.tag()).collect();
        s += &format!("procedures = {}\n", procs.join(", "));
        match self.null_mode {
            NullMode::Theoretical => s += "null = theoretical\n",
            NullMode::Empirical { coverage } => s += &format!("null = empirical\ncoverage = {coverage}\n"),
        }
        s += &format!("lambda = {}\njackknife = {}\n", self.lambda, if self.jackknife { "on" } else { "off" });

        s += &format!("\n[model]\npi = {}\nnull_scale = {}\n", self.model.pi, self.model.null_scale);
        match self.model.noise {
            Noise::Gaussian => s += "noise = gaussian\n",
            Noise::StudentT { df } => s += &format!("noise = t\ndf = {df}\n"),
        }

        s += "\n[effect]\n";
        match &self.model.effect {
            EffectLaw::PointMass(mu) => s += &format!("law = point\nmu = {mu}\n"),
            EffectLaw::TwoPointMass { mu1, w1, mu2, w2 } => {
                s += &format!("law = two-point\nmu1 = {mu1}\nw1 = {w1}\nmu2 = {mu2}\nw2 = {w2}\n")
            }
            EffectLaw::GaussianMixture(comps) => {
                let parts: Vec<String> = comps.iter().map(|c| format!("{}:{}:{}", c.weight, c.mean, c.sd)).collect();
                s += &format!("law = gaussian-mixture\ncomponents = {}\n", parts.join("; "));
            }
            EffectLaw::Zero => s += "law = zero\n",
        }

        s += "\n[scale]\n";
        match self.model.scale {
            ScaleLaw::Uniform { lo, hi } => s += &format!("law = uniform\nlo = {lo}\nhi = {hi}\n"),
            ScaleLaw::TwoValues { sigma_a, sigma_b, prob_a } => {
                s += &format!("law = two-values\nsigma_a = {sigma_a}\nsigma_b = {sigma_b}\nprob_a = {prob_a}\n")
            }
            ScaleLaw::Fixed(v) => s += &format!("law = fixed\nvalue = {v}\n"),
        }
        s
    }
}

struct Entry {
    line: usize,
    section: String,
    key: String,
    value: String,
}

fn parse_sections(text: &str) -> Result<Vec<Entry>> {
    let mut section = String::new();
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let s = raw.split('#').next().unwrap_or("").trim();
        if s.is_empty() {
            continue;
        }
        if let Some(rest) = s.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| HartError::Parse { line, message: format!("malformed section header `{s}`") })?;
            section = name.trim().to_ascii_lowercase();
            if !["scenario", "model", "effect", "scale"].contains(&section.as_str()) {
                return Err(HartError::Config(format!("unknown section `[{section}]` at line {line}")));
            }
            continue;
        }
        let (k, v) = s
            .split_once('=')
            .ok_or_else(|| HartError::Parse { line, message: format!("expected `key = value`, got `{s}`") })?;
        if section.is_empty() {
            return Err(HartError::Parse { line, message: "key outside of any section".into() });
        }
        out.push(Entry { line, section: section.clone(), key: k.trim().to_ascii_lowercase(), value: v.trim().to_string() });
    }
    Ok(out)
}

fn num<T: FromStr>(e: &Entry) -> Result<T> {
    e.value.parse().map_err(|_| HartError::Parse {
        line: e.line,
        message: format!("cannot parse `{}` for key `{}`", e.value, e.key),
    })
}

fn flag(e: &Entry) -> Result<bool> {
    match e.value.to_ascii_lowercase().as_str() {
        "true" | "on" | "yes" | "1" => Ok(true),
        "false" | "off" | "no" | "0" => Ok(false),
        _ => Err(HartError::Parse { line: e.line, message: format!("expected a boolean for `{}`", e.key) }),
    }
}

#[derive(Default)]
struct Builder {
    m: Option<usize>,
    alpha: Option<f64>,
    reps: Option<usize>,
    seed: Option<u64>,
    dependence: Option<Dependence>,
    replicates: Option<usize>,
    sigma_known: Option<bool>,
    procedures: Option<Vec<Procedure>>,
    null: Option<String>,
    coverage: Option<f64>,
    lambda: Option<f64>,
    jackknife: Option<bool>,
    pi: Option<f64>,
    null_scale: Option<f64>,
    noise: Option<String>,
    df: Option<f64>,
    effect: Vec<(String, String, usize)>,
    scale: Vec<(String, String, usize)>,
}

impl Builder {
    fn apply(&mut self, e: &Entry) -> Result<()> {
        let unknown = || Err(HartError::Config(format!("unknown key `{}` in section [{}] at line {}", e.key, e.section, e.line)));
        match (e.section.as_str(), e.key.as_str()) {
            ("scenario", "m") => self.m = Some(num(e)?),
            ("scenario", "alpha") => self.alpha = Some(num(e)?),
            ("scenario", "reps") => self.reps = Some(num(e)?),
            ("scenario", "seed") => self.seed = Some(num(e)?),
            ("scenario", "dependence") => {
                self.dependence = Some(match e.value.to_ascii_lowercase().as_str() {
                    "independent" | "none" => Dependence::Independent,
                    "banded" => Dependence::BandedBlock,
                    "ar1" => Dependence::AR1Block,
                    other => return Err(HartError::Config(format!("unknown dependence `{other}`"))),
                })
            }
            ("scenario", "replicates") => self.replicates = Some(num(e)?),
            ("scenario", "sigma_known") => self.sigma_known = Some(flag(e)?),
            ("scenario", "procedures") => {
                self.procedures = Some(
                    e.value
                        .split(',')
                        .filter(|s| !s.trim().is_empty())
                        .map(str::parse)
                        .collect::<Result<_>>()?,
                )
            }
            ("scenario", "null") => self.null = Some(e.value.to_ascii_lowercase()),
            ("scenario", "coverage") => self.coverage = Some(num(e)?),
            ("scenario", "lambda") => self.lambda = Some(num(e)?),
            ("scenario", "jackknife") => self.jackknife = Some(flag(e)?),
            ("model", "pi") => self.pi = Some(num(e)?),
            ("model", "null_scale") => self.null_scale = Some(num(e)?),
            ("model", "noise") => self.noise = Some(e.value.to_ascii_lowercase()),
            ("model", "df") => self.df = Some(num(e)?),
            ("effect", "law" | "mu" | "mu1" | "w1" | "mu2" | "w2" | "components") => {
                self.effect.push((e.key.clone(), e.value.clone(), e.line))
            }
            ("scale", "law" | "lo" | "hi" | "sigma_a" | "sigma_b" | "prob_a" | "value") => {
                self.scale.push((e.key.clone(), e.value.clone(), e.line))
            }
            _ => return unknown(),
        }
        Ok(())
    }

    fn finish(self) -> Result<ScenarioConfig> {
        let missing = |k: &str| HartError::Config(format!("missing required key `{k}`"));
        let effect = build_effect(&self.effect)?;
        let scale = build_scale(&self.scale)?;
        let pi = self.pi.ok_or_else(|| missing("pi"))?;
        let mut model = MixtureModel::new(pi, effect, scale);
        model.null_scale = self.null_scale.unwrap_or(1.0);
        model.noise = match self.noise.as_deref().unwrap_or("gaussian") {
            "gaussian" | "normal" => Noise::Gaussian,
            "t" | "student-t" => Noise::StudentT { df: self.df.unwrap_or(5.0) },
            other => return Err(HartError::Config(format!("unknown noise `{other}`"))),
        };
        let m = self.m.ok_or_else(|| missing("m"))?;
        let reps = self.reps.unwrap_or(20);
        let mut cfg = ScenarioConfig::new(model, m, reps, self.seed.unwrap_or(1));
        cfg.alpha = self.alpha.unwrap_or(cfg.alpha);
        cfg.dependence = self.dependence.unwrap_or(cfg.dependence);
        cfg.replicates_per_unit = self.replicates.unwrap_or(1);
        cfg.sigma_known = self.sigma_known.unwrap_or(cfg.replicates_per_unit == 1);
        if let Some(p) = self.procedures {
            cfg.procedures = p;
        }
        cfg.null_mode = match self.null.as_deref().unwrap_or("theoretical") {
            "theoretical" => NullMode::Theoretical,
            "empirical" => NullMode::Empirical { coverage: self.coverage.unwrap_or(0.99) },
            other => return Err(HartError::Config(format!("unknown null mode `{other}`"))),
        };
        cfg.lambda = self.lambda.unwrap_or(cfg.lambda);
        cfg.jackknife = self.jackknife.unwrap_or(cfg.jackknife);
        Ok(cfg)
    }
}

fn lookup<'a>(kv: &'a [(String, String, usize)], key: &str) -> Option<&'a (String, String, usize)> {
    kv.iter().rev().find(|(k, _, _)| k == key)
}

fn real(kv: &[(String, String, usize)], section: &str, key: &str) -> Result<f64> {
    let (_, v, line) = lookup(kv, key)
        .ok_or_else(|| HartError::Config(format!("missing key `{key}` in section [{section}]")))?;
    v.parse().map_err(|_| HartError::Parse { line: *line, message: format!("cannot parse `{v}` for key `{key}`") })
}

fn build_effect(kv: &[(String, String, usize)]) -> Result<EffectLaw> {
    let law = lookup(kv, "law").map(|(_, v, _)| v.to_ascii_lowercase()).unwrap_or_else(|| "point".into());
    let r = |k: &str| real(kv, "effect", k);
    Ok(match law.as_str() {
        "point" => EffectLaw::PointMass(r("mu")?),
        "two-point" => EffectLaw::TwoPointMass { mu1: r("mu1")?, w1: r("w1")?, mu2: r("mu2")?, w2: r("w2")? },
        "gaussian-mixture" => {
            let (_, v, line) = lookup(kv, "components")
                .ok_or_else(|| HartError::Config("missing key `components` in section [effect]".into()))?;
            let comps = v
                .split(';')
                .filter(|s| !s.trim().is_empty())
                .map(|part| {
                    let f: Vec<f64> = part.split(':').map(|x| x.trim().parse()).collect::<std::result::Result<_, _>>().map_err(|_| {
                        HartError::Parse { line: *line, message: format!("bad component `{part}`") }
                    })?;
                    match f[..] {
                        [weight, mean, sd] => Ok(GaussianComponent { weight, mean, sd }),
                        _ => Err(HartError::Parse { line: *line, message: format!("component `{part}` needs weight:mean:sd") }),
                    }
                })
                .collect::<Result<_>>()?;
            EffectLaw::GaussianMixture(comps)
        }
        "zero" => EffectLaw::Zero,
        other => return Err(HartError::Config(format!("unknown effect law `{other}`"))),
    })
}

fn build_scale(kv: &[(String, String, usize)]) -> Result<ScaleLaw> {
    let law = lookup(kv, "law")
        .map(|(_, v, _)| v.to_ascii_lowercase())
        .ok_or_else(|| HartError::Config("missing key `law` in section [scale]".into()))?;
    let r = |k: &str| real(kv, "scale", k);
    Ok(match law.as_str() {
        "uniform" => ScaleLaw::Uniform { lo: r("lo")?, hi: r("hi")? },
        "two-values" => ScaleLaw::TwoValues {
            sigma_a: r("sigma_a")?,
            sigma_b: r("sigma_b")?,
            prob_a: lookup(kv, "prob_a").map_or(Ok(0.5), |_| r("prob_a"))?,
        },
        "fixed" => ScaleLaw::Fixed(r("value")?),
        other => return Err(HartError::Config(format!("unknown scale law `{other}`"))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::presets;

    const SAMPLE: &str = "
# uniform-scale desk run
[scenario]
m = 5000
reps = 20
seed = 7
procedures = hart, bh, az, or-full, or-z
[model]
pi = 0.1
[effect]
law = point
mu = 2
[scale]
law = uniform
lo = 0
hi = 4
";

    #[test]
    fn parses_sample() {
        let c = ScenarioConfig::parse(SAMPLE).unwrap();
        assert_eq!(c.m, 5000);
        assert_eq!(c.seed, 7);
        assert_eq!(c.procedures.len(), 5);
        assert_eq!(c.model.scale, ScaleLaw::Uniform { lo: 0.0, hi: 4.0 });
        assert!(c.sigma_known);
    }

    #[test]
    fn unknown_key_is_named() {
        let err = ScenarioConfig::parse(&SAMPLE.replace("seed = 7", "sede = 7")).unwrap_err();
        assert!(matches!(&err, HartError::Config(msg) if msg.contains("`sede`")), "{err}");
    }

    #[test]
    fn oracle_with_estimated_sigma_is_rejected() {
        let text = SAMPLE.replace("seed = 7", "seed = 7\nreplicates = 200");
        assert!(matches!(ScenarioConfig::parse(&text), Err(HartError::Config(_))));
    }

    #[test]
    fn round_trip_of_presets() {
        for cfg in [
            presets::uniform_scale(5000, 20),
            presets::two_group(5000, 20),
            presets::gaussian_mixture_effects(5000, 20),
            presets::estimated_sigma(5000, 20),
            presets::banded_dependence(5000, 20),
            presets::ar1_dependence(5000, 20),
            presets::heavy_tails(5000, 20),
            presets::narrow_null(5000, 20),
        ] {
            let back = ScenarioConfig::parse(&cfg.to_config_string()).unwrap();
            assert_eq!(back, cfg);
        }
    }

    #[test]
    fn malformed_lines() {
        assert!(matches!(ScenarioConfig::parse("[scenario]\nm 5"), Err(HartError::Parse { line: 2, .. })));
        assert!(matches!(ScenarioConfig::parse("m = 5"), Err(HartError::Parse { line: 1, .. })));
        assert!(matches!(ScenarioConfig::parse("[extra]\n"), Err(HartError::Config(_))));
    }
}
