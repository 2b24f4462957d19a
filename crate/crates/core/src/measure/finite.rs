use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Finite measure `ν`: atoms plus bounded step densities, times a global scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiniteTestMeasure {
    atoms: Vec<(f64, f64)>,
    steps: Vec<(f64, f64, f64)>,
    scale: f64,
}

impl FiniteTestMeasure {
    pub fn new(atoms: Vec<(f64, f64)>, steps: Vec<(f64, f64, f64)>) -> Result<Self> {
        for &(p, m) in &atoms {
            if !(p.is_finite() && p >= 0.0) || !(m.is_finite() && m > 0.0) {
                return Err(Error::invalid(format!(
                    "atom ({p}, {m}) needs position ≥ 0 and mass > 0"
                )));
            }
        }
        for &(a, b, h) in &steps {
            if !(a.is_finite() && b.is_finite() && a >= 0.0 && a < b && h.is_finite() && h >= 0.0)
            {
                return Err(Error::invalid(format!(
                    "step ({a}, {b}, {h}) needs 0 ≤ a < b and height ≥ 0"
                )));
            }
        }
        let nu = Self { atoms, steps, scale: 1.0 };
        if !(nu.raw_total() > 0.0) {
            return Err(Error::invalid("test measure must have positive total mass"));
        }
        Ok(nu)
    }

    pub fn atom(pos: f64, mass: f64) -> Result<Self> {
        Self::new(vec![(pos, mass)], vec![])
    }

    pub fn step(a: f64, b: f64, height: f64) -> Result<Self> {
        Self::new(vec![], vec![(a, b, height)])
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn steps(&self) -> &[(f64, f64, f64)] {
        &self.steps
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `c · ν`; only the scale changes so that derived quantities scale exactly.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::domain(format!("scale factor must be positive, got {c}")));
        }
        Ok(Self { scale: self.scale * c, ..self.clone() })
    }

    /// `ν₁ + ν₂`.
    pub fn plus(&self, other: &Self) -> Self {
        let fold = |nu: &Self| {
            let atoms = nu.atoms.iter().map(|&(p, m)| (p, m * nu.scale));
            let steps = nu.steps.iter().map(|&(a, b, h)| (a, b, h * nu.scale));
            (atoms.collect::<Vec<_>>(), steps.collect::<Vec<_>>())
        };
        if self.scale == other.scale {
            let mut atoms = self.atoms.clone();
            atoms.extend_from_slice(&other.atoms);
            let mut steps = self.steps.clone();
            steps.extend_from_slice(&other.steps);
            return Self { atoms, steps, scale: self.scale };
        }
        let (mut atoms, mut steps) = fold(self);
        let (a2, s2) = fold(other);
        atoms.extend(a2);
        steps.extend(s2);
        Self { atoms, steps, scale: 1.0 }
    }

    pub(crate) fn raw_total(&self) -> f64 {
        let a: f64 = self.atoms.iter().map(|&(_, m)| m).sum();
        let s: f64 = self.steps.iter().map(|&(a, b, h)| h * (b - a)).sum();
        a + s
    }

    pub fn total_mass(&self) -> f64 {
        self.scale * self.raw_total()
    }

    /// Largest atom position or step right endpoint.
    pub fn support_radius(&self) -> f64 {
        let a = self.atoms.iter().map(|&(p, _)| p);
        let s = self.steps.iter().filter(|s| s.2 > 0.0).map(|&(_, b, _)| b);
        a.chain(s).fold(0.0, f64::max)
    }

    /// Smallest atom position or step left endpoint carrying mass.
    pub fn support_min(&self) -> f64 {
        let a = self.atoms.iter().map(|&(p, _)| p);
        let s = self.steps.iter().filter(|s| s.2 > 0.0).map(|&(a, _, _)| a);
        a.chain(s).fold(f64::INFINITY, f64::min)
    }

    /// Unscaled mass of the closed interval `[lo, hi]`.
    pub(crate) fn raw_interval(&self, lo: f64, hi: f64) -> f64 {
        if hi < lo {
            return 0.0;
        }
        let mut m = 0.0;
        for &(p, w) in &self.atoms {
            if p >= lo && p <= hi {
                m += w;
            }
        }
        for &(a, b, h) in &self.steps {
            let l = a.max(lo);
            let r = b.min(hi);
            if r > l {
                m += h * (r - l);
            }
        }
        m
    }

    pub fn interval_mass(&self, lo: f64, hi: f64) -> f64 {
        self.scale * self.raw_interval(lo, hi)
    }

    /// Upper bound for the density of the step part on `[lo, hi]`; infinite when
    /// an atom with positive mass lies in the interval.
    pub fn density_sup(&self, lo: f64, hi: f64) -> f64 {
        if self.atoms.iter().any(|&(p, w)| w > 0.0 && p >= lo && p <= hi) {
            return f64::INFINITY;
        }
        let h: f64 = self
            .steps
            .iter()
            .filter(|&&(a, b, h)| h > 0.0 && a <= hi && b >= lo)
            .map(|s| s.2)
            .sum();
        self.scale * h * (1.0 + 1e-12)
    }

    /// `ν(B(x, r))` with closed balls.
    pub fn ball_mass(&self, x: f64, r: f64) -> f64 {
        self.interval_mass(x - r, x + r)
    }

    /// `(position, scaled mass)` when `ν` is a single atom.
    pub fn single_atom(&self) -> Option<(f64, f64)> {
        let steps_mass: f64 = self.steps.iter().map(|&(a, b, h)| h * (b - a)).sum();
        if self.atoms.len() == 1 && steps_mass == 0.0 {
            Some((self.atoms[0].0, self.atoms[0].1 * self.scale))
        } else {
            None
        }
    }

    /// True when some step with positive height has `y` strictly inside it.
    pub(crate) fn step_active_at(&self, y: f64) -> bool {
        self.steps.iter().any(|&(a, b, h)| h > 0.0 && y > a && y < b)
    }

    /// Atom positions and step endpoints.
    pub(crate) fn key_points(&self) -> impl Iterator<Item = f64> + '_ {
        self.atoms
            .iter()
            .map(|&(p, _)| p)
            .chain(self.steps.iter().filter(|s| s.2 > 0.0).flat_map(|&(a, b, _)| [a, b]))
    }

    /// Parses the inline grammar `atom:<pos>:<mass>;step:<a>:<b>:<h>`.
    pub fn parse_inline(spec: &str) -> Result<Self> {
        let mut atoms = Vec::new();
        let mut steps = Vec::new();
        for (i, item) in spec.split(';').map(str::trim).filter(|s| !s.is_empty()).enumerate() {
            let bad = |msg: &str| Error::Parse { line: i + 1, msg: format!("`{item}`: {msg}") };
            let parts: Vec<&str> = item.split(':').map(str::trim).collect();
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad(&format!("bad number `{s}`")));
            match parts.as_slice() {
                ["atom", p, m] => atoms.push((num(p)?, num(m)?)),
                ["step", a, b, h] => steps.push((num(a)?, num(b)?, num(h)?)),
                _ => return Err(bad("expected `atom:<pos>:<mass>` or `step:<a>:<b>:<h>`")),
            }
        }
        Self::new(atoms, steps)
    }

    /// Parses the line format `atom <pos> <mass>` / `step <a> <b> <height>`.
    pub fn parse_file(text: &str) -> Result<Self> {
        let mut atoms = Vec::new();
        let mut steps = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: String| Error::Parse { line: i + 1, msg };
            let parts: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad(format!("bad number `{s}`")));
            match parts.as_slice() {
                ["atom", p, m] => atoms.push((num(p)?, num(m)?)),
                ["step", a, b, h] => steps.push((num(a)?, num(b)?, num(h)?)),
                _ => return Err(bad(format!("unrecognised line `{line}`"))),
            }
        }
        Self::new(atoms, steps)
    }
}

impl fmt::Display for FiniteTestMeasure {
    /// Inline grammar, with the scale folded into the masses.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut sep = |f: &mut fmt::Formatter<'_>| {
            if !first {
                write!(f, ";")?;
            }
            first = false;
            Ok(())
        };
        for &(p, m) in &self.atoms {
            sep(f)?;
            write!(f, "atom:{}:{}", p, m * self.scale)?;
        }
        for &(a, b, h) in &self.steps {
            sep(f)?;
            write!(f, "step:{}:{}:{}", a, b, h * self.scale)?;
        }
        Ok(())
    }
}
