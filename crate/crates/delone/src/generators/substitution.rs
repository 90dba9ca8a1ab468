use crate::error::{DeloneError, Result};
use crate::geometry::Point;
use crate::set::WindowedDeloneSet;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::collections::BTreeMap;

/// A one-dimensional tile substitution `symbol → word` with tile lengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubstitutionRule1D {
    pub alphabet: Vec<char>,
    pub rule: BTreeMap<char, String>,
    pub tile_lengths: BTreeMap<char, f64>,
    pub seed_symbol: char,
}

impl SubstitutionRule1D {
    /// Fibonacci: `a → ab`, `b → a`, lengths `φ` and `1`.
    pub fn fibonacci() -> Self {
        Self::from_parts(&[('a', "ab", super::PHI), ('b', "a", 1.0)])
    }

    /// Silver mean: `a → aab`, `b → a`, lengths `1 + √2` and `1`.
    pub fn silver_mean() -> Self {
        Self::from_parts(&[('a', "aab", super::SILVER), ('b', "a", 1.0)])
    }

    /// `a → ab`, `b → ab` with unit tiles: the integers with alternating labels.
    pub fn period_two() -> Self {
        Self::from_parts(&[('a', "ab", 1.0), ('b', "ab", 1.0)])
    }

    fn from_parts(parts: &[(char, &str, f64)]) -> Self {
        SubstitutionRule1D {
            alphabet: parts.iter().map(|p| p.0).collect(),
            rule: parts.iter().map(|p| (p.0, p.1.to_string())).collect(),
            tile_lengths: parts.iter().map(|p| (p.0, p.2)).collect(),
            seed_symbol: parts[0].0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.alphabet.is_empty() {
            return Err(DeloneError::InvalidInput("empty alphabet".into()));
        }
        for s in &self.alphabet {
            let w = self
                .rule
                .get(s)
                .ok_or_else(|| DeloneError::InvalidInput(format!("no image for symbol {s}")))?;
            if w.is_empty() || w.chars().any(|c| !self.alphabet.contains(&c)) {
                return Err(DeloneError::InvalidInput(format!("bad image {w:?} for {s}")));
            }
            match self.tile_lengths.get(s) {
                Some(l) if *l > 0.0 && l.is_finite() => {}
                _ => return Err(DeloneError::InvalidInput(format!("tile length of {s} must be positive"))),
            }
        }
        if !self.alphabet.contains(&self.seed_symbol) {
            return Err(DeloneError::InvalidInput("seed symbol not in alphabet".into()));
        }
        Ok(())
    }

    /// Substitution matrix: `m[i][j]` counts symbol `j` in the image of `i`.
    pub fn matrix(&self) -> Vec<Vec<u64>> {
        let n = self.alphabet.len();
        let pos = |c: char| self.alphabet.iter().position(|&a| a == c).unwrap();
        let mut m = vec![vec![0u64; n]; n];
        for (i, s) in self.alphabet.iter().enumerate() {
            for c in self.rule[s].chars() {
                m[i][pos(c)] += 1;
            }
        }
        m
    }

    /// Some power of the matrix is strictly positive (Wielandt bound).
    pub fn is_primitive(&self) -> bool {
        let n = self.alphabet.len();
        let m: Vec<Vec<bool>> = self
            .matrix()
            .iter()
            .map(|r| r.iter().map(|&v| v > 0).collect())
            .collect();
        let mut p = m.clone();
        for _ in 0..(n - 1) * (n - 1) + 1 {
            if p.iter().all(|r| r.iter().all(|&v| v)) {
                return true;
            }
            let mut q = vec![vec![false; n]; n];
            for i in 0..n {
                for j in 0..n {
                    q[i][j] = (0..n).any(|k| p[i][k] && m[k][j]);
                }
            }
            p = q;
        }
        p.iter().all(|r| r.iter().all(|&v| v))
    }

    pub fn apply(&self, word: &[char]) -> Vec<char> {
        word.iter().flat_map(|c| self.rule[c].chars()).collect()
    }

    /// Two-letter words occurring in iterates of the seed symbol, sorted by
    /// alphabet position.
    pub fn legal_pairs(&self) -> Vec<(char, char)> {
        let mut word = vec![self.seed_symbol];
        let mut pairs = std::collections::BTreeSet::new();
        let pos = |c: char| self.alphabet.iter().position(|&a| a == c).unwrap();
        // Primitive rules expose every legal pair within |A|² + 2 steps.
        let steps = self.alphabet.len() * self.alphabet.len() + 2;
        for _ in 0..steps {
            for w in word.windows(2) {
                pairs.insert((pos(w[0]), pos(w[1])));
            }
            word = self.apply(&word);
            if word.len() > 1 << 16 {
                word.truncate(1 << 16);
            }
        }
        pairs
            .into_iter()
            .map(|(i, j)| (self.alphabet[i], self.alphabet[j]))
            .collect()
    }

    /// Smallest legal pair `x.y` that seeds a two-sided fixed point of a
    /// power `σ^p`, with that power.
    pub fn two_sided_seed(&self) -> Option<((char, char), usize)> {
        let last = |c: char| self.rule[&c].chars().last().unwrap();
        let first = |c: char| self.rule[&c].chars().next().unwrap();
        let period = |c: char, f: &dyn Fn(char) -> char| {
            let mut x = f(c);
            for p in 1..=self.alphabet.len() {
                if x == c {
                    return Some(p);
                }
                x = f(x);
            }
            None
        };
        for (x, y) in self.legal_pairs() {
            if let (Some(p), Some(q)) = (period(x, &last), period(y, &first)) {
                return Some(((x, y), lcm(p, q)));
            }
        }
        None
    }
}

fn lcm(a: usize, b: usize) -> usize {
    let mut x = a;
    let mut y = b;
    while y != 0 {
        let t = x % y;
        x = y;
        y = t;
    }
    a / x * b
}

/// Tile endpoints of a two-sided fixed point covering `[−W, W]`, with `0` at
/// the seed junction. Each point is labeled by the alphabet index of the tile
/// to its right.
pub fn generate_substitution_1d(rule: &SubstitutionRule1D, window_radius: f64) -> Result<WindowedDeloneSet> {
    rule.validate()?;
    if !rule.is_primitive() {
        return Err(DeloneError::NonPrimitiveRule);
    }
    let ((x, y), p) = rule
        .two_sided_seed()
        .ok_or_else(|| DeloneError::InvalidInput("no legal pair seeds a fixed point".into()))?;
    let len = |w: &[char]| w.iter().map(|c| rule.tile_lengths[c]).sum::<f64>();
    let mut left = vec![x];
    let mut right = vec![y];
    while len(&left) < window_radius + 1.0 || len(&right) < window_radius + 1.0 {
        for _ in 0..p {
            left = rule.apply(&left);
            right = rule.apply(&right);
        }
    }
    let index = |c: char| rule.alphabet.iter().position(|&a| a == c).unwrap() as u32;
    let mut pts = Vec::new();
    let mut labels = Vec::new();
    let mut pos = 0.0;
    for &c in &right {
        if pos > window_radius {
            break;
        }
        pts.push(Point::on_line(pos));
        labels.push(index(c));
        pos += rule.tile_lengths[&c];
    }
    let mut pos = 0.0;
    for &c in left.iter().rev() {
        pos -= rule.tile_lengths[&c];
        if pos < -window_radius {
            break;
        }
        pts.push(Point::on_line(pos));
        labels.push(index(c));
    }
    let lengths: Vec<f64> = rule.tile_lengths.values().copied().collect();
    let short = lengths.iter().copied().fold(f64::INFINITY, f64::min);
    let long = lengths.iter().copied().fold(0.0, f64::max);
    WindowedDeloneSet::new(1, window_radius, pts, Some(labels))?
        .with_declared(Some(short / 2.0), Some(long / 2.0))
        .map(|s| {
            s.with_meta(json!({
                "model": "substitution",
                "rule": rule,
                "seed_pair": format!("{x}.{y}"),
            }))
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::PHI;

    #[test]
    fn fibonacci_first_points() {
        let s = generate_substitution_1d(&SubstitutionRule1D::fibonacci(), 10.0).unwrap();
        let right: Vec<f64> = s.points().iter().map(|p| p.x()).filter(|&x| x >= 0.0).take(5).collect();
        let expect = [0.0, PHI, PHI + 1.0, 2.0 * PHI + 1.0, 3.0 * PHI + 1.0];
        for (a, b) in right.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12, "{right:?}");
        }
        assert_eq!(SubstitutionRule1D::fibonacci().two_sided_seed(), Some((('a', 'a'), 2)));
    }

    #[test]
    fn period_two_gives_alternating_integers() {
        let s = generate_substitution_1d(&SubstitutionRule1D::period_two(), 10.0).unwrap();
        assert_eq!(s.len(), 21);
        let labels = s.labels().unwrap();
        for (i, p) in s.points().iter().enumerate() {
            assert_eq!(p.x(), p.x().round());
            if i > 0 {
                assert_ne!(labels[i], labels[i - 1]);
            }
        }
    }

    #[test]
    fn non_primitive_rule_is_rejected() {
        let mut r = SubstitutionRule1D::fibonacci();
        r.rule.insert('a', "a".into());
        r.rule.insert('b', "b".into());
        assert!(matches!(generate_substitution_1d(&r, 10.0), Err(DeloneError::NonPrimitiveRule)));
    }

    #[test]
    fn matrix_and_primitivity() {
        let f = SubstitutionRule1D::fibonacci();
        assert_eq!(f.matrix(), vec![vec![1, 1], vec![1, 0]]);
        assert!(f.is_primitive());
        let mut t = f.clone();
        t.rule.insert('b', "b".into());
        assert!(!t.is_primitive());
    }
}
