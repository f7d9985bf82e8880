//! Exact finite-alphabet probability tables and information measures.
//!
//! A [`JointPmf`] is a dense table over the product of named [`Alphabet`]s,
//! stored row-major with the last variable varying fastest. A [`Channel`]
//! is a conditional PMF from a tuple of variables to a single new variable.
//! All measures are in bits.

use crate::error::{Error, Result};

/// Relative slack allowed on normalization at ingest.
pub const INGEST_TOL: f64 = 1e-9;

/// Mutual informations within this distance below zero are clamped to 0.
const MI_CLAMP: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    name: String,
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(
        name: impl Into<String>,
        symbols: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        let name = name.into();
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::EmptyAlphabet(name));
        }
        for (i, s) in symbols.iter().enumerate() {
            if symbols[..i].contains(s) {
                return Err(Error::DuplicateSymbol {
                    name,
                    symbol: s.clone(),
                });
            }
        }
        Ok(Self { name, symbols })
    }

    /// Alphabet `{prefix0, prefix1, ...}` of the given size.
    pub fn indexed(name: impl Into<String>, prefix: &str, size: usize) -> Result<Self> {
        Self::new(name, (0..size).map(|i| format!("{prefix}{i}")))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index_of(&self, symbol: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == symbol)
    }

    fn index_checked(&self, symbol: &str) -> Result<usize> {
        self.index_of(symbol).ok_or_else(|| Error::UnknownSymbol {
            variable: self.name.clone(),
            symbol: symbol.to_string(),
        })
    }

    pub fn renamed(&self, name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            symbols: self.symbols.clone(),
        }
    }
}

/// Calls `f(digits, flat_index)` for every cell of a row-major table.
pub(crate) fn for_each_cell(shape: &[usize], mut f: impl FnMut(&[usize], usize)) {
    let total: usize = shape.iter().product();
    let mut digits = vec![0usize; shape.len()];
    for cell in 0..total {
        f(&digits, cell);
        for k in (0..shape.len()).rev() {
            digits[k] += 1;
            if digits[k] < shape[k] {
                break;
            }
            digits[k] = 0;
        }
    }
}

/// Row-major flat index of `digits` restricted to positions `idx`.
fn sub_index(digits: &[usize], idx: &[usize], shape: &[usize]) -> usize {
    idx.iter().fold(0, |acc, &k| acc * shape[k] + digits[k])
}

fn validate_and_normalize(mass: &mut [f64]) -> Result<()> {
    for &p in mass.iter() {
        if !p.is_finite() || p < 0.0 {
            return Err(Error::InvalidMass(p));
        }
    }
    let sum: f64 = mass.iter().sum();
    if (sum - 1.0).abs() > INGEST_TOL {
        return Err(Error::NotNormalized(sum));
    }
    mass.iter_mut().for_each(|p| *p /= sum);
    Ok(())
}

/// Shannon entropy in bits of an (already normalized) mass vector.
pub(crate) fn entropy_bits(mass: &[f64]) -> f64 {
    mass.iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

/// Joint probability mass function over named finite alphabets.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    vars: Vec<Alphabet>,
    mass: Vec<f64>,
}

impl JointPmf {
    pub fn new(vars: Vec<Alphabet>, mut mass: Vec<f64>) -> Result<Self> {
        if vars.is_empty() {
            return Err(Error::EmptyVariableSet);
        }
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].iter().any(|w| w.name == v.name) {
                return Err(Error::DuplicateVariable(v.name.clone()));
            }
        }
        let expected: usize = vars.iter().map(Alphabet::len).product();
        if mass.len() != expected {
            return Err(Error::ShapeMismatch {
                expected,
                actual: mass.len(),
            });
        }
        validate_and_normalize(&mut mass)?;
        Ok(Self { vars, mass })
    }

    /// Builds a joint by evaluating `f` on every symbol-index tuple.
    pub fn from_fn(vars: Vec<Alphabet>, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        let shape: Vec<usize> = vars.iter().map(Alphabet::len).collect();
        let mut mass = vec![0.0; shape.iter().product()];
        for_each_cell(&shape, |d, c| mass[c] = f(d));
        Self::new(vars, mass)
    }

    pub fn variables(&self) -> &[Alphabet] {
        &self.vars
    }

    pub fn variable_names(&self) -> Vec<&str> {
        self.vars.iter().map(Alphabet::name).collect()
    }

    pub fn variable(&self, name: &str) -> Result<&Alphabet> {
        Ok(&self.vars[self.var_index(name)?])
    }

    pub fn var_index(&self, name: &str) -> Result<usize> {
        self.vars
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn has_variable(&self, name: &str) -> bool {
        self.vars.iter().any(|v| v.name == name)
    }

    pub fn shape(&self) -> Vec<usize> {
        self.vars.iter().map(Alphabet::len).collect()
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn prob_at(&self, digits: &[usize]) -> f64 {
        let shape = self.shape();
        let idx: Vec<usize> = (0..shape.len()).collect();
        self.mass[sub_index(digits, &idx, &shape)]
    }

    /// Probability of one cell, with labels given in variable order.
    pub fn prob(&self, labels: &[&str]) -> Result<f64> {
        if labels.len() != self.vars.len() {
            return Err(Error::ShapeMismatch {
                expected: self.vars.len(),
                actual: labels.len(),
            });
        }
        let digits = self
            .vars
            .iter()
            .zip(labels)
            .map(|(v, l)| v.index_checked(l))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.prob_at(&digits))
    }

    /// Renames a variable, keeping its symbols.
    pub fn rename(&self, from: &str, to: &str) -> Result<Self> {
        let k = self.var_index(from)?;
        if from != to && self.has_variable(to) {
            return Err(Error::DuplicateVariable(to.to_string()));
        }
        let mut out = self.clone();
        out.vars[k].name = to.to_string();
        Ok(out)
    }

    pub(crate) fn resolve(&self, names: &[&str]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(names.len());
        for &n in names {
            let k = self.var_index(n)?;
            if out.contains(&k) {
                return Err(Error::DuplicateVariable(n.to_string()));
            }
            out.push(k);
        }
        Ok(out)
    }

    /// Marginal mass over the variables at positions `idx`, row-major in `idx` order.
    pub(crate) fn marginal_by_index(&self, idx: &[usize]) -> Vec<f64> {
        let shape = self.shape();
        let size: usize = idx.iter().map(|&k| shape[k]).product();
        let mut out = vec![0.0; size];
        for_each_cell(&shape, |d, c| {
            out[sub_index(d, idx, &shape)] += self.mass[c];
        });
        out
    }

    /// Sums out every variable not in `keep`. Variable order follows the joint.
    pub fn marginalize(&self, keep: &[&str]) -> Result<JointPmf> {
        if keep.is_empty() {
            return Err(Error::EmptyVariableSet);
        }
        let mut idx = self.resolve(keep)?;
        idx.sort_unstable();
        let vars = idx.iter().map(|&k| self.vars[k].clone()).collect();
        let mut mass = self.marginal_by_index(&idx);
        let sum: f64 = mass.iter().sum();
        mass.iter_mut().for_each(|p| *p /= sum);
        Ok(JointPmf { vars, mass })
    }

    fn check_disjoint(sets: &[&[usize]], names: &[&[&str]]) -> Result<()> {
        for i in 0..sets.len() {
            for j in (i + 1)..sets.len() {
                if let Some(pos) = sets[i].iter().position(|k| sets[j].contains(k)) {
                    return Err(Error::OverlappingVariables(names[i][pos].to_string()));
                }
            }
        }
        Ok(())
    }

    /// Conditional entropy `H(target | given)` in bits.
    pub fn entropy(&self, target: &[&str], given: &[&str]) -> Result<f64> {
        let t = self.resolve(target)?;
        let g = self.resolve(given)?;
        Self::check_disjoint(&[&t, &g], &[target, given])?;
        Ok(self.entropy_idx(&t, &g))
    }

    fn entropy_idx(&self, target: &[usize], given: &[usize]) -> f64 {
        if target.is_empty() {
            return 0.0;
        }
        let shape = self.shape();
        let t_size: usize = target.iter().map(|&k| shape[k]).product();
        let joint_idx: Vec<usize> = given.iter().chain(target).copied().collect();
        let p_tg = self.marginal_by_index(&joint_idx);
        let p_g = self.marginal_by_index(given);
        // H(T|G) = sum p(t,g) log2(p(g) / p(t,g)) over cells with mass
        let mut h = 0.0;
        for (cell, &p) in p_tg.iter().enumerate() {
            if p > 0.0 {
                h += p * (p_g[cell / t_size] / p).log2();
            }
        }
        h.max(0.0)
    }

    /// Conditional mutual information `I(x; y | given)` in bits.
    pub fn mutual_information(&self, x: &[&str], y: &[&str], given: &[&str]) -> Result<f64> {
        let xi = self.resolve(x)?;
        let yi = self.resolve(y)?;
        let gi = self.resolve(given)?;
        Self::check_disjoint(&[&xi, &yi, &gi], &[x, y, given])?;
        let yg: Vec<usize> = yi.iter().chain(&gi).copied().collect();
        let mi = self.entropy_idx(&xi, &gi) - self.entropy_idx(&xi, &yg);
        Ok(if mi.abs() < MI_CLAMP { 0.0 } else { mi })
    }

    /// Attaches a new variable through `attach`, producing
    /// `p(base) * attach(new | projection of base onto attach's inputs)`.
    pub fn build_joint(&self, attach: &Channel) -> Result<JointPmf> {
        if self.has_variable(attach.to.name()) {
            return Err(Error::DuplicateVariable(attach.to.name.clone()));
        }
        let mut cond_idx = Vec::with_capacity(attach.from.len());
        for a in &attach.from {
            let k = self.var_index(a.name())?;
            if self.vars[k].symbols != a.symbols {
                return Err(Error::ConditioningMismatch(a.name.clone()));
            }
            cond_idx.push(k);
        }
        let shape = self.shape();
        let u = attach.to.len();
        let mut mass = vec![0.0; self.mass.len() * u];
        for_each_cell(&shape, |d, c| {
            let row = &attach.rows[sub_index(d, &cond_idx, &shape)];
            for (j, &w) in row.iter().enumerate() {
                mass[c * u + j] = self.mass[c] * w;
            }
        });
        let mut vars = self.vars.clone();
        vars.push(attach.to.clone());
        JointPmf::new(vars, mass)
    }

    /// The conditional PMF `p(target | given)`. Rows for zero-mass inputs are uniform.
    pub fn conditional(&self, target: &str, given: &[&str]) -> Result<Channel> {
        let t = self.var_index(target)?;
        let g = self.resolve(given)?;
        Self::check_disjoint(&[&[t], &g], &[&[target], given])?;
        let t_size = self.vars[t].len();
        let idx: Vec<usize> = g.iter().chain(std::iter::once(&t)).copied().collect();
        let p = self.marginal_by_index(&idx);
        let rows = p
            .chunks(t_size)
            .map(|chunk| {
                let s: f64 = chunk.iter().sum();
                if s > 0.0 {
                    chunk.iter().map(|x| x / s).collect()
                } else {
                    vec![1.0 / t_size as f64; t_size]
                }
            })
            .collect();
        Channel::new(
            g.iter().map(|&k| self.vars[k].clone()).collect(),
            self.vars[t].clone(),
            rows,
        )
    }
}

/// Conditional PMF from a tuple of named variables to one new variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    from: Vec<Alphabet>,
    to: Alphabet,
    rows: Vec<Vec<f64>>,
}

impl Channel {
    /// `rows` are indexed row-major over the `from` alphabets.
    pub fn new(from: Vec<Alphabet>, to: Alphabet, mut rows: Vec<Vec<f64>>) -> Result<Self> {
        for (i, v) in from.iter().enumerate() {
            if from[..i].iter().any(|w| w.name == v.name) || v.name == to.name {
                return Err(Error::DuplicateVariable(v.name.clone()));
            }
        }
        let expected: usize = from.iter().map(Alphabet::len).product();
        if rows.len() != expected {
            return Err(Error::ShapeMismatch {
                expected,
                actual: rows.len(),
            });
        }
        for (r, row) in rows.iter_mut().enumerate() {
            if row.len() != to.len() {
                return Err(Error::ShapeMismatch {
                    expected: to.len(),
                    actual: row.len(),
                });
            }
            if let Some(&bad) = row.iter().find(|p| !p.is_finite() || **p < 0.0) {
                return Err(Error::InvalidMass(bad));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > INGEST_TOL {
                return Err(Error::RowNotStochastic { row: r, sum });
            }
            row.iter_mut().for_each(|p| *p /= sum);
        }
        Ok(Self { from, to, rows })
    }

    pub fn from_fn(
        from: Vec<Alphabet>,
        to: Alphabet,
        mut f: impl FnMut(&[usize]) -> Vec<f64>,
    ) -> Result<Self> {
        let shape: Vec<usize> = from.iter().map(Alphabet::len).collect();
        let mut rows = Vec::with_capacity(shape.iter().product());
        for_each_cell(&shape, |d, _| rows.push(f(d)));
        Self::new(from, to, rows)
    }

    /// Deterministic map into a single-symbol alphabet.
    pub fn constant(from: Vec<Alphabet>, to_name: &str) -> Result<Self> {
        let to = Alphabet::new(to_name, ["c"])?;
        Self::from_fn(from, to, |_| vec![1.0])
    }

    /// Noiseless copy of `source` into a new variable with the same symbols.
    pub fn identity(source: &Alphabet, to_name: &str) -> Result<Self> {
        let n = source.len();
        Self::from_fn(vec![source.clone()], source.renamed(to_name), |d| {
            let mut row = vec![0.0; n];
            row[d[0]] = 1.0;
            row
        })
    }

    pub fn from_vars(&self) -> &[Alphabet] {
        &self.from
    }

    pub fn from_names(&self) -> Vec<&str> {
        self.from.iter().map(Alphabet::name).collect()
    }

    pub fn to(&self) -> &Alphabet {
        &self.to
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row_index(&self, digits: &[usize]) -> usize {
        let shape: Vec<usize> = self.from.iter().map(Alphabet::len).collect();
        let idx: Vec<usize> = (0..shape.len()).collect();
        sub_index(digits, &idx, &shape)
    }

    pub fn row(&self, digits: &[usize]) -> &[f64] {
        &self.rows[self.row_index(digits)]
    }

    /// `p(to = output | from = given)`, labels in `from` order.
    pub fn prob(&self, given: &[&str], output: &str) -> Result<f64> {
        if given.len() != self.from.len() {
            return Err(Error::ShapeMismatch {
                expected: self.from.len(),
                actual: given.len(),
            });
        }
        let digits = self
            .from
            .iter()
            .zip(given)
            .map(|(a, l)| a.index_checked(l))
            .collect::<Result<Vec<_>>>()?;
        let j = self.to.index_checked(output)?;
        Ok(self.row(&digits)[j])
    }

    /// Input tuples as digit vectors, in row order.
    pub fn input_tuples(&self) -> Vec<Vec<usize>> {
        let shape: Vec<usize> = self.from.iter().map(Alphabet::len).collect();
        let mut out = Vec::with_capacity(self.rows.len());
        for_each_cell(&shape, |d, _| out.push(d.to_vec()));
        out
    }
}
