//! Truncated multimode Fock spaces, linear-optical mode maps and the
//! Mach-Zehnder encoder with a loss mode.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::numlin::{hermitian_eigh, CMatrix, HermitianMatrix};

/// Total photon number kept in every state built here.
pub const MAX_PHOTONS: usize = 3;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Occupation-number basis of `modes` modes with `Σ n_i <= max_total`,
/// ordered lexicographically (vacuum first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockBasis {
    modes: usize,
    max_total: usize,
    labels: Vec<Vec<usize>>,
}

impl FockBasis {
    pub fn new(modes: usize, max_total: usize) -> Result<Self> {
        if modes == 0 {
            return invalid("a Fock basis needs at least one mode");
        }
        let mut labels = Vec::new();
        let mut current = vec![0; modes];
        fill_labels(&mut labels, &mut current, 0, max_total);
        Ok(Self {
            modes,
            max_total,
            labels,
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn max_total(&self) -> usize {
        self.max_total
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[Vec<usize>] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &[usize] {
        &self.labels[i]
    }

    pub fn index_of(&self, occupation: &[usize]) -> Option<usize> {
        if occupation.len() != self.modes {
            return None;
        }
        self.labels
            .binary_search_by(|l| l.as_slice().cmp(occupation))
            .ok()
    }

    pub fn total(&self, i: usize) -> usize {
        self.labels[i].iter().sum()
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.modes {
            return invalid(format!(
                "mode index {mode} out of range for {} modes",
                self.modes
            ));
        }
        Ok(())
    }
}

fn fill_labels(out: &mut Vec<Vec<usize>>, current: &mut Vec<usize>, pos: usize, budget: usize) {
    if pos == current.len() {
        out.push(current.clone());
        return;
    }
    for n in 0..=budget {
        current[pos] = n;
        fill_labels(out, current, pos + 1, budget - n);
    }
    current[pos] = 0;
}

/// Basis of a state: Fock occupations or a fixed list of named vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Basis {
    Fock(FockBasis),
    Labels(Vec<String>),
}

impl Basis {
    pub fn dim(&self) -> usize {
        match self {
            Basis::Fock(b) => b.dim(),
            Basis::Labels(l) => l.len(),
        }
    }

    pub fn label_strings(&self) -> Vec<String> {
        match self {
            Basis::Fock(b) => b
                .labels()
                .iter()
                .map(|l| {
                    format!(
                        "|{}>",
                        l.iter().map(|n| n.to_string()).collect::<Vec<_>>().join("")
                    )
                })
                .collect(),
            Basis::Labels(l) => l.clone(),
        }
    }

    fn fock(&self) -> Result<&FockBasis> {
        match self {
            Basis::Fock(b) => Ok(b),
            Basis::Labels(_) => {
                invalid("operation needs a Fock basis, got an abstract label basis")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    basis: Basis,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(basis: Basis, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return invalid(format!(
                "{} amplitudes for a basis of dimension {}",
                amplitudes.len(),
                basis.dim()
            ));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return invalid(format!("state norm {norm} differs from 1"));
        }
        Ok(Self { basis, amplitudes })
    }

    /// A single occupation-number state.
    pub fn fock(basis: &FockBasis, occupation: &[usize]) -> Result<Self> {
        let i = basis.index_of(occupation).ok_or_else(|| {
            Error::InvalidInput(format!("occupation {occupation:?} not in basis"))
        })?;
        let mut amps = vec![ZERO; basis.dim()];
        amps[i] = Complex64::new(1.0, 0.0);
        Ok(Self {
            basis: Basis::Fock(basis.clone()),
            amplitudes: amps,
        })
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, occupation: &[usize]) -> Complex64 {
        match &self.basis {
            Basis::Fock(b) => b.index_of(occupation).map_or(ZERO, |i| self.amplitudes[i]),
            Basis::Labels(_) => ZERO,
        }
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix {
            basis: self.basis.clone(),
            matrix: HermitianMatrix::projector(&self.amplitudes),
        }
    }

    /// Probability of each total photon number `0..=max_total`.
    pub fn photon_number_distribution(&self) -> Result<Vec<f64>> {
        let b = self.basis.fock()?;
        let mut out = vec![0.0; b.max_total() + 1];
        for (i, a) in self.amplitudes.iter().enumerate() {
            out[b.total(i)] += a.norm_sqr();
        }
        Ok(out)
    }
}

/// Applies the linear substitution `a_k† -> m[0][0] a_k† + m[0][1] a_l†`,
/// `a_l† -> m[1][0] a_k† + m[1][1] a_l†` to a Fock state.
fn apply_mode_map(
    state: &PureState,
    k: usize,
    l: usize,
    m: [[Complex64; 2]; 2],
) -> Result<PureState> {
    let basis = state.basis.fock()?;
    basis.check_mode(k)?;
    basis.check_mode(l)?;
    if k == l {
        return invalid(format!(
            "beamsplitter needs two distinct modes, got {k} twice"
        ));
    }
    let mut out = vec![ZERO; basis.dim()];
    let mut target = vec![0; basis.modes()];
    for (idx, &amp) in state.amplitudes.iter().enumerate() {
        if amp == ZERO {
            continue;
        }
        let occ = basis.label(idx);
        let (nk, nl) = (occ[k], occ[l]);
        let norm_in = (factorial(nk) * factorial(nl)).sqrt();
        target.copy_from_slice(occ);
        for i in 0..=nk {
            let ci = binomial(nk, i) * m[0][0].powu(i as u32) * m[0][1].powu((nk - i) as u32);
            for j in 0..=nl {
                let cj = binomial(nl, j) * m[1][0].powu(j as u32) * m[1][1].powu((nl - j) as u32);
                let new_k = i + j;
                let new_l = nk + nl - new_k;
                target[k] = new_k;
                target[l] = new_l;
                let t = basis
                    .index_of(&target)
                    .expect("mode maps conserve total photon number");
                let norm_out = (factorial(new_k) * factorial(new_l)).sqrt();
                out[t] += amp * ci * cj * (norm_out / norm_in);
            }
        }
    }
    Ok(PureState {
        basis: state.basis.clone(),
        amplitudes: out,
    })
}

/// Beamsplitter of reflectivity `r` on modes `(mode_a, mode_b)`:
/// `a† -> √r a† + √(1-r) b†`, `b† -> √(1-r) a† - √r b†`.
pub fn apply_beamsplitter(
    state: &PureState,
    mode_a: usize,
    mode_b: usize,
    r: f64,
) -> Result<PureState> {
    if !(0.0..=1.0).contains(&r) {
        return invalid(format!("reflectivity {r} outside [0, 1]"));
    }
    let (s, t) = (
        Complex64::new(r.sqrt(), 0.0),
        Complex64::new((1.0 - r).sqrt(), 0.0),
    );
    apply_mode_map(state, mode_a, mode_b, [[s, t], [t, -s]])
}

/// Multiplies each amplitude by `e^{i n_mode φ}`.
pub fn apply_phase(state: &PureState, mode: usize, phi: f64) -> Result<PureState> {
    let basis = state.basis.fock()?;
    basis.check_mode(mode)?;
    let amplitudes = state
        .amplitudes
        .iter()
        .enumerate()
        .map(|(i, a)| a * Complex64::from_polar(1.0, phi * basis.label(i)[mode] as f64))
        .collect();
    Ok(PureState {
        basis: state.basis.clone(),
        amplitudes,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    basis: Basis,
    matrix: HermitianMatrix,
}

impl DensityMatrix {
    /// Checks unit trace (1e-12) and positivity (-1e-10).
    pub fn new(basis: Basis, matrix: HermitianMatrix) -> Result<Self> {
        if matrix.dim() != basis.dim() {
            return invalid(format!(
                "matrix dimension {} but basis dimension {}",
                matrix.dim(),
                basis.dim()
            ));
        }
        let tr = matrix.trace();
        if (tr - 1.0).abs() > 1e-12 {
            return invalid(format!("density matrix trace {tr} differs from 1"));
        }
        let lmin = hermitian_eigh(&matrix)?.values[0];
        if lmin < -1e-10 {
            return invalid(format!("density matrix has negative eigenvalue {lmin:e}"));
        }
        Ok(Self { basis, matrix })
    }

    pub(crate) fn from_parts(basis: Basis, matrix: HermitianMatrix) -> Self {
        Self { basis, matrix }
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> HermitianMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix)
    }

    /// Mixture `Σ w_i ρ_i` over states sharing one basis.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let Some((_, first)) = parts.first() else {
            return invalid("empty mixture");
        };
        let mut acc = HermitianMatrix::zeros(first.dim());
        for (w, rho) in parts {
            if rho.basis != first.basis {
                return invalid("mixture components use different bases");
            }
            acc = &acc + &rho.matrix.scale(*w);
        }
        Ok(Self {
            basis: first.basis.clone(),
            matrix: acc,
        })
    }

    /// Zeroes every element between different total photon numbers.
    pub fn decohere_photon_number(&self) -> Result<Self> {
        let b = self.basis.fock()?;
        let n = self.dim();
        let m = CMatrix::from_fn(n, |i, j| {
            if b.total(i) == b.total(j) {
                self.matrix.get(i, j)
            } else {
                ZERO
            }
        });
        Ok(Self {
            basis: self.basis.clone(),
            matrix: HermitianMatrix::symmetrized(m),
        })
    }

    /// Plain-text form: a `basis` header line then one row per line of
    /// space-separated `re,im` entries.
    pub fn to_text(&self) -> String {
        let mut out = String::from("basis");
        for l in self.basis.label_strings() {
            out.push(' ');
            out.push_str(&l);
        }
        out.push('\n');
        let n = self.dim();
        for i in 0..n {
            let row: Vec<String> = (0..n)
                .map(|j| {
                    let v = self.matrix.get(i, j);
                    format!("{:e},{:e}", v.re, v.im)
                })
                .collect();
            writeln!(out, "{}", row.join(" ")).unwrap();
        }
        out
    }

    /// Parses [`Self::to_text`] output. Fock labels are recognised from
    /// `|n0n1...>` and reattached to a basis with the matching cutoff.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidInput("empty matrix text".into()))?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some("basis") {
            return invalid("matrix text must start with a 'basis' header");
        }
        let labels: Vec<String> = parts.map(str::to_owned).collect();
        let n = labels.len();
        let mut data = Vec::with_capacity(n * n);
        for (r, line) in lines.enumerate() {
            let entries: Vec<&str> = line.split_whitespace().collect();
            if entries.len() != n {
                return invalid(format!(
                    "row {r} has {} entries, expected {n}",
                    entries.len()
                ));
            }
            for e in entries {
                let (re, im) = e
                    .split_once(',')
                    .ok_or_else(|| Error::InvalidInput(format!("bad entry '{e}'")))?;
                let parse = |s: &str| {
                    s.parse::<f64>()
                        .map_err(|err| Error::InvalidInput(format!("bad number '{s}': {err}")))
                };
                data.push(Complex64::new(parse(re)?, parse(im)?));
            }
        }
        let matrix = HermitianMatrix::new(CMatrix::from_vec(n, data)?)?;
        let basis = fock_basis_from_labels(&labels).map_or(Basis::Labels(labels), Basis::Fock);
        Ok(Self { basis, matrix })
    }
}

fn fock_basis_from_labels(labels: &[String]) -> Option<FockBasis> {
    let occ: Vec<Vec<usize>> = labels
        .iter()
        .map(|l| {
            l.strip_prefix('|')?
                .strip_suffix('>')?
                .chars()
                .map(|c| c.to_digit(10).map(|d| d as usize))
                .collect::<Option<Vec<_>>>()
        })
        .collect::<Option<_>>()?;
    let modes = occ.first()?.len();
    let max_total = occ.iter().map(|o| o.iter().sum::<usize>()).max()?;
    let b = FockBasis::new(modes, max_total).ok()?;
    (b.labels() == occ.as_slice()).then_some(b)
}

/// Reduced state on the modes in `keep` (in the given order).
pub fn partial_trace(state: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let b = state.basis.fock()?;
    if keep.is_empty() {
        return invalid("partial trace must keep at least one mode");
    }
    for (i, &m) in keep.iter().enumerate() {
        b.check_mode(m)?;
        if keep[..i].contains(&m) {
            return invalid(format!("mode {m} listed twice"));
        }
    }
    let traced: Vec<usize> = (0..b.modes()).filter(|m| !keep.contains(m)).collect();
    let out_basis = FockBasis::new(keep.len(), b.max_total())?;
    let n = out_basis.dim();
    let mut out = CMatrix::zeros(n);
    let project = |idx: usize, modes: &[usize]| -> Vec<usize> {
        modes.iter().map(|&m| b.label(idx)[m]).collect()
    };
    for i in 0..b.dim() {
        let ti = project(i, &traced);
        let ki = out_basis
            .index_of(&project(i, keep))
            .expect("marginal occupation within cutoff");
        for j in 0..b.dim() {
            if project(j, &traced) != ti {
                continue;
            }
            let kj = out_basis
                .index_of(&project(j, keep))
                .expect("marginal occupation within cutoff");
            out.add_at(ki, kj, state.matrix.get(i, j));
        }
    }
    Ok(DensityMatrix {
        basis: Basis::Fock(out_basis),
        matrix: HermitianMatrix::symmetrized(out),
    })
}

fn check_populations(populations: &[f64]) -> Result<()> {
    if populations.len() > MAX_PHOTONS + 1 {
        return invalid(format!(
            "populations beyond n = {MAX_PHOTONS} are not supported"
        ));
    }
    if let Some((n, p)) = populations.iter().enumerate().find(|(_, p)| !(**p >= 0.0)) {
        return invalid(format!("population p_{n} = {p} is negative"));
    }
    let total: f64 = populations.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return invalid(format!("populations sum to {total}, not 1"));
    }
    Ok(())
}

fn check_unit(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return invalid(format!("{name} = {x} outside [0, 1]"));
    }
    Ok(())
}

/// `Σ √p_n |n,0,0>` on the three modes (source, second arm, loss).
fn source_state(populations: &[f64]) -> Result<PureState> {
    let basis = FockBasis::new(3, MAX_PHOTONS)?;
    let mut amps = vec![ZERO; basis.dim()];
    for (n, &p) in populations.iter().enumerate() {
        amps[basis.index_of(&[n, 0, 0]).unwrap()] = Complex64::new(p.sqrt(), 0.0);
    }
    Ok(PureState {
        basis: Basis::Fock(basis),
        amplitudes: amps,
    })
}

fn collect(state: &PureState, coherent: bool) -> Result<DensityMatrix> {
    let rho = partial_trace(&state.density(), &[0, 1])?;
    if coherent {
        Ok(rho)
    } else {
        rho.decohere_photon_number()
    }
}

/// Collects a photon-number state with efficiency `eta` and encodes it with a
/// Mach-Zehnder interferometer of two `y`-reflectivity splitters and phase
/// `phi`, then traces out the loss mode. Without coherence the result is
/// block-diagonal in total photon number.
pub fn encode_state(
    populations: &[f64],
    eta: f64,
    phi: f64,
    y: f64,
    coherent: bool,
) -> Result<DensityMatrix> {
    check_populations(populations)?;
    check_unit("collection efficiency", eta)?;
    check_unit("interferometer reflectivity", y)?;
    let s = source_state(populations)?;
    let s = apply_beamsplitter(&s, 0, 2, eta)?;
    let s = apply_beamsplitter(&s, 0, 1, y)?;
    let s = apply_phase(&s, 1, phi)?;
    let s = apply_beamsplitter(&s, 0, 1, y)?;
    collect(&s, coherent)
}

/// Same collection model as [`encode_state`] but with the source mode sent
/// straight onto the single-photon qubit `u a_0† + v a_1†`.
pub fn encode_qubit(
    populations: &[f64],
    eta: f64,
    u: Complex64,
    v: Complex64,
    coherent: bool,
) -> Result<DensityMatrix> {
    check_populations(populations)?;
    check_unit("collection efficiency", eta)?;
    let norm = u.norm_sqr() + v.norm_sqr();
    if (norm - 1.0).abs() > 1e-12 {
        return invalid(format!("qubit amplitudes have norm {norm}, not 1"));
    }
    let basis = FockBasis::new(3, MAX_PHOTONS)?;
    let c = [
        u * eta.sqrt(),
        v * eta.sqrt(),
        Complex64::new((1.0 - eta).sqrt(), 0.0),
    ];
    // Σ_n √(p_n/n!) (Σ c_i a_i†)^n |000> = Σ √(p_n n!) Π c_i^{k_i} / √(k_i!) |k>
    let amplitudes = basis
        .labels()
        .iter()
        .enumerate()
        .map(|(i, k)| {
            let n = basis.total(i);
            let p = populations.get(n).copied().unwrap_or(0.0);
            let mono: Complex64 = k
                .iter()
                .zip(&c)
                .map(|(&ki, ci)| ci.powu(ki as u32) / factorial(ki).sqrt())
                .product();
            mono * (p * factorial(n)).sqrt()
        })
        .collect();
    collect(
        &PureState {
            basis: Basis::Fock(basis),
            amplitudes,
        },
        coherent,
    )
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn binomial(n: usize, k: usize) -> f64 {
    factorial(n) / (factorial(k) * factorial(n - k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn two_mode() -> FockBasis {
        FockBasis::new(2, 3).unwrap()
    }

    #[test]
    fn basis_dimensions_and_order() {
        assert_eq!(two_mode().dim(), 10);
        assert_eq!(FockBasis::new(3, 3).unwrap().dim(), 20);
        let b = two_mode();
        assert_eq!(b.label(0), &[0, 0]);
        assert_eq!(b.label(1), &[0, 1]);
        assert_eq!(b.label(9), &[3, 0]);
        for w in b.labels().windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn beamsplitter_full_reflection() {
        let b = two_mode();
        let s = PureState::fock(&b, &[1, 2]).unwrap();
        let out = apply_beamsplitter(&s, 0, 1, 1.0).unwrap();
        assert!((out.amplitude(&[1, 2]) - c(1.0, 0.0)).norm() < 1e-15);
        let s = PureState::fock(&b, &[0, 1]).unwrap();
        let out = apply_beamsplitter(&s, 0, 1, 1.0).unwrap();
        assert!((out.amplitude(&[0, 1]) - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn balanced_splitter_single_photon() {
        let s = PureState::fock(&two_mode(), &[1, 0]).unwrap();
        let out = apply_beamsplitter(&s, 0, 1, 0.5).unwrap();
        assert!((out.amplitude(&[1, 0]).re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((out.amplitude(&[0, 1]).re - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn hong_ou_mandel() {
        let s = PureState::fock(&two_mode(), &[1, 1]).unwrap();
        let out = apply_beamsplitter(&s, 0, 1, 0.5).unwrap();
        assert!(out.amplitude(&[1, 1]).norm() < 1e-12);
        assert!((out.amplitude(&[2, 0]) - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-12);
        assert!((out.amplitude(&[0, 2]) - c(-FRAC_1_SQRT_2, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn phase_shift() {
        let s = PureState::fock(&two_mode(), &[0, 1]).unwrap();
        let out = apply_phase(&s, 1, FRAC_PI_2).unwrap();
        assert!((out.amplitude(&[0, 1]) - c(0.0, 1.0)).norm() < 1e-15);
        let out = apply_phase(&s, 1, 2.0 * PI).unwrap();
        assert!((out.amplitude(&[0, 1]) - c(1.0, 0.0)).norm() < 1e-12);
        assert!(apply_phase(&s, 2, 0.1).is_err());
    }

    #[test]
    fn invalid_modes_rejected() {
        let s = PureState::fock(&two_mode(), &[1, 0]).unwrap();
        assert!(apply_beamsplitter(&s, 0, 0, 0.5).is_err());
        assert!(apply_beamsplitter(&s, 0, 5, 0.5).is_err());
    }

    #[test]
    fn mzi_identity_at_zero_phase() {
        let rho = encode_state(&[0.0, 1.0], 1.0, 0.0, 0.5, true).unwrap();
        let b = two_mode();
        let i = b.index_of(&[1, 0]).unwrap();
        assert!((rho.matrix().get(i, i).re - 1.0).abs() < 1e-12);
        assert!((rho.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quarter_phase_encoding() {
        // single-photon amplitudes ((1+i)/2, (1-i)/2) = e^{iπ/4}(|10> - i|01>)/√2
        let rho = encode_state(&[0.0, 1.0], 1.0, FRAC_PI_2, 0.5, true).unwrap();
        let b = two_mode();
        let (i10, i01) = (b.index_of(&[1, 0]).unwrap(), b.index_of(&[0, 1]).unwrap());
        let m = rho.matrix();
        assert!((m.get(i10, i10).re - 0.5).abs() < 1e-12);
        assert!((m.get(i01, i01).re - 0.5).abs() < 1e-12);
        // <10|ρ|01> = a10 conj(a01) = (1/√2)(conj(-i/√2)) = i/2
        assert!((m.get(i10, i01) - c(0.0, 0.5)).norm() < 1e-12);
    }

    #[test]
    fn zero_efficiency_gives_vacuum() {
        let rho = encode_state(&[0.1, 0.6, 0.2, 0.1], 0.0, 1.3, 0.5, true).unwrap();
        assert!((rho.matrix().get(0, 0).re - 1.0).abs() < 1e-12);
        assert!((rho.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unnormalized_populations_rejected() {
        assert!(encode_state(&[0.5, 0.6], 1.0, 0.0, 0.5, true).is_err());
        assert!(encode_state(&[1.2, -0.2], 1.0, 0.0, 0.5, true).is_err());
    }

    #[test]
    fn qubit_encoder_matches_interferometer() {
        let pops = [0.05, 0.9, 0.04, 0.01];
        for &phi in &[0.0, FRAC_PI_2, PI, 3.0 * FRAC_PI_2] {
            let e = Complex64::from_polar(1.0, phi);
            let a = encode_state(&pops, 0.7, phi, 0.5, true).unwrap();
            let b = encode_qubit(&pops, 0.7, (1.0 + e) / 2.0, (1.0 - e) / 2.0, true).unwrap();
            assert!(a.matrix().max_abs_diff(b.matrix()) < 1e-12);
        }
    }

    #[test]
    fn text_round_trip() {
        let rho = encode_state(&[0.1, 0.8, 0.1], 0.6, 0.4, 0.5, true).unwrap();
        let text = rho.to_text();
        assert!(text.starts_with("basis |00> |01> |02> |03> |10>"));
        let back = DensityMatrix::from_text(&text).unwrap();
        assert_eq!(back.matrix(), rho.matrix());
        assert_eq!(back.basis(), rho.basis());
    }

    #[test]
    fn partial_trace_of_entangled_pair() {
        let b = two_mode();
        let amps: Vec<Complex64> = b
            .labels()
            .iter()
            .map(|l| {
                if l == &[1, 0] || l == &[0, 1] {
                    c(FRAC_1_SQRT_2, 0.0)
                } else {
                    c(0.0, 0.0)
                }
            })
            .collect();
        let psi = PureState::new(Basis::Fock(b), amps).unwrap();
        let red = partial_trace(&psi.density(), &[0]).unwrap();
        assert_eq!(red.dim(), 4);
        assert!((red.matrix().get(0, 0).re - 0.5).abs() < 1e-15);
        assert!((red.matrix().get(1, 1).re - 0.5).abs() < 1e-15);
        assert!(red.matrix().get(0, 1).norm() < 1e-15);
        assert!(partial_trace(&psi.density(), &[]).is_err());
        assert!(partial_trace(&psi.density(), &[0, 0]).is_err());
    }
}
