//! Instance generators and the brute-force invariant-line search shared by
//! the integration tests.
#![allow(dead_code)]

use hyperpoly::higgs::{HiggsData, MarkedPoints};
use hyperpoly::hyperpolygon::{HyperpolygonPoint, WeightVector};
use hyperpoly::linalg::{nullspace, Covector2, DenseMatrix, Matrix2, Vector2};
use hyperpoly::poly::{poly_gcd, Polynomial};
use hyperpoly::scalar::{GaussRat, Scalar};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Q = GaussRat;
pub type C = Complex64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn worked_point() -> HyperpolygonPoint<Q> {
    HyperpolygonPoint::from_ints(
        &[[0, 2], [-2, 0], [1, -1], [-1, -1]],
        &[[1, 0], [0, 1], [1, 1], [1, -1]],
    )
    .unwrap()
}

pub fn thirds(n: usize) -> WeightVector {
    WeightVector::uniform(n, 1, 3).unwrap()
}

pub fn standard<F: Scalar>(n: usize) -> MarkedPoints<F> {
    MarkedPoints::standard(n).unwrap()
}

fn random_poly<R: Rng>(deg: usize, exact_degree: bool, rng: &mut R) -> Polynomial<Q> {
    loop {
        let coeffs: Vec<i64> = (0..=deg).map(|_| rng.gen_range(-3..=3)).collect();
        let p = Polynomial::from_ints(&coeffs);
        if !p.is_zero() && (!exact_degree || p.degree() == Some(deg)) {
            return p;
        }
    }
}

fn random_coprime_section<R: Rng>(k: usize, rng: &mut R) -> (Polynomial<Q>, Polynomial<Q>) {
    loop {
        let p = random_poly(k, rng.gen_bool(0.5), rng);
        let q = random_poly(k, true, rng);
        if poly_gcd(&p, &q).unwrap().degree() == Some(0) {
            return if rng.gen_bool(0.5) { (p, q) } else { (q, p) };
        }
    }
}

fn eval_section(s: &(Polynomial<Q>, Polynomial<Q>), x: &Q) -> Vector2<Q> {
    Vector2::new(s.0.eval(x), s.1.eval(x))
}

/// A level-set point whose Higgs field is `c(x)/D(x) · s(x) ⊗ ann s(x)` for
/// a random coprime section `s` of degree `k`. The field is nilpotent and
/// preserves `s`; where `c(xᵢ) = 0` the flag `zᵢ` is random.
pub fn nilpotent_point<R: Rng>(n: usize, k: usize, rng: &mut R) -> HyperpolygonPoint<Q> {
    assert!(2 * k + 2 <= n);
    let xs: Vec<Q> = (0..n as i64).map(Q::from_i64).collect();
    let spare = n - 2 - 2 * k;
    loop {
        let s = random_coprime_section(k, rng);
        let zeros = rng.gen_range(0..=spare.min(n - 2));
        let mut c = Polynomial::<Q>::one();
        let mut chosen = Vec::new();
        while chosen.len() < zeros {
            let i = rng.gen_range(0..n);
            if !chosen.contains(&i) {
                chosen.push(i);
                c = c * Polynomial::linear_factor(&xs[i]);
            }
        }
        c = c * random_poly(spare - zeros, false, rng);
        let mut y = Vec::with_capacity(n);
        let mut z = Vec::with_capacity(n);
        for i in 0..n {
            let d_prime = xs
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .fold(Q::one(), |acc, (_, xj)| acc * (xs[i].clone() - xj.clone()));
            let si = eval_section(&s, &xs[i]);
            let ci = c.eval(&xs[i]) / d_prime;
            if ci.is_zero() {
                y.push(Covector2::zero());
                z.push(loop {
                    let v = Vector2::from_ints(rng.gen_range(-4..=4), rng.gen_range(-4..=4));
                    if !v.is_zero() {
                        break v;
                    }
                });
            } else {
                y.push(si.annihilator().scale(&ci));
                z.push(si);
            }
        }
        if y.iter().all(Covector2::is_zero) {
            continue;
        }
        return HyperpolygonPoint::new(y, z).unwrap();
    }
}

/// Traceless, non-nilpotent Higgs data `M = c/D · P diag(1,−1) P⁻¹` with
/// `P = [[1, f], [0, 1]]·[[1, 0], [g, 1]]`; its eigen-line fields are the
/// columns of `P`. Not strongly parabolic.
pub fn split_higgs<R: Rng>(n: usize, rng: &mut R) -> HiggsData<Q> {
    let f = random_poly(rng.gen_range(0..=1), true, rng);
    let g = random_poly(rng.gen_range(0..=1), true, rng);
    let xs: Vec<Q> = (0..n as i64).map(Q::from_i64).collect();
    let c = random_poly(0, true, rng);
    let mut residues = Vec::with_capacity(n);
    for i in 0..n {
        let x = &xs[i];
        let upper = Matrix2::new(Q::one(), f.eval(x), Q::zero(), Q::one());
        let lower = Matrix2::new(Q::one(), Q::zero(), g.eval(x), Q::one());
        let p = upper * lower;
        let conj = p.clone() * Matrix2::from_ints(1, 0, 0, -1) * p.inverse().unwrap();
        let d_prime = xs
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .fold(Q::one(), |acc, (_, xj)| acc * (x.clone() - xj.clone()));
        residues.push(conj.scale(&(c.eval(x) / d_prime)));
    }
    let lines = (0..n)
        .map(|_| Vector2::from_ints(rng.gen_range(-3..=3), rng.gen_range(1..=3)))
        .collect();
    HiggsData::new(standard(n), thirds(n), lines, residues).unwrap()
}

pub fn to_complex_higgs(h: &HiggsData<Q>) -> HiggsData<C> {
    let points = MarkedPoints::new(
        h.points()
            .as_slice()
            .iter()
            .map(Scalar::to_complex)
            .collect(),
    )
    .unwrap();
    let lines = h
        .lines()
        .iter()
        .map(|l| Vector2::new(l.0[0].to_complex(), l.0[1].to_complex()))
        .collect();
    let residues = h
        .residues()
        .iter()
        .map(|r| {
            let [a, b, c, d] = r.entries();
            Matrix2::new(
                a.to_complex(),
                b.to_complex(),
                c.to_complex(),
                d.to_complex(),
            )
        })
        .collect();
    HiggsData::new(points, h.weights().clone(), lines, residues).unwrap()
}

/// A line field found by the brute-force search.
#[derive(Clone, Debug)]
pub struct OracleLine {
    pub degree: usize,
    pub p: Vec<C>,
    pub q: Vec<C>,
    pub incidences: Vec<usize>,
}

impl OracleLine {
    pub fn eval(&self, x: C) -> [C; 2] {
        [horner(&self.p, x), horner(&self.q, x)]
    }
}

fn horner(c: &[C], x: C) -> C {
    c.iter().rev().fold(C::new(0.0, 0.0), |acc, a| acc * x + a)
}

fn gaussian<R: Rng>(rng: &mut R) -> C {
    use rand_distr::{Distribution, StandardNormal};
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C::new(re, im)
}

/// `N(x) = Σ Rᵢ ∏_{j≠i} (x − xⱼ)`, straight from the residues, with the
/// size `Σ ‖Rᵢ‖·|∏_{j≠i} (x − xⱼ)|` of the terms before cancellation.
fn numerator_at(h: &HiggsData<C>, x: C) -> ([[C; 2]; 2], f64) {
    let xs = h.points().as_slice();
    let mut m = [[C::new(0.0, 0.0); 2]; 2];
    let mut size = 0.0;
    for (i, r) in h.residues().iter().enumerate() {
        let w: C = xs
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, xj)| x - xj)
            .product();
        size += r.norm() * w.norm();
        for a in 0..2 {
            for b in 0..2 {
                m[a][b] += r.0[a][b] * w;
            }
        }
    }
    (m, size)
}

fn norm2(v: [C; 2]) -> f64 {
    (v[0].norm_sqr() + v[1].norm_sqr()).sqrt()
}

/// The two eigen-directions of a traceless `N` (equal when `N` is
/// nilpotent), each read off the larger column of `adj(N − ρ)`.
fn eigen_branches((n, size): ([[C; 2]; 2], f64)) -> [[C; 2]; 2] {
    let (a, b, c) = (n[0][0], n[0][1], n[1][0]);
    let disc = a * a + b * c;
    // a nilpotent N has one eigen-direction; keep rounding from splitting it
    let rho = if disc.norm() <= 1e-10 * size * size {
        C::new(0.0, 0.0)
    } else {
        disc.sqrt()
    };
    let branch = |r: C| {
        let col0 = [-a - r, -c];
        let col1 = [-b, a - r];
        let v = if norm2(col0) >= norm2(col1) {
            col0
        } else {
            col1
        };
        let s = norm2(v);
        [v[0] / s, v[1] / s]
    };
    [branch(rho), branch(-rho)]
}

fn wedge(u: [C; 2], v: [C; 2]) -> C {
    u[0] * v[1] - u[1] * v[0]
}

fn apply(m: [[C; 2]; 2], v: [C; 2]) -> [C; 2] {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

/// Invariant line fields of degree `≤ max_degree`, found without any
/// polynomial algebra: for each degree `d`, pick `2d + 1` random points,
/// choose one eigen-direction of `N(xⱼ)` at each, interpolate a section of
/// degree `d` through those directions, and keep it if `N s ∧ s` vanishes at
/// `n + 2d + 1` further points. Returns `None` when `θ ≡ 0`.
pub fn brute_force_lines<R: Rng>(
    h: &HiggsData<C>,
    max_degree: usize,
    rng: &mut R,
) -> Option<Vec<OracleLine>> {
    let n = h.n();
    let probes: Vec<C> = (0..3).map(|_| gaussian(rng)).collect();
    if probes.iter().all(|&x| numerator_at(h, x).1 == 0.0) {
        return None;
    }
    let mut found: Vec<OracleLine> = Vec::new();
    for d in 0..=max_degree {
        let m = 2 * d + 1;
        let xs: Vec<C> = (0..m).map(|_| gaussian(rng)).collect();
        let branches: Vec<[[C; 2]; 2]> = xs
            .iter()
            .map(|&x| eigen_branches(numerator_at(h, x)))
            .collect();
        let checks: Vec<C> = (0..n + 2 * d + 1).map(|_| gaussian(rng)).collect();
        for choice in 0u32..(1 << m) {
            let mut mat = DenseMatrix::<C>::zeros(m, 2 * (d + 1));
            for (j, &x) in xs.iter().enumerate() {
                let e = branches[j][((choice >> j) & 1) as usize];
                let mut pow = C::new(1.0, 0.0);
                for l in 0..=d {
                    mat[(j, l)] = pow * e[1];
                    mat[(j, d + 1 + l)] = -pow * e[0];
                    pow *= x;
                }
            }
            let kernel = nullspace(&mat);
            if kernel.len() != 1 {
                continue;
            }
            let line = OracleLine {
                degree: d,
                p: kernel[0][..=d].to_vec(),
                q: kernel[0][d + 1..].to_vec(),
                incidences: Vec::new(),
            };
            let invariant = checks.iter().all(|&x| {
                let s = line.eval(x);
                let (nm, size) = numerator_at(h, x);
                let scale = size * norm2(s).powi(2);
                wedge(apply(nm, s), s).norm() <= 1e-8 * scale.max(1e-300)
            });
            if !invariant {
                continue;
            }
            let known = found.iter().any(|other| {
                probes.iter().all(|&x| {
                    let (a, b) = (line.eval(x), other.eval(x));
                    wedge(a, b).norm() <= 1e-6 * norm2(a) * norm2(b)
                })
            });
            if !known {
                found.push(line);
            }
        }
    }
    for line in &mut found {
        line.incidences = h
            .points()
            .as_slice()
            .iter()
            .zip(h.lines())
            .enumerate()
            .filter(|(_, (&x, l))| {
                let s = line.eval(x);
                wedge(s, l.0).norm() <= 1e-8 * norm2(s) * norm2(l.0)
            })
            .map(|(i, _)| i)
            .collect();
    }
    Some(found)
}

/// Compares the exact invariant-line search (degree `≤ max_degree`) with the
/// brute-force one. `Err` carries a description of the first mismatch.
pub fn compare_with_oracle<R: Rng>(
    h: &HiggsData<Q>,
    max_degree: usize,
    rng: &mut R,
) -> Result<usize, String> {
    use hyperpoly::higgs::{invariant_line_subbundles, InvariantLines};
    let exact = invariant_line_subbundles(h, max_degree).map_err(|e| e.to_string())?;
    let oracle = brute_force_lines(&to_complex_higgs(h), max_degree, rng);
    let (lines, oracle) = match (exact, oracle) {
        (InvariantLines::All, None) => return Ok(0),
        (InvariantLines::Lines { lines, .. }, Some(o)) => (lines, o),
        (e, o) => {
            return Err(format!(
                "zero-field disagreement: exact {e:?}, oracle found lines: {}",
                o.is_some()
            ))
        }
    };
    if lines.len() != oracle.len() {
        return Err(format!(
            "exact search found {} lines, oracle {}",
            lines.len(),
            oracle.len()
        ));
    }
    let probes: Vec<C> = (0..3).map(|_| gaussian(rng)).collect();
    for l in &lines {
        let (p, q) = l.section();
        let eval = |x: C| {
            let coeffs = |poly: &Polynomial<Q>| {
                poly.coeffs()
                    .iter()
                    .map(Scalar::to_complex)
                    .collect::<Vec<_>>()
            };
            [horner(&coeffs(p), x), horner(&coeffs(q), x)]
        };
        let partner = oracle.iter().find(|o| {
            probes.iter().all(|&x| {
                let (a, b) = (eval(x), o.eval(x));
                wedge(a, b).norm() <= 1e-7 * norm2(a) * norm2(b)
            })
        });
        let Some(o) = partner else {
            return Err(format!(
                "exact line of degree -{} has no oracle partner",
                l.k()
            ));
        };
        if o.degree != l.k() {
            return Err(format!(
                "degree mismatch: exact -{}, oracle -{}",
                l.k(),
                o.degree
            ));
        }
        if o.incidences != l.incidences(h) {
            return Err(format!(
                "incidence mismatch: exact {:?}, oracle {:?}",
                l.incidences(h),
                o.incidences
            ));
        }
    }
    Ok(lines.len())
}

pub struct CliRun {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn hyperpoly(args: &[&str]) -> CliRun {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_hyperpoly"))
        .args(args)
        .current_dir(golden_dir())
        .env_remove("HYPERPOLY_MODE")
        .output()
        .expect("binary runs");
    CliRun {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

pub fn golden_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// Golden file name and the arguments that reproduce it.
pub const GOLDEN: &[(&str, &[&str])] = &[
    ("sample_exact_n4_seed7.json", &["sample", "--n", "4", "--seed", "7"]),
    ("sample_exact_n5_seed11.json", &["sample", "--n", "5", "--seed", "11"]),
    ("sample_approx_n4_seed3.json", &["sample", "--n", "4", "--seed", "3", "--mode", "approx"]),
    ("map_worked_point.json", &["map", "worked_point.json"]),
    ("check_worked_point.json", &["check", "worked_point.json"]),
    ("verify_exact_n4_seed1.json", &["verify", "--n", "4", "--seed", "1"]),
];

/// Reruns every golden command; with `HYPERPOLY_BLESS=1` rewrites the files.
pub fn golden_mismatches() -> Vec<String> {
    let bless = std::env::var_os("HYPERPOLY_BLESS").is_some();
    let mut bad = Vec::new();
    for (file, args) in GOLDEN {
        let run = hyperpoly(args);
        let path = golden_dir().join(file);
        if run.code != 0 {
            bad.push(format!("{file}: exit {} ({})", run.code, run.stderr.trim()));
        } else if bless {
            std::fs::write(&path, &run.stdout).unwrap();
        } else if std::fs::read_to_string(&path).ok().as_deref() != Some(run.stdout.as_str()) {
            bad.push(format!("{file}: output differs"));
        }
    }
    bad
}
