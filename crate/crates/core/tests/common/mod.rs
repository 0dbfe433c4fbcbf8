//! Shared test helpers: a naive per-site transcription of the emotion
//! pipeline and a random smooth input generator.

#![allow(dead_code, clippy::needless_range_loop)]

use infospace::kinematics::FourVector;
use infospace::lattice::{Lattice4, TensorField, Variance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const G: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// Grid with its own row-major indexing, `i3` fastest.
#[derive(Clone, Copy)]
pub struct Grid {
    pub n: usize,
    pub h: f64,
    pub origin: f64,
}

impl Grid {
    pub fn sites(&self) -> usize {
        self.n.pow(4)
    }

    pub fn index(&self, c: [usize; 4]) -> usize {
        ((c[0] * self.n + c[1]) * self.n + c[2]) * self.n + c[3]
    }

    pub fn coords(&self, s: usize) -> [usize; 4] {
        let n = self.n;
        [s / (n * n * n), (s / (n * n)) % n, (s / n) % n, s % n]
    }

    pub fn position(&self, s: usize) -> [f64; 4] {
        self.coords(s).map(|i| self.origin + self.h * i as f64)
    }

    pub fn lattice(&self) -> Lattice4 {
        Lattice4::new([self.n; 4], [self.h; 4], FourVector([self.origin; 4])).unwrap()
    }
}

/// Scalar function on the grid.
pub type Scalar = Vec<f64>;

/// First derivative along `axis`: central inside, one-sided at the ends.
pub fn d1(g: &Grid, f: &Scalar, axis: usize) -> Scalar {
    (0..g.sites())
        .map(|s| {
            let c = g.coords(s);
            let at = |k: isize| {
                let mut cc = c;
                cc[axis] = (c[axis] as isize + k) as usize;
                f[g.index(cc)]
            };
            let i = c[axis];
            if i == 0 {
                (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * g.h)
            } else if i == g.n - 1 {
                (3.0 * at(0) - 4.0 * at(-1) + at(-2)) / (2.0 * g.h)
            } else {
                (at(1) - at(-1)) / (2.0 * g.h)
            }
        })
        .collect()
}

/// Second derivative along `axis`; needs at least four points.
pub fn d2(g: &Grid, f: &Scalar, axis: usize) -> Scalar {
    let h2 = g.h * g.h;
    (0..g.sites())
        .map(|s| {
            let c = g.coords(s);
            let at = |k: isize| {
                let mut cc = c;
                cc[axis] = (c[axis] as isize + k) as usize;
                f[g.index(cc)]
            };
            let i = c[axis];
            if i == 0 {
                (2.0 * at(0) - 5.0 * at(1) + 4.0 * at(2) - at(3)) / h2
            } else if i == g.n - 1 {
                (2.0 * at(0) - 5.0 * at(-1) + 4.0 * at(-2) - at(-3)) / h2
            } else {
                (at(1) - 2.0 * at(0) + at(-1)) / h2
            }
        })
        .collect()
}

fn zeros(g: &Grid) -> Scalar {
    vec![0.0; g.sites()]
}

/// Permutation sign of `eps^{abcd}` with `eps^{0123} = +1`.
fn eps(p: [usize; 4]) -> f64 {
    let mut sign = 1.0;
    for i in 0..4 {
        for j in i + 1..4 {
            if p[i] == p[j] {
                return 0.0;
            }
            if p[i] > p[j] {
                sign = -sign;
            }
        }
    }
    sign
}

type Vector = [Scalar; 4];
type Matrix = [[Scalar; 4]; 4];

fn vector_from(f: impl Fn(usize) -> Scalar) -> Vector {
    std::array::from_fn(f)
}

fn matrix_from(f: impl Fn(usize, usize) -> Scalar) -> Matrix {
    std::array::from_fn(|a| std::array::from_fn(|b| f(a, b)))
}

/// `lambda (d^a X^b - d^b X^a)`.
fn curl(g: &Grid, x: &Vector, l: f64) -> Matrix {
    let d: [[Scalar; 4]; 4] = std::array::from_fn(|a| std::array::from_fn(|b| d1(g, &x[b], a)));
    matrix_from(|a, b| {
        (0..g.sites())
            .map(|s| l * (G[a] * d[a][b][s] - G[b] * d[b][a][s]))
            .collect()
    })
}

/// `(1/2) eps^{abrs} T_{rs}`.
fn dual(g: &Grid, t: &Matrix) -> Matrix {
    matrix_from(|a, b| {
        let mut out = zeros(g);
        for r in 0..4 {
            for q in 0..4 {
                let e = eps([a, b, r, q]);
                if e != 0.0 {
                    for s in 0..g.sites() {
                        out[s] += 0.5 * e * G[r] * G[q] * t[r][q][s];
                    }
                }
            }
        }
        out
    })
}

/// `lambda d_a X^a`.
fn div(g: &Grid, x: &Vector, l: f64) -> Scalar {
    let mut out = zeros(g);
    for a in 0..4 {
        let d = d1(g, &x[a], a);
        for s in 0..g.sites() {
            out[s] += l * d[s];
        }
    }
    out
}

/// `lambda d_b T^{b s}` when `first`, else `lambda d_b T^{s b}`.
fn tdiv(g: &Grid, t: &Matrix, l: f64, first: bool) -> Vector {
    vector_from(|c| {
        let mut out = zeros(g);
        for b in 0..4 {
            let comp = if first { &t[b][c] } else { &t[c][b] };
            let d = d1(g, comp, b);
            for s in 0..g.sites() {
                out[s] += l * d[s];
            }
        }
        out
    })
}

/// `lambda^2 (d_0^2 - d_1^2 - d_2^2 - d_3^2) f`.
fn box_scalar(g: &Grid, f: &Scalar, l: f64) -> Scalar {
    let parts: Vec<Scalar> = (0..4).map(|a| d2(g, f, a)).collect();
    (0..g.sites())
        .map(|s| l * l * (parts[0][s] - parts[1][s] - parts[2][s] - parts[3][s]))
        .collect()
}

fn box_vector(g: &Grid, x: &Vector, l: f64) -> Vector {
    vector_from(|a| box_scalar(g, &x[a], l))
}

fn vdot(u: &Vector, w: &Vector, s: usize) -> f64 {
    (0..4).map(|a| G[a] * u[a][s] * w[a][s]).sum()
}

fn mdot(x: &Matrix, y: &Matrix, s: usize) -> f64 {
    let mut acc = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            acc += G[a] * G[b] * x[a][b][s] * y[a][b][s];
        }
    }
    acc
}

fn sandwich(u: &Vector, m: &Matrix, w: &Vector, s: usize) -> f64 {
    let mut acc = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            acc += G[a] * u[a][s] * m[a][b][s] * G[b] * w[b][s];
        }
    }
    acc
}

/// Rank-m contravariant tensor stored as `[component][site]`, component
/// index tuples read big-endian base 4.
pub struct Tensor {
    pub rank: usize,
    pub comps: Vec<Scalar>,
}

fn tuple(c: usize, rank: usize) -> Vec<usize> {
    (0..rank).map(|i| (c >> (2 * (rank - 1 - i))) & 3).collect()
}

fn lower_sign(c: usize, rank: usize) -> f64 {
    tuple(c, rank).iter().map(|&i| G[i]).product()
}

/// Every named term of the pipeline, one scalar per site.
pub struct NaiveTerms {
    pub named: Vec<(&'static str, Scalar)>,
}

impl NaiveTerms {
    pub fn get(&self, name: &str) -> &Scalar {
        &self.named.iter().find(|(n, _)| *n == name).expect("known term").1
    }
}

/// Stream `c lambda g_nu sum_k sum_A dA_nu(A) B_A` summed over both orders.
fn stream(g: &Grid, a: &Tensor, b: &Tensor, c: f64, l: f64) -> Vector {
    let nc = a.comps.len();
    vector_from(|nu| {
        let mut out = zeros(g);
        let da: Vec<Scalar> = (0..nc).map(|k| d1(g, &a.comps[k], nu)).collect();
        for _slot in 0..a.rank {
            for comp in 0..nc {
                let sg = lower_sign(comp, a.rank);
                for s in 0..g.sites() {
                    let het = 0.5 * l * da[comp][s];
                    let bl = sg * b.comps[comp][s];
                    out[s] += G[nu] * c * (het * bl + bl * het);
                }
            }
        }
        out
    })
}

/// Transcribes every term site by site. `l` is `lambda_c`, `qc` is `Q_c`,
/// the volume count is 1.
pub fn naive_pipeline(g: &Grid, t: &Tensor, d: &Tensor, l: f64, qc: f64) -> NaiveTerms {
    let m = t.rank;
    let nc = t.comps.len();
    let ns = g.sites();
    let c = 0.5f64.powi(2 * m as i32 + 1) / qc;

    let mut mu = zeros(g);
    for comp in 0..nc {
        let sg = lower_sign(comp, m);
        for s in 0..ns {
            mu[s] += c * (d.comps[comp][s] * sg * t.comps[comp][s] + sg * t.comps[comp][s] * d.comps[comp][s]);
        }
    }

    let i = stream(g, t, d, c, l);
    let b = stream(g, d, t, c, l);

    let mut psi0 = zeros(g);
    for nu in 0..4 {
        for comp in 0..nc {
            let sg = lower_sign(comp, m);
            let dt = d1(g, &t.comps[comp], nu);
            let dd = d1(g, &d.comps[comp], nu);
            for _slot in 0..m {
                for s in 0..ns {
                    let ht = 0.5 * l * dt[s];
                    let hd = 0.5 * l * dd[s];
                    psi0[s] += c * G[nu] * sg * (ht * hd + hd * ht);
                }
            }
        }
    }

    let j = curl(g, &i, l);
    let jd = dual(g, &j);
    let h = curl(g, &b, l);
    let hd = dual(g, &h);

    let div_i = div(g, &i, l);
    let div_b = div(g, &b, l);
    let box_i = box_vector(g, &i, l);
    let box_b = box_vector(g, &b, l);
    let j1 = tdiv(g, &j, l, true);
    let j2 = tdiv(g, &j, l, false);
    let jd1 = tdiv(g, &jd, l, true);
    let jd2 = tdiv(g, &jd, l, false);
    let h1 = tdiv(g, &h, l, true);
    let h2 = tdiv(g, &h, l, false);
    let hd1 = tdiv(g, &hd, l, true);
    let hd2 = tdiv(g, &hd, l, false);

    let k1: Scalar = (0..ns)
        .map(|s| 1.0 + vdot(&i, &i, s) + div_i[s] + vdot(&box_i, &box_i, s) + div_i[s] * div_i[s])
        .collect();
    let k2: Scalar = (0..ns)
        .map(|s| 1.0 + vdot(&b, &b, s) + div_b[s] + vdot(&box_b, &box_b, s) + div_b[s] * div_b[s])
        .collect();

    let psi_vec = |x: &Vector, dx: &Scalar, bx: &Vector| -> Scalar {
        (0..ns)
            .map(|s| vdot(x, x, s) + dx[s] + dx[s] * dx[s] + vdot(bx, bx, s))
            .collect()
    };
    let psi_ten = |t: &Matrix, td: &Matrix, t1: &Vector, td1: &Vector| -> Scalar {
        (0..ns)
            .map(|s| {
                mdot(t, t, s)
                    + mdot(td, td, s)
                    + 0.5 * (mdot(t, td, s) + mdot(td, t, s))
                    + vdot(t1, t1, s)
                    + vdot(td1, td1, s)
                    + 0.5 * vdot(td1, t1, s)
                    + 0.5 * vdot(t1, td1, s)
            })
            .collect()
    };
    #[allow(clippy::too_many_arguments)]
    fn psi_mix(
        ns: usize,
        k: &Scalar,
        x: &Vector,
        bx: &Vector,
        t: &Matrix,
        td: &Matrix,
        t1: &Vector,
        t2: &Vector,
        td1: &Vector,
        td2: &Vector,
        with_dual: bool,
    ) -> Scalar {
        (0..ns)
            .map(|s| {
                let mut acc = k[s] * (sandwich(x, t, x, s) + sandwich(x, td, x, s));
                acc += 0.5 * k[s] * (vdot(t1, x, s) + vdot(x, t1, s));
                acc += 0.5 * k[s] * (vdot(t2, x, s) + vdot(x, t2, s));
                if with_dual {
                    acc += 0.5 * k[s] * (vdot(td1, x, s) + vdot(x, td1, s));
                    acc += 0.5 * k[s] * (vdot(td2, x, s) + vdot(x, td2, s));
                }
                acc += k[s] * sandwich(bx, t, bx, s);
                acc += k[s] * sandwich(bx, td, bx, s);
                acc += 0.5 * k[s] * vdot(td1, t1, s);
                acc += 0.5 * k[s] * vdot(td2, t1, s);
                acc
            })
            .collect()
    }

    let psi_i = psi_vec(&i, &div_i, &box_i);
    let psi_b = psi_vec(&b, &div_b, &box_b);
    let psi_j = psi_ten(&j, &jd, &j1, &jd1);
    let psi_h = psi_ten(&h, &hd, &h1, &hd1);
    let psi_ib: Scalar = (0..ns)
        .map(|s| {
            0.5 * (vdot(&i, &b, s) + vdot(&b, &i, s))
                + 0.5 * (div_i[s] * div_b[s] + div_b[s] * div_i[s])
                + 0.5 * (vdot(&box_i, &box_b, s) + vdot(&box_b, &box_i, s))
        })
        .collect();
    let psi_ij = psi_mix(ns, &k1, &i, &box_i, &j, &jd, &j1, &j2, &jd1, &jd2, true);
    let psi_bj = psi_mix(ns, &k2, &b, &box_b, &j, &jd, &j1, &j2, &jd1, &jd2, true);
    let psi_ih = psi_mix(ns, &k1, &i, &box_i, &h, &hd, &h1, &h2, &hd1, &hd2, false);
    let psi_bh = psi_mix(ns, &k2, &b, &box_b, &h, &hd, &h1, &h2, &hd1, &hd2, false);
    let psi_jh: Scalar = (0..ns)
        .map(|s| {
            0.5 * (mdot(&j, &h, s) + mdot(&h, &j, s))
                + 0.5 * (mdot(&jd, &hd, s) + mdot(&hd, &jd, s))
                + 0.5 * (mdot(&jd, &h, s) + mdot(&h, &jd, s))
                + 0.5 * (mdot(&j, &hd, s) + mdot(&hd, &j, s))
        })
        .collect();
    let psi: Scalar = (0..ns)
        .map(|s| {
            psi0[s]
                + psi_i[s]
                + psi_b[s]
                + psi_j[s]
                + psi_h[s]
                + psi_ib[s]
                + psi_ij[s]
                + psi_bj[s]
                + psi_ih[s]
                + psi_bh[s]
                + psi_jh[s]
        })
        .collect();

    // lambda d^a f, contravariant
    let grad_up = |f: &Scalar| -> Vector {
        vector_from(|a| d1(g, f, a).into_iter().map(|v| l * G[a] * v).collect())
    };
    let gmu = grad_up(&mu);
    let gpsi = grad_up(&psi);
    let bmu = box_scalar(g, &mu, l);
    let bpsi = box_scalar(g, &psi, l);
    let gamma_mu: Scalar = (0..ns).map(|s| bmu[s] + vdot(&gmu, &gmu, s) + bmu[s] * bmu[s]).collect();
    let gamma_psi: Scalar = (0..ns).map(|s| bpsi[s] + vdot(&gpsi, &gpsi, s) + bpsi[s] * bpsi[s]).collect();
    let gamma_mupsi: Scalar = (0..ns)
        .map(|s| 0.5 * (vdot(&gmu, &gpsi, s) + vdot(&gpsi, &gmu, s)) + 0.5 * (bmu[s] * bpsi[s] + bpsi[s] * bmu[s]))
        .collect();
    let gamma_x: Scalar = (0..ns)
        .map(|s| {
            let x = g.position(s);
            let x_low: [f64; 4] = std::array::from_fn(|a| G[a] * x[a] / l);
            let v_up: [f64; 4] = std::array::from_fn(|a| gmu[a][s] + gpsi[a][s] + i[a][s] + b[a][s]);
            let first: f64 = (0..4).map(|a| x_low[a] * v_up[a]).sum();
            let second: f64 = (0..4).map(|a| G[a] * v_up[a] * x[a] / l).sum();
            let mut quad = 0.0;
            for a in 0..4 {
                for bb in 0..4 {
                    let mm = j[a][bb][s] + jd[a][bb][s] + h[a][bb][s] + hd[a][bb][s];
                    quad += x_low[a] * mm * x_low[bb];
                }
            }
            0.5 * first + 0.5 * second + quad
        })
        .collect();
    let gamma: Scalar = (0..ns)
        .map(|s| gamma_mu[s] + gamma_psi[s] + gamma_mupsi[s] + gamma_x[s])
        .collect();
    let q: Scalar = (0..ns).map(|s| mu[s] + gamma[s] + psi[s]).collect();

    NaiveTerms {
        named: vec![
            ("mu", mu),
            ("psi_0", psi0),
            ("psi_I", psi_i),
            ("psi_B", psi_b),
            ("psi_J", psi_j),
            ("psi_H", psi_h),
            ("psi_IB", psi_ib),
            ("psi_IJ", psi_ij),
            ("psi_BJ", psi_bj),
            ("psi_IH", psi_ih),
            ("psi_BH", psi_bh),
            ("psi_JH", psi_jh),
            ("psi", psi),
            ("gamma_mu", gamma_mu),
            ("gamma_psi", gamma_psi),
            ("gamma_mupsi", gamma_mupsi),
            ("gamma_x", gamma_x),
            ("gamma", gamma),
            ("q", q),
        ],
    }
}

/// Random smooth component functions: affine part plus two plane waves.
pub struct SmoothInput {
    coeffs: Vec<[f64; 13]>,
}

impl SmoothInput {
    pub fn random(rng: &mut ChaCha8Rng, components: usize, amp: f64) -> Self {
        let coeffs = (0..components)
            .map(|_| std::array::from_fn(|_| rng.gen_range(-1.0..1.0) * amp))
            .collect();
        SmoothInput { coeffs }
    }

    pub fn eval(&self, comp: usize, x: &[f64; 4]) -> f64 {
        let c = &self.coeffs[comp];
        let affine = c[0] + c[1] * x[0] + c[2] * x[1] + c[3] * x[2] + c[4] * x[3];
        let w1 = (c[5] * x[0] + c[6] * x[1] + c[7] * x[2] + c[8] * x[3]).sin();
        let w2 = (c[9] * x[0] - c[10] * x[1] + c[11] * x[2] - c[12] * x[3]).cos();
        affine + c[5] * w1 + c[9] * w2
    }

    /// Library field sampled on `lat`.
    pub fn field(&self, lat: Lattice4, rank: usize) -> TensorField {
        TensorField::from_fn(lat, vec![Variance::Contra; rank], |x, idx| {
            let comp = idx.iter().fold(0, |acc, &i| acc * 4 + i);
            self.eval(comp, &x.0)
        })
    }

    /// Naive tensor sampled on `g`.
    pub fn tensor(&self, g: &Grid, rank: usize) -> Tensor {
        let comps = (0..4usize.pow(rank as u32))
            .map(|comp| (0..g.sites()).map(|s| self.eval(comp, &g.position(s))).collect())
            .collect();
        Tensor { rank, comps }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Largest `|lib - naive|` over sites relative to `max(1, max |naive|)`,
/// matching library sites to grid sites by coordinates.
pub fn compare(lat: &Lattice4, g: &Grid, lib: &TensorField, naive: &Scalar) -> f64 {
    let scale = naive.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    (0..lat.sites())
        .map(|s| (lib.value(s) - naive[g.index(lat.coords(s))]).abs())
        .fold(0.0, f64::max)
        / scale
}

/// Runs the library pipeline and the naive transcription on the same
/// random input and returns the error of every named term.
pub fn emotion_mismatch(seed: u64, rank: usize, g: &Grid) -> Vec<(&'static str, f64)> {
    use infospace::constants::InfoConstants;
    use infospace::emotion::{assemble_gie, TextPair};

    let k = InfoConstants::NATURAL;
    let mut r = rng(seed);
    let nc = 4usize.pow(rank as u32);
    let t_in = SmoothInput::random(&mut r, nc, 0.6);
    let d_in = SmoothInput::random(&mut r, nc, 0.6);
    let lat = g.lattice();
    let pair = TextPair::unit_volumes(t_in.field(lat, rank), d_in.field(lat, rank)).unwrap();
    let lib = assemble_gie(&pair, &k).unwrap();
    let naive = naive_pipeline(g, &t_in.tensor(g, rank), &d_in.tensor(g, rank), k.lambda_c, k.q_c);
    let mut lib_named: Vec<(&'static str, &TensorField)> = lib.named_fields();
    lib_named.retain(|(n, _)| *n != "Q");
    lib_named
        .into_iter()
        .map(|(name, f)| (name, compare(&lat, g, f, naive.get(name))))
        .collect()
}
