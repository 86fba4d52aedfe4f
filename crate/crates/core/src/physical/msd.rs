//! Mass-spring-damper networks and their collocated force-to-motion maps.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lticore::{Polynomial, RationalFunction};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Endpoint {
    Ground,
    Mass(String),
}

impl Endpoint {
    pub fn mass(name: &str) -> Self {
        Endpoint::Mass(name.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MsdElement {
    pub name: String,
    pub value: f64,
    pub a: Endpoint,
    pub b: Endpoint,
}

impl MsdElement {
    pub fn new(name: &str, value: f64, a: Endpoint, b: Endpoint) -> Self {
        Self {
            name: name.to_string(),
            value,
            a,
            b,
        }
    }

    /// Element tied between `mass` and ground.
    pub fn grounded(name: &str, value: f64, mass: &str) -> Self {
        Self::new(name, value, Endpoint::mass(mass), Endpoint::Ground)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MotionOutput {
    Position,
    Velocity,
}

/// Masses in kg, spring stiffnesses in N/m, damper coefficients in N s/m.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MsdNetwork {
    pub name: String,
    pub masses: Vec<(String, f64)>,
    pub springs: Vec<MsdElement>,
    pub dampers: Vec<MsdElement>,
}

impl MsdNetwork {
    pub fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            masses: Vec::new(),
            springs: Vec::new(),
            dampers: Vec::new(),
        }
    }

    pub fn mass(mut self, name: &str, m: f64) -> Self {
        self.masses.push((name.to_string(), m));
        self
    }

    pub fn spring(mut self, e: MsdElement) -> Self {
        self.springs.push(e);
        self
    }

    pub fn damper(mut self, e: MsdElement) -> Self {
        self.dampers.push(e);
        self
    }

    pub fn index_of(&self, mass: &str) -> Option<usize> {
        self.masses.iter().position(|(n, _)| n == mass)
    }

    pub fn get_mass(&self, name: &str) -> Option<f64> {
        self.masses.iter().find(|(n, _)| n == name).map(|(_, m)| *m)
    }

    pub fn element(&self, name: &str) -> Option<&MsdElement> {
        self.springs.iter().chain(&self.dampers).find(|e| e.name == name)
    }

    pub fn validate(&self) -> Result<()> {
        for (n, m) in &self.masses {
            if !(*m > 0.0) || !m.is_finite() {
                return Err(Error::Model(format!("mass {n} in {} must be positive, got {m}", self.name)));
            }
        }
        for e in self.springs.iter().chain(&self.dampers) {
            if !e.value.is_finite() {
                return Err(Error::Model(format!("element {} has a non-finite value", e.name)));
            }
            for end in [&e.a, &e.b] {
                if let Endpoint::Mass(m) = end {
                    if self.index_of(m).is_none() {
                        return Err(Error::Model(format!(
                            "element {} references unknown mass {m} in {}",
                            e.name, self.name
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// `(M, D, K)` with Laplacian stamping; ground ties only add to the
    /// diagonal.
    pub fn matrices(&self) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>, Vec<Vec<f64>>)> {
        self.validate()?;
        let n = self.masses.len();
        let mut m = vec![vec![0.0; n]; n];
        for (i, (_, v)) in self.masses.iter().enumerate() {
            m[i][i] = *v;
        }
        let stamp = |mat: &mut Vec<Vec<f64>>, e: &MsdElement| {
            let ia = match &e.a {
                Endpoint::Mass(x) => self.index_of(x),
                Endpoint::Ground => None,
            };
            let ib = match &e.b {
                Endpoint::Mass(x) => self.index_of(x),
                Endpoint::Ground => None,
            };
            if let Some(i) = ia {
                mat[i][i] += e.value;
            }
            if let Some(j) = ib {
                mat[j][j] += e.value;
            }
            if let (Some(i), Some(j)) = (ia, ib) {
                mat[i][j] -= e.value;
                mat[j][i] -= e.value;
            }
        };
        let mut d = vec![vec![0.0; n]; n];
        for e in &self.dampers {
            stamp(&mut d, e);
        }
        let mut k = vec![vec![0.0; n]; n];
        for e in &self.springs {
            stamp(&mut k, e);
        }
        Ok((m, d, k))
    }

    /// The polynomial matrix `s^2 M + s D + K`.
    pub fn dynamic_stiffness(&self) -> Result<Vec<Vec<Polynomial>>> {
        let (m, d, k) = self.matrices()?;
        let n = m.len();
        Ok((0..n)
            .map(|i| {
                (0..n)
                    .map(|j| Polynomial::new(vec![k[i][j], d[i][j], m[i][j]]))
                    .collect()
            })
            .collect())
    }
}

/// Determinant of a polynomial matrix: cofactor expansion up to 3x3,
/// fraction-free (Bareiss) elimination with pivoting beyond.
pub fn poly_det(m: &[Vec<Polynomial>]) -> Polynomial {
    let n = m.len();
    match n {
        0 => Polynomial::one(),
        1 => m[0][0].clone(),
        2 => &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0]),
        3 => {
            let mut acc = Polynomial::zero();
            for j in 0..3 {
                let minor = minor(m, 0, j);
                let term = &m[0][j] * &poly_det(&minor);
                acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            acc
        }
        _ => bareiss(m.to_vec()),
    }
}

fn minor(m: &[Vec<Polynomial>], row: usize, col: usize) -> Vec<Vec<Polynomial>> {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| {
            r.iter()
                .enumerate()
                .filter(|(j, _)| *j != col)
                .map(|(_, p)| p.clone())
                .collect()
        })
        .collect()
}

fn bareiss(mut a: Vec<Vec<Polynomial>>) -> Polynomial {
    let n = a.len();
    let mut sign = 1.0;
    let mut prev = Polynomial::one();
    for k in 0..n - 1 {
        // prefer the pivot of highest degree, then largest leading term
        let pivot = (k..n)
            .filter(|&i| !a[i][k].is_zero())
            .max_by(|&i, &j| {
                let (p, q) = (&a[i][k], &a[j][k]);
                p.degree()
                    .cmp(&q.degree())
                    .then(p.leading().abs().total_cmp(&q.leading().abs()))
            });
        let Some(p) = pivot else {
            return Polynomial::zero();
        };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[k][k] * &a[i][j]) - &(&a[i][k] * &a[k][j]);
                // exact in exact arithmetic; the remainder is rounding noise
                a[i][j] = num.div_rem(&prev).map(|(q, _)| q).unwrap_or(num);
            }
        }
        prev = a[k][k].clone();
    }
    a[n - 1][n - 1].scale(sign)
}

/// Map from a force at `actuator` to the position or velocity of `sensor`:
/// the `(sensor, actuator)` entry of `(s^2 M + s D + K)^{-1}`, times `s`
/// for velocity.
pub fn msd_transfer(
    net: &MsdNetwork,
    actuator: &str,
    sensor: &str,
    output: MotionOutput,
) -> Result<RationalFunction> {
    let p = net.dynamic_stiffness()?;
    let a = net
        .index_of(actuator)
        .ok_or_else(|| Error::Model(format!("unknown actuator mass {actuator} in {}", net.name)))?;
    let b = net
        .index_of(sensor)
        .ok_or_else(|| Error::Model(format!("unknown sensor mass {sensor} in {}", net.name)))?;
    let det = poly_det(&p);
    // [P^{-1}]_{b,a} = (-1)^{a+b} det(P without row a, column b) / det P
    let mut cof = poly_det(&minor(&p, a, b));
    if (a + b) % 2 == 1 {
        cof = -cof;
    }
    if output == MotionOutput::Velocity {
        cof = cof.shift_up(1);
    }
    RationalFunction::new(cof, det)
}

/// Collocated position map at `mass` after adding a ground tie of
/// stiffness `k` (spring) or coefficient `d` (damper) there.
fn tied_position_map(net: &MsdNetwork, mass: &str, tie: MsdElement, spring: bool) -> Result<RationalFunction> {
    let mut tied = net.clone();
    if spring {
        tied.springs.push(tie);
    } else {
        tied.dampers.push(tie);
    }
    msd_transfer(&tied, mass, mass, MotionOutput::Position)
}

/// Controller seen through a coupling spring `k` from the plant mass to
/// `mass` of `net` (or to ground): input plant displacement, output force
/// on the plant, `-k + k^2 H(s)`.
pub fn spring_coupled_port(net: Option<&MsdNetwork>, mass: Option<&str>, k: f64) -> Result<RationalFunction> {
    let static_part = RationalFunction::constant(-k);
    let (Some(net), Some(mass)) = (net, mass) else {
        return Ok(static_part);
    };
    let h = tied_position_map(net, mass, MsdElement::grounded("__couple", k, mass), true)?;
    &static_part + &h.scale(k * k)
}

/// Controller seen through a coupling damper `d`: input plant velocity,
/// output minus the force on the plant, `d (1 - d s H(s))`.
pub fn damper_coupled_port(net: Option<&MsdNetwork>, mass: Option<&str>, d: f64) -> Result<RationalFunction> {
    let (Some(net), Some(mass)) = (net, mass) else {
        return Ok(RationalFunction::constant(d));
    };
    let h = tied_position_map(net, mass, MsdElement::grounded("__couple", d, mass), false)?;
    let sh = RationalFunction::new(h.num().shift_up(1), h.den().clone())?;
    let one = RationalFunction::constant(1.0);
    Ok((&one - &sh.scale(d))?.scale(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(m: f64, d: f64, k: Option<f64>) -> MsdNetwork {
        let mut n = MsdNetwork::new("p")
            .mass("m1", m)
            .damper(MsdElement::grounded("d1", d, "m1"));
        if let Some(k) = k {
            n = n.spring(MsdElement::grounded("k1", k, "m1"));
        }
        n
    }

    #[test]
    fn single_mass_maps() {
        let net = single(1.0, 1.0, Some(1.0));
        let g = msd_transfer(&net, "m1", "m1", MotionOutput::Position).unwrap();
        assert_eq!(g.num().coeffs(), &[1.0]);
        assert_eq!(g.den().coeffs(), &[1.0, 1.0, 1.0]);
        let g = msd_transfer(&net, "m1", "m1", MotionOutput::Velocity).unwrap();
        assert_eq!(g.num().coeffs(), &[0.0, 1.0]);
        let g = msd_transfer(&single(1.0, 1.0, None), "m1", "m1", MotionOutput::Position).unwrap();
        assert_eq!(g.den().coeffs(), &[0.0, 1.0, 1.0]);
    }

    #[test]
    fn rejects_bad_networks() {
        assert!(single(0.0, 1.0, None).validate().is_err());
        let n = MsdNetwork::new("p")
            .mass("m1", 1.0)
            .spring(MsdElement::new("k1", 1.0, Endpoint::mass("m1"), Endpoint::mass("m9")));
        let e = n.validate().unwrap_err().to_string();
        assert!(e.contains("m9"), "{e}");
    }

    #[test]
    fn determinant_paths_agree() {
        // 4x4 via Bareiss against a 3x3 cofactor expansion of the same chain
        // with one mass eliminated by hand is awkward; compare Bareiss on a
        // 3x3 matrix with the cofactor formula instead.
        let p = |c: &[f64]| Polynomial::new(c.to_vec());
        let m = vec![
            vec![p(&[2.0, 1.0, 1.0]), p(&[-1.0, -0.5]), p(&[0.0])],
            vec![p(&[-1.0, -0.5]), p(&[3.0, 1.0, 2.0]), p(&[-2.0])],
            vec![p(&[0.0]), p(&[-2.0]), p(&[2.0, 0.3, 1.0])],
        ];
        let a = poly_det(&m);
        let b = bareiss(m.clone());
        assert_eq!(a.degree(), b.degree());
        for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
            assert!((x - y).abs() < 1e-12 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn two_mass_chain_matches_hand_algebra() {
        // m1 -k- m2, both grounded by unit springs, unit masses, no damping:
        // P = [[s^2+2, -1], [-1, s^2+2]], P^{-1}_{11} = (s^2+2)/((s^2+2)^2-1)
        let net = MsdNetwork::new("c")
            .mass("a", 1.0)
            .mass("b", 1.0)
            .spring(MsdElement::grounded("ka", 1.0, "a"))
            .spring(MsdElement::grounded("kb", 1.0, "b"))
            .spring(MsdElement::new("k", 1.0, Endpoint::mass("a"), Endpoint::mass("b")));
        let g = msd_transfer(&net, "a", "a", MotionOutput::Position).unwrap();
        let expect = RationalFunction::from_coeffs(&[2.0, 0.0, 1.0], &[3.0, 0.0, 4.0, 0.0, 1.0]).unwrap();
        for w in [0.3, 1.7, 5.0] {
            let s = num_complex::Complex64::new(0.1, w);
            assert!((g.eval(s).unwrap() - expect.eval(s).unwrap()).norm() < 1e-12);
        }
        // transfer between the masses: 1/((s^2+2)^2-1)
        let g = msd_transfer(&net, "a", "b", MotionOutput::Position).unwrap();
        assert_eq!(g.num().coeffs(), &[1.0]);
    }

    #[test]
    fn spring_port_closed_form() {
        let ctrl = MsdNetwork::new("c")
            .mass("m2", 1.0)
            .spring(MsdElement::grounded("k2", 1.0, "m2"))
            .damper(MsdElement::grounded("d2", 1.0, "m2"));
        let g = spring_coupled_port(Some(&ctrl), Some("m2"), 1.0).unwrap();
        // -(s^2+s+1)/(s^2+s+2)
        assert_eq!(g.num().coeffs(), &[-1.0, -1.0, -1.0]);
        assert_eq!(g.den().coeffs(), &[2.0, 1.0, 1.0]);
        let g = spring_coupled_port(None, None, 0.7).unwrap();
        assert_eq!(g.num().coeffs(), &[-0.7]);
    }

    #[test]
    fn damper_port_closed_form() {
        let ctrl = MsdNetwork::new("c")
            .mass("m2", 1.0)
            .spring(MsdElement::grounded("k2", 1.0, "m2"))
            .damper(MsdElement::grounded("d2", 1.0, "m2"));
        let g = damper_coupled_port(Some(&ctrl), Some("m2"), 1.0).unwrap();
        // (s^2+s+1)/(s^2+2s+1)
        for (x, y) in g.num().coeffs().iter().zip([1.0, 1.0, 1.0]) {
            assert!((x - y).abs() < 1e-12);
        }
        for (x, y) in g.den().coeffs().iter().zip([1.0, 2.0, 1.0]) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
