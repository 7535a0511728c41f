use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use super::mode::{ModeRegistry, Polarization};
use super::state::{bosonic_weight, merge, Photons, PRUNE_EPS};
use crate::{Error, Result, C64};

const UNITARITY_TOL: f64 = 1e-10;

/// Linear optical element acting on named paths.
///
/// Conventions: a beam splitter maps an input creation operator to
/// `√T` on the same path plus `i√(1−T)` on the other path. A PBS transmits
/// H and reflects V with a factor `i`. Wave plates use the Jones matrices
/// with the fast axis at `angle_deg` from horizontal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OpticalElement {
    /// Partially polarizing beam splitter with intensity transmissions
    /// `t_h` and `t_v`. Output paths keep the input names.
    Ppbs {
        a: String,
        b: String,
        t_h: f64,
        t_v: f64,
    },
    Pbs {
        a: String,
        b: String,
    },
    Hwp {
        path: String,
        angle_deg: f64,
    },
    Qwp {
        path: String,
        angle_deg: f64,
    },
    /// Phase `e^{iφ}` on one polarization of a path, or on both if `pol`
    /// is absent.
    Phase {
        path: String,
        #[serde(default)]
        pol: Option<Polarization>,
        phi: f64,
    },
    SwapPaths {
        a: String,
        b: String,
    },
    /// Arbitrary polarization unitary on one path; `matrix[out][in]` with
    /// `H = 0`, `V = 1`.
    Jones {
        path: String,
        matrix: [[C64; 2]; 2],
    },
}

impl OpticalElement {
    pub fn ppbs(a: &str, b: &str, t_h: f64, t_v: f64) -> Self {
        OpticalElement::Ppbs {
            a: a.into(),
            b: b.into(),
            t_h,
            t_v,
        }
    }

    pub fn beamsplitter(a: &str, b: &str, t: f64) -> Self {
        Self::ppbs(a, b, t, t)
    }

    pub fn pbs(a: &str, b: &str) -> Self {
        OpticalElement::Pbs {
            a: a.into(),
            b: b.into(),
        }
    }

    pub fn hwp(path: &str, angle_deg: f64) -> Self {
        OpticalElement::Hwp {
            path: path.into(),
            angle_deg,
        }
    }

    pub fn qwp(path: &str, angle_deg: f64) -> Self {
        OpticalElement::Qwp {
            path: path.into(),
            angle_deg,
        }
    }

    pub fn phase(path: &str, pol: Option<Polarization>, phi: f64) -> Self {
        OpticalElement::Phase {
            path: path.into(),
            pol,
            phi,
        }
    }

    pub fn swap(a: &str, b: &str) -> Self {
        OpticalElement::SwapPaths {
            a: a.into(),
            b: b.into(),
        }
    }

    pub fn jones_matrix(path: &str, m: &nalgebra::DMatrix<C64>) -> Self {
        OpticalElement::Jones {
            path: path.into(),
            matrix: [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]],
        }
    }

    pub fn paths(&self) -> Vec<&str> {
        match self {
            OpticalElement::Ppbs { a, b, .. } | OpticalElement::Pbs { a, b } | OpticalElement::SwapPaths { a, b } => {
                vec![a, b]
            }
            OpticalElement::Hwp { path, .. }
            | OpticalElement::Qwp { path, .. }
            | OpticalElement::Phase { path, .. }
            | OpticalElement::Jones { path, .. } => vec![path],
        }
    }

    /// Two-path elements as a 2×2 unitary per polarization, columns indexed
    /// by input path `(a, b)`.
    fn path_unitary(&self, pol: Polarization) -> Result<Option<[[C64; 2]; 2]>> {
        let z = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        Ok(match self {
            OpticalElement::Ppbs { t_h, t_v, .. } => {
                let t = match pol {
                    Polarization::H => *t_h,
                    Polarization::V => *t_v,
                };
                if !(0.0..=1.0).contains(&t) || !t.is_finite() {
                    return Err(Error::InvalidParameter(format!("transmission {t} outside [0, 1]")));
                }
                let tt = C64::new(t.sqrt(), 0.0);
                let rr = C64::new(0.0, (1.0 - t).sqrt());
                Some([[tt, rr], [rr, tt]])
            }
            OpticalElement::Pbs { .. } => match pol {
                Polarization::H => None,
                Polarization::V => Some([[z, i], [i, z]]),
            },
            OpticalElement::SwapPaths { .. } => Some([[z, one], [one, z]]),
            _ => None,
        })
    }

    /// Jones matrix of single-path elements, columns indexed by input
    /// polarization `(H, V)`.
    fn jones(&self) -> Option<[[C64; 2]; 2]> {
        let c = |x: f64| C64::new(x, 0.0);
        match self {
            OpticalElement::Hwp { angle_deg, .. } => {
                let t = 2.0 * angle_deg.to_radians();
                Some([[c(t.cos()), c(t.sin())], [c(t.sin()), c(-t.cos())]])
            }
            OpticalElement::Qwp { angle_deg, .. } => {
                let t = angle_deg.to_radians();
                let (s, co) = t.sin_cos();
                let i = C64::new(0.0, 1.0);
                let off = (c(1.0) - i) * (s * co);
                Some([[c(co * co) + i * (s * s), off], [off, c(s * s) + i * (co * co)]])
            }
            OpticalElement::Jones { matrix, .. } => Some(*matrix),
            _ => None,
        }
    }

    /// Mode blocks of the induced single-particle unitary on `reg`.
    pub(crate) fn blocks(&self, reg: &ModeRegistry) -> Result<Vec<Block>> {
        let paths = self.paths();
        for p in &paths {
            reg.path_index(p)?;
        }
        if paths.len() == 2 && paths[0] == paths[1] {
            return Err(Error::InvalidParameter(format!(
                "element acts twice on path `{}`",
                paths[0]
            )));
        }
        let mut blocks = Vec::new();
        for k in 0..reg.internal_count() {
            match self {
                OpticalElement::Ppbs { a, b, .. }
                | OpticalElement::Pbs { a, b }
                | OpticalElement::SwapPaths { a, b } => {
                    for pol in Polarization::BOTH {
                        if let Some(u) = self.path_unitary(pol)? {
                            let modes = [reg.mode_index(a, pol, k)?, reg.mode_index(b, pol, k)?];
                            blocks.push(Block::new(&modes, &u)?);
                        }
                    }
                }
                OpticalElement::Hwp { path, .. }
                | OpticalElement::Qwp { path, .. }
                | OpticalElement::Jones { path, .. } => {
                    let u = self.jones().expect("single-path polarization element");
                    let modes = [
                        reg.mode_index(path, Polarization::H, k)?,
                        reg.mode_index(path, Polarization::V, k)?,
                    ];
                    blocks.push(Block::new(&modes, &u)?);
                }
                OpticalElement::Phase { path, pol, phi } => {
                    let e = C64::from_polar(1.0, *phi);
                    let pols: &[Polarization] = match pol {
                        Some(Polarization::H) => &[Polarization::H],
                        Some(Polarization::V) => &[Polarization::V],
                        None => &Polarization::BOTH,
                    };
                    for &p in pols {
                        blocks.push(Block {
                            modes: SmallVec::from_slice(&[reg.mode_index(path, p, k)?]),
                            u: DMatrix::from_element(1, 1, e),
                        });
                    }
                }
            }
        }
        Ok(blocks)
    }

    /// Dense single-particle unitary over all modes of `reg`.
    pub fn mode_matrix(&self, reg: &ModeRegistry) -> Result<DMatrix<C64>> {
        let n = reg.len();
        let mut m = DMatrix::<C64>::identity(n, n);
        for b in self.blocks(reg)? {
            for (jj, &j) in b.modes.iter().enumerate() {
                for (ii, &i) in b.modes.iter().enumerate() {
                    m[(i as usize, j as usize)] = b.u[(ii, jj)];
                }
            }
        }
        Ok(m)
    }
}

/// A unitary on a small set of modes; `u[(i, j)]` is the amplitude for a
/// photon entering `modes[j]` to leave in `modes[i]`.
#[derive(Clone, Debug)]
pub(crate) struct Block {
    pub modes: SmallVec<[u16; 2]>,
    pub u: DMatrix<C64>,
}

impl Block {
    fn new(modes: &[u16; 2], u: &[[C64; 2]; 2]) -> Result<Self> {
        let m = DMatrix::from_fn(2, 2, |i, j| u[i][j]);
        let dev = (m.adjoint() * &m - DMatrix::<C64>::identity(2, 2)).norm();
        if dev > UNITARITY_TOL {
            return Err(Error::InvalidParameter(format!(
                "element is not unitary (deviation {dev:.2e})"
            )));
        }
        Ok(Block {
            modes: SmallVec::from_slice(modes),
            u: m,
        })
    }

    /// Output expansion of the sorted in-block photon list `inside`.
    pub fn expand(&self, inside: &[u16]) -> Vec<(Photons, C64)> {
        let mut monos: BTreeMap<Photons, C64> = BTreeMap::new();
        monos.insert(Photons::new(), C64::new(1.0, 0.0));
        for &m in inside {
            let j = self.modes.iter().position(|&x| x == m).expect("photon in block");
            let mut next: BTreeMap<Photons, C64> = BTreeMap::new();
            for (mono, c) in &monos {
                for (i, &out) in self.modes.iter().enumerate() {
                    let u = self.u[(i, j)];
                    if u.norm() < PRUNE_EPS {
                        continue;
                    }
                    *next.entry(merge(mono, &[out])).or_default() += c * u;
                }
            }
            monos = next;
        }
        let w_in = bosonic_weight(inside);
        monos
            .into_iter()
            .map(|(k, c)| {
                let w = bosonic_weight(&k) / w_in;
                (k, c * w)
            })
            .filter(|(_, c)| c.norm() >= PRUNE_EPS)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    use crate::fock::state::FockState;

    fn reg() -> Arc<ModeRegistry> {
        Arc::new(ModeRegistry::new(["a", "b"], 2).unwrap())
    }

    #[test]
    fn every_element_is_unitary() {
        let r = reg();
        let elements = [
            OpticalElement::ppbs("a", "b", 1.0, 1.0 / 3.0),
            OpticalElement::pbs("a", "b"),
            OpticalElement::hwp("a", 22.5),
            OpticalElement::qwp("b", 17.0),
            OpticalElement::phase("a", Some(Polarization::V), 0.7),
            OpticalElement::swap("a", "b"),
        ];
        for e in &elements {
            let m = e.mode_matrix(&r).unwrap();
            let dev = (m.adjoint() * &m - DMatrix::<C64>::identity(r.len(), r.len())).norm();
            assert!(dev < 1e-12, "{e:?}");
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let r = reg();
        let s = FockState::vacuum(r);
        assert!(s.apply(&OpticalElement::ppbs("a", "b", 1.2, 0.5)).is_err());
        assert!(matches!(
            s.apply(&OpticalElement::hwp("zz", 0.0)),
            Err(Error::UnknownPath(_))
        ));
        assert!(s.apply(&OpticalElement::pbs("a", "a")).is_err());
    }

    #[test]
    fn wave_plate_actions() {
        let r = reg();
        let h = r.mode_index("a", Polarization::H, 0).unwrap();
        let v = r.mode_index("a", Polarization::V, 0).unwrap();
        let s = FockState::from_terms(r.clone(), [(vec![h], C64::new(1.0, 0.0))]).unwrap();
        let d = s.apply(&OpticalElement::hwp("a", 22.5)).unwrap();
        let s2 = std::f64::consts::FRAC_1_SQRT_2;
        assert!((d.amplitude(&[h]).re - s2).abs() < 1e-15);
        assert!((d.amplitude(&[v]).re - s2).abs() < 1e-15);
        let x = s.apply(&OpticalElement::hwp("a", 45.0)).unwrap();
        assert!((x.amplitude(&[v]).re - 1.0).abs() < 1e-15);
        // QWP at 45° maps L = (H + iV)/√2 to H up to a global phase
        let l = FockState::from_terms(r, [(vec![h], C64::new(s2, 0.0)), (vec![v], C64::new(0.0, s2))]).unwrap();
        let out = l.apply(&OpticalElement::qwp("a", 45.0)).unwrap();
        assert!((out.amplitude(&[h]).norm() - 1.0).abs() < 1e-14);
    }
}
