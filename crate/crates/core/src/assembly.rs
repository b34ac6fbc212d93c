//! Cone-manifolds assembled from copies of a polytope: mirror colourings and
//! explicit wall-pairings, face cycles, singular surfaces, cusps, Euler
//! characteristics and involution quotients.
//!
//! Cells are addressed by the set of walls containing them; a gluing acts on
//! these keys through the wall permutation of its isometry, so no geometry is
//! needed once the base strata are known.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

use num::rational::Rational64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coxeter::{
    build_diagram, enumerate_strata, gram_matrix, subset_group_order, CoxeterError, EdgeEnd,
    Polytope, StrataComplex, StrataMode,
};
use crate::family::{
    p_polytope, pairing_isometries, verify_symmetry, FamilyError, FamilyTime, IsometryMatrix,
    WallName,
};
use crate::lorentz::PointKind;
use crate::volume::{face_geometry, FaceGeometry, VolumeError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AssemblyError {
    #[error("colouring: {0}")]
    Colouring(String),
    #[error("unknown wall {0:?}")]
    UnknownWall(String),
    #[error("copy {0} out of range")]
    UnknownCopy(usize),
    #[error("wall {wall} of copy {copy} is not identified")]
    NotCovering { copy: usize, wall: String },
    #[error("wall {wall} of copy {copy} is identified twice")]
    Conflict { copy: usize, wall: String },
    #[error("isometry for wall {0} is not a symmetry of the base polytope")]
    NotSymmetry(String),
    #[error("isometry sends wall {from} to {image}, not {to}")]
    WallMismatch {
        from: String,
        to: String,
        image: String,
    },
    #[error("identification of wall {wall} in copy {copy} is not involutive")]
    NotInvolutive { copy: usize, wall: String },
    #[error("cell {0} has no image under the gluing")]
    UnknownCell(String),
    #[error("face traversal from {0} does not close")]
    NonClosing(String),
    #[error("map does not commute with the identifications at wall {wall} of copy {copy}")]
    NotAutomorphism { copy: usize, wall: String },
    #[error("map is not an involution")]
    NotInvolution,
    #[error("involution has {} fixed cells", .0.len())]
    FixedPoints(Vec<FixedCell>),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Coxeter(#[from] CoxeterError),
    #[error(transparent)]
    Volume(#[from] VolumeError),
}

impl From<Box<CoxeterError>> for AssemblyError {
    fn from(e: Box<CoxeterError>) -> Self {
        AssemblyError::Coxeter(*e)
    }
}

const ANGLE_TOL: f64 = 1e-9;

/// Colour index per wall name, palette `{0, …, k−1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MirrorColouring {
    pub colours: BTreeMap<String, usize>,
}

impl MirrorColouring {
    pub fn new(colours: BTreeMap<String, usize>) -> Result<Self, AssemblyError> {
        let c = MirrorColouring { colours };
        let k = c.palette();
        if let Some(missing) = (0..k).find(|i| !c.colours.values().any(|v| v == i)) {
            return Err(AssemblyError::Colouring(format!(
                "colour {missing} is never used"
            )));
        }
        Ok(c)
    }

    pub fn palette(&self) -> usize {
        self.colours.values().max().map_or(0, |m| m + 1)
    }

    /// Positive walls `0`, negative `1`, letter walls `2`.
    pub fn pnl(p: &Polytope<f64>) -> Result<Self, AssemblyError> {
        let colours = p
            .names
            .iter()
            .map(|n| {
                let w: WallName = n
                    .parse()
                    .map_err(|_| AssemblyError::UnknownWall(n.clone()))?;
                let c = match w {
                    WallName::Positive(_) => 0,
                    WallName::Negative(_) => 1,
                    WallName::Letter(_) => 2,
                    WallName::Mirror(_) => return Err(AssemblyError::UnknownWall(n.clone())),
                };
                Ok((n.clone(), c))
            })
            .collect::<Result<_, _>>()?;
        Self::new(colours)
    }

    /// Every wall the same colour.
    pub fn single(p: &Polytope<f64>) -> Self {
        MirrorColouring {
            colours: p.names.iter().map(|n| (n.clone(), 0)).collect(),
        }
    }
}

/// Where wall `w` of a copy is glued: wall `wall` of copy `copy`, through the
/// symmetry `iso` of the base whose wall permutation is `perm`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gluing {
    pub copy: usize,
    pub wall: usize,
    pub iso: IsometryMatrix,
    pub perm: Vec<usize>,
}

impl Gluing {
    fn is_mirror(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &j)| i == j)
    }
}

/// One rule of an explicit pairing: `(copy, wall)` to `(copy, wall)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairingRule {
    pub from: (usize, String),
    pub to: (usize, String),
    pub iso: IsometryMatrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellRef {
    pub copy: usize,
    pub cell: usize,
}

/// A stratum of the base polytope; the 4-cell has no walls.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaseCell {
    pub dim: usize,
    pub walls: Vec<usize>,
    pub ideal: bool,
}

#[derive(Clone, Debug)]
pub struct AssembledComplex {
    pub base: Polytope<f64>,
    pub strata: StrataComplex,
    pub copies: Vec<String>,
    /// `glue[copy][wall]`.
    pub glue: Vec<Vec<Gluing>>,
    pub cells: Vec<BaseCell>,
    cell_index: HashMap<Vec<usize>, usize>,
}

fn identity_perm(n: usize) -> Vec<usize> {
    (0..n).collect()
}

fn base_cells(s: &StrataComplex) -> Vec<BaseCell> {
    let mut cells = vec![BaseCell {
        dim: 4,
        walls: vec![],
        ideal: false,
    }];
    cells.extend(s.facets.iter().map(|&w| BaseCell {
        dim: 3,
        walls: vec![w],
        ideal: false,
    }));
    cells.extend(s.faces.iter().map(|f| BaseCell {
        dim: 2,
        walls: f.walls.to_vec(),
        ideal: false,
    }));
    cells.extend(s.edges.iter().map(|e| BaseCell {
        dim: 1,
        walls: e.walls.clone(),
        ideal: false,
    }));
    cells.extend(s.vertices.iter().map(|v| BaseCell {
        dim: 0,
        walls: v.walls.clone(),
        ideal: v.kind == PointKind::Ideal,
    }));
    cells
}

impl AssembledComplex {
    fn new(
        base: Polytope<f64>,
        strata: StrataComplex,
        copies: Vec<String>,
        glue: Vec<Vec<Gluing>>,
    ) -> Result<Self, AssemblyError> {
        let cells = base_cells(&strata);
        let cell_index = cells
            .iter()
            .enumerate()
            .map(|(i, c)| (c.walls.clone(), i))
            .collect();
        let c = AssembledComplex {
            base,
            strata,
            copies,
            glue,
            cells,
            cell_index,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn wall_name(&self, w: usize) -> &str {
        &self.base.names[w]
    }

    pub fn cell_name(&self, cell: usize) -> String {
        let walls = &self.cells[cell].walls;
        if walls.is_empty() {
            "interior".to_string()
        } else {
            self.strata.wall_names(walls).join(",")
        }
    }

    fn validate(&self) -> Result<(), AssemblyError> {
        for (c, row) in self.glue.iter().enumerate() {
            for (w, g) in row.iter().enumerate() {
                let bad = || AssemblyError::NotInvolutive {
                    copy: c,
                    wall: self.wall_name(w).to_string(),
                };
                if g.copy >= self.copies.len() || g.perm.get(w) != Some(&g.wall) {
                    return Err(bad());
                }
                let back = &self.glue[g.copy][g.wall];
                if back.copy != c
                    || back.wall != w
                    || compose(&back.perm, &g.perm) != identity_perm(g.perm.len())
                {
                    return Err(bad());
                }
            }
        }
        Ok(())
    }

    /// Image of base cell `cell` under a wall permutation.
    fn image(&self, cell: usize, perm: &[usize]) -> Result<usize, AssemblyError> {
        let mut walls: Vec<usize> = self.cells[cell].walls.iter().map(|&w| perm[w]).collect();
        walls.sort_unstable();
        self.cell_index
            .get(&walls)
            .copied()
            .ok_or_else(|| AssemblyError::UnknownCell(self.cell_name(cell)))
    }

    fn cell_of_face(&self, f: usize) -> usize {
        self.cell_index[&self.strata.faces[f].walls.to_vec()]
    }

    fn face_of_cell(&self, cell: usize) -> usize {
        let w = &self.cells[cell].walls;
        self.strata.face_index(w[0], w[1]).expect("face cell")
    }

    /// Orbits of `(copy, cell)` under the identifications.
    pub fn cell_orbits(&self) -> Result<CellOrbits, AssemblyError> {
        let n = self.cells.len();
        let mut uf = UnionFind::new(self.copies.len() * n);
        for c in 0..self.copies.len() {
            for (k, cell) in self.cells.iter().enumerate() {
                for &w in &cell.walls {
                    let g = &self.glue[c][w];
                    let img = self.image(k, &g.perm)?;
                    uf.union(c * n + k, g.copy * n + img);
                }
            }
        }
        let mut ids: HashMap<usize, usize> = HashMap::new();
        let mut orbit_of = vec![0; self.copies.len() * n];
        let mut members: Vec<Vec<CellRef>> = Vec::new();
        for c in 0..self.copies.len() {
            for k in 0..n {
                let root = uf.find(c * n + k);
                let id = *ids.entry(root).or_insert_with(|| {
                    members.push(Vec::new());
                    members.len() - 1
                });
                orbit_of[c * n + k] = id;
                members[id].push(CellRef { copy: c, cell: k });
            }
        }
        Ok(CellOrbits {
            cells_per_copy: n,
            orbit_of,
            members,
        })
    }
}

/// `a ∘ b`.
fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&i| a[i]).collect()
}

fn invert(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &j) in p.iter().enumerate() {
        inv[j] = i;
    }
    inv
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

#[derive(Clone, Debug)]
pub struct CellOrbits {
    cells_per_copy: usize,
    orbit_of: Vec<usize>,
    pub members: Vec<Vec<CellRef>>,
}

impl CellOrbits {
    pub fn orbit(&self, r: CellRef) -> usize {
        self.orbit_of[r.copy * self.cells_per_copy + r.cell]
    }
}

fn strata_of(p: &Polytope<f64>) -> Result<StrataComplex, AssemblyError> {
    Ok(enumerate_strata(p, StrataMode::Geometric)?)
}

/// `2^k` copies indexed by bit vectors; a wall of colour `i` is glued to the
/// same wall of the copy differing in bit `i`.
pub fn mirror_complex(
    p: &Polytope<f64>,
    colouring: &MirrorColouring,
) -> Result<AssembledComplex, AssemblyError> {
    let k = colouring.palette();
    let colour: Vec<usize> = p
        .names
        .iter()
        .map(|n| {
            colouring
                .colours
                .get(n)
                .copied()
                .ok_or_else(|| AssemblyError::Colouring(format!("wall {n} has no colour")))
        })
        .collect::<Result<_, _>>()?;
    if let Some(extra) = colouring.colours.keys().find(|n| p.index_of(n).is_none()) {
        return Err(AssemblyError::UnknownWall(extra.clone()));
    }
    let id = IsometryMatrix::identity(p.normals[0].vector().dim());
    let copies: Vec<String> = (0..1usize << k)
        .map(|i| format!("{i:0width$b}", width = k.max(1)))
        .collect();
    let glue = (0..copies.len())
        .map(|c| {
            (0..p.len())
                .map(|w| Gluing {
                    copy: c ^ (1 << colour[w]),
                    wall: w,
                    iso: id.clone(),
                    perm: identity_perm(p.len()),
                })
                .collect()
        })
        .collect();
    AssembledComplex::new(p.clone(), strata_of(p)?, copies, glue)
}

/// Copies glued by explicit rules; a rule's inverse is added when absent.
pub fn pairing_complex(
    p: &Polytope<f64>,
    copies: Vec<String>,
    rules: &[PairingRule],
) -> Result<AssembledComplex, AssemblyError> {
    let vectors = p.vectors();
    let wall = |n: &str| {
        p.index_of(n)
            .ok_or_else(|| AssemblyError::UnknownWall(n.to_string()))
    };
    let mut glue: Vec<Vec<Option<Gluing>>> = vec![vec![None; p.len()]; copies.len()];
    let mut set = |c: usize, w: usize, g: Gluing| -> Result<(), AssemblyError> {
        let slot = &mut glue.get_mut(c).ok_or(AssemblyError::UnknownCopy(c))?[w];
        match slot {
            Some(old) if *old != g => Err(AssemblyError::Conflict {
                copy: c,
                wall: p.names[w].clone(),
            }),
            Some(_) => Ok(()),
            None => {
                *slot = Some(g);
                Ok(())
            }
        }
    };
    for r in rules {
        let (fc, fw) = (r.from.0, wall(&r.from.1)?);
        let (tc, tw) = (r.to.0, wall(&r.to.1)?);
        if fc >= copies.len() || tc >= copies.len() {
            return Err(AssemblyError::UnknownCopy(fc.max(tc)));
        }
        let perm = verify_symmetry(&r.iso, &vectors)
            .map_err(|_| AssemblyError::NotSymmetry(r.from.1.clone()))?;
        if perm[fw] != tw {
            return Err(AssemblyError::WallMismatch {
                from: r.from.1.clone(),
                to: r.to.1.clone(),
                image: p.names[perm[fw]].clone(),
            });
        }
        let inv = invert(&perm);
        set(
            fc,
            fw,
            Gluing {
                copy: tc,
                wall: tw,
                iso: r.iso.clone(),
                perm,
            },
        )?;
        set(
            tc,
            tw,
            Gluing {
                copy: fc,
                wall: fw,
                iso: r.iso.inverse(),
                perm: inv,
            },
        )?;
    }
    let glue = glue
        .into_iter()
        .enumerate()
        .map(|(c, row)| {
            row.into_iter()
                .enumerate()
                .map(|(w, g)| {
                    g.ok_or_else(|| AssemblyError::NotCovering {
                        copy: c,
                        wall: p.names[w].clone(),
                    })
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    AssembledComplex::new(p.clone(), strata_of(p)?, copies, glue)
}

/// Rules reproducing a mirror colouring with identity isometries.
pub fn mirror_rules(p: &Polytope<f64>, colouring: &MirrorColouring) -> Vec<PairingRule> {
    let k = colouring.palette();
    let id = IsometryMatrix::identity(p.normals[0].vector().dim());
    let mut rules = Vec::new();
    for c in 0..1usize << k {
        for n in &p.names {
            let other = c ^ (1 << colouring.colours[n]);
            if c < other {
                rules.push(PairingRule {
                    from: (c, n.clone()),
                    to: (other, n.clone()),
                    iso: id.clone(),
                });
            }
        }
    }
    rules
}

/// `W_t`: the P/N/L colouring of `P_t`, eight copies.
pub fn w_complex(t: &FamilyTime) -> Result<AssembledComplex, AssemblyError> {
    let p = p_polytope::<f64>(t)?;
    mirror_complex(&p, &MirrorColouring::pnl(&p)?)
}

/// The pairing rules of `N_t` on copies `ij ↦ 2i + j`.
pub fn n_rules(p: &Polytope<f64>) -> Result<Vec<PairingRule>, AssemblyError> {
    let id = IsometryMatrix::identity(5);
    let mut rules = Vec::new();
    for c in 0..4usize {
        for n in &p.names {
            let w: WallName = n
                .parse()
                .map_err(|_| AssemblyError::UnknownWall(n.clone()))?;
            match w {
                WallName::Letter(_) if c < 2 => rules.push(PairingRule {
                    from: (c, n.clone()),
                    to: (c + 2, n.clone()),
                    iso: id.clone(),
                }),
                WallName::Negative(_) if c % 2 == 0 => rules.push(PairingRule {
                    from: (c, n.clone()),
                    to: (c + 1, n.clone()),
                    iso: id.clone(),
                }),
                _ => {}
            }
        }
        let vectors = p.vectors();
        for (src, iso) in pairing_isometries() {
            let from = p
                .index_of(&src.to_string())
                .ok_or_else(|| AssemblyError::UnknownWall(src.to_string()))?;
            let perm = verify_symmetry(&iso, &vectors)
                .map_err(|_| AssemblyError::NotSymmetry(src.to_string()))?;
            rules.push(PairingRule {
                from: (c, src.to_string()),
                to: (c, p.names[perm[from]].clone()),
                iso,
            });
        }
    }
    Ok(rules)
}

pub fn n_copies() -> Vec<String> {
    ["00", "01", "10", "11"].map(String::from).to_vec()
}

/// `N_t`: four copies, letter walls mirrored across the first index,
/// negative walls across the second, positive walls paired by `s_p1, s_p3, s_p5, s_p7`.
pub fn n_complex(t: &FamilyTime) -> Result<AssembledComplex, AssemblyError> {
    let p = p_polytope::<f64>(t)?;
    let rules = n_rules(&p)?;
    pairing_complex(&p, n_copies(), &rules)
}

/// An isometry of the base together with a permutation of the copies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Involution {
    pub iso: IsometryMatrix,
    pub copies: Vec<usize>,
}

/// `r` on every copy of `N_t`.
pub fn n_roll() -> Involution {
    Involution {
        iso: crate::family::central_involution(),
        copies: vec![0, 1, 2, 3],
    }
}

/// `ι = h∘r` with `h: P^{ij} → P^{1−i,1−j}`.
pub fn n_iota() -> Involution {
    Involution {
        iso: crate::family::central_involution(),
        copies: vec![3, 2, 1, 0],
    }
}

/// `M_t = N_t/ι`.
pub fn m_complex(t: &FamilyTime) -> Result<AssembledComplex, AssemblyError> {
    involution_quotient(&n_complex(t)?, &n_iota())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedCell {
    pub dim: usize,
    pub copy: String,
    pub cell: String,
}

fn involution_perm(c: &AssembledComplex, inv: &Involution) -> Result<Vec<usize>, AssemblyError> {
    if inv.copies.len() != c.copies.len() || inv.copies.iter().any(|&x| x >= c.copies.len()) {
        return Err(AssemblyError::NotInvolution);
    }
    let perm = verify_symmetry(&inv.iso, &c.base.vectors())
        .map_err(|_| AssemblyError::NotSymmetry("involution".into()))?;
    let id = identity_perm(perm.len());
    let copies_id: Vec<usize> = (0..c.copies.len()).collect();
    if compose(&perm, &perm) != id || compose(&inv.copies, &inv.copies) != copies_id {
        return Err(AssemblyError::NotInvolution);
    }
    if perm == id && inv.copies == copies_id {
        return Err(AssemblyError::NotInvolution);
    }
    for (k, row) in c.glue.iter().enumerate() {
        for (w, g) in row.iter().enumerate() {
            let target = &c.glue[inv.copies[k]][perm[w]];
            let conj = compose(&compose(&perm, &g.perm), &invert(&perm));
            if target.copy != inv.copies[g.copy]
                || target.wall != perm[g.wall]
                || target.perm != conj
            {
                return Err(AssemblyError::NotAutomorphism {
                    copy: k,
                    wall: c.wall_name(w).to_string(),
                });
            }
        }
    }
    Ok(perm)
}

/// Cell orbits (ideal vertices excluded) mapped to themselves by `inv`.
pub fn fixed_cells(
    c: &AssembledComplex,
    inv: &Involution,
) -> Result<Vec<FixedCell>, AssemblyError> {
    let perm = involution_perm(c, inv)?;
    let orbits = c.cell_orbits()?;
    let mut out = Vec::new();
    for m in &orbits.members {
        let r = m[0];
        if c.cells[r.cell].ideal {
            continue;
        }
        let img = CellRef {
            copy: inv.copies[r.copy],
            cell: c.image(r.cell, &perm)?,
        };
        if orbits.orbit(img) == orbits.orbit(r) {
            out.push(FixedCell {
                dim: c.cells[r.cell].dim,
                copy: c.copies[r.copy].clone(),
                cell: c.cell_name(r.cell),
            });
        }
    }
    Ok(out)
}

/// Quotient by a fixed-point-free involution; one copy is kept per orbit.
pub fn involution_quotient(
    c: &AssembledComplex,
    inv: &Involution,
) -> Result<AssembledComplex, AssemblyError> {
    let fixed = fixed_cells(c, inv)?;
    if !fixed.is_empty() {
        return Err(AssemblyError::FixedPoints(fixed));
    }
    let perm = involution_perm(c, inv)?;
    let inv_perm = invert(&perm);
    let inv_iso = inv.iso.inverse();
    let reps: Vec<usize> = (0..c.copies.len()).filter(|&k| k < inv.copies[k]).collect();
    let new_index = |k: usize| reps.iter().position(|&r| r == k);
    let glue = reps
        .iter()
        .map(|&k| {
            c.glue[k]
                .iter()
                .map(|g| match new_index(g.copy) {
                    Some(n) => Gluing {
                        copy: n,
                        ..g.clone()
                    },
                    None => Gluing {
                        copy: new_index(inv.copies[g.copy]).expect("partner is a representative"),
                        wall: inv_perm[g.wall],
                        iso: inv_iso.compose(&g.iso),
                        perm: compose(&inv_perm, &g.perm),
                    },
                })
                .collect()
        })
        .collect();
    let copies = reps
        .iter()
        .map(|&k| format!("{}|{}", c.copies[k], c.copies[inv.copies[k]]))
        .collect();
    AssembledComplex::new(c.base.clone(), c.strata.clone(), copies, glue)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaceEntry {
    pub copy: usize,
    pub face: usize,
    pub walls: [String; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaceCycle {
    pub entries: Vec<FaceEntry>,
    pub angle: f64,
    /// The composite gluing around the cycle fixes the face.
    pub return_identity: bool,
    /// Accumulated wall permutation from the first entry to each entry.
    #[serde(skip)]
    maps: Vec<Vec<usize>>,
}

impl FaceCycle {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_singular(&self) -> bool {
        (self.angle - 2.0 * PI).abs() > ANGLE_TOL
    }
}

/// Side walls of face `f`, in cyclic order around the polygon.
fn polygon_sides(s: &StrataComplex, f: usize) -> Option<Vec<usize>> {
    let key = s.faces[f].walls;
    let mut sides: Vec<(usize, Vec<EdgeEnd>)> = Vec::new();
    for e in s.edges_of_face(f) {
        let edge = &s.edges[e];
        let others: Vec<usize> = edge
            .walls
            .iter()
            .copied()
            .filter(|w| !key.contains(w))
            .collect();
        if others.len() != 1 || edge.ends.contains(&EdgeEnd::Escape) {
            return None;
        }
        sides.push((others[0], edge.ends.clone()));
    }
    if sides.len() < 3 {
        return None;
    }
    let mut order = vec![0usize];
    let mut prev_end = sides[0].1[0];
    loop {
        let cur = *order.last().expect("non-empty");
        let next_end = if sides[cur].1[0] == prev_end {
            sides[cur].1[1]
        } else {
            sides[cur].1[0]
        };
        let next = (0..sides.len()).find(|&j| j != cur && sides[j].1.contains(&next_end))?;
        if next == order[0] {
            break;
        }
        if order.contains(&next) {
            return None;
        }
        order.push(next);
        prev_end = next_end;
    }
    (order.len() == sides.len()).then(|| order.into_iter().map(|i| sides[i].0).collect())
}

/// Face cycles: traversals alternating between the two walls of a face.
pub fn face_cycles(c: &AssembledComplex) -> Result<Vec<FaceCycle>, AssemblyError> {
    let nf = c.strata.faces.len();
    let mut seen = vec![false; c.copies.len() * nf];
    let limit = 2 * c.copies.len() * nf + 2;
    let mut out = Vec::new();
    for c0 in 0..c.copies.len() {
        for f0 in 0..nf {
            if seen[c0 * nf + f0] {
                continue;
            }
            let start = (c0, f0, c.strata.faces[f0].walls[1]);
            let mut state = start;
            let mut mu = identity_perm(c.base.len());
            let mut entries: Vec<FaceEntry> = Vec::new();
            let mut maps = Vec::new();
            let mut steps = 0;
            loop {
                let (k, f, exit) = state;
                if !seen[k * nf + f] {
                    seen[k * nf + f] = true;
                    let w = c.strata.faces[f].walls;
                    entries.push(FaceEntry {
                        copy: k,
                        face: f,
                        walls: [c.base.names[w[0]].clone(), c.base.names[w[1]].clone()],
                    });
                    maps.push(mu.clone());
                }
                let g = &c.glue[k][exit];
                let img = c.image(c.cell_of_face(f), &g.perm)?;
                let f2 = c.face_of_cell(img);
                let walls = c.strata.faces[f2].walls;
                let next_exit = if walls[0] == g.wall {
                    walls[1]
                } else {
                    walls[0]
                };
                mu = compose(&g.perm, &mu);
                state = (g.copy, f2, next_exit);
                steps += 1;
                if state == start {
                    break;
                }
                if steps > limit {
                    return Err(AssemblyError::NonClosing(format!(
                        "{}:{}",
                        c.copies[c0],
                        c.cell_name(c.cell_of_face(f0))
                    )));
                }
            }
            let angle = entries.iter().map(|e| c.strata.faces[e.face].angle).sum();
            let return_identity = match polygon_sides(&c.strata, f0) {
                Some(sides) => sides.iter().all(|&w| mu[w] == w),
                None => mu.iter().enumerate().all(|(i, &j)| i == j),
            };
            out.push(FaceCycle {
                entries,
                angle,
                return_identity,
                maps,
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConePoint {
    pub angle: f64,
    pub vertex: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StratumSurface {
    /// Indices into the face-cycle list.
    pub cycles: Vec<usize>,
    /// Base faces carried, by wall names.
    pub base_faces: Vec<String>,
    /// Total angle of its face cycles.
    pub cone_angle: f64,
    pub euler_char: i64,
    pub cone_points: Vec<ConePoint>,
    /// Polygon sides along which another singular face meets it.
    pub boundary_sides: usize,
    pub orientable: bool,
    pub area: f64,
}

/// `+1` if `a` and `b` are the same cyclic sequence, `−1` if reversed, `0` otherwise.
fn cyclic_relation(a: &[usize], b: &[usize]) -> i8 {
    let n = a.len();
    if n != b.len() || n == 0 {
        return 0;
    }
    let Some(shift) = b.iter().position(|&x| x == a[0]) else {
        return 0;
    };
    if (0..n).all(|i| a[i] == b[(shift + i) % n]) {
        1
    } else if (0..n).all(|i| a[i] == b[(shift + n - i) % n]) {
        -1
    } else {
        0
    }
}

/// Components of the singular face cycles glued along shared sides.
pub fn stratum_surfaces(c: &AssembledComplex) -> Result<Vec<StratumSurface>, AssemblyError> {
    let cycles = face_cycles(c)?;
    stratum_surfaces_from(c, &cycles)
}

pub fn stratum_surfaces_from(
    c: &AssembledComplex,
    cycles: &[FaceCycle],
) -> Result<Vec<StratumSurface>, AssemblyError> {
    let nf = c.strata.faces.len();
    let mut cycle_of = vec![usize::MAX; c.copies.len() * nf];
    let mut entry_map: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (i, cy) in cycles.iter().enumerate() {
        for (e, m) in cy.entries.iter().zip(&cy.maps) {
            cycle_of[e.copy * nf + e.face] = i;
            entry_map.insert((e.copy, e.face), m.clone());
        }
    }
    let singular: Vec<usize> = (0..cycles.len())
        .filter(|&i| cycles[i].is_singular())
        .collect();
    if singular.is_empty() {
        return Ok(vec![]);
    }
    let geometry: Vec<FaceGeometry> = face_geometry(&c.base, &c.strata)?;
    let orbits = c.cell_orbits()?;
    let sides: Vec<Option<Vec<usize>>> = (0..nf).map(|f| polygon_sides(&c.strata, f)).collect();

    let mut links: HashMap<usize, Vec<Link>> = HashMap::new();
    let mut boundary: HashMap<usize, usize> = HashMap::new();
    let mut edge_orbits: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut uf = UnionFind::new(cycles.len());
    for &x in &singular {
        let rep = &cycles[x].entries[0];
        let [a, b] = c.strata.faces[rep.face].walls;
        for e in c.strata.edges_of_face(rep.face) {
            let edge = &c.strata.edges[e];
            edge_orbits
                .entry(x)
                .or_default()
                .push(orbits.orbit(CellRef {
                    copy: rep.copy,
                    cell: c.cell_index[&edge.walls],
                }));
            for &w in edge.walls.iter().filter(|w| **w != a && **w != b) {
                let other_singular = [a, b].iter().any(|&u| {
                    c.strata
                        .face_index(u, w)
                        .is_some_and(|g| cycles[cycle_of[rep.copy * nf + g]].is_singular())
                });
                if other_singular {
                    *boundary.entry(x).or_default() += 1;
                    continue;
                }
                let g = &c.glue[rep.copy][w];
                let f2 = c.face_of_cell(c.image(c.cell_of_face(rep.face), &g.perm)?);
                let y = cycle_of[g.copy * nf + f2];
                uf.union(x, y);
                let yrep = cycles[y].entries[0].face;
                let relation = match (&sides[rep.face], &sides[yrep]) {
                    (Some(sx), Some(sy)) => {
                        let mu = &entry_map[&(g.copy, f2)];
                        let back = invert(mu);
                        let pushed: Vec<usize> = sx.iter().map(|&s| back[g.perm[s]]).collect();
                        cyclic_relation(&pushed, sy)
                    }
                    _ => 0,
                };
                links.entry(x).or_default().push(Link { to: y, relation });
            }
        }
    }

    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &x in &singular {
        groups.entry(uf.find(x)).or_default().push(x);
    }
    let mut out = Vec::new();
    for members in groups.into_values() {
        let mut edges: Vec<usize> = members
            .iter()
            .flat_map(|x| edge_orbits[x].iter().copied())
            .collect();
        edges.sort_unstable();
        edges.dedup();
        let mut corner: BTreeMap<usize, (f64, bool, String)> = BTreeMap::new();
        let mut area = 0.0;
        for &x in &members {
            let rep = &cycles[x].entries[0];
            let geo = &geometry[rep.face];
            area += geo.area;
            let on_boundary = boundary.get(&x).copied().unwrap_or(0) > 0;
            for (i, v) in c.strata.vertices_of_face(rep.face).into_iter().enumerate() {
                if c.strata.vertices[v].kind == PointKind::Ideal {
                    continue;
                }
                let cell = c.cell_index[&c.strata.vertices[v].walls];
                let o = orbits.orbit(CellRef {
                    copy: rep.copy,
                    cell,
                });
                let slot = corner.entry(o).or_insert((0.0, false, c.cell_name(cell)));
                slot.0 += geo.angles[i];
                slot.1 |= on_boundary
                    && vertex_on_singular_side(c, cycles, &cycle_of, rep.copy, rep.face, v);
            }
        }
        let v_count = corner.len() as i64;
        let cone_points = corner
            .values()
            .filter(|(a, on_b, _)| !on_b && (a - 2.0 * PI).abs() > ANGLE_TOL)
            .map(|(a, _, name)| ConePoint {
                angle: *a,
                vertex: name.clone(),
            })
            .collect();
        let orientable = orient(&members, &links);
        let mut base_faces: Vec<String> = members
            .iter()
            .map(|&x| cycles[x].entries[0].walls.join(","))
            .collect();
        base_faces.sort();
        base_faces.dedup();
        out.push(StratumSurface {
            cone_angle: cycles[members[0]].angle,
            euler_char: v_count - edges.len() as i64 + members.len() as i64,
            cone_points,
            boundary_sides: members
                .iter()
                .map(|x| boundary.get(x).copied().unwrap_or(0))
                .sum(),
            orientable,
            area,
            base_faces,
            cycles: members,
        });
    }
    Ok(out)
}

/// Whether vertex `v` of face `f` lies on a side shared with another singular face.
fn vertex_on_singular_side(
    c: &AssembledComplex,
    cycles: &[FaceCycle],
    cycle_of: &[usize],
    copy: usize,
    f: usize,
    v: usize,
) -> bool {
    let nf = c.strata.faces.len();
    let [a, b] = c.strata.faces[f].walls;
    c.strata.vertices[v]
        .walls
        .iter()
        .filter(|w| **w != a && **w != b)
        .any(|&w| {
            [a, b].iter().any(|&u| {
                c.strata
                    .face_index(u, w)
                    .is_some_and(|g| cycles[cycle_of[copy * nf + g]].is_singular())
            })
        })
}

/// Two-colours the cells by orientation; a conflict means non-orientable.
fn orient(members: &[usize], links: &HashMap<usize, Vec<Link>>) -> bool {
    let mut sign: HashMap<usize, i8> = HashMap::new();
    for &root in members {
        if sign.contains_key(&root) {
            continue;
        }
        sign.insert(root, 1);
        let mut stack = vec![root];
        while let Some(x) = stack.pop() {
            let sx = sign[&x];
            for l in links.get(&x).map(Vec::as_slice).unwrap_or(&[]) {
                if l.relation == 0 {
                    continue;
                }
                let want = -sx * l.relation;
                match sign.get(&l.to) {
                    Some(&s) if s != want => return false,
                    Some(_) => {}
                    None => {
                        sign.insert(l.to, want);
                        stack.push(l.to);
                    }
                }
            }
        }
    }
    true
}

/// Neighbour across a polygon side, with the relation between the pushed
/// side order and the neighbour's own order.
struct Link {
    to: usize,
    relation: i8,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CuspCycle {
    /// Base ideal vertices in the order the non-mirror gluings visit them.
    pub vertices: Vec<String>,
    /// Every `(copy, ideal vertex)` in the orbit.
    pub members: Vec<(String, String)>,
    pub length: usize,
    /// Product of `−orientation` over the non-mirror gluings of the cycle;
    /// absent when those gluings do not form a single cycle.
    pub monodromy: Option<i8>,
}

pub fn cusp_cycles(c: &AssembledComplex) -> Result<Vec<CuspCycle>, AssemblyError> {
    let ideal: Vec<usize> = (0..c.cells.len()).filter(|&k| c.cells[k].ideal).collect();
    if ideal.is_empty() {
        return Ok(vec![]);
    }
    let pos: HashMap<usize, usize> = ideal.iter().enumerate().map(|(i, &k)| (k, i)).collect();
    let ni = ideal.len();
    let node = |copy: usize, cell: usize| copy * ni + pos[&cell];
    let mut all = UnionFind::new(c.copies.len() * ni);
    let mut mirror = UnionFind::new(c.copies.len() * ni);
    for k in 0..c.copies.len() {
        for &cell in &ideal {
            for &w in &c.cells[cell].walls {
                let g = &c.glue[k][w];
                let img = c.image(cell, &g.perm)?;
                all.union(node(k, cell), node(g.copy, img));
                if g.is_mirror() {
                    mirror.union(node(k, cell), node(g.copy, img));
                }
            }
        }
    }
    let mut orbits: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for k in 0..c.copies.len() {
        for &cell in &ideal {
            orbits
                .entry(all.find(node(k, cell)))
                .or_default()
                .push((k, cell));
        }
    }
    let mut out = Vec::new();
    for members in orbits.into_values() {
        // Ports of a mirror class: its non-mirror walls, each with its gluing.
        let mut ports: BTreeMap<usize, BTreeMap<usize, (usize, usize, i8)>> = BTreeMap::new();
        let mut class_vertex: BTreeMap<usize, usize> = BTreeMap::new();
        for &(k, cell) in &members {
            let cls = mirror.find(node(k, cell));
            class_vertex.entry(cls).or_insert(cell);
            for &w in &c.cells[cell].walls {
                let g = &c.glue[k][w];
                if g.is_mirror() {
                    continue;
                }
                let img = c.image(cell, &g.perm)?;
                let sign = -g.iso.orientation();
                ports.entry(cls).or_default().entry(w).or_insert((
                    mirror.find(node(g.copy, img)),
                    g.wall,
                    sign,
                ));
            }
        }
        let classes: Vec<usize> = class_vertex.keys().copied().collect();
        let (vertices, length, monodromy) = if ports.is_empty() {
            (
                classes
                    .iter()
                    .map(|k| c.cell_name(class_vertex[k]))
                    .collect(),
                classes.len(),
                Some(1),
            )
        } else if classes
            .iter()
            .all(|k| ports.get(k).is_some_and(|p| p.len() == 2))
        {
            let start = classes[0];
            let first_port = *ports[&start].keys().next().expect("two ports");
            let (mut cls, mut port) = (start, first_port);
            let mut seq = Vec::new();
            let mut sign = 1i8;
            loop {
                seq.push(c.cell_name(class_vertex[&cls]));
                let (next, entered, s) = ports[&cls][&port];
                sign *= s;
                let p = &ports[&next];
                port = *p.keys().find(|&&q| q != entered).unwrap_or(&entered);
                cls = next;
                if (cls, port) == (start, first_port) || seq.len() > classes.len() * 2 {
                    break;
                }
            }
            let closed = (cls, port) == (start, first_port);
            let len = seq.len();
            (seq, len, closed.then_some(sign))
        } else {
            (
                classes
                    .iter()
                    .map(|k| c.cell_name(class_vertex[k]))
                    .collect(),
                classes.len(),
                None,
            )
        };
        out.push(CuspCycle {
            vertices,
            members: members
                .iter()
                .map(|&(k, cell)| (c.copies[k].clone(), c.cell_name(cell)))
                .collect(),
            length,
            monodromy,
        });
    }
    Ok(out)
}

/// `Σ (−1)^dim · n_O / |Γ_σ|` over cell orbits `O` of base stratum `σ` with
/// `n_O` entries; ideal vertices excluded. Needs a Coxeter base.
pub fn complex_euler_char(c: &AssembledComplex) -> Result<Rational64, AssemblyError> {
    let d = build_diagram(&gram_matrix(&c.base)?);
    let orbits = c.cell_orbits()?;
    let mut chi = Rational64::from_integer(0);
    for m in &orbits.members {
        let cell = &c.cells[m[0].cell];
        if cell.ideal {
            continue;
        }
        let sign = if cell.dim % 2 == 0 { 1 } else { -1 };
        let order = subset_group_order(&d, &cell.walls)?;
        chi += Rational64::new(sign * m.len() as i64, order as i64);
    }
    Ok(chi)
}

/// `Σ (−1)^dim` over cell orbits, ideal vertices excluded.
pub fn cell_euler_char(c: &AssembledComplex) -> Result<i64, AssemblyError> {
    let orbits = c.cell_orbits()?;
    Ok(orbits
        .members
        .iter()
        .map(|m| &c.cells[m[0].cell])
        .filter(|cell| !cell.ideal)
        .map(|cell| if cell.dim % 2 == 0 { 1 } else { -1 })
        .sum())
}

/// Face cycles grouped by angle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleClass {
    pub angle: f64,
    pub length: usize,
    pub cycles: usize,
    /// Distinct base faces appearing in these cycles.
    pub base_faces: usize,
}

pub fn cycle_classes(c: &AssembledComplex, cycles: &[FaceCycle]) -> Vec<CycleClass> {
    let mut out: Vec<(CycleClass, Vec<usize>)> = Vec::new();
    for cy in cycles {
        let faces: Vec<usize> = cy.entries.iter().map(|e| e.face).collect();
        match out
            .iter_mut()
            .find(|(k, _)| (k.angle - cy.angle).abs() < ANGLE_TOL && k.length == cy.len())
        {
            Some((k, fs)) => {
                k.cycles += 1;
                fs.extend(faces);
            }
            None => out.push((
                CycleClass {
                    angle: cy.angle,
                    length: cy.len(),
                    cycles: 1,
                    base_faces: 0,
                },
                faces,
            )),
        }
    }
    let _ = c;
    out.into_iter()
        .map(|(mut k, mut fs)| {
            fs.sort_unstable();
            fs.dedup();
            k.base_faces = fs.len();
            k
        })
        .collect()
}

/// Everything `assemble` reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssemblyReport {
    pub copies: Vec<String>,
    pub cycle_classes: Vec<CycleClass>,
    pub singular_cycles: Vec<FaceCycle>,
    pub surfaces: Vec<StratumSurface>,
    pub cusps: Vec<CuspCycle>,
    pub cell_euler_char: i64,
    /// Orbifold-weighted; only for a Coxeter base.
    pub euler_char: Option<String>,
}

pub fn assembly_report(c: &AssembledComplex) -> Result<AssemblyReport, AssemblyError> {
    let cycles = face_cycles(c)?;
    let surfaces = stratum_surfaces_from(c, &cycles)?;
    Ok(AssemblyReport {
        copies: c.copies.clone(),
        cycle_classes: cycle_classes(c, &cycles),
        singular_cycles: cycles
            .iter()
            .filter(|cy| cy.is_singular())
            .cloned()
            .collect(),
        surfaces,
        cusps: cusp_cycles(c)?,
        cell_euler_char: cell_euler_char(c)?,
        euler_char: complex_euler_char(c).ok().map(|q| q.to_string()),
    })
}

/// JSON description of a custom assembly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssemblySpec {
    pub base: crate::family::Preset,
    #[serde(default)]
    pub colouring: Option<BTreeMap<String, usize>>,
    #[serde(default)]
    pub copies: Option<Vec<String>>,
    #[serde(default)]
    pub pairings: Option<Vec<PairingRule>>,
}

impl AssemblySpec {
    pub fn build(&self) -> Result<AssembledComplex, AssemblyError> {
        let p = self.base.polytope::<f64>()?;
        match (&self.colouring, &self.pairings) {
            (Some(col), None) => mirror_complex(&p, &MirrorColouring::new(col.clone())?),
            (None, Some(rules)) => {
                let n = rules
                    .iter()
                    .flat_map(|r| [r.from.0, r.to.0])
                    .max()
                    .map_or(1, |m| m + 1);
                let copies = self
                    .copies
                    .clone()
                    .unwrap_or_else(|| (0..n).map(|i| i.to_string()).collect());
                pairing_complex(&p, copies, rules)
            }
            _ => Err(AssemblyError::Colouring(
                "give exactly one of colouring and pairings".into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{angle_phi, angle_theta, t1, tbar};

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-9
    }

    #[test]
    fn pairings_send_odd_to_even() {
        let p = p_polytope::<f64>(&FamilyTime::new(0.9).unwrap()).unwrap();
        let rules = n_rules(&p).unwrap();
        let targets: Vec<&str> = rules
            .iter()
            .filter(|r| r.from.0 == 0 && r.from.1.starts_with('p'))
            .map(|r| r.to.1.as_str())
            .collect();
        assert_eq!(targets.len(), 4);
        assert!(targets.contains(&"p0"));
        let mut sorted = targets.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 4);
    }

    #[test]
    fn w_face_cycles() {
        let t = 0.9;
        let (th, ph) = (angle_theta(t).unwrap(), angle_phi(t).unwrap());
        let w = w_complex(&FamilyTime::new(t).unwrap()).unwrap();
        let cycles = face_cycles(&w).unwrap();
        let classes = cycle_classes(&w, &cycles);
        let red = classes.iter().find(|k| close(k.angle, 2.0 * th)).unwrap();
        assert_eq!((red.length, red.base_faces, red.cycles), (2, 12, 48));
        let green = classes.iter().find(|k| close(k.angle, 4.0 * ph)).unwrap();
        assert_eq!((green.length, green.base_faces, green.cycles), (4, 8, 16));
        assert!(cycles
            .iter()
            .all(|c| c.is_singular() == (close(c.angle, 2.0 * th) || close(c.angle, 4.0 * ph))));
        assert!(cycles.iter().all(|c| c.return_identity));
    }

    #[test]
    fn w_surfaces() {
        let t = 0.85;
        let (th, ph) = (angle_theta(t).unwrap(), angle_phi(t).unwrap());
        let w = w_complex(&FamilyTime::new(t).unwrap()).unwrap();
        let s = stratum_surfaces(&w).unwrap();
        let tori: Vec<_> = s.iter().filter(|x| close(x.cone_angle, 2.0 * th)).collect();
        let spheres: Vec<_> = s.iter().filter(|x| close(x.cone_angle, 4.0 * ph)).collect();
        assert_eq!((tori.len(), spheres.len()), (12, 8));
        for x in &tori {
            assert_eq!(x.euler_char, 0);
            assert_eq!(x.cone_points.len(), 2);
            assert!(x.cone_points.iter().all(|c| close(c.angle, 4.0 * ph)));
            assert!(x.orientable);
            assert!(close(x.area, 4.0 * PI - 8.0 * ph));
        }
        for x in &spheres {
            assert_eq!(x.euler_char, 2);
            assert_eq!(x.cone_points.len(), 3);
            assert!(x.cone_points.iter().all(|c| close(c.angle, 2.0 * th)));
            assert!(x.orientable);
        }
    }

    #[test]
    fn w1_is_a_manifold() {
        let w = w_complex(&FamilyTime::one()).unwrap();
        let cycles = face_cycles(&w).unwrap();
        assert!(cycles
            .iter()
            .all(|c| c.len() == 4 && close(c.angle, 2.0 * PI)));
        assert!(stratum_surfaces(&w).unwrap().is_empty());
        assert_eq!(cusp_cycles(&w).unwrap().len(), 24);
        assert_eq!(complex_euler_char(&w).unwrap(), Rational64::from_integer(8));
        assert_eq!(cell_euler_char(&w).unwrap(), 8);
    }

    #[test]
    fn euler_characteristics() {
        let w = w_complex(&FamilyTime::tbar()).unwrap();
        assert_eq!(complex_euler_char(&w).unwrap(), Rational64::from_integer(5));
        let w = w_complex(&FamilyTime::t1()).unwrap();
        assert_eq!(complex_euler_char(&w).unwrap(), Rational64::from_integer(8));
        let n = n_complex(&FamilyTime::one()).unwrap();
        assert_eq!(complex_euler_char(&n).unwrap(), Rational64::from_integer(4));
        assert_eq!(cell_euler_char(&n).unwrap(), 4);
        assert!(complex_euler_char(&w_complex(&FamilyTime::new(0.9).unwrap()).unwrap()).is_err());
    }

    #[test]
    fn w_cusps() {
        for t in [0.9, 0.75, 0.4] {
            let w = w_complex(&FamilyTime::new(t).unwrap()).unwrap();
            let cusps = cusp_cycles(&w).unwrap();
            assert_eq!(cusps.len(), 12, "t = {t}");
            assert!(cusps.iter().all(|c| c.length == 1 && c.members.len() == 8));
        }
    }

    #[test]
    fn n_structure() {
        let t = 0.9;
        let (th, ph) = (angle_theta(t).unwrap(), angle_phi(t).unwrap());
        let n = n_complex(&FamilyTime::new(t).unwrap()).unwrap();
        assert_eq!(n.copies.len(), 4);
        let cycles = face_cycles(&n).unwrap();
        let classes = cycle_classes(&n, &cycles);
        assert!(classes
            .iter()
            .any(|k| close(k.angle, 6.0 * th) && k.length == 6 && k.base_faces == 12));
        assert!(classes
            .iter()
            .any(|k| close(k.angle, 4.0 * ph) && k.length == 4));
        let cusps = cusp_cycles(&n).unwrap();
        assert_eq!(cusps.len(), 2);
        assert!(cusps
            .iter()
            .all(|c| c.length == 6 && c.monodromy == Some(1)));
        let s = stratum_surfaces(&n).unwrap();
        let red: Vec<_> = s.iter().filter(|x| close(x.cone_angle, 6.0 * th)).collect();
        let green: Vec<_> = s.iter().filter(|x| close(x.cone_angle, 4.0 * ph)).collect();
        assert_eq!((red.len(), green.len()), (2, 1));
        assert!(red.iter().all(|x| x.euler_char == 0
            && x.cone_points.len() == 2
            && x.cone_points.iter().all(|c| close(c.angle, 4.0 * ph))));
        assert_eq!(green[0].euler_char, 0);
        assert_eq!(green[0].cone_points.len(), 4);
        assert!(green[0]
            .cone_points
            .iter()
            .all(|c| close(c.angle, 6.0 * th)));
        assert!(green[0].orientable);
    }

    #[test]
    fn m_quotient() {
        let t = 0.88;
        let (th, ph) = (angle_theta(t).unwrap(), angle_phi(t).unwrap());
        let n = n_complex(&FamilyTime::new(t).unwrap()).unwrap();
        let fixed = fixed_cells(&n, &n_roll()).unwrap();
        assert_eq!(fixed.len(), 4);
        assert!(fixed.iter().all(|f| f.dim == 4));
        assert!(matches!(
            involution_quotient(&n, &n_roll()),
            Err(AssemblyError::FixedPoints(_))
        ));
        let m = involution_quotient(&n, &n_iota()).unwrap();
        assert_eq!(m.copies.len(), 2);
        let s = stratum_surfaces(&m).unwrap();
        assert_eq!(s.len(), 2);
        let red = s.iter().find(|x| close(x.cone_angle, 6.0 * th)).unwrap();
        let green = s.iter().find(|x| close(x.cone_angle, 4.0 * ph)).unwrap();
        assert!(red.orientable);
        assert!(!green.orientable);
        assert!(close(red.area, 4.0 * PI - 2.0 * 4.0 * ph));
        assert!(close(green.area, 4.0 * PI - 2.0 * 6.0 * th));
        assert_eq!(cusp_cycles(&m).unwrap().len(), 1);
    }

    #[test]
    fn pairing_equals_mirror() {
        let p = p_polytope::<f64>(&FamilyTime::new(0.8).unwrap()).unwrap();
        let col = MirrorColouring::pnl(&p).unwrap();
        let a = mirror_complex(&p, &col).unwrap();
        let b = pairing_complex(&p, a.copies.clone(), &mirror_rules(&p, &col)).unwrap();
        assert_eq!(a.glue, b.glue);
        let (oa, ob) = (a.cell_orbits().unwrap(), b.cell_orbits().unwrap());
        assert_eq!(oa.members, ob.members);
    }

    #[test]
    fn trivial_complexes() {
        let p = p_polytope::<f64>(&FamilyTime::new(0.9).unwrap()).unwrap();
        let double = mirror_complex(&p, &MirrorColouring::single(&p)).unwrap();
        assert_eq!(double.copies.len(), 2);
        let id = Involution {
            iso: IsometryMatrix::identity(5),
            copies: vec![1, 0],
        };
        let fixed = fixed_cells(&double, &id).unwrap();
        assert!(fixed.iter().any(|f| f.dim == 3));
        assert!(fixed.iter().all(|f| f.dim < 4));
        // One copy, every wall glued to itself: the orbifold.
        let rules: Vec<PairingRule> = p
            .names
            .iter()
            .map(|n| PairingRule {
                from: (0, n.clone()),
                to: (0, n.clone()),
                iso: IsometryMatrix::identity(5),
            })
            .collect();
        let orb = pairing_complex(&p, vec!["0".into()], &rules).unwrap();
        for cy in face_cycles(&orb).unwrap() {
            assert_eq!(cy.len(), 1);
            assert!(close(cy.angle, orb.strata.faces[cy.entries[0].face].angle));
        }
    }

    #[test]
    fn bad_inputs() {
        let p = p_polytope::<f64>(&FamilyTime::new(0.9).unwrap()).unwrap();
        let mut rules = mirror_rules(&p, &MirrorColouring::pnl(&p).unwrap());
        rules.pop();
        assert!(matches!(
            pairing_complex(&p, (0..8).map(|i| i.to_string()).collect(), &rules),
            Err(AssemblyError::NotCovering { .. })
        ));
        let skew = PairingRule {
            from: (0, "p1".into()),
            to: (0, "p2".into()),
            iso: IsometryMatrix::identity(5),
        };
        assert!(matches!(
            pairing_complex(&p, vec!["0".into()], &[skew]),
            Err(AssemblyError::WallMismatch { .. })
        ));
        let mut col = MirrorColouring::pnl(&p).unwrap();
        col.colours.insert("p0".into(), 5);
        assert!(MirrorColouring::new(col.colours).is_err());
        let n = n_complex(&FamilyTime::new(0.9).unwrap()).unwrap();
        let not_auto = Involution {
            iso: crate::family::symmetry_generators().l,
            copies: vec![0, 1, 2, 3],
        };
        assert!(matches!(
            fixed_cells(&n, &not_auto),
            Err(AssemblyError::NotAutomorphism { .. })
        ));
        let _ = (t1(), tbar());
    }
}
