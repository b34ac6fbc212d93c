use std::f64::consts::PI;

use serde::Serialize;

use super::{CoxeterDiagram, CoxeterError, EdgeLabel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CoxeterType {
    A(usize),
    B(usize),
    D(usize),
    I2(u64),
    E(usize),
    F4,
    H3,
    H4,
}

impl CoxeterType {
    pub fn order(self) -> u64 {
        let fact = |n: usize| (1..=n as u64).product::<u64>();
        match self {
            CoxeterType::A(n) => fact(n + 1),
            CoxeterType::B(n) => (1u64 << n) * fact(n),
            CoxeterType::D(n) => (1u64 << (n - 1)) * fact(n),
            CoxeterType::I2(m) => 2 * m,
            CoxeterType::E(6) => 51_840,
            CoxeterType::E(7) => 2_903_040,
            CoxeterType::E(_) => 696_729_600,
            CoxeterType::F4 => 1152,
            CoxeterType::H3 => 120,
            CoxeterType::H4 => 14_400,
        }
    }
}

const ANGLE_TOL: f64 = 1e-7;

/// `m` with angle `π/m`; right angles give 2.
fn coxeter_label(l: EdgeLabel) -> Result<u64, CoxeterError> {
    match l {
        EdgeLabel::RightAngle => Ok(2),
        EdgeLabel::Angle(a) => {
            let m = (PI / a).round();
            if m < 2.0 || (PI / m - a).abs() > ANGLE_TOL {
                Err(CoxeterError::NotCoxeter(a))
            } else {
                Ok(m as u64)
            }
        }
        _ => Err(CoxeterError::NotElliptic(format!("{l:?}"))),
    }
}

fn classify_component(d: &CoxeterDiagram, comp: &[usize]) -> Result<CoxeterType, CoxeterError> {
    let n = comp.len();
    let bad = || {
        CoxeterError::NotElliptic(
            comp.iter()
                .map(|&i| d.nodes[i].as_str())
                .collect::<Vec<_>>()
                .join(","),
        )
    };
    let mut adj: Vec<Vec<(usize, u64)>> = vec![Vec::new(); n];
    let mut edges = 0;
    let mut big = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let m = coxeter_label(d.labels[comp[a]][comp[b]])?;
            if m > 2 {
                adj[a].push((b, m));
                adj[b].push((a, m));
                edges += 1;
                if m > 3 {
                    big.push(m);
                }
            }
        }
    }
    if n == 1 {
        return Ok(CoxeterType::A(1));
    }
    if n == 2 {
        return Ok(CoxeterType::I2(adj[0].first().map_or(2, |&(_, m)| m)));
    }
    if edges != n - 1 {
        return Err(bad());
    }
    let degrees: Vec<usize> = adj.iter().map(Vec::len).collect();
    let branch: Vec<usize> = (0..n).filter(|&i| degrees[i] >= 3).collect();
    if degrees.iter().any(|&k| k > 3) || branch.len() > 1 {
        return Err(bad());
    }
    if let Some(&c) = branch.first() {
        if !big.is_empty() {
            return Err(bad());
        }
        let mut arms: Vec<usize> = adj[c]
            .iter()
            .map(|&(s, _)| arm_length(&adj, c, s))
            .collect();
        arms.sort_unstable();
        return match arms.as_slice() {
            [1, 1, _] => Ok(CoxeterType::D(n)),
            [1, 2, 2] | [1, 2, 3] | [1, 2, 4] => Ok(CoxeterType::E(n)),
            _ => Err(bad()),
        };
    }
    // A path: labels read from one end.
    let start = (0..n).find(|&i| degrees[i] == 1).ok_or_else(bad)?;
    let mut labels = Vec::with_capacity(n - 1);
    let (mut prev, mut cur) = (usize::MAX, start);
    while let Some(&(next, m)) = adj[cur].iter().find(|&&(x, _)| x != prev) {
        labels.push(m);
        prev = cur;
        cur = next;
    }
    if labels.iter().all(|&m| m == 3) {
        return Ok(CoxeterType::A(n));
    }
    if big.len() != 1 {
        return Err(bad());
    }
    let pos = labels.iter().position(|&m| m > 3).expect("one large label");
    let end = pos == 0 || pos == labels.len() - 1;
    match (big[0], n, end) {
        (4, _, true) => Ok(CoxeterType::B(n)),
        (4, 4, false) => Ok(CoxeterType::F4),
        (5, 3, true) => Ok(CoxeterType::H3),
        (5, 4, true) => Ok(CoxeterType::H4),
        _ => Err(bad()),
    }
}

fn arm_length(adj: &[Vec<(usize, u64)>], from: usize, start: usize) -> usize {
    let (mut prev, mut cur, mut len) = (from, start, 1);
    while let Some(&(next, _)) = adj[cur].iter().find(|&&(x, _)| x != prev) {
        prev = cur;
        cur = next;
        len += 1;
    }
    len
}

/// Order of the finite Coxeter group with diagram `d`.
pub fn coxeter_group_order(d: &CoxeterDiagram) -> Result<u64, CoxeterError> {
    let n = d.len();
    let mut m = vec![vec![2u64; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                m[i][j] = coxeter_label(d.labels[i][j])?;
            }
        }
    }
    let nodes: Vec<usize> = (0..n).collect();
    let mut order = 1u64;
    for comp in super::components(&nodes, |i, j| m[i][j] > 2) {
        order = order
            .checked_mul(classify_component(d, &comp)?.order())
            .ok_or_else(|| CoxeterError::NotElliptic("order overflow".to_string()))?;
    }
    Ok(order)
}

/// Order of the stabiliser of the stratum cut out by `subset`; 1 for the empty set.
pub fn subset_group_order(d: &CoxeterDiagram, subset: &[usize]) -> Result<u64, CoxeterError> {
    coxeter_group_order(&d.restrict(subset))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diagram(n: usize, edges: &[(usize, usize, u64)]) -> CoxeterDiagram {
        let mut labels = vec![vec![EdgeLabel::RightAngle; n]; n];
        for &(a, b, m) in edges {
            labels[a][b] = EdgeLabel::Angle(PI / m as f64);
            labels[b][a] = labels[a][b];
        }
        CoxeterDiagram {
            nodes: (0..n).map(|i| i.to_string()).collect(),
            alpha: vec![vec![0.0; n]; n],
            labels,
        }
    }

    #[test]
    fn small_groups() {
        assert_eq!(coxeter_group_order(&diagram(2, &[(0, 1, 3)])).unwrap(), 6);
        assert_eq!(coxeter_group_order(&diagram(3, &[])).unwrap(), 8);
        assert_eq!(coxeter_group_order(&diagram(4, &[(0, 1, 3)])).unwrap(), 24);
        assert_eq!(coxeter_group_order(&diagram(0, &[])).unwrap(), 1);
    }

    #[test]
    fn exceptional_and_classical() {
        let path = |n: usize, ms: &[u64]| {
            diagram(
                n,
                &ms.iter()
                    .enumerate()
                    .map(|(i, &m)| (i, i + 1, m))
                    .collect::<Vec<_>>(),
            )
        };
        assert_eq!(coxeter_group_order(&path(3, &[3, 3])).unwrap(), 24);
        assert_eq!(coxeter_group_order(&path(3, &[4, 3])).unwrap(), 48);
        assert_eq!(coxeter_group_order(&path(3, &[5, 3])).unwrap(), 120);
        assert_eq!(coxeter_group_order(&path(4, &[3, 3, 5])).unwrap(), 14_400);
        assert_eq!(coxeter_group_order(&path(4, &[3, 4, 3])).unwrap(), 1152);
        let d4 = diagram(4, &[(0, 1, 3), (0, 2, 3), (0, 3, 3)]);
        assert_eq!(coxeter_group_order(&d4).unwrap(), 192);
        let e6 = diagram(6, &[(0, 1, 3), (1, 2, 3), (2, 3, 3), (3, 4, 3), (2, 5, 3)]);
        assert_eq!(coxeter_group_order(&e6).unwrap(), 51_840);
    }

    #[test]
    fn rejects_affine_and_non_coxeter() {
        let tri = diagram(3, &[(0, 1, 3), (1, 2, 3), (0, 2, 3)]);
        assert!(coxeter_group_order(&tri).is_err());
        let mut d = diagram(2, &[]);
        d.labels[0][1] = EdgeLabel::Angle(1.0);
        d.labels[1][0] = EdgeLabel::Angle(1.0);
        assert!(matches!(
            coxeter_group_order(&d),
            Err(CoxeterError::NotCoxeter(_))
        ));
        d.labels[0][1] = EdgeLabel::Thick;
        d.labels[1][0] = EdgeLabel::Thick;
        assert!(coxeter_group_order(&d).is_err());
        let b_bad = diagram(4, &[(0, 1, 3), (1, 2, 5), (2, 3, 3)]);
        assert!(coxeter_group_order(&b_bad).is_err());
    }
}
