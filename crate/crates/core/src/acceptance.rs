//! The acceptance checks, shared by `check-paper` and the integration suite.

use std::f64::consts::PI;

use num::{BigRational, Rational64};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::arith::hilbert::candidate_primes;
use crate::arith::{
    commensurability_class, hilbert_symbol, span_input_of, MultiQuad, Place, QuadraticFormInvariant,
};
use crate::assembly::{
    complex_euler_char, cusp_cycles, cycle_classes, face_cycles, fixed_cells, m_complex, n_complex,
    n_iota, stratum_surfaces, w_complex, StratumSurface,
};
use crate::coxeter::{enumerate_strata, StrataMode};
use crate::family::{
    angle_eta, angle_phi, angle_theta, eta_of_square, p_polytope, phi_of_square, q_polytope, t1,
    tbar, FamilyTime, Regime, T2,
};
use crate::volume::{
    closed_form_volume, coxeter_integral, manifold_volume_formula, orbifold_euler_char,
    poincare_volume, schlafli_volume_curve, spherical_regular_tet_volume,
};

/// One line of the report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub title: String,
    pub passed: bool,
    /// Expected to fail; excluded from the overall verdict.
    pub known_deviation: bool,
    pub detail: String,
}

impl Check {
    pub fn line(&self) -> String {
        let status = match (self.passed, self.known_deviation) {
            (true, _) => "PASS",
            (false, false) => "FAIL",
            (false, true) => "FAIL (known deviation)",
        };
        format!("[{status}] {} {}: {}", self.id, self.title, self.detail)
    }
}

/// True when every check outside the known deviations passed.
pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed || c.known_deviation)
}

type Outcome = Result<String, String>;

struct Item {
    id: &'static str,
    title: &'static str,
    known_deviation: bool,
    run: fn() -> Outcome,
}

const ITEMS: &[Item] = &[
    Item {
        id: "1",
        title: "f-vectors",
        known_deviation: false,
        run: f_vectors,
    },
    Item {
        id: "2",
        title: "angles",
        known_deviation: false,
        run: angles,
    },
    Item {
        id: "3",
        title: "volumes",
        known_deviation: false,
        run: volumes,
    },
    Item {
        id: "3b",
        title: "volume below 1e-4 at t = 1e-3",
        known_deviation: true,
        run: tiny_volume,
    },
    Item {
        id: "4",
        title: "Coxeter integral",
        known_deviation: false,
        run: integrals,
    },
    Item {
        id: "5",
        title: "Euler characteristics",
        known_deviation: false,
        run: euler,
    },
    Item {
        id: "6",
        title: "assembly",
        known_deviation: false,
        run: assembly,
    },
    Item {
        id: "7",
        title: "commensurability",
        known_deviation: false,
        run: commensurability,
    },
    Item {
        id: "8",
        title: "manifold volume identity",
        known_deviation: false,
        run: manifold_identity,
    },
];

pub fn item_ids() -> Vec<&'static str> {
    ITEMS.iter().map(|i| i.id).collect()
}

/// Runs the checks whose id or title starts with `filter` (all when `None`).
pub fn run_checks(filter: Option<&str>) -> Vec<Check> {
    let selected = |i: &Item| match filter {
        None => true,
        Some(f) => {
            let f = f.to_lowercase();
            i.id == f
                || i.id.trim_end_matches(char::is_alphabetic) == f
                || i.title.to_lowercase().starts_with(&f)
        }
    };
    ITEMS
        .iter()
        .filter(|i| selected(i))
        .map(|i| {
            let (passed, detail) = match (i.run)() {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            Check {
                id: i.id.into(),
                title: i.title.into(),
                passed,
                known_deviation: i.known_deviation,
                detail,
            }
        })
        .collect()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(what: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    ensure((got - want).abs() <= tol, || {
        format!("{what}: got {got}, want {want} (tol {tol})")
    })
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn f_vectors() -> Outcome {
    let cases: [(f64, [usize; 4], bool); 9] = [
        (0.95, [24, 108, 144, 60], true),
        (0.85, [24, 108, 144, 60], true),
        (t1(), [24, 100, 120, 44], true),
        (0.75, [24, 100, 128, 52], true),
        (0.72, [24, 100, 128, 52], true),
        (T2, [22, 92, 116, 46], true),
        (0.65, [22, 92, 116, 46], true),
        (0.4, [22, 92, 116, 46], false),
        (0.1, [22, 92, 116, 46], false),
    ];
    for (t, want, both) in cases {
        let time = FamilyTime::new(t).map_err(err)?;
        let mode = if both {
            StrataMode::Both
        } else {
            StrataMode::Geometric
        };
        let s = enumerate_strata(&p_polytope::<f64>(&time).map_err(err)?, mode).map_err(err)?;
        ensure(s.f_vector() == want, || {
            format!("t = {t}: {:?}", s.f_vector())
        })?;
    }
    let exact = enumerate_strata(
        &p_polytope::<MultiQuad>(&FamilyTime::t1()).map_err(err)?,
        StrataMode::Both,
    )
    .map_err(err)?;
    ensure(exact.f_vector() == [24, 100, 120, 44], || {
        format!("exact t1: {:?}", exact.f_vector())
    })?;
    Ok("four regimes match, backends agree on [tbar, 1]".into())
}

fn angles() -> Outcome {
    let tol = 1e-10;
    close("theta(t1)", angle_theta(t1()).map_err(err)?, PI / 3.0, tol)?;
    close(
        "theta(tbar)",
        angle_theta(tbar()).map_err(err)?,
        PI / 2.0,
        tol,
    )?;
    close(
        "cos theta(t2)",
        angle_theta(T2).map_err(err)?.cos(),
        1.0 / 3.0,
        tol,
    )?;
    close("phi(1)", angle_phi(1.0).map_err(err)?, PI / 2.0, tol)?;
    close("phi(t1)", phi_of_square(0.6), 0.0, tol)?;
    let approach: Vec<f64> = [1e-2, 1e-4, 1e-6, 1e-8]
        .iter()
        .map(|d| angle_phi(t1() + d))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    ensure(approach.windows(2).all(|w| w[1] < w[0]), || {
        format!("phi does not decrease towards t1: {approach:?}")
    })?;
    close(
        "eta(0+)",
        angle_eta(1e-6).map_err(err)?,
        (-1.0f64 / 3.0).acos(),
        tol,
    )?;
    close("eta(0)", eta_of_square(0.0), (-1.0f64 / 3.0).acos(), tol)?;
    Ok("all six within 1e-10".into())
}

fn interior(a: f64, b: f64, n: usize) -> Vec<f64> {
    (1..=n)
        .map(|i| a + (b - a) * i as f64 / (n + 1) as f64)
        .collect()
}

fn volumes() -> Outcome {
    let c = 4.0 * PI * PI / 3.0;
    close("Vol(1)", closed_form_volume(1.0).map_err(err)?, c, 1e-12)?;
    close("Vol(t1)", closed_form_volume(t1()).map_err(err)?, c, 1e-12)?;
    close(
        "Vol(tbar)",
        closed_form_volume(tbar()).map_err(err)?,
        5.0 * PI * PI / 6.0,
        1e-10,
    )?;

    let mut samples = Vec::new();
    for r in [Regime::High, Regime::Middle, Regime::Low] {
        let (a, b) = r.span().expect("open regime");
        samples.extend(interior(a, b, 100));
    }
    let curve = schlafli_volume_curve(&samples).map_err(err)?;
    let mut worst = 0.0f64;
    for p in &curve.points {
        worst = worst.max((p.vol - closed_form_volume(p.t).map_err(err)?).abs());
    }
    ensure(worst <= 1e-6, || format!("Schläfli deviation {worst:e}"))?;

    for t in [1.0, 0.95, 0.9, t1(), 0.75, T2, 0.65, tbar(), 0.4, 0.1] {
        let p = p_polytope::<f64>(&FamilyTime::new(t).map_err(err)?).map_err(err)?;
        let s = enumerate_strata(&p, StrataMode::Geometric).map_err(err)?;
        close(
            &format!("Poincaré at t = {t}"),
            poincare_volume(&p, &s).map_err(err)?,
            closed_form_volume(t).map_err(err)?,
            1e-6,
        )?;
    }

    let small: Vec<f64> = [1e-1, 1e-2, 1e-3, 1e-4]
        .iter()
        .map(|&t| closed_form_volume(t))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    ensure(
        small.windows(2).all(|w| w[1] < w[0]) && small[3] < 2e-3,
        || format!("no decay to 0: {small:?}"),
    )?;
    Ok(format!("closed forms exact, Schläfli max deviation {worst:.1e} over 300 samples, Poincaré at 10 times, Vol -> 0"))
}

fn tiny_volume() -> Outcome {
    let v = closed_form_volume(1e-3).map_err(err)?;
    ensure(v < 1e-4, || {
        format!("Vol(1e-3) = {v:.6}; the volume is linear near 0 (about 13.93 t)")
    })?;
    Ok(format!("Vol(1e-3) = {v:e}"))
}

fn integrals() -> Outcome {
    close("Coxeter integral", coxeter_integral(), PI * PI / 3.0, 1e-8)?;
    close(
        "V(pi)",
        spherical_regular_tet_volume(PI).map_err(err)?,
        PI * PI,
        1e-6,
    )?;
    Ok("integral = pi^2/3, V(pi) = pi^2".into())
}

fn euler() -> Outcome {
    let chi_p = |t: FamilyTime| -> Result<Rational64, String> {
        let p = p_polytope::<MultiQuad>(&t).map_err(err)?;
        let s = enumerate_strata(&p, StrataMode::Diagram).map_err(err)?;
        orbifold_euler_char(&p, &s).map_err(err)
    };
    let q = |n, d| Rational64::new(n, d);
    for (name, t, want) in [
        ("P_1", FamilyTime::one(), q(1, 1)),
        ("P_t1", FamilyTime::t1(), q(1, 1)),
        ("P_tbar", FamilyTime::tbar(), q(5, 8)),
    ] {
        let chi = chi_p(t.clone()).map_err(err)?;
        ensure(chi == want, || format!("chi({name}) = {chi}"))?;
        let c = 4.0 * PI * PI / 3.0 * (*chi.numer() as f64 / *chi.denom() as f64);
        close(
            &format!("Gauss-Bonnet {name}"),
            c,
            closed_form_volume(t.t).map_err(err)?,
            1e-9,
        )?;
    }
    let cases = [
        ("W_1", w_complex(&FamilyTime::one()), q(8, 1)),
        ("W_tbar", w_complex(&FamilyTime::tbar()), q(5, 1)),
        ("N_1", n_complex(&FamilyTime::one()), q(4, 1)),
    ];
    for (name, c, want) in cases {
        let chi = complex_euler_char(&c.map_err(err)?).map_err(err)?;
        ensure(chi == want, || format!("chi({name}) = {chi}"))?;
    }
    Ok("P: 1, 1, 5/8; W_1 = 8, W_tbar = 5, N_1 = 4".into())
}

fn angle_multiset(s: &StratumSurface) -> Vec<f64> {
    let mut a: Vec<f64> = s.cone_points.iter().map(|c| c.angle).collect();
    a.sort_by(f64::total_cmp);
    a
}

fn surfaces_match(got: &[StratumSurface], want: &[(i64, usize, f64, usize)]) -> Result<(), String> {
    for &(chi, points, angle, count) in want {
        let n = got
            .iter()
            .filter(|s| {
                s.euler_char == chi
                    && s.cone_points.len() == points
                    && angle_multiset(s).iter().all(|a| (a - angle).abs() < 1e-9)
            })
            .count();
        ensure(n == count, || {
            format!("{n} surfaces with chi {chi} and {points} cone points of {angle}, want {count}")
        })?;
    }
    let total: usize = want.iter().map(|w| w.3).sum();
    ensure(got.len() == total, || {
        format!("{} surfaces, want {total}", got.len())
    })
}

fn assembly() -> Outcome {
    let t = 0.9;
    let time = FamilyTime::new(t).map_err(err)?;
    let (th, ph) = (angle_theta(t).map_err(err)?, angle_phi(t).map_err(err)?);

    let w = w_complex(&time).map_err(err)?;
    let wc = cycle_classes(&w, &face_cycles(&w).map_err(err)?);
    let class = |cs: &[crate::assembly::CycleClass], angle: f64| {
        cs.iter().find(|c| (c.angle - angle).abs() < 1e-9).cloned()
    };
    let red = class(&wc, 2.0 * th).ok_or("W: no 2θ cycles")?;
    let green = class(&wc, 4.0 * ph).ok_or("W: no 4φ cycles")?;
    ensure(red.base_faces == 12 && green.base_faces == 8, || {
        format!(
            "W: {} faces at 2θ, {} at 4φ",
            red.base_faces, green.base_faces
        )
    })?;
    ensure(
        wc.iter().all(|c| {
            c.angle == red.angle || c.angle == green.angle || (c.angle - 2.0 * PI).abs() < 1e-9
        }),
        || "W: stray cone angle".into(),
    )?;
    surfaces_match(
        &stratum_surfaces(&w).map_err(err)?,
        &[(0, 2, 4.0 * ph, 12), (2, 3, 2.0 * th, 8)],
    )
    .map_err(|e| format!("W: {e}"))?;

    let n = n_complex(&time).map_err(err)?;
    let nc = cycle_classes(&n, &face_cycles(&n).map_err(err)?);
    ensure(
        class(&nc, 6.0 * th).is_some() && class(&nc, 4.0 * ph).is_some(),
        || "N: missing 6θ or 4φ".into(),
    )?;
    surfaces_match(
        &stratum_surfaces(&n).map_err(err)?,
        &[(0, 2, 4.0 * ph, 2), (0, 4, 6.0 * th, 1)],
    )
    .map_err(|e| format!("N: {e}"))?;
    let cusps = cusp_cycles(&n).map_err(err)?;
    ensure(
        cusps.len() == 2
            && cusps
                .iter()
                .all(|c| c.length == 6 && c.monodromy == Some(1)),
        || {
            format!(
                "N cusps: {:?}",
                cusps
                    .iter()
                    .map(|c| (c.length, c.monodromy))
                    .collect::<Vec<_>>()
            )
        },
    )?;

    let fixed = fixed_cells(&n, &n_iota()).map_err(err)?;
    ensure(fixed.is_empty(), || {
        format!("iota fixes {} cells", fixed.len())
    })?;
    let m = m_complex(&time).map_err(err)?;
    let ms = stratum_surfaces(&m).map_err(err)?;
    let (alpha, beta) = (6.0 * th, 4.0 * ph);
    let find = |orientable: bool| ms.iter().find(|s| s.orientable == orientable);
    let o = find(true).ok_or("M: no orientable surface")?;
    let k = find(false).ok_or("M: no non-orientable surface")?;
    ensure(ms.len() == 2, || format!("M: {} surfaces", ms.len()))?;
    close("M orientable area", o.area, 4.0 * PI - 2.0 * beta, 1e-9)?;
    close(
        "M non-orientable area",
        k.area,
        4.0 * PI - 2.0 * alpha,
        1e-9,
    )?;
    Ok("W: 2θ on 12 faces, 4φ on 8; N: 6θ, 4φ, 2 cusps of length 6 with sign +1; M: free quotient, areas match".into())
}

fn invariant_of(
    t: FamilyTime,
) -> Result<(QuadraticFormInvariant, crate::arith::RationalQuadraticForm), String> {
    let input = span_input_of(&q_polytope::<MultiQuad>(&t).map_err(err)?).map_err(err)?;
    let r = commensurability_class(&input, None).map_err(err)?;
    Ok((r.invariant, r.form))
}

fn commensurability() -> Outcome {
    let (one, _) = invariant_of(FamilyTime::one())?;
    let (bar, _) = invariant_of(FamilyTime::tbar())?;
    let (t1q, t1_form) = invariant_of(FamilyTime::t1())?;
    ensure(one.hasse.to_string() == "{}", || {
        format!("Q_1: {}", one.hasse)
    })?;
    ensure(bar.hasse.to_string() == "{}", || {
        format!("Q_tbar: {}", bar.hasse)
    })?;
    ensure(t1q.hasse.to_string() == "{2,5}", || {
        format!("Q_t1: {}", t1q.hasse)
    })?;
    ensure(
        one.commensurable_with(&bar) && !one.commensurable_with(&t1q),
        || "pairwise verdicts".into(),
    )?;

    let mut rng = StdRng::seed_from_u64(0x4b53);
    let nonzero = |rng: &mut StdRng| loop {
        let x: i64 = rng.gen_range(-2000..=2000);
        if x != 0 {
            return BigRational::from_integer(x.into());
        }
    };
    for _ in 0..500 {
        let (a, b) = (nonzero(&mut rng), nonzero(&mut rng));
        let mut prod = hilbert_symbol(&a, &b, Place::Infinity).map_err(err)?;
        for p in candidate_primes(&a, &b).map_err(err)? {
            prod *= hilbert_symbol(&a, &b, Place::Prime(p)).map_err(err)?;
        }
        ensure(prod == 1, || {
            format!("product formula fails for ({a}, {b})")
        })?;
    }

    let mut changes = 0;
    while changes < 100 {
        let m: Vec<Vec<BigRational>> = (0..5)
            .map(|_| {
                (0..5)
                    .map(|_| BigRational::from_integer(rng.gen_range(-3i64..=3).into()))
                    .collect()
            })
            .collect();
        if crate::arith::form::determinant(&m) == BigRational::from_integer(0.into()) {
            continue;
        }
        changes += 1;
        let inv = QuadraticFormInvariant::of_form(&t1_form.congruent(&m)).map_err(err)?;
        ensure(
            inv.hasse == t1q.hasse
                && inv.witt == t1q.witt
                && inv.determinant_class == t1q.determinant_class,
            || format!("basis change moved the invariant to {}", inv.hasse),
        )?;
    }
    Ok("Q_1: {}, Q_t1: {2,5}, Q_tbar: {}; 500 product-formula pairs; 100 basis changes".into())
}

fn manifold_identity() -> Outcome {
    let mut worst = 0.0f64;
    for t in interior(t1(), 1.0, 50).into_iter().chain([t1(), 1.0]) {
        let (th, ph) = (angle_theta(t).map_err(err)?, angle_phi(t).map_err(err)?);
        let d = (2.0 * closed_form_volume(t).map_err(err)?
            - manifold_volume_formula(6.0 * th, 4.0 * ph).map_err(err)?)
        .abs();
        worst = worst.max(d);
    }
    ensure(worst <= 1e-9, || format!("max deviation {worst:e}"))?;
    Ok(format!("max deviation {worst:.1e} on 52 points of [t1, 1]"))
}
