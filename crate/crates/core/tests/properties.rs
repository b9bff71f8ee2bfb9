//! Property tests for the branch kernels, jets, log-space numbers and cutoffs.

use annulus_core::angular::{smoothstep, CutoffFamily};
use annulus_core::branch::{principal_ln, principal_sqrt};
use annulus_core::{AngularProfile, Cplx, Jet2, LogComplex};
use proptest::prelude::*;

fn cplx() -> impl Strategy<Value = Cplx> {
    (-1e3..1e3f64, -1e3..1e3f64).prop_map(|(a, b)| Cplx::new(a, b))
}

fn small_jet() -> impl Strategy<Value = Jet2> {
    prop::array::uniform6((-3.0..3.0f64, -3.0..3.0f64)).prop_map(|c| {
        let z: Vec<Cplx> = c.iter().map(|&(a, b)| Cplx::new(a, b)).collect();
        Jet2 { v: z[0], r: z[1], p: z[2], rr: z[3], rp: z[4], pp: z[5] }
    })
}

fn close(a: Cplx, b: Cplx, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #[test]
    fn sqrt_squares_back_with_nonnegative_real_part(z in cplx()) {
        let s = principal_sqrt(z);
        prop_assert!(s.re >= 0.0);
        prop_assert!(close(s * s, z, 1e-13));
    }

    #[test]
    fn ln_inverts_exp_on_the_principal_strip(z in cplx()) {
        prop_assume!(z.norm() > 1e-6);
        let w = principal_ln(z).unwrap();
        prop_assert!(w.im > -std::f64::consts::PI && w.im <= std::f64::consts::PI);
        prop_assert!(close(w.exp(), z, 1e-12));
    }

    #[test]
    fn jet_ln_undoes_exp(j in small_jet()) {
        let back = j.exp().ln();
        // the value may move by 2 pi i; derivatives may not
        let dv = back.v - j.v;
        prop_assert!(dv.re.abs() < 1e-12);
        let turns = dv.im / std::f64::consts::TAU;
        prop_assert!((turns - turns.round()).abs() < 1e-12);
        for (a, b) in [(back.r, j.r), (back.p, j.p), (back.rr, j.rr), (back.rp, j.rp), (back.pp, j.pp)] {
            prop_assert!(close(a, b, 1e-11));
        }
    }

    #[test]
    fn jet_product_rule(a in small_jet(), b in small_jet()) {
        let p = a * b;
        prop_assert!(close(p.r, a.r * b.v + a.v * b.r, 1e-13));
        prop_assert!(close(p.rp, a.rp * b.v + a.r * b.p + a.p * b.r + a.v * b.rp, 1e-13));
    }

    #[test]
    fn log_space_product_matches_linear(x in cplx(), y in cplx()) {
        prop_assume!(x.norm() > 1e-3 && y.norm() > 1e-3);
        let lx = LogComplex::from_complex(x).unwrap();
        let ly = LogComplex::from_complex(y).unwrap();
        prop_assert!(close((lx * ly).to_complex(), x * y, 1e-12));
        prop_assert!(close((lx / ly).to_complex(), x / y, 1e-12));
    }

    #[test]
    fn log_space_survives_huge_exponents(re in -1e6..1e6f64, im in -1e3..1e3f64) {
        let z = LogComplex::exp(Cplx::new(re, im));
        let w = z * z.recip();
        prop_assert!(w.logmod.abs() < 1e-9);
        prop_assert!(z.logmod.is_finite());
    }

    #[test]
    fn smoothstep_is_monotone_and_bounded(s in 0.0..1.0f64, ds in 0.0..0.1f64) {
        let (a, da, _) = smoothstep(s);
        let (b, _, _) = smoothstep((s + ds).min(1.0));
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(b >= a && da >= 0.0);
    }

    #[test]
    fn complementary_cutoffs_sum_to_one(rho in 100.0..1e5f64, t in 0.0..6.0f64) {
        let r = rho + t * rho.sqrt();
        for fam in [CutoffFamily::<f64>::step1(rho).unwrap(), CutoffFamily::<f64>::step4(rho).unwrap()] {
            let sum = fam.psi(1).value(r) + fam.psi(2).value(r);
            prop_assert!((sum - 1.0).abs() <= 4.0 * f64::EPSILON);
            for m in &fam.members {
                let v = m.value(r);
                prop_assert!((0.0..=1.0).contains(&v));
            }
        }
    }

    #[test]
    fn profile_phase_is_periodic_and_bounded(n in 200u64..5000, frac in 0.05..0.45f64, x in 0.0..7.0f64) {
        let k = ((n as f64) * frac).max(1.0) as u64;
        let p = AngularProfile::new(n, k).unwrap();
        let kt = k as f64 * p.period;
        let phi = x * p.period;
        prop_assert!((p.phase(phi + 3.0 * p.period) - p.phase(phi)).abs() <= 1e-9 * kt);
        prop_assert!(p.phase(phi).abs() <= 5.0 * kt);
        prop_assert!(p.f(phi) >= -4.0 * k as f64 - 1e-9 && p.f(phi) <= 5.0 * k as f64 + 1e-9);
    }
}
