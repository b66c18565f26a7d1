//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use arclab::arcs::{completions_through, coverage, is_complete, Arc, SearchOrder};
use arclab::claims::{run_claim, ClaimId, RunOptions, Status};
use arclab::conic::{ConicContext, PointClass};
use arclab::curves::{build_segre_curve, intersection_multiplicity, weil_lower_count_fits};
use arclab::field::{make_field, odd_prime_powers, FieldElem, MAX_ORDER};
use arclab::plane::ProjPoint;

type Check = Result<String, String>;

fn ctx(q: u32) -> ConicContext {
    ConicContext::new(make_field(q as u64).unwrap())
}

fn h_free_off_conic(c: &ConicContext) -> Vec<ProjPoint> {
    let h = Arc::new(c.plane(), c.build_h().h).unwrap();
    coverage(&h)
        .free_points()
        .into_iter()
        .filter(|&p| !c.is_on_conic(p))
        .collect()
}

fn large() -> Vec<u32> {
    odd_prime_powers(17, 199)
}

fn oracle_equivalence() -> Check {
    let mut checked = 0u64;
    for q in odd_prime_powers(5, 61) {
        let c = ctx(q);
        let hs = c.build_h();
        for r in c.plane().points().filter(|&r| !c.is_on_conic(r)) {
            checked += 1;
            let proj = c.is_h_covered_projective(r).unwrap();
            let direct = c.is_h_covered_direct(&hs, r).unwrap();
            if proj != direct {
                return Err(format!("q={q} R={r}: projective {proj}, direct {direct}"));
            }
        }
    }
    Ok(format!("{checked} off-conic points, 0 mismatches"))
}

fn main_theorem() -> Check {
    for q in large() {
        let c = ctx(q);
        let mut pts = c.build_h().h;
        pts.push(c.choose_r0());
        let k = Arc::new(c.plane(), pts).map_err(|e| format!("q={q}: {e}"))?;
        if k.len() != (q as usize + 3) / 2 {
            return Err(format!("q={q}: size {}", k.len()));
        }
        if !is_complete(&k) {
            return Err(format!("q={q}: K is not complete"));
        }
    }
    Ok(format!("K complete of size (q+3)/2 for {} values of q", large().len()))
}

fn corollary() -> Check {
    for q in large() {
        let c = ctx(q);
        let f = c.field();
        let mut expected: BTreeSet<ProjPoint> = f
            .nonzero()
            .filter(|&m| f.is_nonzero_square(m) == (q % 4 == 3))
            .map(|m| c.plane().normalize([FieldElem::ONE, m, FieldElem::ZERO]).unwrap())
            .collect();
        if q % 4 == 3 {
            expected.insert(c.plane().point([0, 0, 1]).unwrap());
        }
        let free: BTreeSet<ProjPoint> = h_free_off_conic(&c).into_iter().collect();
        if free != expected {
            return Err(format!("q={q}: free set differs"));
        }
        let want = if q % 4 == 1 { (q - 1) / 2 } else { (q + 1) / 2 };
        if free.len() != want as usize {
            return Err(format!("q={q}: {} free points, expected {want}", free.len()));
        }
    }
    Ok("free sets and counts match for every q".into())
}

fn pellegrino() -> Check {
    for q in large() {
        let c = ctx(q);
        let plane = c.plane();
        let on_conic = |l| c.conic_points().iter().filter(|&&p| plane.incident(p, l)).count();
        let internal: Vec<ProjPoint> = h_free_off_conic(&c)
            .into_iter()
            .filter(|&p| c.classify_point(p) == PointClass::Internal)
            .collect();
        for (i, &a) in internal.iter().enumerate() {
            for &b in &internal[i + 1..] {
                if on_conic(plane.line_through(a, b).unwrap()) == 0 {
                    return Err(format!("q={q}: external line through {a} and {b}"));
                }
            }
        }
        if on_conic(plane.line([0, 0, 1]).unwrap()) != 2 {
            return Err(format!("q={q}: Z=0 is not a secant"));
        }
    }
    Ok("no external line carries two internal H-free points; Z=0 is a secant".into())
}

fn small_q() -> Check {
    let mut notes = Vec::new();
    for (q, adds, size) in [(9u32, 3usize, 8usize), (11, 2, 8), (13, 2, 9)] {
        let c = ctx(q);
        let h = Arc::new(c.plane(), c.build_h().h).unwrap();
        let seeds: Vec<ProjPoint> = h_free_off_conic(&c)
            .into_iter()
            .filter(|&p| c.classify_point(p) == PointClass::Internal)
            .collect();
        let done = completions_through(&h, &seeds, 4, SearchOrder::Forward);
        if done.min_additions() != Some(adds) || !done.by_size.contains_key(&size) {
            return Err(format!(
                "q={q}: min additions {:?}, sizes {:?}",
                done.min_additions(),
                done.sizes()
            ));
        }
        notes.push(format!("q={q}: +{adds}, sizes {:?}", done.sizes()));
    }
    Ok(notes.join("; "))
}

fn lemma_abc() -> Check {
    let mut checked = 0u64;
    for q in large() {
        let c = ctx(q);
        let hs = c.build_h();
        let f = c.field();
        for b in f.nonzero() {
            for cc in f.nonzero() {
                let r = c.plane().normalize([FieldElem::ONE, b, cc]).unwrap();
                if c.is_on_conic(r) {
                    continue;
                }
                checked += 1;
                if !c.is_h_covered_direct(&hs, r).unwrap() {
                    return Err(format!("q={q}: {r} is H-free"));
                }
            }
        }
    }
    let c7 = ctx(7);
    let witness = c7.plane().point([1, 1, 3]).unwrap();
    if c7.is_h_covered_direct(&c7.build_h(), witness).unwrap() {
        return Err("q=7: (1,1,3) is H-covered".into());
    }
    Ok(format!("{checked} points covered; q=7 witness (1,1,3) is H-free"))
}

fn curve_suite() -> Check {
    let mut qs = vec![7, 9, 11, 13];
    qs.extend(large());
    let opts = RunOptions { timing: false };
    for id in [ClaimId::CurveSegre, ClaimId::CurveQuartic] {
        let report = run_claim(id, &qs, opts).map_err(|e| e.to_string())?;
        if let Some(bad) = report.q_results.iter().find(|r| r.status != Status::Verified) {
            return Err(format!("{id} q={}: {}", bad.q, bad.witnesses));
        }
    }
    Ok(format!("both families verified at {} values of q", qs.len()))
}

fn contact_order() -> Check {
    let mut checked = 0;
    for q in odd_prime_powers(5, 31) {
        let c = ctx(q);
        let f = c.field();
        let plane = c.plane();
        let x_inf = plane.point([1, 0, 0]).unwrap();
        for a in f.nonzero() {
            for b in f.nonzero() {
                for cc in f.nonzero() {
                    if f.mul(a, b) == f.square(cc) {
                        continue;
                    }
                    for mu in f.nonzero().filter(|&m| !f.is_nonzero_square(m)) {
                        let e2 = f.div(cc, f.mul(mu, a)).unwrap();
                        let Some(e) = f.nonzero().find(|&e| f.square(e) == e2) else {
                            continue;
                        };
                        let poly = build_segre_curve(f, a, b, cc, mu).unwrap();
                        let v = plane.normalize([FieldElem::ZERO, e, FieldElem::ONE]).unwrap();
                        let m = intersection_multiplicity(plane, &poly, x_inf, v);
                        if m != Ok(4) {
                            return Err(format!("q={q} {:?}: {m:?}", [a, b, cc, mu]));
                        }
                        checked += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{checked} curves meet Y = eZ at (1,0,0) with multiplicity 4"))
}

fn weil_driver() -> Check {
    let qs = odd_prime_powers(3, MAX_ORDER);
    for &q in &qs {
        let q = q as u64;
        if weil_lower_count_fits(q) != (q <= 13) {
            return Err(format!("q={q}"));
        }
    }
    Ok(format!("holds exactly for q <= 13 among {} odd prime powers", qs.len()))
}

fn field_properties() -> Check {
    for q in odd_prime_powers(3, 199) {
        let f = make_field(q as u64).unwrap();
        let squares: BTreeSet<FieldElem> = f.nonzero().map(|x| f.square(x)).collect();
        let fourth: BTreeSet<FieldElem> = f.nonzero().map(|x| f.pow(x, 4)).collect();
        let g = if q % 4 == 1 { 4 } else { 2 };
        if squares.len() != (q as usize - 1) / 2 || fourth.len() != (q as usize - 1) / g {
            return Err(format!("q={q}: counts {} {}", squares.len(), fourth.len()));
        }
        if f.nonzero().any(|x| f.is_nonzero_square(x) != squares.contains(&x)) {
            return Err(format!("q={q}: square test disagrees with enumeration"));
        }
        let sums: BTreeSet<FieldElem> = squares
            .iter()
            .flat_map(|&s| squares.iter().map(move |&t| (s, t)))
            .map(|(s, t)| f.add(s, t))
            .collect();
        if let Some(x) = f.nonzero().find(|&x| !squares.contains(&x) && !sums.contains(&x)) {
            return Err(format!("q={q}: nonsquare {x} is not a sum of two nonzero squares"));
        }
    }
    Ok("square, fourth-power and two-square properties hold for q <= 199".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("oracle equivalence, 5 <= q <= 61", oracle_equivalence),
        ("K = H + R0 complete, 17 <= q <= 199", main_theorem),
        ("H-free set, 17 <= q <= 199", corollary),
        ("no external line with two internal H-free points", pellegrino),
        ("completions for q = 9, 11, 13", small_q),
        ("points with abc != 0 covered, 17 <= q <= 199", lemma_abc),
        ("curve families", curve_suite),
        ("order-4 contact at (1,0,0)", contact_order),
        ("2q - 6 <= q + 1 + 2 sqrt q iff q <= 13", weil_driver),
        ("field properties, q <= 199", field_properties),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(msg) => println!("[PASS] {:>2}. {name}: {msg} ({secs:.1}s)", i + 1),
            Err(msg) => {
                failed += 1;
                println!("[FAIL] {:>2}. {name}: {msg} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
