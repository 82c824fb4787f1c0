use std::path::PathBuf;

use serde::Serialize;
use serde_json::{json, Value};
use sicwig::correlations::{verify_properties_abc, Configuration, PropertyCheck};
use sicwig::numerics::{ComplexMatrix, C64};
use sicwig::pauli::{bell_state, DensityOperator, Label};
use sicwig::qkd::{capability_report, run_session, tomographic_check, SessionParams};
use sicwig::sic::Parity;
use sicwig::sim::{estimate, joint_table, sample_counts, werner};
use sicwig::wigner::{
    displacement_orbits, enumerate_quartit_wigner_sets, enumerate_qubit_wigner_sets, fidelity, find_striations,
    QuartitPhasePointSet,
};

use crate::output::{complex_rows, count_rows, document, meta, real_rows, table_rows, write_csv, write_json};
use crate::{Failure, Format, QkdArgs, TomoArgs};

pub struct Context {
    pub out_dir: PathBuf,
    pub format: Format,
}

impl Context {
    fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }
}

/// Resolved command configuration, recorded in every output.
#[derive(Serialize)]
struct Resolved<'a, T: Serialize> {
    format: Format,
    #[serde(flatten)]
    args: &'a T,
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

pub fn parse_state(arg: &str) -> Result<DensityOperator, Failure> {
    let named = |i, j| Ok(bell_state(Label::new(i, j).expect("bits")));
    match arg {
        "psi-minus" | "singlet" => named(0, 0),
        "psi-plus" => named(0, 1),
        "phi-minus" => named(1, 0),
        "phi-plus" => named(1, 1),
        _ => {
            if let Some(v) = arg.strip_prefix("werner:") {
                let v: f64 = v.parse().map_err(|_| usage(format!("bad visibility in '{arg}'")))?;
                werner(v).map_err(usage)
            } else if let Some(path) = arg.strip_prefix("file:") {
                let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{path}: {e}")))?;
                let rows: Vec<Vec<[f64; 2]>> =
                    serde_json::from_str(&text).map_err(|e| usage(format!("{path}: expected 4x4 [re, im] rows: {e}")))?;
                if rows.len() != 4 || rows.iter().any(|r| r.len() != 4) {
                    return Err(usage(format!("{path}: expected a 4x4 matrix")));
                }
                let entries: Vec<C64> = rows.iter().flatten().map(|z| C64::new(z[0], z[1])).collect();
                let m = ComplexMatrix::from_row_major(4, &entries).map_err(usage)?;
                let rho = DensityOperator::new(m).map_err(usage)?;
                if !rho.is_physical(sicwig::sim::PHYSICAL_TOL) {
                    return Err(usage(format!("{path}: state has a negative eigenvalue {}", rho.min_eigenvalue())));
                }
                Ok(rho)
            } else {
                Err(usage(format!(
                    "unknown state '{arg}' (psi-minus, psi-plus, phi-minus, phi-plus, werner:V, file:PATH)"
                )))
            }
        }
    }
}

fn config_name(c: Configuration) -> &'static str {
    c.name()
}

pub fn tomo(ctx: &Context, args: &TomoArgs) -> Result<String, Failure> {
    if args.shots == 0 {
        return Err(usage("--shots must be at least 1"));
    }
    let config: Configuration = args.config.into();
    let (pa, pb) = config.parities();
    let target = parse_state(&args.state)?;
    let prepared = match args.noise {
        Some(v) => {
            if !(0.0..=1.0).contains(&v) {
                return Err(usage(format!("--noise {v} outside [0, 1]")));
            }
            target.mix(&DensityOperator::maximally_mixed(4).map_err(usage)?, v).map_err(usage)?
        }
        None => target,
    };
    let table = joint_table(&prepared, pa, pb).map_err(usage)?;
    let counts = sample_counts(&table, args.shots, args.seed).map_err(usage)?;
    let est = estimate(&counts, pa, pb).map_err(usage)?;
    let w_theory = QuartitPhasePointSet::canonical(pa, pb)
        .coefficients(&target)
        .map_err(usage)?;
    let f = fidelity(&est.w_hat, &w_theory).map_err(usage)?;

    let m = meta("tomo", Some(args.seed));
    let inputs = Resolved { format: ctx.format, args };
    let inputs_value = serde_json::to_value(&inputs).expect("json");
    let mut written = Vec::new();
    match ctx.format {
        Format::Json => {
            let results = json!({
                "configuration": config_name(config),
                "shots": counts.shots,
                "joint_probabilities": real_rows(table.probabilities()),
                "joint_counts": count_rows(&counts.counts),
                "W_hat": real_rows(&est.w_hat.values),
                "W_theory": real_rows(&w_theory.values),
                "fidelity": f,
                "min_eigenvalue": est.min_eigenvalue,
                "rho_hat": complex_rows(&est.rho_hat),
            });
            written.push(write_json(&ctx.path("tomo.json"), &document(m, &inputs, results))?);
        }
        Format::Csv => {
            let header = "k,l,value";
            written.push(write_csv(&ctx.path("tomo_joint_counts.csv"), &m, &inputs_value, header, &table_rows(&counts.counts))?);
            written.push(write_csv(&ctx.path("tomo_W_hat.csv"), &m, &inputs_value, header, &table_rows(&est.w_hat.values))?);
            written.push(write_csv(&ctx.path("tomo_W_theory.csv"), &m, &inputs_value, header, &table_rows(&w_theory.values))?);
            let summary = vec![format!("fidelity,{f}"), format!("min_eigenvalue,{}", est.min_eigenvalue)];
            written.push(write_csv(&ctx.path("tomo_summary.csv"), &m, &inputs_value, "quantity,value", &summary)?);
        }
    }
    Ok(format!(
        "tomo {} {}: fidelity {:.6}, min eigenvalue {:.6} -> {}",
        args.state,
        config_name(config),
        f,
        est.min_eigenvalue,
        list(&written)
    ))
}

fn list(paths: &[PathBuf]) -> String {
    paths.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join(", ")
}

fn check_json(c: &PropertyCheck) -> Value {
    json!({
        "holds": c.holds,
        "considered": c.considered,
        "physical": c.physical,
        "violations": c.violations,
    })
}

pub fn scan_correlations(ctx: &Context) -> Result<String, Failure> {
    let report = verify_properties_abc();
    let summary = format!(
        "A:{}/B:{}/C:{}",
        report.property_a.physical, report.property_b.physical, report.property_c.physical
    );
    let m = meta("scan-correlations", None);
    let inputs = json!({ "format": ctx.format });
    let path = match ctx.format {
        Format::Json => {
            let results = json!({
                "summary": summary,
                "all_hold": report.all_hold(),
                "property_a": check_json(&report.property_a),
                "property_b": check_json(&report.property_b),
                "property_c": check_json(&report.property_c),
                "ta_even_relabeling": check_json(&report.ta_even_relabeling),
                "ta_odd_relabeling": check_json(&report.ta_odd_relabeling),
                "physical_total": report.physical_total,
                "nonphysical_total": report.nonphysical_total,
                "boundary_total": report.boundary_total,
                "nonphysical_min_eigenvalues": report.nonphysical_min_eigenvalues,
                "candidates": report.candidates,
            });
            write_json(&ctx.path("correlations.json"), &document(m, &inputs, results))?
        }
        Format::Csv => {
            let rows: Vec<String> = report
                .candidates
                .iter()
                .map(|r| {
                    let perm: Vec<String> = r.permutation.iter().map(|l| l.to_string()).collect();
                    format!(
                        "{},{:?},{},{:?},{},{:?},{},{:?},{}",
                        r.config.name(),
                        r.mode,
                        perm.join(" "),
                        r.permutation_parity,
                        r.permutation_order,
                        r.relabeling_parity,
                        r.candidate.min_eigenvalue,
                        r.candidate.physicality,
                        r.candidate.purity
                    )
                    .to_lowercase()
                })
                .collect();
            write_csv(
                &ctx.path("correlations.csv"),
                &m,
                &inputs,
                "config,mode,permutation,permutation_parity,order,relabeling_parity,min_eigenvalue,physicality,purity",
                &rows,
            )?
        }
    };
    if !report.all_hold() {
        return Err(Failure::Violation(format!("properties violated ({summary}); see {}", path.display())));
    }
    Ok(format!(
        "scan-correlations: {summary}; {} physical / {} nonphysical of {} -> {}",
        report.physical_total,
        report.nonphysical_total,
        report.candidates.len(),
        path.display()
    ))
}

pub fn wigner_sets(ctx: &Context) -> Result<String, Failure> {
    let qubit = enumerate_qubit_wigner_sets();
    let orbits = displacement_orbits(&qubit);
    let products = enumerate_quartit_wigner_sets();
    let valid = products.iter().filter(|p| p.valid()).count();
    let mixed_only = products.iter().all(|p| p.valid() == (p.parity_a != p.parity_b));
    let canonical = find_striations(&QuartitPhasePointSet::canonical(Parity::Even, Parity::Odd)).ok();
    let canonical_counts = canonical.as_ref().map(|s| (s.factorizable_count(), s.entangled_count()));

    let m = meta("wigner-sets", None);
    let inputs = json!({ "format": ctx.format });
    let orbit_of = |idx: usize| orbits.iter().position(|o| o.contains(&idx));
    let path = match ctx.format {
        Format::Json => {
            let qubit_json: Vec<Value> = qubit
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    json!({
                        "fiducial_signs": s.fiducial_signs(),
                        "parity": s.parity(),
                        "orbit": orbit_of(i),
                        "axioms": s.check_axioms(),
                    })
                })
                .collect();
            let product_json: Vec<Value> = products
                .iter()
                .map(|p| {
                    json!({
                        "fiducial_a": p.fiducial_a,
                        "fiducial_b": p.fiducial_b,
                        "parity_a": p.parity_a,
                        "parity_b": p.parity_b,
                        "axioms": p.axioms,
                        "valid": p.valid(),
                        "factorizable_striations": p.striation.as_ref().map(|s| s.factorizable_count()),
                        "entangled_striations": p.striation.as_ref().map(|s| s.entangled_count()),
                        "phi": p.striation.as_ref().map(|s| s.phi),
                        "psi": p.striation.as_ref().map(|s| s.psi),
                    })
                })
                .collect();
            let results = json!({
                "qubit_set_count": qubit.len(),
                "qubit_orbits": orbits,
                "qubit_sets": qubit_json,
                "product_count": products.len(),
                "valid_product_count": valid,
                "valid_iff_mixed_parity": mixed_only,
                "products": product_json,
                "canonical_ta_striations": canonical,
            });
            write_json(&ctx.path("wigner_sets.json"), &document(m, &inputs, results))?
        }
        Format::Csv => {
            let signs = |s: [i8; 3]| s.iter().map(|&x| if x > 0 { '+' } else { '-' }).collect::<String>();
            let rows: Vec<String> = products
                .iter()
                .map(|p| {
                    format!(
                        "{},{},{:?},{:?},{},{},{}",
                        signs(p.fiducial_a),
                        signs(p.fiducial_b),
                        p.parity_a,
                        p.parity_b,
                        p.valid(),
                        p.striation.as_ref().map_or(0, |s| s.factorizable_count()),
                        p.striation.as_ref().map_or(0, |s| s.entangled_count()),
                    )
                    .to_lowercase()
                })
                .collect();
            write_csv(
                &ctx.path("wigner_sets.csv"),
                &m,
                &inputs,
                "fiducial_a,fiducial_b,parity_a,parity_b,valid,factorizable,entangled",
                &rows,
            )?
        }
    };
    let ok = qubit.len() == 8
        && orbits.len() == 2
        && orbits.iter().all(|o| o.len() == 4)
        && valid == 32
        && mixed_only
        && canonical_counts == Some((3, 2));
    let summary = format!(
        "wigner-sets: {} qubit sets in {} orbits; {valid}/{} products valid; canonical TA striations {:?} (factorizable, entangled) -> {}",
        qubit.len(),
        orbits.len(),
        products.len(),
        canonical_counts,
        path.display()
    );
    if ok {
        Ok(summary)
    } else {
        Err(Failure::Violation(summary))
    }
}

pub fn qkd(ctx: &Context, args: &QkdArgs) -> Result<String, Failure> {
    if !(args.sacrifice > 0.0 && args.sacrifice <= 1.0) {
        return Err(usage("--sacrifice must lie in (0, 1]"));
    }
    let params = SessionParams {
        pairs: args.pairs,
        grant: !args.deny,
        noise: args.noise,
        seed: args.seed,
        config: args.config.into(),
    };
    let transcript = run_session(&params).map_err(usage)?;
    let report = capability_report(&transcript).map_err(usage)?;
    let check = if params.grant {
        Some(tomographic_check(&transcript, args.sacrifice, args.threshold).map_err(usage)?)
    } else {
        None
    };

    let m = meta("qkd", Some(args.seed));
    let inputs = Resolved { format: ctx.format, args };
    let inputs_value = serde_json::to_value(&inputs).expect("json");
    let mut written = Vec::new();
    match ctx.format {
        Format::Json => {
            let t = serde_json::to_value(&transcript).expect("json");
            written.push(write_json(&ctx.path("qkd_transcript.json"), &document(m.clone(), &inputs, t))?);
            let results = json!({
                "capability": report,
                "tomographic_check": check.as_ref().map(|c| json!({
                    "rounds_used": c.rounds_used,
                    "counts": count_rows(&c.counts.counts),
                    "W_hat": real_rows(&c.w_hat.values),
                    "min_eigenvalue": c.min_eigenvalue,
                    "fidelity": c.fidelity,
                    "threshold": c.threshold,
                    "alarm": c.alarm,
                })),
            });
            written.push(write_json(&ctx.path("qkd_report.json"), &document(m, &inputs, results))?);
        }
        Format::Csv => {
            let rows: Vec<String> = (0..transcript.pairs())
                .map(|i| {
                    let ann = transcript
                        .announcements
                        .as_ref()
                        .map_or(String::new(), |a| a[i].index().to_string());
                    format!(
                        "{i},{},{},{},{ann}",
                        transcript.alice_outcomes[i],
                        transcript.bob_outcomes[i],
                        transcript.charles_choices[i].index()
                    )
                })
                .collect();
            written.push(write_csv(
                &ctx.path("qkd_transcript.csv"),
                &m,
                &inputs_value,
                "round,alice,bob,charles,announcement",
                &rows,
            )?);
            let mut summary = vec![
                format!("pre_announcement_mi,{}", report.pre_announcement_mi.bits),
                format!("charles_alice_mi,{}", report.charles_alice_mi.bits),
                format!("mi_bias,{}", report.pre_announcement_mi.bias),
            ];
            if let Some(p) = report.post_announcement_mi {
                summary.push(format!("post_announcement_mi,{}", p.bits));
            }
            if let Some(f) = report.forbidden_coincidences {
                summary.push(format!("forbidden_coincidences,{f}"));
            }
            if let Some(c) = &check {
                summary.push(format!("fidelity,{}", c.fidelity));
                summary.push(format!("alarm,{}", c.alarm));
            }
            written.push(write_csv(&ctx.path("qkd_report.csv"), &m, &inputs_value, "quantity,value", &summary)?);
        }
    }
    let post = report
        .post_announcement_mi
        .map_or("withheld".to_string(), |p| format!("{:.4}", p.bits));
    Ok(format!(
        "qkd: {} pairs, pre-announcement MI {:.4} bits, post-announcement MI {post}, Charles-Alice MI {:.4}{} -> {}",
        args.pairs,
        report.pre_announcement_mi.bits,
        report.charles_alice_mi.bits,
        check.map_or(String::new(), |c| format!(", check fidelity {:.4} alarm {}", c.fidelity, c.alarm)),
        list(&written)
    ))
}

