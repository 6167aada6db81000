//! Raw measurements for `report criterion N`.

use std::time::Instant;

use serde_json::{json, Value};
use transasym_core::experiments::*;
use transasym_core::singularities::AbelGeometry;
use transasym_core::C64;

use crate::error::CliError;
use crate::schema::{to_pair, ObservationJson, ReportJson};

fn r(v: f64) -> C64 {
    C64::new(v, 0.0)
}

pub fn measure(n: u8) -> Result<Value, CliError> {
    let t = Instant::now();
    let mut v = match n {
        1 => json!({ "max_rel_deviation": p1_level_match(32)? }),
        2 => json!({ "A": to_pair(p1_pole_shift(32)?) }),
        3 => {
            let [a, b] = p2_level_match(32)?;
            json!({ "p2a_max_deviation": a, "p2b_max_deviation": b })
        }
        4 => {
            let est = abel_radius(200)?;
            json!({
                "radius": est.radius,
                "exponent": est.exponent,
                "uncertainty": est.uncertainty,
                "closed_form": abel_xi0_closed_form(),
                "xi0": AbelGeometry::default().xi0,
            })
        }
        5 | 6 | 10 => {
            let e = p1_expansion()?;
            let poles = p1_pole_validation(&e, (8, 20))?;
            match n {
                5 => serde_json::to_value(ReportJson::new(&poles.report, &poles.observations)).expect("serializable"),
                6 => {
                    let abel: Vec<Value> = abel_branch_points((3, 5))?
                        .iter()
                        .map(|b| {
                            json!({
                                "n": b.n,
                                "observation": ObservationJson::from(&b.observation),
                                "one_loop": b.monodromy.one_loop,
                                "two_loops": b.monodromy.two_loops,
                            })
                        })
                        .collect();
                    let p1: Vec<ObservationJson> = poles.observations.iter().map(ObservationJson::from).collect();
                    json!({ "p1": p1, "abel": abel })
                }
                _ => {
                    let first: Vec<C64> =
                        poles.report.pairs.iter().filter(|p| (10..=12).contains(&p.n)).map(|p| p.observed).collect();
                    let checks: Vec<Value> = second_array(&e, r(12.0), &first, &[0, -1])?
                        .iter()
                        .map(|c| {
                            json!({
                                "first": to_pair(c.first),
                                "k": c.k,
                                "predicted": to_pair(c.predicted),
                                "observed": to_pair(c.observed),
                                "delta": c.delta,
                            })
                        })
                        .collect();
                    json!({ "checks": checks })
                }
            }
        }
        7 => {
            let e = p1_expansion()?;
            let rt = p1_constant_round_trip(&e, r(12.0))?;
            json!({
                "C": to_pair(rt.c),
                "pi_over_4": { "C": to_pair(rt.first.c), "uncertainty": rt.first.uncertainty },
                "pi_over_3": { "C": to_pair(rt.second.c), "uncertainty": rt.second.uncertainty },
            })
        }
        8 => {
            let g = p1_gevrey(8, 6.0)?;
            json!({
                "sup_norms": g.sup_norms,
                "K_g": g.k_g,
                "B_g": g.b_g,
                "r_squared": g.r_squared,
                "envelope_holds": g.is_valid(),
            })
        }
        9 => {
            let a = array_convergence(r(12.0), r(12.0), r(-0.5), 10, 40)?;
            json!({ "shift_n10": a.shift_lo, "shift_n40": a.shift_hi, "max_residual": a.max_residual })
        }
        _ => return Err(CliError::Config(format!("no criterion {n}"))),
    };
    v["criterion"] = json!(n);
    v["seconds"] = json!(t.elapsed().as_secs_f64());
    Ok(v)
}
