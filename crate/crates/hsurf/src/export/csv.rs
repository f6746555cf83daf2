//! Trajectory CSV and event JSON emission.
//!
//! Schema is fixed: header `s,x,z,theta,nu,eps,H_residual`, floats with 17
//! significant digits. The residual column is the raw per-sample curvature
//! residual; it is reported as `nan` where the arc-length formula is
//! undefined (at Ω contacts and on the axis).

use crate::ambient::AmbientSpace;
use crate::integrate::{curvature_residual_raw, Trajectory};
use crate::prescribed::PrescribedH;
use std::io::{self, Write};

/// 17 significant digits, scientific; enough to reproduce any f64 exactly.
pub fn format_g17(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.16e}")
    }
}

pub fn write_trajectory_csv<W: Write>(
    w: &mut W,
    space: &AmbientSpace,
    h: &PrescribedH,
    traj: &Trajectory,
) -> io::Result<()> {
    writeln!(w, "s,x,z,theta,nu,eps,H_residual")?;
    for st in &traj.samples {
        let nu = st.nu(space);
        let eps = if st.theta.sin() >= 0.0 { 1 } else { -1 };
        let residual = curvature_residual_raw(space, h, st);
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            format_g17(st.s),
            format_g17(st.x),
            format_g17(st.z),
            format_g17(st.theta),
            format_g17(nu),
            eps,
            format_g17(residual),
        )?;
    }
    Ok(())
}

pub fn trajectory_csv(space: &AmbientSpace, h: &PrescribedH, traj: &Trajectory) -> String {
    let mut buf = Vec::new();
    write_trajectory_csv(&mut buf, space, h, traj).expect("write to Vec cannot fail");
    String::from_utf8(buf).expect("csv is utf8")
}

/// Sidecar event list as a JSON array.
pub fn events_json(space: &AmbientSpace, traj: &Trajectory) -> serde_json::Value {
    let events: Vec<serde_json::Value> = traj
        .events
        .iter()
        .map(|e| {
            serde_json::json!({
                "kind": format!("{:?}", e.kind),
                "s": e.s,
                "x": e.state.x,
                "z": e.state.z,
                "theta": e.state.theta,
                "nu": e.state.nu(space),
            })
        })
        .collect();
    serde_json::Value::Array(events)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::{integrate, AngularState, Budget, IntegrateOpts, StopSpec};

    #[test]
    fn csv_schema_and_determinism() {
        let space = AmbientSpace::new(0.0, 1.0).unwrap();
        let h = PrescribedH::constant(1.0);
        let init = AngularState::new(0.0, 1.5, 0.0, std::f64::consts::FRAC_PI_2);
        let traj = integrate(
            &space,
            &h,
            init,
            &StopSpec::after_y0(1),
            &Budget::for_space(&space),
            &IntegrateOpts::default(),
        )
        .unwrap();
        let a = trajectory_csv(&space, &h, &traj);
        let b = trajectory_csv(&space, &h, &traj);
        assert_eq!(a, b);
        let mut lines = a.lines();
        assert_eq!(lines.next().unwrap(), "s,x,z,theta,nu,eps,H_residual");
        let first = lines.next().unwrap();
        assert_eq!(first.split(',').count(), 7);
        // 17 significant digits on the first field.
        let s_field = first.split(',').next().unwrap();
        assert!(s_field.contains('e'));

        let ev = events_json(&space, &traj);
        assert!(ev.as_array().unwrap().len() >= 2);
    }
}
