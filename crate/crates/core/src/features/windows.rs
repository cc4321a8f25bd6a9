use serde::Serialize;

use crate::{Error, Result};

pub const DEFAULT_WINDOW_S: f64 = 1.5;
pub const DEFAULT_STRIDE_S: f64 = 0.3;

/// Slack for accumulated floating-point error in window boundaries.
const EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Clip {
    pub start_s: f64,
    pub end_s: f64,
}

/// Start/end times of the clips a motion extractor consumes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClipWindowSchedule {
    pub window_s: f64,
    pub stride_s: f64,
    pub clips: Vec<Clip>,
}

/// Clips `[t, t + window]` for `t = 0, stride, 2 stride, ...` that fit in the
/// video. A video shorter than one window yields the single clip
/// `[0, duration]`.
pub fn sliding_windows(
    duration_s: f64,
    window_s: f64,
    stride_s: f64,
) -> Result<ClipWindowSchedule> {
    if !(duration_s > 0.0 && duration_s.is_finite()) {
        return Err(Error::NonPositiveDuration(duration_s));
    }
    if !(window_s > 0.0 && window_s.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "window must be positive, got {window_s}"
        )));
    }
    if !(stride_s > 0.0 && stride_s.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "stride must be positive, got {stride_s}"
        )));
    }

    let clips = if duration_s + EPS < window_s {
        vec![Clip {
            start_s: 0.0,
            end_s: duration_s,
        }]
    } else {
        let count = 1
            + (((duration_s - window_s) / stride_s) + EPS)
                .max(0.0)
                .floor() as usize;
        (0..count)
            .map(|i| {
                let start_s = i as f64 * stride_s;
                Clip {
                    start_s,
                    end_s: start_s + window_s,
                }
            })
            .collect()
    };
    Ok(ClipWindowSchedule {
        window_s,
        stride_s,
        clips,
    })
}
