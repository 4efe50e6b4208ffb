use core::fmt;

/// Which of the two RUS legs an error refers to (1 or 2).
pub type LegIndex = u8;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A geometry parameter is out of range (non-positive length, zero axis, ...).
    InvalidGeometry(&'static str),
    /// A constraint or sweep parameter is out of range.
    InvalidParams(&'static str),
    /// The closure equation of the given leg has no real root.
    Unreachable { leg: LegIndex },
    /// The requested working mode cannot be told apart: the leg sits on a
    /// serial singularity where its two roots merge.
    ModeVanished { leg: LegIndex },
    /// No inverse-kinematic branch carries the requested working mode.
    ModeNotFound,
    /// The closed-form direct model is only available for the parallel-actuator design.
    NoClosedForm,
    /// The leg-1 linear factor vanishes identically; pitch is undetermined.
    DegenerateLinearFactor,
    /// Both roll roots carry the reference assembly sign.
    AmbiguousSelection,
    /// No roll root carries the reference assembly sign.
    NoMatchingAssembly,
    /// Damped Newton iteration did not reach the residual tolerance.
    NoConvergence { iterations: usize, residual: f64 },
    /// `|det B|` is below the threshold; the inverse Jacobian does not exist.
    SerialSingular { det_b: f64 },
    /// `|det A|` is below the threshold; joint rates do not fix the angular velocity.
    ParallelSingular { det_a: f64 },
    /// A zero-length segment was passed to a distance query.
    DegenerateSegment,
    /// Fewer than three distinct boundary points.
    DegenerateSlice,
    /// The workspace sweep was started from an infeasible pose.
    CenterInfeasible,
    /// The sweep found no feasible slice at all.
    EmptyWorkspace,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidGeometry(why) => write!(f, "invalid geometry: {why}"),
            Error::InvalidParams(why) => write!(f, "invalid parameters: {why}"),
            Error::Unreachable { leg } => write!(f, "leg {leg} cannot reach the requested orientation"),
            Error::ModeVanished { leg } => {
                write!(f, "leg {leg} is on a serial singularity; working mode is undefined")
            }
            Error::ModeNotFound => write!(f, "no inverse solution in the requested working mode"),
            Error::NoClosedForm => {
                write!(f, "closed-form direct kinematics requires the parallel-actuators design")
            }
            Error::DegenerateLinearFactor => write!(f, "pitch equation degenerates; pitch undetermined"),
            Error::AmbiguousSelection => write!(f, "both roll roots share the reference assembly sign"),
            Error::NoMatchingAssembly => write!(f, "no roll root matches the reference assembly sign"),
            Error::NoConvergence { iterations, residual } => {
                write!(f, "no convergence after {iterations} iterations (residual {residual:e})")
            }
            Error::SerialSingular { det_b } => write!(f, "serial singularity (det B = {det_b:e})"),
            Error::ParallelSingular { det_a } => write!(f, "parallel singularity (det A = {det_a:e})"),
            Error::DegenerateSegment => write!(f, "zero-length segment"),
            Error::DegenerateSlice => write!(f, "slice has fewer than three distinct points"),
            Error::CenterInfeasible => write!(f, "sweep center pose is infeasible"),
            Error::EmptyWorkspace => write!(f, "workspace is empty"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
