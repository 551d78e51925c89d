//! Exit-code classification of library errors.

use regseq_core::funclib::EvalError;
use regseq_core::ntcore::NtError;
use regseq_core::scanner::ScanError;
use regseq_core::seeker::SeekError;
use regseq_core::verifier::VerifyError;
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NEGATIVE: i32 = 2;
pub const EXIT_PRECISION: i32 = 3;
pub const EXIT_EXHAUSTED: i32 = 4;
pub const EXIT_INTERNAL: i32 = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Class {
    Usage,
    Negative,
    Precision,
    Exhausted,
    Internal,
}

impl Class {
    pub fn exit_code(self) -> i32 {
        match self {
            Class::Usage => EXIT_USAGE,
            Class::Negative => EXIT_NEGATIVE,
            Class::Precision => EXIT_PRECISION,
            Class::Exhausted => EXIT_EXHAUSTED,
            Class::Internal => EXIT_INTERNAL,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Class::Usage => "usage",
            Class::Negative => "certified_negative",
            Class::Precision => "precision_cap_exceeded",
            Class::Exhausted => "budget_exhausted",
            Class::Internal => "internal",
        }
    }
}

#[derive(Debug)]
pub struct Failure {
    pub class: Class,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            class: Class::Usage,
            message: message.into(),
        }
    }

    pub fn record(&self) -> Value {
        json!({"error": {
            "kind": self.class.name(),
            "exit_code": self.class.exit_code(),
            "message": self.message,
        }})
    }
}

fn eval_class(e: &EvalError) -> Class {
    match e {
        EvalError::PrecisionCapExceeded { .. } => Class::Precision,
        EvalError::NotMonotone(_) | EvalError::InvalidSpec(_) | EvalError::InvalidArgument(_) => Class::Usage,
    }
}

fn nt_class(e: &NtError) -> Class {
    match e {
        NtError::Eval(e) => eval_class(e),
        NtError::PrimorialTooSmall(_) | NtError::IntervalTooLong(_) => Class::Usage,
        NtError::ParityMismatch => Class::Internal,
    }
}

fn verify_class(e: &VerifyError) -> Class {
    match e {
        VerifyError::Eval(e) => eval_class(e),
        VerifyError::Nt(e) => nt_class(e),
        VerifyError::InvalidArgument(_) => Class::Usage,
        VerifyError::RejectedWithoutConditions(_) | VerifyError::RecheckMismatch(_) => Class::Negative,
        VerifyError::CertificateContradiction(_) => Class::Internal,
    }
}

fn scan_class(e: &ScanError) -> Class {
    match e {
        ScanError::Eval(e) => eval_class(e),
        ScanError::Nt(e) => nt_class(e),
        ScanError::InvalidJob(_) => Class::Usage,
        ScanError::RecheckFailed(_) => Class::Internal,
        ScanError::BudgetExceeded { .. } => Class::Exhausted,
    }
}

fn seek_class(e: &SeekError) -> Class {
    match e {
        SeekError::Eval(e) => eval_class(e),
        SeekError::Nt(e) => nt_class(e),
        SeekError::Verify(e) => verify_class(e),
        SeekError::Scan(e) => scan_class(e),
        SeekError::InvalidArgument(_) | SeekError::NotAdmissible(_) => Class::Usage,
        SeekError::StrictInfeasible { .. } => Class::Negative,
        SeekError::WindowMissed { .. } | SeekError::EscalationExhausted { .. } | SeekError::RoundFailed { .. } => {
            Class::Exhausted
        }
        SeekError::RunNotFound { .. } | SeekError::Inconsistent(_) => Class::Internal,
    }
}

macro_rules! from_error {
    ($ty:ty, $f:ident) => {
        impl From<$ty> for Failure {
            fn from(e: $ty) -> Self {
                Failure {
                    class: $f(&e),
                    message: e.to_string(),
                }
            }
        }
    };
}

from_error!(EvalError, eval_class);
from_error!(NtError, nt_class);
from_error!(VerifyError, verify_class);
from_error!(ScanError, scan_class);
from_error!(SeekError, seek_class);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_precision_errors_keep_their_class() {
        let cap = EvalError::PrecisionCapExceeded {
            cap_bits: 64,
            context: "test".into(),
        };
        let deep = SeekError::Verify(VerifyError::Nt(NtError::Eval(cap)));
        let f = Failure::from(deep);
        assert_eq!(f.class.exit_code(), EXIT_PRECISION);
        assert_eq!(f.record()["error"]["kind"], "precision_cap_exceeded");
    }
}
