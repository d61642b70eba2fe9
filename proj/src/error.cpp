#include "tracegist/error.hpp"

namespace tracegist {

const char* to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Schema: return "schema";
    case ErrorKind::TooShort: return "too_short";
    case ErrorKind::Argument: return "argument";
    case ErrorKind::Config: return "config";
    case ErrorKind::Overflow: return "overflow";
    case ErrorKind::Timeout: return "timeout";
    case ErrorKind::NMaxExceeded: return "n_max_exceeded";
    case ErrorKind::Io: return "io";
    case ErrorKind::Internal: return "internal";
    }
    return "unknown";
}

} // namespace tracegist
