#pragma once

#include <stdexcept>

namespace chemostat {

// Error taxonomy. One class per failure contract so callers and tests can
// tell argument misuse, model-side impossibilities and numerical breakdowns
// apart without parsing messages.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// argument outside an operation's domain, or invalid construction
struct DomainError : Error { using Error::Error; };
// custom response lacks a requested derivative order
struct CapabilityError : Error { using Error::Error; };
// gamma*sup(f) <= removal rate: the consumer can never break even
struct NoBreakEvenError : Error { using Error::Error; };
// equilibrium absent at the requested feed concentration
struct ExistenceError : Error { using Error::Error; };
// input data violates a documented precondition (e.g. a3 <= 0)
struct ContractViolationError : Error { using Error::Error; };
// cubic not factorable as (negative real root) x (quadratic pair)
struct FactorizationDomainError : Error { using Error::Error; };
// no sign change over the supplied interval
struct BracketError : Error { using Error::Error; };
// crossing located but the real part's slope is not positive
struct TransversalityError : Error { using Error::Error; };
// complex pair degenerated to real roots inside a search bracket
struct PairCollisionError : Error { using Error::Error; };
// integrator step size underflowed
struct StiffnessError : Error { using Error::Error; };
// trajectory broke a guaranteed invariant beyond the numerical floor
struct ModelViolationError : Error { using Error::Error; };
// malformed run configuration; message carries the offending field path
struct ConfigError : Error { using Error::Error; };

}  // namespace chemostat
