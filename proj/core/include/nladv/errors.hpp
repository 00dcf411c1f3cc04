#pragma once

#include <stdexcept>
#include <string>

namespace nladv {

// Base class for all errors raised by the simulation engine.
struct SimError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GridMismatch : SimError { using SimError::SimError; };
struct NegativeDensity : SimError { using SimError::SimError; };
struct TailTooHeavy : SimError { using SimError::SimError; };
struct AliasingRisk : SimError { using SimError::SimError; };
struct NoPositiveRoot : SimError { using SimError::SimError; };
struct AssumptionViolated : SimError { using SimError::SimError; };
struct CflViolation : SimError { using SimError::SimError; };
struct NonFiniteState : SimError { using SimError::SimError; };
struct VelocityUndefined : SimError { using SimError::SimError; };
struct NoContraction : SimError { using SimError::SimError; };
struct TimeMismatch : SimError { using SimError::SimError; };
struct MassMismatch : SimError { using SimError::SimError; };
struct NoPlateauDetected : SimError { using SimError::SimError; };
struct MonotonicityViolated : SimError { using SimError::SimError; };
struct ConfigError : SimError { using SimError::SimError; };

} // namespace nladv
