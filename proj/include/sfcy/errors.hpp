#pragma once

#include <stdexcept>
#include <string>

namespace sfcy {

/// Base class for every error raised by the library. The kind string is the
/// stable identifier used in reports and CLI diagnostics.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define SFCY_DEFINE_ERROR(Name)                                            \
    class Name : public Error {                                            \
    public:                                                                \
        explicit Name(const std::string& what) : Error(#Name, what) {}     \
    }

// cubic_diff
SFCY_DEFINE_ERROR(PoleEvaluation);
SFCY_DEFINE_ERROR(HigherOrderPole);
SFCY_DEFINE_ERROR(DegreeMismatch);
SFCY_DEFINE_ERROR(SeriesDivergence);
SFCY_DEFINE_ERROR(InvalidDifferential);

// geometry
SFCY_DEFINE_ERROR(BlendFailure);
SFCY_DEFINE_ERROR(GridError);

// titeica_solver
SFCY_DEFINE_ERROR(BarrierFailure);
SFCY_DEFINE_ERROR(NewtonDivergence);
SFCY_DEFINE_ERROR(MonotonicityViolation);
SFCY_DEFINE_ERROR(ZeroOfU);

// developing
SFCY_DEFINE_ERROR(DegenerateSeed);
SFCY_DEFINE_ERROR(StepUnderflow);
SFCY_DEFINE_ERROR(IllConditioned);
SFCY_DEFINE_ERROR(NotUnipotent);
SFCY_DEFINE_ERROR(NoConvergence);
SFCY_DEFINE_ERROR(TangentialCrossing);
SFCY_DEFINE_ERROR(FoldDetected);

// blaschke
SFCY_DEFINE_ERROR(NotHolomorphic);
SFCY_DEFINE_ERROR(MetricDegenerate);
SFCY_DEFINE_ERROR(ConstraintViolated);
SFCY_DEFINE_ERROR(ConvexityFailure);

// greens
SFCY_DEFINE_ERROR(OnDiagonal);
SFCY_DEFINE_ERROR(UnbalancedSource);

// cli
SFCY_DEFINE_ERROR(ConfigError);

#undef SFCY_DEFINE_ERROR

}  // namespace sfcy
