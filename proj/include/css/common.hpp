#ifndef CSS_COMMON_HPP
#define CSS_COMMON_HPP

#include <stdexcept>
#include <string>

namespace css {

// Base class for every error raised by the library. Each concrete error
// corresponds to one failure mode of a numerical operation; callers that
// want to distinguish them can catch the derived type.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define CSS_DEFINE_ERROR(Name)                                      \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  }

CSS_DEFINE_ERROR(SingularPoint);
CSS_DEFINE_ERROR(NotUnitVector);
CSS_DEFINE_ERROR(InvalidCoefficient);
CSS_DEFINE_ERROR(SupercriticalAlpha);
CSS_DEFINE_ERROR(DimensionTooSmall);
CSS_DEFINE_ERROR(NonConvergence);
CSS_DEFINE_ERROR(IndefiniteOperator);
CSS_DEFINE_ERROR(TruncationInsufficient);
CSS_DEFINE_ERROR(QuadratureFailure);
CSS_DEFINE_ERROR(BelowSpectralFloor);
CSS_DEFINE_ERROR(ZeroBoundaryNorm);
CSS_DEFINE_ERROR(StiffFailure);
CSS_DEFINE_ERROR(IrregularBranch);
CSS_DEFINE_ERROR(DivergentIntegrand);
CSS_DEFINE_ERROR(NearSingularGradient);
CSS_DEFINE_ERROR(NoConvergenceDetected);
CSS_DEFINE_ERROR(NoAdmissibleRadius);
CSS_DEFINE_ERROR(EigenspaceUnresolved);
CSS_DEFINE_ERROR(DegenerateDenominator);
CSS_DEFINE_ERROR(NorthPole);
CSS_DEFINE_ERROR(KEqualsN);
CSS_DEFINE_ERROR(InterpolationGap);
CSS_DEFINE_ERROR(IndefiniteForm);
CSS_DEFINE_ERROR(UnknownConstant);
CSS_DEFINE_ERROR(NotASolution);
CSS_DEFINE_ERROR(ConfigInvalid);
CSS_DEFINE_ERROR(ComputationFailed);
CSS_DEFINE_ERROR(FailedCondition);

#undef CSS_DEFINE_ERROR

}  // namespace css

#endif  // CSS_COMMON_HPP
