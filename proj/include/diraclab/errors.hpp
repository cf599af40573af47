#pragma once

#include <stdexcept>
#include <string>

namespace diraclab {

// Base for all failures raised by the laboratory. Each module throws the
// specific subclass named in its contract so callers can dispatch on type.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define DIRACLAB_ERROR(Name)                                 \
  struct Name : Error {                                      \
    explicit Name(const std::string& msg) : Error(msg) {}    \
  }

DIRACLAB_ERROR(InvalidMetric);
DIRACLAB_ERROR(InsufficientData);
DIRACLAB_ERROR(ReductionOrderViolation);
DIRACLAB_ERROR(FlowIntegrationFailure);
DIRACLAB_ERROR(TransportFailure);
DIRACLAB_ERROR(AssemblyError);
DIRACLAB_ERROR(HypothesisViolation);
DIRACLAB_ERROR(AdjointError);
DIRACLAB_ERROR(GapViolation);
DIRACLAB_ERROR(QuadratureError);
DIRACLAB_ERROR(UnitarityDriftError);
DIRACLAB_ERROR(DegeneracyError);
DIRACLAB_ERROR(ExpSeriesError);
DIRACLAB_ERROR(ModificationFailure);
DIRACLAB_ERROR(NoConvergence);
DIRACLAB_ERROR(PositivityViolation);
DIRACLAB_ERROR(KernelObstruction);
DIRACLAB_ERROR(HadamardDiagnosticFailure);
DIRACLAB_ERROR(ConfigError);

#undef DIRACLAB_ERROR

}  // namespace diraclab
