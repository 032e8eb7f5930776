#include "fwlab/fw_solver.hpp"

namespace fwlab {

std::string to_string(StepRule rule) {
  return rule == StepRule::kExactLineSearch ? "exact" : "short";
}

std::string to_string(Termination reason) {
  switch (reason) {
    case Termination::kGapReached:
      return "gap_reached";
    case Termination::kZeroGradient:
      return "zero_gradient";
    case Termination::kMaxIters:
      return "max_iters";
  }
  return "unknown";
}

}  // namespace fwlab
