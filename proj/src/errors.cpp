#include "cmc/errors.hpp"

#include <sstream>

namespace cmc {
namespace {

std::string spacelike_message(std::size_t index, double du2) {
  std::ostringstream os;
  os.precision(17);
  os << "graph is not spacelike: |Du|^2 = " << du2 << " at grid point " << index;
  return os.str();
}

}  // namespace

SpacelikeViolation::SpacelikeViolation(std::size_t worst_index, double du_squared)
    : Error(spacelike_message(worst_index, du_squared)), worst_index_(worst_index), du_squared_(du_squared) {}

DegenerateSliceError::DegenerateSliceError(const std::string& what, double lambda_min)
    : Error(what), lambda_min_(lambda_min) {}

NonConvergenceError::NonConvergenceError(const std::string& what, std::vector<double> residual_history)
    : Error(what), history_(std::move(residual_history)) {}

CoverageError::CoverageError(const std::string& what, std::vector<std::size_t> uncovered)
    : Error(what), uncovered_(std::move(uncovered)) {}

ParseError::ParseError(const std::string& what, std::size_t offset) : Error(what), offset_(offset) {}

}  // namespace cmc
