// Energy-monotone relaxation of discretized fields.
#pragma once

#include <vector>

#include "ldg/grid.hpp"

namespace ldg {

enum class StepPolicy { Fixed, Backtracking };
enum class Method { Steepest, Lbfgs };

struct SolveConfig {
  std::size_t max_iters = 20000;
  // Stop once max |-eps^2 Lap_h Q + Psi(Q)| over interior nodes drops below this.
  double grad_tol = 1e-6;
  StepPolicy step = StepPolicy::Backtracking;
  Reduction reduction = Reduction::Deterministic;
  Method method = Method::Lbfgs;
  int lbfgs_memory = 8;
  bool record_history = false;
};

enum class SolveStatus { Converged, IterationCap, RoundoffLimited };

struct RelaxResult {
  Field field;
  SolveStatus status = SolveStatus::IterationCap;
  std::size_t iterations = 0;
  double energy = 0;
  double residual = 0;
  std::vector<double> history;  // energy after each accepted step
};

class StagnationError : public Error {
 public:
  StagnationError(const std::string& what, RelaxResult partial)
      : Error(ErrorKind::Stagnation, what), partial_(std::move(partial)) {}
  const RelaxResult& partial() const { return partial_; }

 private:
  RelaxResult partial_;
};

// Explicit stability limit 1/(4d/h^2 + lambda_bulk) for the L2 gradient flow.
double initial_step(const Field& f);

RelaxResult relax(const Field& f, const SolveConfig& cfg);

const char* to_string(SolveStatus s);

}  // namespace ldg
