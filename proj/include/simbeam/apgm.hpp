#pragma once

#include <armadillo>
#include <functional>
#include <vector>

#include "simbeam/gradients.hpp"
#include "simbeam/objective.hpp"
#include "simbeam/rng.hpp"
#include "simbeam/signaling.hpp"
#include "simbeam/wavefield.hpp"

namespace simbeam {

// Per-block adaptive step sizes; they carry across outer iterations and
// shrink only through backtracking (modulo the optional growth factor).
struct StepState {
  double precoder = 1000.0;
  arma::vec phase_tx;  // one step per transmit layer
  arma::vec phase_rx;  // one step per receive layer
};

struct LineSearchParams {
  double shrink = 0.5;              // backtracking factor, in (0, 1)
  double sufficient_decrease = 1e-3;  // delta in f(new) <= f(old) - delta*||new-old||^2
  int max_backtracks = 60;
  double growth = 2.0;  // per-iteration step inflation; 1 disables
};

struct OptimizerConfig {
  double initial_step = 1000.0;
  LineSearchParams line_search;
  double tol = 1e-6;   // relative decrease threshold; 0 runs the full budget
  int patience = 5;    // consecutive below-tol iterations before stopping
  int max_iterations = 200;
  bool optimize_precoder = true;
};

// Everything fixed during one optimization run. Non-owning references; the
// caller keeps them alive for the optimizer's lifetime.
struct ProblemContext {
  const PropagationSet& props;
  const arma::cx_mat& g;
  const DifferenceSet& diffs;
  double sigma2;
};

// One outer iteration of the optimizer. Block order is precoder, transmit
// layers 1..L, receive layers 1..K.
struct IterationRecord {
  int iteration = 0;
  double f = 0.0;
  double r0 = 0.0;
  bool has_mi = false;
  MiEstimate mi;  // attached by the harness when scheduled
  std::vector<int> block_backtracks;   // P, phi^1..phi^L, psi^1..psi^K
  std::vector<double> block_seconds;   // same order
  int stalled_blocks = 0;

  int backtracks_total() const;
};

// Scales P to tr(P P^H) = N_s, preserving direction. P = 0 is rejected.
arma::cx_mat project_power(const arma::cx_mat& p);

// Entrywise x -> x/|x|; zero entries map to 1 (phase fixed at 0).
arma::cx_vec project_unit_modulus(const arma::cx_vec& v);

struct LineSearchResult {
  arma::cx_mat accepted;  // new block value; equals input block on stall
  double f_accepted = 0.0;
  double step = 0.0;  // last step used, persisted by the caller
  int backtracks = 0;
  bool stalled = false;
};

// Backtracking projected-gradient search on one block: candidate =
// projector(current - step * grad), accepted when
//   f(candidate) <= f_current - delta * ||candidate - current||^2.
// On each failure the step shrinks by `shrink`; after max_backtracks the
// block is left unchanged (null step) and the stall is flagged. A zero
// gradient short-circuits to the current block with zero backtracks.
LineSearchResult line_search_block(
    const std::function<double(const arma::cx_mat&)>& eval,
    const arma::cx_mat& current, double f_current, const arma::cx_mat& grad,
    double step,
    const std::function<arma::cx_mat(const arma::cx_mat&)>& projector,
    const LineSearchParams& params);

// Block-coordinate projected gradient descent on the cutoff-rate objective.
// Holds the design point, cascade cache, and per-block steps; `step()` runs
// one outer iteration and is guaranteed not to increase f.
class ApgmOptimizer {
 public:
  ApgmOptimizer(const ProblemContext& ctx, const OptimizerConfig& config,
                DesignPoint initial);

  // One outer iteration: precoder block, then each transmit layer with the
  // freshest preceding layers, then each receive layer.
  IterationRecord step();

  bool done() const;

  const DesignPoint& point() const { return point_; }
  const CascadeCache& cache() const { return cache_; }
  const StepState& steps() const { return steps_; }
  void set_steps(const StepState& steps);
  double objective() const { return current_.f; }
  double initial_objective() const { return initial_f_; }
  int iterations_done() const { return iteration_; }
  int stall_events() const { return stall_events_; }
  int num_vectors() const { return ctx_.diffs.num_vectors; }

 private:
  struct BlockOutcome {
    int backtracks = 0;
    bool stalled = false;
    double seconds = 0.0;
  };
  BlockOutcome precoder_block();

  ProblemContext ctx_;
  OptimizerConfig config_;
  DesignPoint point_;
  CascadeCache cache_;
  PairObjective current_;  // pair distances/weights at the current iterate
  StepState steps_;
  double initial_f_ = 0.0;
  int iteration_ = 0;
  int streak_ = 0;  // consecutive iterations below tol
  int stall_events_ = 0;
};

struct RunResult {
  DesignPoint final_point;
  std::vector<IterationRecord> trace;  // one record per completed iteration
  double initial_f = 0.0;
  double initial_r0 = 0.0;
  double final_f = 0.0;
  double final_r0 = 0.0;
  StepState final_steps;
  int stall_events = 0;
};

// Runs the optimizer until convergence (relative decrease below tol for
// `patience` consecutive iterations) or max_iterations. max_iterations = 0
// returns the initial point with an empty trace.
RunResult run_apgm(const ProblemContext& ctx, const OptimizerConfig& config,
                   const DesignPoint& initial);

// Single public iteration step; point and steps are updated in place.
IterationRecord apgm_iteration(DesignPoint& point, StepState& steps,
                               const ProblemContext& ctx,
                               const LineSearchParams& params,
                               bool optimize_precoder = true);

// Random feasible start: P complex Gaussian then power-projected, phases
// uniform on the unit circle. Draw order: P (column-major), phi^1..phi^L,
// psi^1..psi^K.
DesignPoint random_design_point(Rng& rng, const PropagationSet& props,
                                int num_streams);

// The fixed no-precoding baseline: identity map onto the first N_s antennas
// (already power-feasible for N_s <= N_t).
arma::cx_mat identity_precoder(int num_tx_antennas, int num_streams);

}  // namespace simbeam
