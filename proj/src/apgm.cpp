#include "simbeam/apgm.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace simbeam {

namespace {

double squared_distance(const arma::cx_mat& a, const arma::cx_mat& b) {
  const arma::cx_mat d = a - b;
  return arma::accu(arma::real(d % arma::conj(d)));
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

arma::cx_mat complex_identity(arma::uword n) {
  return arma::cx_mat(arma::eye(n, n), arma::mat(n, n, arma::fill::zeros));
}

}  // namespace

int IterationRecord::backtracks_total() const {
  int total = 0;
  for (int b : block_backtracks) total += b;
  return total;
}

arma::cx_mat project_power(const arma::cx_mat& p) {
  const double trace = arma::accu(arma::real(p % arma::conj(p)));
  if (!(trace > 0))
    throw std::invalid_argument(
        "project_power: zero precoder (degenerate iterate)");
  return p * std::sqrt(static_cast<double>(p.n_cols) / trace);
}

arma::cx_vec project_unit_modulus(const arma::cx_vec& v) {
  arma::cx_vec out(v.n_elem);
  for (arma::uword i = 0; i < v.n_elem; ++i) {
    const double mag = std::abs(v(i));
    out(i) = (mag == 0.0) ? arma::cx_double(1.0, 0.0) : v(i) / mag;
  }
  return out;
}

LineSearchResult line_search_block(
    const std::function<double(const arma::cx_mat&)>& eval,
    const arma::cx_mat& current, double f_current, const arma::cx_mat& grad,
    double step,
    const std::function<arma::cx_mat(const arma::cx_mat&)>& projector,
    const LineSearchParams& params) {
  if (params.shrink <= 0.0 || params.shrink >= 1.0)
    throw std::invalid_argument("line search: shrink must lie in (0, 1)");
  if (params.sufficient_decrease <= 0.0)
    throw std::invalid_argument(
        "line search: sufficient_decrease must be positive");
  if (params.max_backtracks < 0)
    throw std::invalid_argument("line search: max_backtracks must be >= 0");
  if (!(step > 0.0))
    throw std::invalid_argument("line search: step must be positive");

  LineSearchResult out;
  if (arma::norm(grad, "fro") == 0.0) {
    // Stationary block: the candidate is the current point itself. Evaluate
    // it anyway so callers relying on eval side state stay consistent.
    out.accepted = current;
    out.f_accepted = eval(current);
    out.step = step;
    return out;
  }
  double s = step;
  for (int t = 0;; ++t) {
    arma::cx_mat cand = projector(current - s * grad);
    const double f_cand = eval(cand);
    const double dist = squared_distance(cand, current);
    if (f_cand <= f_current - params.sufficient_decrease * dist) {
      out.accepted = std::move(cand);
      out.f_accepted = f_cand;
      out.step = s;
      out.backtracks = t;
      return out;
    }
    if (t == params.max_backtracks) {
      out.accepted = current;
      out.f_accepted = f_current;
      out.step = s;
      out.backtracks = t;
      out.stalled = true;
      return out;
    }
    s *= params.shrink;
  }
}

ApgmOptimizer::ApgmOptimizer(const ProblemContext& ctx,
                             const OptimizerConfig& config, DesignPoint initial)
    : ctx_(ctx), config_(config), point_(std::move(initial)) {
  if (ctx_.sigma2 <= 0)
    throw std::invalid_argument("optimizer: sigma2 must be positive");
  if (config_.line_search.growth < 1.0)
    throw std::invalid_argument("optimizer: growth must be >= 1");
  if (config_.patience < 1)
    throw std::invalid_argument("optimizer: patience must be >= 1");
  if (config_.max_iterations < 0)
    throw std::invalid_argument("optimizer: max_iterations must be >= 0");
  if (config_.tol < 0)
    throw std::invalid_argument("optimizer: tol must be >= 0");
  if (!(config_.initial_step > 0))
    throw std::invalid_argument("optimizer: initial_step must be positive");
  const arma::uword n_t = ctx_.props.w(1).n_cols;
  const arma::uword n_atoms = ctx_.props.w(1).n_rows;
  const arma::uword e_atoms = ctx_.props.u(1).n_cols;
  if (point_.precoder.n_rows != n_t ||
      static_cast<int>(point_.precoder.n_cols) != ctx_.diffs.num_streams)
    throw std::invalid_argument("optimizer: precoder dimensions mismatch");
  if (static_cast<int>(point_.phi.size()) != ctx_.props.tx_layers)
    throw std::invalid_argument("optimizer: expected one phi per layer");
  for (const auto& v : point_.phi)
    if (v.n_elem != n_atoms)
      throw std::invalid_argument("optimizer: phi length mismatch");
  if (static_cast<int>(point_.psi.size()) != ctx_.props.rx_layers)
    throw std::invalid_argument("optimizer: expected one psi per layer");
  for (const auto& v : point_.psi)
    if (v.n_elem != e_atoms)
      throw std::invalid_argument("optimizer: psi length mismatch");

  cache_.refresh(point_, ctx_.props, ctx_.g);
  current_ =
      evaluate_pairs(cache_.h * point_.precoder, ctx_.diffs, ctx_.sigma2);
  initial_f_ = current_.f;
  steps_.precoder = config_.initial_step;
  steps_.phase_tx.set_size(ctx_.props.tx_layers);
  steps_.phase_tx.fill(config_.initial_step);
  steps_.phase_rx.set_size(ctx_.props.rx_layers);
  steps_.phase_rx.fill(config_.initial_step);
}

void ApgmOptimizer::set_steps(const StepState& steps) {
  if (static_cast<int>(steps.phase_tx.n_elem) != ctx_.props.tx_layers ||
      static_cast<int>(steps.phase_rx.n_elem) != ctx_.props.rx_layers)
    throw std::invalid_argument("optimizer: step state size mismatch");
  if (!(steps.precoder > 0) || steps.phase_tx.min() <= 0 ||
      steps.phase_rx.min() <= 0)
    throw std::invalid_argument("optimizer: steps must be positive");
  steps_ = steps;
}

ApgmOptimizer::BlockOutcome ApgmOptimizer::precoder_block() {
  BlockOutcome outcome;
  const auto t0 = std::chrono::steady_clock::now();
  const arma::cx_mat ws =
      weighted_pair_sum(current_.pair_weights, ctx_.diffs);
  const arma::cx_mat grad =
      grad_precoder(cache_.h, point_.precoder, ws, ctx_.sigma2);
  PairObjective scratch;
  const auto eval = [&](const arma::cx_mat& cand) {
    scratch = evaluate_pairs(cache_.h * cand, ctx_.diffs, ctx_.sigma2);
    return scratch.f;
  };
  const auto res = line_search_block(
      eval, point_.precoder, current_.f, grad, steps_.precoder,
      [](const arma::cx_mat& m) { return project_power(m); },
      config_.line_search);
  steps_.precoder = res.step;
  if (res.stalled) {
    outcome.stalled = true;
  } else {
    point_.precoder = res.accepted;
    current_ = std::move(scratch);
  }
  outcome.backtracks = res.backtracks;
  outcome.seconds = seconds_since(t0);
  return outcome;
}

IterationRecord ApgmOptimizer::step() {
  IterationRecord rec;
  rec.iteration = ++iteration_;
  const double f_before = current_.f;
  const double growth = config_.line_search.growth;
  steps_.precoder *= growth;
  steps_.phase_tx *= growth;
  steps_.phase_rx *= growth;

  const auto unit_projector = [](const arma::cx_mat& m) {
    return arma::cx_mat(project_unit_modulus(arma::cx_vec(m)));
  };
  const auto record = [&](const BlockOutcome& o) {
    rec.block_backtracks.push_back(o.backtracks);
    rec.block_seconds.push_back(o.seconds);
    if (o.stalled) {
      ++rec.stalled_blocks;
      ++stall_events_;
    }
  };

  if (config_.optimize_precoder) {
    record(precoder_block());
  } else {
    record(BlockOutcome{});
  }

  // Transmit layers, each using the freshest values of the layers below it.
  // suffix[l] = diag(phi^l) W^l ... applied down to layer l with the phases
  // from before this sweep; layers above the active one stay at old values.
  const int tx_layers = ctx_.props.tx_layers;
  const arma::uword n_atoms = ctx_.props.w(1).n_rows;
  std::vector<arma::cx_mat> suffix(tx_layers + 2);
  suffix[tx_layers + 1] = complex_identity(n_atoms);
  for (int l = tx_layers; l >= 2; --l)
    suffix[l] =
        suffix[l + 1] * scale_rows(point_.phi[l - 1], ctx_.props.w(l));
  arma::cx_mat a_pre = ctx_.props.w(1);  // W^l diag(phi^{l-1}) ... W^1
  for (int l = 1; l <= tx_layers; ++l) {
    const auto t0 = std::chrono::steady_clock::now();
    BlockOutcome outcome;
    const arma::cx_mat& a_post = suffix[l + 1];
    const arma::cx_mat ws =
        weighted_pair_sum(current_.pair_weights, ctx_.diffs);
    const arma::cx_mat core =
        cache_.h * (point_.precoder * ws) * point_.precoder.t();
    const arma::cx_vec grad = phase_gradient(
        a_post.t(), cache_.zg.t() * core, a_pre.t(), ctx_.sigma2);
    PairObjective scratch;
    arma::cx_mat b_scratch, h_scratch;
    const auto eval = [&](const arma::cx_mat& cand) {
      b_scratch = a_post * scale_rows(arma::cx_vec(cand), a_pre);
      h_scratch = cache_.zg * b_scratch;
      scratch = evaluate_pairs(h_scratch * point_.precoder, ctx_.diffs,
                               ctx_.sigma2);
      return scratch.f;
    };
    const auto res = line_search_block(eval, point_.phi[l - 1], current_.f,
                                       grad, steps_.phase_tx(l - 1),
                                       unit_projector, config_.line_search);
    steps_.phase_tx(l - 1) = res.step;
    if (res.stalled) {
      outcome.stalled = true;
    } else {
      point_.phi[l - 1] = arma::cx_vec(res.accepted);
      cache_.b = std::move(b_scratch);
      cache_.h = std::move(h_scratch);
      current_ = std::move(scratch);
    }
    if (l < tx_layers)
      a_pre = ctx_.props.w(l + 1) * scale_rows(point_.phi[l - 1], a_pre);
    outcome.backtracks = res.backtracks;
    outcome.seconds = seconds_since(t0);
    record(outcome);
  }
  cache_.gb = ctx_.g * cache_.b;

  // Receive layers. rsuffix[k] = U^k diag(psi^k) ... U^K diag(psi^K) with
  // pre-sweep phases; c_pre accumulates the freshest layers below.
  const int rx_layers = ctx_.props.rx_layers;
  const arma::uword e_atoms = ctx_.props.u(1).n_cols;
  std::vector<arma::cx_mat> rsuffix(rx_layers + 2);
  rsuffix[rx_layers + 1] = complex_identity(e_atoms);
  for (int k = rx_layers; k >= 2; --k)
    rsuffix[k] =
        ctx_.props.u(k) * scale_rows(point_.psi[k - 1], rsuffix[k + 1]);
  arma::cx_mat c_pre = ctx_.props.u(1);  // U^1 diag(psi^1) ... U^k
  for (int k = 1; k <= rx_layers; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    BlockOutcome outcome;
    const arma::cx_mat& c_post = rsuffix[k + 1];
    const arma::cx_mat ws =
        weighted_pair_sum(current_.pair_weights, ctx_.diffs);
    const arma::cx_mat core =
        cache_.h * (point_.precoder * ws) * point_.precoder.t();
    const arma::cx_vec grad = phase_gradient(
        c_pre.t(), core * cache_.gb.t(), c_post.t(), ctx_.sigma2);
    PairObjective scratch;
    arma::cx_mat z_scratch, zg_scratch, h_scratch;
    const auto eval = [&](const arma::cx_mat& cand) {
      z_scratch = (c_pre * arma::diagmat(arma::cx_vec(cand))) * c_post;
      zg_scratch = z_scratch * ctx_.g;
      h_scratch = zg_scratch * cache_.b;
      scratch = evaluate_pairs(h_scratch * point_.precoder, ctx_.diffs,
                               ctx_.sigma2);
      return scratch.f;
    };
    const auto res = line_search_block(eval, point_.psi[k - 1], current_.f,
                                       grad, steps_.phase_rx(k - 1),
                                       unit_projector, config_.line_search);
    steps_.phase_rx(k - 1) = res.step;
    if (res.stalled) {
      outcome.stalled = true;
    } else {
      point_.psi[k - 1] = arma::cx_vec(res.accepted);
      cache_.z = std::move(z_scratch);
      cache_.zg = std::move(zg_scratch);
      cache_.h = std::move(h_scratch);
      current_ = std::move(scratch);
    }
    if (k < rx_layers)
      c_pre = (c_pre * arma::diagmat(point_.psi[k - 1])) * ctx_.props.u(k + 1);
    outcome.backtracks = res.backtracks;
    outcome.seconds = seconds_since(t0);
    record(outcome);
  }

  rec.f = current_.f;
  rec.r0 = cutoff_rate(current_.f, ctx_.diffs.num_vectors);
  const double rel = (f_before - current_.f) / std::abs(f_before);
  if (rel < config_.tol)
    ++streak_;
  else
    streak_ = 0;
  return rec;
}

bool ApgmOptimizer::done() const {
  return iteration_ >= config_.max_iterations || streak_ >= config_.patience;
}

RunResult run_apgm(const ProblemContext& ctx, const OptimizerConfig& config,
                   const DesignPoint& initial) {
  ApgmOptimizer opt(ctx, config, initial);
  RunResult out;
  out.initial_f = opt.objective();
  out.initial_r0 = cutoff_rate(out.initial_f, ctx.diffs.num_vectors);
  while (!opt.done()) out.trace.push_back(opt.step());
  out.final_point = opt.point();
  out.final_f = opt.objective();
  out.final_r0 = cutoff_rate(out.final_f, ctx.diffs.num_vectors);
  out.final_steps = opt.steps();
  out.stall_events = opt.stall_events();
  return out;
}

IterationRecord apgm_iteration(DesignPoint& point, StepState& steps,
                               const ProblemContext& ctx,
                               const LineSearchParams& params,
                               bool optimize_precoder) {
  OptimizerConfig config;
  config.line_search = params;
  config.max_iterations = 1;
  config.tol = 0.0;
  config.optimize_precoder = optimize_precoder;
  config.initial_step = 1.0;  // overwritten below
  ApgmOptimizer opt(ctx, config, point);
  opt.set_steps(steps);
  IterationRecord rec = opt.step();
  point = opt.point();
  steps = opt.steps();
  return rec;
}

DesignPoint random_design_point(Rng& rng, const PropagationSet& props,
                                int num_streams) {
  if (num_streams < 1)
    throw std::invalid_argument("design point: num_streams must be >= 1");
  const arma::uword n_t = props.w(1).n_cols;
  const arma::uword n_atoms = props.w(1).n_rows;
  const arma::uword e_atoms = props.u(1).n_cols;
  DesignPoint out;
  out.precoder = project_power(rng.cnormal_mat(n_t, num_streams));
  out.phi.resize(props.tx_layers);
  for (auto& v : out.phi) {
    v.set_size(n_atoms);
    for (arma::uword i = 0; i < n_atoms; ++i) {
      const double a = 2.0 * std::numbers::pi * rng.uniform();
      v(i) = {std::cos(a), std::sin(a)};
    }
  }
  out.psi.resize(props.rx_layers);
  for (auto& v : out.psi) {
    v.set_size(e_atoms);
    for (arma::uword i = 0; i < e_atoms; ++i) {
      const double a = 2.0 * std::numbers::pi * rng.uniform();
      v(i) = {std::cos(a), std::sin(a)};
    }
  }
  return out;
}

arma::cx_mat identity_precoder(int num_tx_antennas, int num_streams) {
  if (num_streams > num_tx_antennas)
    throw std::invalid_argument(
        "identity precoder requires num_streams <= num_tx_antennas");
  return arma::cx_mat(arma::eye(num_tx_antennas, num_streams),
                      arma::mat(num_tx_antennas, num_streams,
                                arma::fill::zeros));
}

}  // namespace simbeam
