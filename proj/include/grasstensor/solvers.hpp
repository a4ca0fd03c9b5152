#pragma once

#include <chrono>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "rayleigh.hpp"

namespace gt {

enum class SolveStatus { converged, max_iter, stalled, not_ascent };

[[nodiscard]] inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged:
      return "converged";
    case SolveStatus::max_iter:
      return "max_iter";
    case SolveStatus::stalled:
      return "stalled";
    case SolveStatus::not_ascent:
      return "not_ascent";
  }
  return "unknown";
}

enum class Method { newton, rcg, hooi };

[[nodiscard]] inline const char* to_string(Method m) {
  switch (m) {
    case Method::newton:
      return "newton";
    case Method::rcg:
      return "rcg";
    case Method::hooi:
      return "hooi";
  }
  return "unknown";
}

[[nodiscard]] inline Method method_from_string(const std::string& s) {
  if (s == "newton") return Method::newton;
  if (s == "rcg") return Method::rcg;
  if (s == "hooi") return Method::hooi;
  throw std::invalid_argument("unknown method: " + s);
}

struct SolverConfig {
  double epsilon = 1e-13;    // stop when ||grad|| / max(|rho|, 1) falls below
  int max_iter = 500;
  int reset_every = 0;       // conjugate restart period; 0 picks the manifold dimension
  double armijo_c1 = 1e-4;
  double armijo_shrink = 0.5;
  int max_backtracks = 30;
  bool safeguard = true;     // ascent test + line search around the Newton step
  bool record_timing = false;
};

struct TraceRow {
  int iter = 0;
  double rho = 0;
  double relgrad = 0;
  double alpha = 0;
  std::int64_t millis = 0;
};

template <class Scalar>
struct SolveResult {
  ProductPoint<Scalar> point;
  double rho = 0;
  double relgrad = 0;
  int iters = 0;
  SolveStatus status = SolveStatus::max_iter;
  std::vector<TraceRow> trace;
};

namespace detail {

class StepClock {
 public:
  explicit StepClock(bool enabled) : enabled_(enabled), start_(std::chrono::steady_clock::now()) {}
  [[nodiscard]] std::int64_t millis() const {
    if (!enabled_) return 0;
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  bool enabled_;
  std::chrono::steady_clock::time_point start_;
};

// Backtracking sufficient-increase search on f = sign * rho along the QR
// retraction path.  When the requested gain sinks below the roundoff floor of
// f the current alpha is accepted as-is: near a maximum the model gain is
// smaller than what finite precision can certify.
template <class Scalar>
double armijo_step(const ObjectiveMatrix<Scalar>& obj, const ProductPoint<Scalar>& p, const TangentCoord<Scalar>& dir,
                   double slope, double f0, double alpha0, const SolverConfig& cfg) {
  double alpha = alpha0;
  for (int b = 0; b <= cfg.max_backtracks; ++b) {
    const double need = cfg.armijo_c1 * alpha * slope;
    if (need <= 8 * std::numeric_limits<double>::epsilon() * std::max(std::abs(f0), 1.0)) return alpha;
    const double f = obj.sign() * obj.rho(qr_retract(p, dir, alpha));
    if (f >= f0 + need) return alpha;
    alpha *= cfg.armijo_shrink;
  }
  return 0.0;
}

template <class Scalar>
TangentCoord<Scalar> combined(const TangentCoord<Scalar>& g, double beta, const TangentCoord<Scalar>& dir) {
  TangentCoord<Scalar> out = g;
  for (std::size_t j = 0; j < out.blocks.size(); ++j) out.blocks[j] += Scalar(beta) * dir.blocks[j];
  return out;
}

}  // namespace detail

// Riemannian Newton ascent on sign * rho.  The reduced Hessian system is
// solved by LDLT with an LU fallback; directions failing the ascent test fall
// back to the gradient, and steps pass an Armijo check unless the safeguard is
// switched off.
template <class Scalar>
SolveResult<Scalar> newton_like(const ObjectiveMatrix<Scalar>& obj, const ProductPoint<Scalar>& start,
                                const SolverConfig& cfg = {}) {
  SolveResult<Scalar> res;
  res.point = start;
  const detail::StepClock clock(cfg.record_timing);
  for (int it = 0;; ++it) {
    const auto ev = evaluate(obj, res.point, res.point.order() > 1);
    res.rho = ev.rho;
    res.relgrad = relative_gradient(ev);
    if (res.relgrad <= cfg.epsilon) {
      res.status = SolveStatus::converged;
      res.trace.push_back({it, ev.rho, res.relgrad, 0.0, clock.millis()});
      break;
    }
    if (it >= cfg.max_iter) {
      res.status = SolveStatus::max_iter;
      res.trace.push_back({it, ev.rho, res.relgrad, 0.0, clock.millis()});
      break;
    }

    const VecX<double> g = pack_tangent(ev.grad);
    const MatX<double> h0 = hessian_reduced(ev, res.point);
    const MatX<double> h = (h0 + h0.transpose()) / 2.0;
    VecX<double> x = h.ldlt().solve(-g);
    if ((h * x + g).norm() > 1e-8 * std::max(1.0, g.norm())) {
      x = h.fullPivLu().solve(-g);
      if ((h * x + g).norm() > 1e-6 * std::max(1.0, g.norm())) x = g;
    }
    TangentCoord<Scalar> dir = unpack_tangent<Scalar>(x, res.point);
    double slope = metric(ev.grad, dir);
    double alpha = 1.0;
    const double f0 = ev.sign * ev.rho;
    if (cfg.safeguard) {
      if (slope <= 0) {
        dir = ev.grad;
        slope = metric(ev.grad, ev.grad);
      }
      alpha = detail::armijo_step(obj, res.point, dir, slope, f0, 1.0, cfg);
      if (alpha == 0.0) {
        res.status = SolveStatus::stalled;
        res.trace.push_back({it, ev.rho, res.relgrad, 0.0, clock.millis()});
        break;
      }
    } else if (slope <= 0) {
      res.status = SolveStatus::not_ascent;
      res.trace.push_back({it, ev.rho, res.relgrad, 0.0, clock.millis()});
      break;
    }
    res.trace.push_back({it, ev.rho, res.relgrad, alpha, clock.millis()});
    res.point = qr_retract(res.point, dir, alpha);
  }
  res.iters = static_cast<int>(res.trace.size()) - 1;
  return res;
}

// Conjugate-gradient ascent with the exact one-dimensional step: along a
// direction the slope and curvature of sign * rho are available in closed
// form, so alpha = -slope/curvature whenever the curvature is negative.
// Directions mix by Polak-Ribiere (clipped at zero) with periodic restarts.
template <class Scalar>
SolveResult<Scalar> rcg(const ObjectiveMatrix<Scalar>& obj, const ProductPoint<Scalar>& start,
                        const SolverConfig& cfg = {}) {
  SolveResult<Scalar> res;
  res.point = start;
  const int reset = cfg.reset_every > 0 ? cfg.reset_every : static_cast<int>(dimension(start));
  const detail::StepClock clock(cfg.record_timing);
  auto ev = evaluate(obj, res.point, res.point.order() > 1);
  TangentCoord<Scalar> dir = ev.grad;
  double gg = metric(ev.grad, ev.grad);
  for (int it = 0;; ++it) {
    res.rho = ev.rho;
    res.relgrad = relative_gradient(ev);
    if (res.relgrad <= cfg.epsilon) {
      res.status = SolveStatus::converged;
      res.trace.push_back({it, ev.rho, res.relgrad, 0.0, clock.millis()});
      break;
    }
    if (it >= cfg.max_iter) {
      res.status = SolveStatus::max_iter;
      res.trace.push_back({it, ev.rho, res.relgrad, 0.0, clock.millis()});
      break;
    }
    if (it > 0 && it % reset == 0) dir = ev.grad;
    double slope = metric(ev.grad, dir);
    if (slope <= 0) {
      dir = ev.grad;
      slope = gg;
    }
    const auto ld = line_derivatives(ev, res.point, dir);
    const double f0 = ev.sign * ev.rho;
    double alpha = 0.0;
    if (ld.second < 0 && std::abs(ld.second) >= 1e-14 * std::abs(ld.first)) {
      alpha = -ld.first / ld.second;
      const double need = cfg.armijo_c1 * alpha * slope;
      if (need > 8 * std::numeric_limits<double>::epsilon() * std::max(std::abs(f0), 1.0) &&
          obj.sign() * obj.rho(qr_retract(res.point, dir, alpha)) < f0 + need)
        alpha = detail::armijo_step(obj, res.point, dir, slope, f0, alpha, cfg);
    } else {
      alpha = detail::armijo_step(obj, res.point, dir, slope, f0, 1.0, cfg);
    }
    if (alpha == 0.0) {
      res.status = SolveStatus::stalled;
      res.trace.push_back({it, ev.rho, res.relgrad, 0.0, clock.millis()});
      break;
    }
    res.trace.push_back({it, ev.rho, res.relgrad, alpha, clock.millis()});
    res.point = qr_retract(res.point, dir, alpha);

    auto ev_next = evaluate(obj, res.point, res.point.order() > 1);
    const double gg_next = metric(ev_next.grad, ev_next.grad);
    const double beta = std::max(0.0, (gg_next - metric(ev_next.grad, ev.grad)) / gg);
    dir = detail::combined(ev_next.grad, beta, dir);
    ev = std::move(ev_next);
    gg = gg_next;
  }
  res.iters = static_cast<int>(res.trace.size()) - 1;
  return res;
}

// Alternating per-mode update for the squared-compression objective: each
// factor is replaced by the leading left singular vectors of the tensor
// compressed in every other mode.  Ascends monotonically; one trace row per
// sweep.
template <class Scalar>
SolveResult<Scalar> hooi(const ObjectiveMatrix<Scalar>& obj, const ProductPoint<Scalar>& start,
                         const SolverConfig& cfg = {}) {
  if (obj.kind() != ObjKind::rank_one) throw std::invalid_argument("hooi: requires a rank-one objective");
  if (obj.sense() == Sense::minimize) throw std::invalid_argument("hooi: maximizes only");
  SolveResult<Scalar> res;
  res.point = start;
  const auto& amps = obj.amplitudes();
  const Index r = res.point.order();
  const detail::StepClock clock(cfg.record_timing);
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int it = 0;; ++it) {
    const auto ev = evaluate(obj, res.point);
    res.rho = ev.rho;
    res.relgrad = relative_gradient(ev);
    const bool flat = it > 0 && std::abs(res.rho - prev) <= cfg.epsilon * std::max(1.0, std::abs(res.rho));
    if (res.relgrad <= cfg.epsilon || flat) {
      res.status = SolveStatus::converged;
      res.trace.push_back({it, ev.rho, res.relgrad, 0.0, clock.millis()});
      break;
    }
    if (it >= cfg.max_iter) {
      res.status = SolveStatus::max_iter;
      res.trace.push_back({it, ev.rho, res.relgrad, 0.0, clock.millis()});
      break;
    }
    res.trace.push_back({it, ev.rho, res.relgrad, 1.0, clock.millis()});
    prev = res.rho;
    for (Index j = 0; j < r; ++j) {
      DenseTensor<Scalar> core = amps;
      for (Index l = 0; l < r; ++l) {
        if (l == j) continue;
        core = mode_multiply(core, MatX<Scalar>(res.point.factors[static_cast<std::size_t>(l)].basis().adjoint()), l);
      }
      const MatX<Scalar> b = unfold_mode(core, j);
      const MatX<Scalar> u = detail::leading_left_singular(b, res.point.factors[static_cast<std::size_t>(j)].m());
      res.point.factors[static_cast<std::size_t>(j)] = GrassPoint<Scalar>::from_isometry(u);
    }
  }
  res.iters = static_cast<int>(res.trace.size()) - 1;
  return res;
}

template <class Scalar>
SolveResult<Scalar> run_method(Method method, const ObjectiveMatrix<Scalar>& obj, const ProductPoint<Scalar>& start,
                               const SolverConfig& cfg = {}) {
  switch (method) {
    case Method::newton:
      return newton_like(obj, start, cfg);
    case Method::rcg:
      return rcg(obj, start, cfg);
    case Method::hooi:
      return hooi(obj, start, cfg);
  }
  throw std::logic_error("unreachable method");
}

}  // namespace gt
