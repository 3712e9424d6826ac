#include "evfusion/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "evfusion/error.hpp"

namespace evfusion {

namespace {

struct Targets {
  double hi;
  double lo;
};

Targets check_and_count(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw Error(ErrorKind::LengthMismatch, fmt::format("{} scores but {} labels", scores.size(), labels.size()));
  }
  if (scores.size() < 2) throw Error(ErrorKind::InsufficientInput, "need at least 2 samples");
  std::size_t pos = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) throw Error(ErrorKind::NonFinite, fmt::format("score {} is not finite", i));
    if (labels[i] != 0 && labels[i] != 1) {
      throw Error(ErrorKind::InvalidConfig, fmt::format("label {} is neither 0 nor 1", labels[i]));
    }
    pos += static_cast<std::size_t>(labels[i]);
  }
  const std::size_t neg = scores.size() - pos;
  if (pos == 0 || neg == 0) throw Error(ErrorKind::SingleClass, "both label values must be present");
  return {(pos + 1.0) / (pos + 2.0), 1.0 / (neg + 2.0)};
}

// Negative log-likelihood of target t under p = 1/(1+exp(f)), written to
// avoid overflow for large |f|.
double nll_term(double f, double t) {
  return f >= 0.0 ? t * f + std::log1p(std::exp(-f)) : (t - 1.0) * f + std::log1p(std::exp(f));
}

double objective(std::span<const double> s, std::span<const int> y, Targets tg, double a, double b) {
  double total = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) total += nll_term(a * s[i] + b, y[i] ? tg.hi : tg.lo);
  return total;
}

}  // namespace

PlattModel platt_fit(std::span<const double> scores, std::span<const int> labels, PlattFitOptions options) {
  const Targets tg = check_and_count(scores, labels);
  const double n_pos = std::accumulate(labels.begin(), labels.end(), 0.0);
  const double n_neg = static_cast<double>(labels.size()) - n_pos;

  double a = 0.0;
  double b = std::log((n_neg + 1.0) / (n_pos + 1.0));
  double fval = objective(scores, labels, tg, a, b);
  constexpr double kHessianRidge = 1e-12;
  constexpr double kMinStep = 1e-10;

  for (int it = 0; it < options.max_iterations; ++it) {
    // Gradient and Hessian of the negative log-likelihood.
    double h11 = kHessianRidge, h22 = kHessianRidge, h21 = 0.0, g1 = 0.0, g2 = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      const double f = a * scores[i] + b;
      double p, q;
      if (f >= 0.0) {
        p = std::exp(-f) / (1.0 + std::exp(-f));
        q = 1.0 / (1.0 + std::exp(-f));
      } else {
        p = 1.0 / (1.0 + std::exp(f));
        q = std::exp(f) / (1.0 + std::exp(f));
      }
      const double d2 = p * q;
      const double d1 = (labels[i] ? tg.hi : tg.lo) - p;
      h11 += scores[i] * scores[i] * d2;
      h22 += d2;
      h21 += scores[i] * d2;
      g1 += scores[i] * d1;
      g2 += d1;
    }
    if (std::hypot(g1, g2) < options.gradient_tolerance) break;

    const double det = h11 * h22 - h21 * h21;
    const double da = -(h22 * g1 - h21 * g2) / det;
    const double db = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * da + g2 * db;

    double step = 1.0;
    while (step >= kMinStep) {
      const double na = a + step * da;
      const double nb = b + step * db;
      const double nf = objective(scores, labels, tg, na, nb);
      if (nf < fval + 1e-4 * step * gd) {
        a = na;
        b = nb;
        fval = nf;
        break;
      }
      step /= 2.0;
    }
    if (step < kMinStep) break;
  }
  return {a, b};
}

double platt_log_likelihood(std::span<const double> scores, std::span<const int> labels, const PlattModel& model) {
  const Targets tg = check_and_count(scores, labels);
  return -objective(scores, labels, tg, model.a, model.b);
}

double platt_apply(double score, const PlattModel& model) {
  const double f = score * model.a + model.b;
  const double p = f >= 0.0 ? std::exp(-f) / (1.0 + std::exp(-f)) : 1.0 / (1.0 + std::exp(f));
  return std::clamp(p, 1e-12, 1.0 - 1e-12);
}

Interval derive_event_range(std::span<const double> samples, bool clamp_at_zero) {
  if (samples.size() < 2) throw Error(ErrorKind::InsufficientInput, "need at least 2 samples");
  const double n = static_cast<double>(samples.size());
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : samples) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));

  Interval out;
  if (sd == 0.0) {
    const double eps = 1e-6 * std::max(1.0, std::abs(mean));
    out = {mean - eps, mean + eps};
  } else {
    out = {mean - 2.0 * sd, mean + 2.0 * sd};
  }
  if (clamp_at_zero) out.lower = std::max(0.0, out.lower);
  return out;
}

}  // namespace evfusion
