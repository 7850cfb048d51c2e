#include "epoa/value_cover.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "epoa/errors.hpp"

namespace epoa {

double rho(double mu) {
  if (!(mu > 0.0)) throw NonPositiveMu();
  if (mu < 1e-8) return 1.0 + mu / 2.0;
  return mu / -std::expm1(-mu);
}

std::vector<double> value_grid(double low, double cap, std::size_t points) {
  if (!(low > 0.0) || !(cap >= low) || points < 1)
    throw DomainError("invalid value grid");
  if (points == 1 || cap == low) return {cap};
  std::vector<double> out(points);
  const double a = std::log(low), b = std::log(cap);
  for (std::size_t k = 0; k + 1 < points; ++k)
    out[k] = std::exp(a + (b - a) * static_cast<double>(k) /
                              static_cast<double>(points - 1));
  out.back() = cap;
  return out;
}

double lambda_mu1(const InterimCurves& curves, const ThresholdSet& thresholds,
                  double mu, std::span<const double> values) {
  if (!(mu > 0.0)) throw NonPositiveMu();
  if (values.empty()) throw DomainError("empty value grid");
  double best = std::numeric_limits<double>::infinity();
  bool any = false;
  for (BidderIndex i = 0; i < curves.num_bidders(); ++i) {
    if (!thresholds.curves[i]) continue;
    any = true;
    const double top = thresholds.integral(i, thresholds.max_alloc[i]);
    const auto& x = curves.alloc[i];
    const auto& p = curves.pay[i];
    for (double v : values) {
      double utility = 0.0;  // b = 0 would be no worse than abstaining
      for (std::size_t g = 0; g < x.size(); ++g)
        utility = std::max(utility, v * x[g] - p[g]);
      best = std::min(best, (mu * utility + top) / v);
    }
  }
  if (!any) throw EmptyBidderSet();
  return best;
}

namespace {

double concentration_ratio(double v, double mu, double k) {
  const double u = v - 1.0;
  const double floor_price = 1.0 - 1.0 / k;
  const double log_term = u > 0.0 ? u * std::log(u / (v - floor_price)) : 0.0;
  return v / (u + (1.0 + log_term) / mu);
}

}  // namespace

ConcentrationBound lambda_concentration(double mu, double k) {
  if (!(k >= 1.0)) throw DomainError("concentration parameter k must be >= 1");
  if (!(mu > 0.0)) throw DomainError("mu must be positive");

  // Scan u = v - 1 on a log grid, then refine the best bracket by golden
  // section in log u.
  constexpr double kLogLow = -9.0 * 2.302585092994046;   // ln 1e-9
  constexpr double kLogHigh = 6.0 * 2.302585092994046;   // ln 1e6
  constexpr int kScan = 600;
  auto f = [&](double log_u) {
    return concentration_ratio(1.0 + std::exp(log_u), mu, k);
  };
  const double step = (kLogHigh - kLogLow) / kScan;
  int best_k = 0;
  double best = f(kLogLow);
  for (int s = 1; s <= kScan; ++s) {
    const double val = f(kLogLow + step * s);
    if (val > best) {
      best = val;
      best_k = s;
    }
  }
  double lo = kLogLow + step * std::max(best_k - 1, 0);
  double hi = kLogLow + step * std::min(best_k + 1, kScan);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo), d = lo + inv_phi * (hi - lo);
  double fc = f(c), fd = f(d);
  while (hi - lo > 1e-7) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  const double log_u = fc > fd ? c : d;
  double worst = std::max(fc, fd);
  double arg = log_u;
  if (best > worst) {
    worst = best;
    arg = kLogLow + step * best_k;
  }

  ConcentrationBound out;
  out.poa = std::max(1.0, worst);
  out.lambda = mu / out.poa;
  out.worst_value = 1.0 + std::exp(arg);
  out.lambda_crude = mu * (1.0 - 1.0 / k) / std::max(1.0, mu);
  return out;
}

}  // namespace epoa
