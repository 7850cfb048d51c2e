#pragma once

#include <span>
#include <vector>

#include "epoa/interim.hpp"
#include "epoa/thresholds.hpp"

namespace epoa {

// Welfare approximation factor mu / (1 - e^{-mu}) implied by mu-revenue
// covering alone. Throws NonPositiveMu.
double rho(double mu);

// Geometric value grid on [low, cap] with `points` entries.
std::vector<double> value_grid(double low, double cap, std::size_t points);

// min over allocated bidders i and values v of
//   max over grid bids b of [mu (v x_i(b) - p_i(b)) + T_i(xbar_i)] / v.
// Excluded bidders are skipped; throws EmptyBidderSet if none remain.
double lambda_mu1(const InterimCurves& curves, const ThresholdSet& thresholds,
                  double mu, std::span<const double> values);

struct ConcentrationBound {
  double poa = 1.0;     // worst-case ratio, floored at 1
  double lambda = 0.0;  // mu / poa
  double worst_value = 0.0;  // maximizing v (value normalized to tau(1) = 1)
  // Coarser bound from tau(0) >= (1 - 1/k) tau(1) alone:
  // lambda = mu (1 - 1/k) / max(1, mu).
  double lambda_crude = 0.0;
};

// Price of anarchy when every feasible price per click is at least a
// (1 - 1/k) fraction of the price of the maximum allocation. Maximizes
//   v / (v - 1 + (1 + (v - 1) ln((v - 1) / (v - 1 + 1/k))) / mu)
// over v > 1. Throws DomainError when k < 1 or mu <= 0.
ConcentrationBound lambda_concentration(double mu, double k);

}  // namespace epoa
