// Copyright 2026 The cclab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

// Noise mechanisms of the privacy guardian and the querying party's privacy
// accountant.
//
// Per-query costs are data independent:
//   Gaussian noisy argmax   (λ, C² λ / σ²)-RDP at every order λ
//   Laplace noisy argmax    2C/b-DP, carried into RDP as min(ε, λ ε² / 2)
// where C scales the L1 / L2 sensitivity of the vote histogram (C = 1 for
// a single honest-but-curious answering party). Costs add across queries
// per order and are converted to (ε, δ)-DP by minimising over the order
// grid. Data-dependent tightening is not implemented.

#include <cstdint>
#include <string>
#include <vector>

#include "cclab/rng.hpp"

namespace cclab::dp {

enum class Mechanism : std::uint8_t { Gaussian, Laplace };

struct NoiseSpec {
  Mechanism mechanism = Mechanism::Gaussian;
  double scale = 40.0;        // σ for Gaussian, b for Laplace
  double sensitivity = 1.0;   // C

  static NoiseSpec gaussian(double sigma, double c = 1.0) { return {Mechanism::Gaussian, sigma, c}; }
  static NoiseSpec laplace(double b, double c = 1.0) { return {Mechanism::Laplace, b, c}; }

  // ParamError unless scale > 0 and sensitivity >= 1.
  void validate() const;
};

// k rounded samples, each clamped to [-2^(w-2), 2^(w-2)].
std::vector<std::int64_t> sample_noise_vector(const NoiseSpec& spec, std::size_t k, Rng& rng,
                                              unsigned width_bits = 32);

double gnmax_rdp_per_query(double order, double sigma, double c = 1.0);
double laplace_dp_per_query(double b, double c = 1.0);
// RDP cost of one query at `order` for either mechanism.
double rdp_per_query(const NoiseSpec& spec, double order);

// Roughly 28k orders: step 0.001 on (1, 20], 0.01 up to 100, 0.1 up to 256.
const std::vector<double>& dense_orders();
// {1.5, 1.75, 2, 2.5, 3, 4, ..., 64, 128, 256}.
const std::vector<double>& coarse_orders();

class RdpLedger {
 public:
  explicit RdpLedger(std::vector<double> orders = dense_orders(), double delta = 1e-5,
                     double epsilon_max = 2.0);

  const std::vector<double>& orders() const { return orders_; }
  const std::vector<double>& rdp() const { return rdp_; }
  std::uint64_t queries() const { return queries_; }
  double delta() const { return delta_; }
  double epsilon_max() const { return epsilon_max_; }

  void charge(const NoiseSpec& spec);
  void charge_rdp(const std::vector<double>& per_order_cost);

  // One "order epsilon" line per grid point, preceded by a header line.
  std::string snapshot() const;

 private:
  std::vector<double> orders_;
  std::vector<double> rdp_;
  std::uint64_t queries_ = 0;
  double delta_;
  double epsilon_max_;
};

RdpLedger charge_query(RdpLedger ledger, const NoiseSpec& spec);
double rdp_to_dp(const RdpLedger& ledger, double delta);
inline double rdp_to_dp(const RdpLedger& ledger) { return rdp_to_dp(ledger, ledger.delta()); }

struct Composition {
  double epsilon;
  double delta;
};
Composition strong_composition(double epsilon, double delta, std::uint64_t k, double delta_slack);

enum class Admission : std::uint8_t { Admit, Refuse };
Admission admit_query(const RdpLedger& ledger, const NoiseSpec& spec, double delta,
                      double epsilon_max);
inline Admission admit_query(const RdpLedger& ledger, const NoiseSpec& spec) {
  return admit_query(ledger, spec, ledger.delta(), ledger.epsilon_max());
}

}  // namespace cclab::dp
