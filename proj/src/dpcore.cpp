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
#include "cclab/dpcore.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

#include "cclab/errors.hpp"

namespace cclab::dp {

void NoiseSpec::validate() const {
  if (!(scale > 0) || !std::isfinite(scale)) throw ParamError("noise scale must be positive");
  if (!(sensitivity >= 1) || !std::isfinite(sensitivity)) {
    throw ParamError("sensitivity must be at least 1");
  }
}

std::vector<std::int64_t> sample_noise_vector(const NoiseSpec& spec, std::size_t k, Rng& rng,
                                              unsigned width_bits) {
  spec.validate();
  if (k == 0) throw ParamError("noise vector needs k >= 1");
  if (width_bits < 4 || width_bits > 64) throw ParamError("width out of range");
  const double limit = std::ldexp(1.0, static_cast<int>(width_bits) - 2);
  std::vector<std::int64_t> out(k);
  std::normal_distribution<double> gauss(0.0, spec.scale);
  for (auto& v : out) {
    double x;
    if (spec.mechanism == Mechanism::Gaussian) {
      x = gauss(rng);
    } else {
      const double u = rng.uniform_open01() - 0.5;
      x = -spec.scale * std::copysign(1.0, u) * std::log1p(-2.0 * std::fabs(u));
    }
    x = std::clamp(std::round(x), -limit, limit);
    v = static_cast<std::int64_t>(x);
  }
  return out;
}

double gnmax_rdp_per_query(double order, double sigma, double c) {
  if (!(order > 1)) throw ParamError("RDP order must exceed 1");
  if (!(sigma > 0)) throw ParamError("sigma must be positive");
  if (!(c >= 1)) throw ParamError("sensitivity scale must be at least 1");
  return (c * c * order) / (sigma * sigma);
}

double laplace_dp_per_query(double b, double c) {
  if (!(b > 0)) throw ParamError("laplace scale must be positive");
  if (!(c >= 1)) throw ParamError("sensitivity scale must be at least 1");
  return 2.0 * c / b;
}

double rdp_per_query(const NoiseSpec& spec, double order) {
  if (spec.mechanism == Mechanism::Gaussian) {
    return gnmax_rdp_per_query(order, spec.scale, spec.sensitivity);
  }
  if (!(order > 1)) throw ParamError("RDP order must exceed 1");
  const double eps = laplace_dp_per_query(spec.scale, spec.sensitivity);
  return std::min(eps, order * eps * eps / 2.0);
}

namespace {

void append_range(std::vector<double>& out, int lo, int hi, double step) {
  for (int i = lo; i <= hi; ++i) out.push_back(i * step);
}

}  // namespace

const std::vector<double>& dense_orders() {
  static const std::vector<double> grid = [] {
    std::vector<double> g;
    append_range(g, 1001, 20000, 0.001);
    append_range(g, 2001, 10000, 0.01);
    append_range(g, 1001, 2560, 0.1);
    return g;
  }();
  return grid;
}

const std::vector<double>& coarse_orders() {
  static const std::vector<double> grid = [] {
    std::vector<double> g = {1.5, 1.75, 2, 2.5};
    for (int i = 3; i <= 64; ++i) g.push_back(i);
    g.push_back(128);
    g.push_back(256);
    return g;
  }();
  return grid;
}

RdpLedger::RdpLedger(std::vector<double> orders, double delta, double epsilon_max)
    : orders_(std::move(orders)), rdp_(orders_.size(), 0.0), delta_(delta), epsilon_max_(epsilon_max) {
  if (orders_.empty()) throw ParamError("ledger needs at least one order");
  for (double o : orders_) {
    if (!(o > 1)) throw ParamError("RDP order must exceed 1");
  }
  if (!(delta > 0 && delta < 1)) throw ParamError("delta must lie in (0, 1)");
}

void RdpLedger::charge(const NoiseSpec& spec) {
  spec.validate();
  for (std::size_t j = 0; j < orders_.size(); ++j) rdp_[j] += rdp_per_query(spec, orders_[j]);
  ++queries_;
}

void RdpLedger::charge_rdp(const std::vector<double>& per_order_cost) {
  if (per_order_cost.size() != orders_.size()) throw LengthMismatch("cost vector does not match grid");
  for (std::size_t j = 0; j < orders_.size(); ++j) {
    if (!(per_order_cost[j] >= 0)) throw ParamError("RDP cost must be non-negative");
    rdp_[j] += per_order_cost[j];
  }
  ++queries_;
}

std::string RdpLedger::snapshot() const {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "# rdp-ledger queries=" << queries_ << " delta=" << delta_ << " orders=" << orders_.size()
     << "\n";
  for (std::size_t j = 0; j < orders_.size(); ++j) os << orders_[j] << ' ' << rdp_[j] << '\n';
  return os.str();
}

RdpLedger charge_query(RdpLedger ledger, const NoiseSpec& spec) {
  ledger.charge(spec);
  return ledger;
}

double rdp_to_dp(const RdpLedger& ledger, double delta) {
  if (!(delta > 0 && delta < 1)) throw ParamError("delta must lie in (0, 1)");
  const double log_inv_delta = std::log(1.0 / delta);
  double best = std::numeric_limits<double>::infinity();
  const auto& orders = ledger.orders();
  const auto& rdp = ledger.rdp();
  for (std::size_t j = 0; j < orders.size(); ++j) {
    best = std::min(best, rdp[j] + log_inv_delta / (orders[j] - 1.0));
  }
  return best;
}

Composition strong_composition(double epsilon, double delta, std::uint64_t k, double delta_slack) {
  if (epsilon < 0 || delta < 0 || delta_slack < 0) throw ParamError("composition inputs must be >= 0");
  if (k < 1) throw ParamError("composition needs k >= 1");
  const double kk = static_cast<double>(k);
  double eps = 0.0;
  if (epsilon > 0) {
    if (!(delta_slack > 0)) throw ParamError("delta slack must be positive");
    eps = epsilon * std::sqrt(2.0 * kk * std::log(1.0 / delta_slack)) +
          kk * epsilon * std::expm1(epsilon);
  }
  return {eps, kk * delta + delta_slack};
}

Admission admit_query(const RdpLedger& ledger, const NoiseSpec& spec, double delta,
                      double epsilon_max) {
  const RdpLedger next = charge_query(ledger, spec);
  return rdp_to_dp(next, delta) <= epsilon_max ? Admission::Admit : Admission::Refuse;
}

}  // namespace cclab::dp
