#include "taxiq/detail/moments.hpp"

#include <cmath>

namespace taxiq::detail {

ChainMoments& ChainMoments::operator+=(const ChainMoments& o) noexcept {
  z += o.z;
  admit += o.admit;
  admit_queue += o.admit_queue;
  dispatch += o.dispatch;
  renege += o.renege;
  queue_p += o.queue_p;
  queue_t += o.queue_t;
  match += o.match;
  positive += o.positive;
  nonnegative += o.nonnegative;
  nonpositive += o.nonpositive;
  return *this;
}

ChainMoments& ChainMoments::operator*=(double f) noexcept {
  z *= f;
  admit *= f;
  admit_queue *= f;
  dispatch *= f;
  renege *= f;
  queue_p *= f;
  queue_t *= f;
  match *= f;
  positive *= f;
  nonnegative *= f;
  nonpositive *= f;
  return *this;
}

ChainMoments operator+(ChainMoments a, const ChainMoments& b) noexcept {
  a += b;
  return a;
}

TaxiSide taxi_side(const ModelParams& p) {
  const int cap = p.capacity_n;
  const double rho0 = p.lambda / p.mu1;
  TaxiSide out{};
  auto& m = out.moments;
  // j taxis waiting, state n = -j
  for (int j = cap; j >= 0; --j) {
    const double w = rho0 <= 1.0 ? std::pow(rho0, cap - j) : std::pow(rho0, -j);
    m.z += w;
    m.nonpositive += w;
    m.match += p.k1 * w;
    m.queue_t += j * w;
    if (j > 0) m.admit += p.lambda * w;
    if (j < cap) m.dispatch += p.mu1 * w;
    if (j == 0) {
      m.nonnegative += w;
      out.weight_at_zero = w;
    }
  }
  return out;
}

namespace {

double linear_part(const ModelParams& p, const ChainMoments& m) noexcept {
  return (p.reward_r - p.price_p) * m.admit + p.price_p * m.dispatch - p.cost_cp * m.queue_p -
         p.cost_ct * m.queue_t;
}

double matching_flow(const ModelParams& p, const ChainMoments& m) noexcept {
  return p.cost_cmp * m.admit + p.cost_cmt * m.dispatch;
}

}  // namespace

double welfare(const ModelParams& p, const ChainMoments& m) noexcept {
  return linear_part(p, m) / m.z - m.match * matching_flow(p, m) / (m.z * m.z);
}

double welfare_shift(const ModelParams& p, const ChainMoments& base, const ChainMoments& delta) noexcept {
  const double z = base.z;
  const double dz = delta.z;
  const double z1 = z + dz;

  const double lin = linear_part(p, base);
  const double dlin = linear_part(p, delta);
  const double first = (dlin * z - lin * dz) / (z * z1);

  const double flow = matching_flow(p, base);
  const double dflow = matching_flow(p, delta);
  const double q = base.match * flow;
  const double dq = delta.match * flow + base.match * dflow + delta.match * dflow;
  // Q'/z1^2 - Q/z^2 = (dQ z^2 - Q (2 z dz + dz^2)) / (z^2 z1^2)
  const double second = (dq * z * z - q * dz * (2.0 * z + dz)) / (z * z * z1 * z1);
  return first - second;
}

}  // namespace taxiq::detail
