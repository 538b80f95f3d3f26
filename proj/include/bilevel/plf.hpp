#ifndef BILEVEL_PLF_HPP
#define BILEVEL_PLF_HPP

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bilevel/core.hpp"

namespace bilevel {

// Continuous piecewise linear function stored as breakpoints with strictly
// increasing x. A single breakpoint represents a one-point domain.
struct PiecewiseLinearFunction {
  std::vector<std::pair<Rational, Rational>> breakpoints;

  bool empty() const { return breakpoints.empty(); }
  const Rational& domain_lo() const { return breakpoints.front().first; }
  const Rational& domain_hi() const { return breakpoints.back().first; }

  Rational eval(const Rational& x) const {
    if (breakpoints.empty()) throw ValidationError("evaluating empty function");
    if (x < domain_lo() || x > domain_hi())
      throw ValidationError("evaluation point " + rat_str(x) + " outside domain [" +
                            rat_str(domain_lo()) + ", " + rat_str(domain_hi()) + "]");
    for (size_t i = 0; i + 1 < breakpoints.size(); ++i) {
      const auto& [x0, y0] = breakpoints[i];
      const auto& [x1, y1] = breakpoints[i + 1];
      if (x <= x1) return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
    }
    return breakpoints.back().second;
  }
};

inline void plf_check(const PiecewiseLinearFunction& f) {
  for (size_t i = 0; i + 1 < f.breakpoints.size(); ++i)
    if (f.breakpoints[i].first >= f.breakpoints[i + 1].first)
      throw ValidationError("breakpoints not strictly increasing in x");
}

// Prefix-cost curve of a greedy order: value at integer k is the slope-cost
// of the first k items.
inline PiecewiseLinearFunction plf_selection(const ItemSet& items,
                                             const CostMap& key_primary,
                                             const CostMap& key_secondary,
                                             Policy policy, const CostMap& slope_cost,
                                             int lo, int hi) {
  if (lo < 0 || lo > hi || hi > static_cast<int>(items.size()))
    throw ValidationError("selection function range [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "] out of bounds");
  GreedyOrder order = greedy_order(items, key_primary, key_secondary, policy);
  PiecewiseLinearFunction f;
  Rational acc = 0;
  for (int k = 0; k <= hi; ++k) {
    if (k >= lo) f.breakpoints.emplace_back(rat(k), acc);
    if (k < hi) acc += cost_at(slope_cost, order.sequence[k], "slope cost");
  }
  return f;
}

// Convenience form with key = slope and id tie-breaking.
inline PiecewiseLinearFunction plf_selection(const ItemSet& items, const CostMap& cost,
                                             int lo, int hi) {
  CostMap zero;
  for (ItemId e : items) zero[e] = 0;
  return plf_selection(items, cost, zero, Policy::Optimistic, cost, lo, hi);
}

// Mirrored prefix-cost curve: value at x is the slope-cost of the greedy
// prefix of size total - x (left and right swapped).
inline PiecewiseLinearFunction plf_mirrored(const ItemSet& items,
                                            const CostMap& key_primary,
                                            const CostMap& key_secondary, Policy policy,
                                            const CostMap& slope_cost, int lo, int hi,
                                            int total) {
  if (lo > hi || total - hi < 0 || total - lo > static_cast<int>(items.size()))
    throw ValidationError("mirrored function range inconsistent with total");
  GreedyOrder order = greedy_order(items, key_primary, key_secondary, policy);
  std::vector<Rational> prefix(items.size() + 1);
  prefix[0] = 0;
  for (size_t i = 0; i < order.sequence.size(); ++i)
    prefix[i + 1] = prefix[i] + cost_at(slope_cost, order.sequence[i], "slope cost");
  PiecewiseLinearFunction f;
  for (int x = lo; x <= hi; ++x) f.breakpoints.emplace_back(rat(x), prefix[total - x]);
  return f;
}

inline PiecewiseLinearFunction plf_sum(const PiecewiseLinearFunction& f,
                                       const PiecewiseLinearFunction& g) {
  if (f.empty() || g.empty()) throw ValidationError("sum of empty function");
  if (f.domain_lo() != g.domain_lo() || f.domain_hi() != g.domain_hi())
    throw ValidationError("sum requires identical domains");
  std::vector<Rational> xs;
  for (const auto& [x, y] : f.breakpoints) xs.push_back(x);
  for (const auto& [x, y] : g.breakpoints) xs.push_back(x);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  PiecewiseLinearFunction out;
  for (const Rational& x : xs) out.breakpoints.emplace_back(x, f.eval(x) + g.eval(x));
  return out;
}

enum class EnvelopeMode { Max, Min };

namespace detail {

// Exact envelope of functions that may cover only part of the joint domain;
// points outside a function's domain do not contribute. The union of the
// domains must be an interval and the result must be continuous (guaranteed
// by the callers' structure).
inline PiecewiseLinearFunction envelope_partial(
    const std::vector<PiecewiseLinearFunction>& fs, EnvelopeMode mode) {
  if (fs.empty()) throw ValidationError("envelope of empty list");
  std::vector<Rational> xs;
  for (const auto& f : fs)
    for (const auto& [x, y] : f.breakpoints) xs.push_back(x);
  // Candidate crossing points between every pair of segments.
  for (size_t i = 0; i < fs.size(); ++i)
    for (size_t j = i + 1; j < fs.size(); ++j)
      for (size_t si = 0; si + 1 < fs[i].breakpoints.size(); ++si)
        for (size_t sj = 0; sj + 1 < fs[j].breakpoints.size(); ++sj) {
          const auto& [ax0, ay0] = fs[i].breakpoints[si];
          const auto& [ax1, ay1] = fs[i].breakpoints[si + 1];
          const auto& [bx0, by0] = fs[j].breakpoints[sj];
          const auto& [bx1, by1] = fs[j].breakpoints[sj + 1];
          Rational lo = std::max(ax0, bx0), hi = std::min(ax1, bx1);
          if (lo >= hi) continue;
          Rational sa = (ay1 - ay0) / (ax1 - ax0);
          Rational sb = (by1 - by0) / (bx1 - bx0);
          if (sa == sb) continue;
          // Intersection of y = ay0 + sa (x - ax0) and y = by0 + sb (x - bx0).
          Rational x = (by0 - ay0 + sa * ax0 - sb * bx0) / (sa - sb);
          if (x > lo && x < hi) xs.push_back(x);
        }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  auto value_at = [&](const Rational& x) -> std::optional<Rational> {
    std::optional<Rational> best;
    for (const auto& f : fs) {
      if (f.empty() || x < f.domain_lo() || x > f.domain_hi()) continue;
      Rational v = f.eval(x);
      if (!best || (mode == EnvelopeMode::Max ? v > *best : v < *best)) best = v;
    }
    return best;
  };
  PiecewiseLinearFunction out;
  for (const Rational& x : xs) {
    std::optional<Rational> v = value_at(x);
    if (!v) throw ValidationError("envelope domain has a gap at x = " + rat_str(x));
    out.breakpoints.emplace_back(x, *v);
  }
  for (size_t i = 0; i + 1 < xs.size(); ++i) {
    Rational mid = (xs[i] + xs[i + 1]) / 2;
    if (!value_at(mid))
      throw ValidationError("envelope domain has a gap at x = " + rat_str(mid));
  }
  plf_check(out);
  return out;
}

}  // namespace detail

// Exact pointwise maximum or minimum; all inputs must share one domain.
inline PiecewiseLinearFunction plf_envelope(
    const std::vector<PiecewiseLinearFunction>& fs, EnvelopeMode mode) {
  if (fs.empty()) throw ValidationError("envelope of empty list");
  for (const auto& f : fs) {
    if (f.empty()) throw ValidationError("envelope of empty function");
    if (f.domain_lo() != fs[0].domain_lo() || f.domain_hi() != fs[0].domain_hi())
      throw ValidationError("envelope requires identical domains");
  }
  return detail::envelope_partial(fs, mode);
}

// Extrema of a PLF occur at breakpoints; ties go to the smallest x.
inline std::pair<Rational, Rational> plf_extremum(const PiecewiseLinearFunction& f,
                                                  EnvelopeMode mode) {
  if (f.empty()) throw ValidationError("extremum of empty function");
  std::pair<Rational, Rational> best = f.breakpoints.front();
  for (const auto& bp : f.breakpoints) {
    bool better = mode == EnvelopeMode::Min ? bp.second < best.second
                                            : bp.second > best.second;
    if (better) best = bp;
  }
  return best;
}

inline PiecewiseLinearFunction plf_shift(const PiecewiseLinearFunction& f,
                                         const Rational& dx, const Rational& dy) {
  PiecewiseLinearFunction out = f;
  for (auto& [x, y] : out.breakpoints) {
    x += dx;
    y += dy;
  }
  return out;
}

// Drops interior breakpoints that lie on the segment between neighbours.
inline PiecewiseLinearFunction plf_normalize(const PiecewiseLinearFunction& f) {
  if (f.breakpoints.size() <= 2) return f;
  PiecewiseLinearFunction out;
  out.breakpoints.push_back(f.breakpoints.front());
  for (size_t i = 1; i + 1 < f.breakpoints.size(); ++i) {
    const auto& [x0, y0] = out.breakpoints.back();
    const auto& [x1, y1] = f.breakpoints[i];
    const auto& [x2, y2] = f.breakpoints[i + 1];
    if ((y1 - y0) * (x2 - x1) != (y2 - y1) * (x1 - x0))
      out.breakpoints.push_back(f.breakpoints[i]);
  }
  out.breakpoints.push_back(f.breakpoints.back());
  return out;
}

// One "x y" pair per line, exact rational notation.
inline std::string plf_dump(const PiecewiseLinearFunction& f) {
  std::string out;
  for (const auto& [x, y] : f.breakpoints) {
    out += rat_str(x);
    out += ' ';
    out += rat_str(y);
    out += '\n';
  }
  return out;
}

}  // namespace bilevel

#endif  // BILEVEL_PLF_HPP
