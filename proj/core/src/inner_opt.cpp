#include "bopt/inner_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "bopt/errors.hpp"

namespace bopt {

void Box::check() const {
  if (lower.size() != upper.size())
    throw DimensionMismatch("box bounds have different lengths");
  if (lower.empty()) throw DimensionMismatch("box must have at least one dimension");
  for (std::size_t j = 0; j < lower.size(); ++j)
    if (!std::isfinite(lower[j]) || !std::isfinite(upper[j]) || !(lower[j] < upper[j]))
      throw RangeError("box bounds must be finite with lower < upper");
}

bool Box::contains(std::span<const double> x) const {
  if (x.size() != lower.size()) return false;
  for (std::size_t j = 0; j < x.size(); ++j)
    if (x[j] < lower[j] || x[j] > upper[j]) return false;
  return true;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDirectEpsilon = 1e-4;
constexpr int kMaxLevel = 30;  // side 3^-30, far below double resolution on [0,1]

// Minimization of g(u) = -f(x(u)) over the unit cube; -inf values of f become +inf.
class Direct {
 public:
  Direct(const Objective& f, const Box& box, int max_evals)
      : f_(f), box_(box), max_evals_(static_cast<std::size_t>(std::max(max_evals, 1))) {}

  Maximum run() {
    const std::size_t d = box_.dim();
    add_rect(Vector(d, 0.5), std::vector<int>(d, 0));
    while (evals_ < max_evals_) {
      std::vector<std::size_t> selected = potentially_optimal();
      if (selected.empty()) break;
      bool divided = false;
      for (std::size_t idx : selected) {
        if (evals_ >= max_evals_) break;
        divided |= divide(idx);
      }
      if (!divided) break;
    }
    return {to_box(best_u_), -best_g_, evals_};
  }

 private:
  struct Rect {
    Vector center;
    std::vector<int> levels;
    double g;
    double size;  // half diagonal
  };

  Point to_box(const Vector& u) const {
    Point x(u.size());
    for (std::size_t j = 0; j < u.size(); ++j)
      x[j] = std::clamp(box_.lower[j] + u[j] * (box_.upper[j] - box_.lower[j]), box_.lower[j],
                        box_.upper[j]);
    return x;
  }

  double sample(const Vector& u) {
    ++evals_;
    const double fx = f_(to_box(u));
    const double g = std::isnan(fx) || fx == -kInf ? kInf : -fx;
    if (g < best_g_ || best_u_.empty()) {
      best_g_ = g;
      best_u_ = u;
    }
    return g;
  }

  static double half_diagonal(std::vector<int> levels) {
    // Sorted summation gives rectangles of the same shape bit-identical sizes.
    std::sort(levels.begin(), levels.end());
    double s = 0.0;
    for (int l : levels) {
      const double side = std::pow(3.0, -l);
      s += 0.25 * side * side;
    }
    return std::sqrt(s);
  }

  void add_rect(Vector center, std::vector<int> levels) {
    const double g = sample(center);
    const double size = half_diagonal(levels);
    rects_.push_back({std::move(center), std::move(levels), g, size});
  }

  void add_rect(Vector center, std::vector<int> levels, double g) {
    const double size = half_diagonal(levels);
    rects_.push_back({std::move(center), std::move(levels), g, size});
  }

  std::vector<std::size_t> potentially_optimal() const {
    // Best finite rectangle per size class.
    std::map<double, std::size_t> best_of_size;
    for (std::size_t i = 0; i < rects_.size(); ++i) {
      const Rect& r = rects_[i];
      if (!std::isfinite(r.g)) continue;
      if (*std::min_element(r.levels.begin(), r.levels.end()) >= kMaxLevel) continue;
      auto it = best_of_size.find(r.size);
      if (it == best_of_size.end() || r.g < rects_[it->second].g) best_of_size[r.size] = i;
    }
    if (best_of_size.empty()) return {};

    std::vector<std::size_t> pts;
    for (const auto& [size, idx] : best_of_size) pts.push_back(idx);
    // Start at the lowest value (largest size on ties).
    std::size_t start = 0;
    for (std::size_t k = 1; k < pts.size(); ++k)
      if (rects_[pts[k]].g <= rects_[pts[start]].g) start = k;
    const double fmin = rects_[pts[start]].g;

    // Lower convex hull from the start point towards larger sizes.
    std::vector<std::size_t> hull;
    for (std::size_t k = start; k < pts.size(); ++k) {
      const Rect& c = rects_[pts[k]];
      while (hull.size() >= 2) {
        const Rect& a = rects_[hull[hull.size() - 2]];
        const Rect& b = rects_[hull.back()];
        const double slope_ab = (b.g - a.g) / (b.size - a.size);
        const double slope_bc = (c.g - b.g) / (c.size - b.size);
        if (slope_ab >= slope_bc) hull.pop_back();
        else break;
      }
      hull.push_back(pts[k]);
    }

    std::vector<std::size_t> selected;
    const double threshold = fmin - kDirectEpsilon * std::abs(fmin);
    for (std::size_t k = 0; k < hull.size(); ++k) {
      const Rect& r = rects_[hull[k]];
      if (k + 1 == hull.size()) {
        selected.push_back(hull[k]);
        continue;
      }
      const Rect& next = rects_[hull[k + 1]];
      const double slope = (next.g - r.g) / (next.size - r.size);
      if (r.g - slope * r.size <= threshold) selected.push_back(hull[k]);
    }
    // Largest rectangles first.
    std::reverse(selected.begin(), selected.end());
    return selected;
  }

  bool divide(std::size_t idx) {
    const std::vector<int> base = rects_[idx].levels;
    const int min_level = *std::min_element(base.begin(), base.end());
    if (min_level >= kMaxLevel) return false;
    std::vector<std::size_t> dims;
    for (std::size_t j = 0; j < base.size(); ++j)
      if (base[j] == min_level) dims.push_back(j);
    const double delta = std::pow(3.0, -(min_level + 1));
    const Vector center = rects_[idx].center;

    struct Probe {
      std::size_t dim;
      Vector plus, minus;
      double g_plus, g_minus;
    };
    std::vector<Probe> probes;
    for (std::size_t j : dims) {
      Probe pr{j, center, center, 0.0, 0.0};
      pr.plus[j] += delta;
      pr.minus[j] -= delta;
      pr.g_plus = sample(pr.plus);
      pr.g_minus = sample(pr.minus);
      probes.push_back(std::move(pr));
    }
    std::stable_sort(probes.begin(), probes.end(), [](const Probe& a, const Probe& b) {
      return std::min(a.g_plus, a.g_minus) < std::min(b.g_plus, b.g_minus);
    });

    std::vector<int> levels = base;
    for (auto& pr : probes) {
      levels[pr.dim] += 1;
      add_rect(std::move(pr.plus), levels, pr.g_plus);
      add_rect(std::move(pr.minus), levels, pr.g_minus);
    }
    rects_[idx].levels = levels;
    rects_[idx].size = half_diagonal(levels);
    return true;
  }

  const Objective& f_;
  const Box& box_;
  std::size_t max_evals_;
  std::size_t evals_ = 0;
  std::vector<Rect> rects_;
  Vector best_u_;
  double best_g_ = kInf;
};

}  // namespace

Maximum direct_maximize(const Objective& f, const Box& box, int max_evals) {
  box.check();
  return Direct(f, box, max_evals).run();
}

Maximum simplex_refine(const Objective& f, std::span<const double> x0, const Box& box,
                       int max_evals, std::optional<double> f0) {
  box.check();
  const std::size_t d = box.dim();
  if (x0.size() != d) throw DimensionMismatch("start point does not match the box");

  std::size_t evals = 0;
  const std::size_t budget = static_cast<std::size_t>(std::max(max_evals, 1));
  auto clamp = [&](Vector& x) {
    for (std::size_t j = 0; j < d; ++j) x[j] = std::clamp(x[j], box.lower[j], box.upper[j]);
  };
  // Internally minimize g = -f.
  auto g = [&](const Vector& x) {
    ++evals;
    const double v = f(x);
    return std::isnan(v) ? kInf : -v;
  };

  std::vector<Vector> simplex;
  std::vector<double> values;
  Vector start(x0.begin(), x0.end());
  clamp(start);
  simplex.push_back(start);
  values.push_back(f0 ? -*f0 : g(start));

  for (std::size_t j = 0; j < d && evals < budget; ++j) {
    Vector v = start;
    const double step = 0.05 * (box.upper[j] - box.lower[j]);
    v[j] = start[j] + step <= box.upper[j] ? start[j] + step : start[j] - step;
    simplex.push_back(v);
    values.push_back(g(v));
  }
  auto best_of = [&] {
    std::size_t b = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
      if (values[i] < values[b]) b = i;
    return b;
  };
  if (simplex.size() < d + 1) {
    const std::size_t b = best_of();
    return {simplex[b], -values[b], evals};
  }

  std::vector<std::size_t> order(d + 1);
  while (evals < budget) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t ib = order.front();
    const std::size_t iw = order.back();
    const std::size_t isw = order[d - 1];

    // Convergence: values and vertices have collapsed.
    double spread = 0.0;
    for (std::size_t i = 0; i <= d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        spread = std::max(spread, std::abs(simplex[i][j] - simplex[ib][j]) /
                                      (box.upper[j] - box.lower[j]));
    if (spread < 1e-12) break;
    if (std::isfinite(values[iw]) &&
        values[iw] - values[ib] <= 1e-15 * (1.0 + std::abs(values[ib])) && spread < 1e-9)
      break;

    Vector centroid(d, 0.0);
    for (std::size_t i = 0; i <= d; ++i) {
      if (i == iw) continue;
      for (std::size_t j = 0; j < d; ++j) centroid[j] += simplex[i][j] / static_cast<double>(d);
    }
    auto along = [&](double t) {
      Vector x(d);
      for (std::size_t j = 0; j < d; ++j) x[j] = centroid[j] + t * (simplex[iw][j] - centroid[j]);
      clamp(x);
      return x;
    };

    Vector xr = along(-1.0);
    const double gr = g(xr);
    if (gr < values[ib]) {
      if (evals >= budget) {
        simplex[iw] = xr;
        values[iw] = gr;
        break;
      }
      Vector xe = along(-2.0);
      const double ge = g(xe);
      if (ge < gr) {
        simplex[iw] = xe;
        values[iw] = ge;
      } else {
        simplex[iw] = xr;
        values[iw] = gr;
      }
    } else if (gr < values[isw]) {
      simplex[iw] = xr;
      values[iw] = gr;
    } else {
      if (evals >= budget) break;
      const bool outside = gr < values[iw];
      Vector xc = along(outside ? -0.5 : 0.5);
      const double gc = g(xc);
      if (gc < std::min(gr, values[iw])) {
        simplex[iw] = xc;
        values[iw] = gc;
      } else {
        // Shrink towards the best vertex.
        for (std::size_t i = 0; i <= d && evals < budget; ++i) {
          if (i == ib) continue;
          for (std::size_t j = 0; j < d; ++j)
            simplex[i][j] = simplex[ib][j] + 0.5 * (simplex[i][j] - simplex[ib][j]);
          values[i] = g(simplex[i]);
        }
      }
    }
  }
  const std::size_t b = best_of();
  return {simplex[b], -values[b], evals};
}

Maximum maximize(const Objective& f, const Box& box, const InnerBudget& budget) {
  Maximum global = direct_maximize(f, box, budget.global_evals);
  Maximum local = simplex_refine(f, global.x, box, budget.local_evals, global.value);
  local.evaluations += global.evaluations;
  if (local.value >= global.value) return local;
  global.evaluations = local.evaluations;
  return global;
}

}  // namespace bopt
