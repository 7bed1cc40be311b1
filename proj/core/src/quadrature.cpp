#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "fbst/errors.hpp"
#include "fbst/integrator.hpp"
#include "fbst/local_search.hpp"
#include "fbst/optimizer.hpp"

namespace fbst {

namespace {

using Pair = std::array<double, 2>;

// Gauss-Kronrod 7/15 nodes and weights (QUADPACK qk15).
constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.0};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Rule {
  Pair kronrod{0.0, 0.0};
  double error = 0.0;
};

template <class F>
Rule gk15(const F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  Pair k{0.0, 0.0};
  Pair g{0.0, 0.0};
  const Pair fc = f(center);
  for (int c = 0; c < 2; ++c) {
    k[c] = fc[c] * kWgk[7];
    g[c] = fc[c] * kWg[3];
  }
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const Pair f1 = f(center - dx);
    const Pair f2 = f(center + dx);
    for (int c = 0; c < 2; ++c) {
      k[c] += kWgk[j] * (f1[c] + f2[c]);
      if (j % 2 == 1) g[c] += kWg[j / 2] * (f1[c] + f2[c]);
    }
  }
  Rule r;
  for (int c = 0; c < 2; ++c) {
    r.kronrod[c] = k[c] * half;
    r.error = std::max(r.error, std::abs((k[c] - g[c]) * half));
  }
  return r;
}

template <class F>
Pair adaptive(const F& f, double a, double b, double tol, int depth) {
  const Rule whole = gk15(f, a, b);
  if (whole.error <= tol || depth <= 0 || !(b - a > 1e-15 * (1.0 + std::abs(a))))
    return whole.kronrod;
  const double m = 0.5 * (a + b);
  const Pair left = adaptive(f, a, m, 0.5 * tol, depth - 1);
  const Pair right = adaptive(f, m, b, 0.5 * tol, depth - 1);
  return {left[0] + right[0], left[1] + right[1]};
}

constexpr double kLogFloor = 40.0;  // density below max * e^-40 is ignored

// Walk from x0 towards `bound` until log_density drops below `floor`.
double extent(const std::function<double(double)>& log_density, double x0, double direction,
              double bound, double scale, double floor) {
  double inside = x0;
  double step = scale;
  for (int k = 0; k < 200; ++k) {
    const double x = x0 + direction * step;
    if ((direction > 0 && x >= bound) || (direction < 0 && x <= bound)) {
      if (std::isfinite(bound)) return bound;
    }
    if (!(log_density(x) >= floor)) {
      double lo = inside;
      double hi = x;
      for (int j = 0; j < 50; ++j) {
        const double mid = 0.5 * (lo + hi);
        if (log_density(mid) >= floor) lo = mid; else hi = mid;
      }
      return hi;
    }
    inside = x;
    step *= 2.0;
  }
  return inside;
}

double curvature_scale(const std::function<double(double)>& f, double x, double fallback) {
  const double h = 1e-4 * std::max(1.0, std::abs(x));
  const double fp = f(x + h);
  const double fm = f(x - h);
  const double c = -(fp - 2.0 * f(x) + fm) / (h * h);
  if (std::isfinite(c) && c > 0.0) return 1.0 / std::sqrt(c);
  return fallback;
}

struct Slice {
  std::function<double(double)> log_density;  // log p - global max
  std::function<double(double)> excess;       // log s - log s*
};

// (integral of p, integral of p over {log s <= log s*}) along one line.
Pair integrate_slice(const Slice& slice, double lo, double hi, double mode, double scale,
                     int cells) {
  const double floor = -kLogFloor;
  if (!(slice.log_density(mode) >= floor)) return {0.0, 0.0};
  const double a = extent(slice.log_density, mode, -1.0, lo, scale, floor);
  const double b = extent(slice.log_density, mode, 1.0, hi, scale, floor);
  if (!(b > a)) return {0.0, 0.0};

  std::vector<double> nodes(static_cast<std::size_t>(cells) + 1);
  for (int i = 0; i <= cells; ++i) nodes[static_cast<std::size_t>(i)] = a + (b - a) * i / cells;
  nodes.push_back(std::clamp(mode, a, b));
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  // Local maxima of the surprise between nodes become nodes, so a small
  // region with s > s* cannot hide inside one cell.
  std::vector<double> g(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) g[i] = slice.excess(nodes[i]);
  std::vector<double> extra;
  for (std::size_t i = 0; i < nodes.size() && extra.size() < 8; ++i) {
    if (!std::isfinite(g[i])) continue;
    const double left = i > 0 ? g[i - 1] : -kInf;
    const double right = i + 1 < nodes.size() ? g[i + 1] : -kInf;
    if (!(g[i] >= left && g[i] >= right)) continue;
    const double x0 = i > 0 ? nodes[i - 1] : nodes[i];
    const double x1 = i + 1 < nodes.size() ? nodes[i + 1] : nodes[i];
    if (!(x1 > x0)) continue;
    const auto peak = search::maximize_1d(slice.excess, x0, x1, nodes[i], 0.25 * (x1 - x0));
    extra.push_back(peak.x[0]);
  }
  if (!extra.empty()) {
    nodes.insert(nodes.end(), extra.begin(), extra.end());
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    g.resize(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) g[i] = slice.excess(nodes[i]);
  }

  std::vector<double> breaks = nodes;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const bool in0 = !(g[i] > 0.0);
    const bool in1 = !(g[i + 1] > 0.0);
    if (in0 == in1) continue;
    double l = nodes[i];
    double r = nodes[i + 1];
    for (int j = 0; j < 100 && r - l > 4e-16 * (1.0 + std::abs(l)); ++j) {
      const double mid = 0.5 * (l + r);
      if (!(slice.excess(mid) > 0.0) == in0) l = mid; else r = mid;
    }
    breaks.push_back(0.5 * (l + r));
  }
  std::sort(breaks.begin(), breaks.end());

  auto density = [&](double x) {
    const double v = std::exp(slice.log_density(x));
    return Pair{std::isfinite(v) ? v : 0.0, 0.0};
  };
  Pair out{0.0, 0.0};
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double l = breaks[i];
    const double r = breaks[i + 1];
    if (!(r > l)) continue;
    const double mass = adaptive(density, l, r, 1e-13 * (r - l) + 1e-300, 30)[0];
    out[0] += mass;
    if (!(slice.excess(0.5 * (l + r)) > 0.0)) out[1] += mass;
  }
  return out;
}

double support_limit(const Interval& b, bool upper) { return upper ? b.upper : b.lower; }

}  // namespace

EvalEstimate quadrature_evalue(const PosteriorModel& model, const SurpriseFunction& sf,
                               double log_s_star) {
  const ParameterSpace& space = model.space();
  const std::size_t t = space.dimension();
  if (t > 2) {
    throw ValidationError("quadrature supports spaces of dimension at most 2 (got " +
                          std::to_string(t) + ")");
  }
  if (!(space == sf.space())) throw ValidationError("model and surprise function differ in space");
  if (std::isnan(log_s_star)) throw ValidationError("missing supremum for the e-value");

  EvalEstimate e;
  e.method = IntegrationMethod::quadrature;
  if (log_s_star == kInf) {
    e.ev = 1.0;
    e.ev_bar = 0.0;
    return e;
  }
  if (log_s_star == -kInf) {
    e.ev = 0.0;
    e.ev_bar = 1.0;
    return e;
  }

  const SurpriseFunction density_only(model, ReferenceDensity::uniform());
  const OptimumReport mode = sup_surprise_global(density_only);
  const double log_max = mode.log_value;
  if (!std::isfinite(log_max)) throw SamplingError("posterior density is unbounded or vanishes");
  const Eigen::VectorXd mode_free = space.to_free(mode.maximizer);
  const Box& box = model.search_box();

  auto log_p = [&](const Eigen::VectorXd& x) {
    const Point theta = space.from_free(x);
    if (!space.in_support(theta)) return -kInf;
    const double v = model.log_potential_unchecked(theta) - log_max;
    return std::isnan(v) ? -kInf : v;
  };
  auto excess = [&](const Eigen::VectorXd& x) {
    return sf.log_surprise_unchecked(space.from_free(x)) - log_s_star;
  };

  Pair result{0.0, 0.0};
  if (t == 1) {
    Slice slice{[&](double x) { return log_p(Eigen::VectorXd::Constant(1, x)); },
                [&](double x) { return excess(Eigen::VectorXd::Constant(1, x)); }};
    const Interval b = space.free_bounds(0);
    const double scale = std::min(curvature_scale(slice.log_density, mode_free[0],
                                                  1e-3 * (box.upper[0] - box.lower[0])),
                                  0.25 * (box.upper[0] - box.lower[0]));
    result = integrate_slice(slice, b.lower, b.upper, mode_free[0], scale, 128);
  } else {
    const Interval bx = space.free_bounds(0);
    const Interval by = space.free_bounds(1);
    const double y_scale = std::min(
        curvature_scale([&](double y) { return log_p(Eigen::Vector2d(mode_free[0], y)); },
                        mode_free[1], 1e-3 * (box.upper[1] - box.lower[1])),
        0.25 * (box.upper[1] - box.lower[1]));
    const double x_scale = std::min(
        curvature_scale([&](double x) { return log_p(Eigen::Vector2d(x, mode_free[1])); },
                        mode_free[0], 1e-3 * (box.upper[0] - box.lower[0])),
        0.25 * (box.upper[0] - box.lower[0]));
    auto inner_range = [&](double x) {
      double hi = support_limit(by, true);
      if (space.is_simplex()) hi = std::min(hi, 1.0 - x);
      return std::pair{support_limit(by, false), hi};
    };
    auto conditional_mode = [&](double x) {
      const auto [lo, hi] = inner_range(x);
      if (!(hi > lo)) return std::pair{lo, -kInf};
      const auto r = search::maximize_1d(
          [&](double y) { return log_p(Eigen::Vector2d(x, y)); }, lo, hi,
          std::clamp(mode_free[1], lo, hi), y_scale);
      return std::pair{r.x[0], r.value};
    };
    auto inner = [&](double x) -> Pair {
      const auto [lo, hi] = inner_range(x);
      const auto [y0, peak] = conditional_mode(x);
      if (!(peak >= -kLogFloor)) return {0.0, 0.0};
      Slice slice{[&, x](double y) { return log_p(Eigen::Vector2d(x, y)); },
                  [&, x](double y) { return excess(Eigen::Vector2d(x, y)); }};
      return integrate_slice(slice, lo, hi, y0, y_scale, 64);
    };
    auto profile = [&](double x) { return conditional_mode(x).second; };
    const double a = extent(profile, mode_free[0], -1.0, bx.lower, x_scale, -kLogFloor);
    const double b = extent(profile, mode_free[0], 1.0, bx.upper, x_scale, -kLogFloor);
    std::vector<double> panels;
    constexpr int kPanels = 16;
    for (int i = 0; i <= kPanels; ++i) panels.push_back(a + (b - a) * i / kPanels);
    panels.push_back(std::clamp(mode_free[0], a, b));
    std::sort(panels.begin(), panels.end());
    panels.erase(std::unique(panels.begin(), panels.end()), panels.end());
    for (std::size_t i = 0; i + 1 < panels.size(); ++i) {
      const double w = panels[i + 1] - panels[i];
      const Pair p = adaptive(inner, panels[i], panels[i + 1], 1e-11 * w * (b - a) + 1e-300, 12);
      result[0] += p[0];
      result[1] += p[1];
    }
  }
  if (!(result[0] > 0.0)) throw SamplingError("quadrature found no posterior mass");
  e.ev = std::clamp(result[1] / result[0], 0.0, 1.0);
  e.ev_bar = 1.0 - e.ev;
  return e;
}

}  // namespace fbst
