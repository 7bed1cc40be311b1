#include "fbst/local_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Cholesky>

namespace fbst::search {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sanitize(double v) { return std::isnan(v) ? -kInf : v; }

}  // namespace

LocalResult nelder_mead(const Objective& f, const Eigen::VectorXd& start,
                        const Eigen::VectorXd& step, const NelderMeadOptions& options) {
  const Eigen::Index d = start.size();
  LocalResult result;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++result.evaluations;
    return sanitize(f(x));
  };
  if (d == 0) {
    result.x = start;
    result.value = eval(start);
    result.converged = true;
    return result;
  }

  std::vector<Eigen::VectorXd> xs(static_cast<std::size_t>(d + 1), start);
  std::vector<double> fs(static_cast<std::size_t>(d + 1));
  fs[0] = eval(start);
  for (Eigen::Index i = 0; i < d; ++i) {
    double h = step[i] != 0.0 ? step[i] : 0.05 * std::max(1.0, std::abs(start[i]));
    Eigen::VectorXd x = start;
    double fx = -kInf;
    for (int attempt = 0; attempt < 12; ++attempt) {
      x[i] = start[i] + h;
      fx = eval(x);
      if (fx > -kInf) break;
      x[i] = start[i] - h;
      fx = eval(x);
      if (fx > -kInf) break;
      h *= 0.5;
    }
    xs[static_cast<std::size_t>(i + 1)] = x;
    fs[static_cast<std::size_t>(i + 1)] = fx;
  }

  std::vector<std::size_t> order(xs.size());
  const double n = static_cast<double>(d);
  while (true) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fs[a] > fs[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second_worst = order[order.size() - 2];

    if (fs[best] > -kInf && fs[worst] > -kInf) {
      const double spread = fs[best] - fs[worst];
      double size = 0.0;
      for (const auto& x : xs) size = std::max(size, (x - xs[best]).cwiseAbs().maxCoeff());
      const double scale = 1.0 + xs[best].cwiseAbs().maxCoeff();
      if (spread <= options.value_tolerance * (1.0 + std::abs(fs[best])) &&
          size <= options.point_tolerance * scale) {
        result.converged = true;
        break;
      }
    }
    if (result.evaluations >= options.max_evaluations) break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
    for (std::size_t k = 0; k + 1 < order.size(); ++k) centroid += xs[order[k]];
    centroid /= n;

    const Eigen::VectorXd reflected = centroid + (centroid - xs[worst]);
    const double fr = eval(reflected);
    if (fr > fs[best]) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - xs[worst]);
      const double fe = eval(expanded);
      if (fe > fr) {
        xs[worst] = expanded;
        fs[worst] = fe;
      } else {
        xs[worst] = reflected;
        fs[worst] = fr;
      }
      continue;
    }
    if (fr > fs[second_worst]) {
      xs[worst] = reflected;
      fs[worst] = fr;
      continue;
    }
    const bool outside = fr > fs[worst];
    const Eigen::VectorXd contracted =
        outside ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid))
                : Eigen::VectorXd(centroid + 0.5 * (xs[worst] - centroid));
    const double fc = eval(contracted);
    if (fc > (outside ? fr : fs[worst])) {
      xs[worst] = contracted;
      fs[worst] = fc;
      continue;
    }
    for (std::size_t k = 1; k < order.size(); ++k) {
      auto& x = xs[order[k]];
      x = xs[best] + 0.5 * (x - xs[best]);
      fs[order[k]] = eval(x);
    }
  }
  const auto best = static_cast<std::size_t>(std::max_element(fs.begin(), fs.end()) - fs.begin());
  result.x = xs[best];
  result.value = fs[best];
  return result;
}

LocalResult newton_polish(const Objective& f, const Eigen::VectorXd& x0, double value,
                          std::size_t max_iterations) {
  LocalResult result{x0, value, 0, false};
  const Eigen::Index d = x0.size();
  if (d == 0 || !(value > -kInf)) return result;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++result.evaluations;
    return sanitize(f(x));
  };

  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    const Eigen::VectorXd& x = result.x;
    const double fx = result.value;
    Eigen::VectorXd grad(d);
    Eigen::MatrixXd hess(d, d);
    Eigen::VectorXd h(d);
    for (Eigen::Index i = 0; i < d; ++i) h[i] = 1e-4 * std::max(1.0, std::abs(x[i]));
    Eigen::VectorXd fp(d);
    Eigen::VectorXd fm(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      Eigen::VectorXd xp = x;
      Eigen::VectorXd xm = x;
      xp[i] += h[i];
      xm[i] -= h[i];
      fp[i] = eval(xp);
      fm[i] = eval(xm);
      if (!std::isfinite(fp[i]) || !std::isfinite(fm[i])) return result;
      grad[i] = (fp[i] - fm[i]) / (2.0 * h[i]);
      hess(i, i) = (fp[i] - 2.0 * fx + fm[i]) / (h[i] * h[i]);
    }
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = i + 1; j < d; ++j) {
        double corners[4];
        int k = 0;
        for (double si : {1.0, -1.0}) {
          for (double sj : {1.0, -1.0}) {
            Eigen::VectorXd y = x;
            y[i] += si * h[i];
            y[j] += sj * h[j];
            corners[k++] = eval(y);
          }
        }
        for (double c : corners)
          if (!std::isfinite(c)) return result;
        hess(i, j) = hess(j, i) =
            (corners[0] - corners[1] - corners[2] + corners[3]) / (4.0 * h[i] * h[j]);
      }
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(-hess);
    if (llt.info() != Eigen::Success) return result;
    Eigen::VectorXd delta = llt.solve(grad);
    const double limit = 0.1 * (1.0 + x.cwiseAbs().maxCoeff());
    const double norm = delta.cwiseAbs().maxCoeff();
    if (!std::isfinite(norm)) return result;
    if (norm > limit) delta *= limit / norm;

    bool moved = false;
    for (int half = 0; half < 30; ++half) {
      const Eigen::VectorXd candidate = x + delta;
      const double fc = eval(candidate);
      if (fc >= fx) {
        result.x = candidate;
        result.value = fc;
        moved = true;
        break;
      }
      delta *= 0.5;
    }
    if (!moved) break;
    if (delta.cwiseAbs().maxCoeff() <= 1e-13 * (1.0 + result.x.cwiseAbs().maxCoeff())) {
      result.converged = true;
      break;
    }
  }
  return result;
}

LocalResult maximize_1d(const std::function<double(double)>& f, double lo, double hi, double x0,
                        double step) {
  LocalResult result;
  auto eval = [&](double x) {
    ++result.evaluations;
    return sanitize(f(x));
  };
  auto clip = [&](double x) { return std::clamp(x, lo, hi); };

  double b = clip(x0);
  double fb = eval(b);
  if (!(fb > -kInf) && std::isfinite(lo) && std::isfinite(hi)) {
    for (int k = 0; k <= 64; ++k) {
      const double x = lo + (hi - lo) * k / 64.0;
      const double fx = eval(x);
      if (fx > fb) {
        b = x;
        fb = fx;
      }
    }
  }
  if (!(fb > -kInf)) {
    result.x = Eigen::VectorXd::Constant(1, b);
    result.value = -kInf;
    return result;
  }

  // Bracket: walk uphill with doubling steps until the value drops.
  step = std::abs(step) > 0.0 ? std::abs(step) : 1e-3;
  double a = clip(b - step);
  double c = clip(b + step);
  double fa = eval(a);
  double fc = eval(c);
  for (int k = 0; k < 200 && (fa > fb || fc > fb); ++k) {
    if (fa > fb) {
      c = b, fc = fb;
      b = a, fb = fa;
      step *= 2.0;
      a = clip(b - step);
      fa = eval(a);
      if (a == b) break;
    } else {
      a = b, fa = fb;
      b = c, fb = fc;
      step *= 2.0;
      c = clip(b + step);
      fc = eval(c);
      if (c == b) break;
    }
  }

  // Golden-section search on [a, c] around b.
  constexpr double kGolden = 0.3819660112501051;
  for (int k = 0; k < 200 && c - a > 1e-15 * (1.0 + std::abs(b)); ++k) {
    const bool right = (c - b) > (b - a);
    const double x = right ? b + kGolden * (c - b) : b - kGolden * (b - a);
    const double fx = eval(x);
    if (fx > fb) {
      if (right) a = b; else c = b;
      b = x;
      fb = fx;
    } else {
      if (right) c = x; else a = x;
    }
  }
  result.x = Eigen::VectorXd::Constant(1, b);
  result.value = fb;
  result.converged = true;
  return result;
}

}  // namespace fbst::search
