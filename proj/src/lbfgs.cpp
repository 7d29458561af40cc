#include "band/lbfgs.hpp"

#include <cmath>

namespace band::lbfgs {

namespace {

struct Memory {
  std::vector<Eigen::VectorXd> s, y;
  std::vector<double> rho;
  int capacity = 0;
  int head = 0;  // index of the slot the next pair goes into
  int size = 0;

  explicit Memory(int cap) : capacity(cap) {
    s.resize(cap);
    y.resize(cap);
    rho.resize(cap);
  }

  void push(Eigen::VectorXd si, Eigen::VectorXd yi, double ys) {
    s[head] = std::move(si);
    y[head] = std::move(yi);
    rho[head] = 1.0 / ys;
    head = (head + 1) % capacity;
    size = std::min(size + 1, capacity);
  }

  void clear() {
    head = 0;
    size = 0;
  }

  // Two-loop recursion: d = -H g with H0 = gamma I.
  Eigen::VectorXd direction(const Eigen::VectorXd& g, double gamma) const {
    Eigen::VectorXd q = -g;
    std::vector<double> alpha(size);
    for (int k = 0; k < size; ++k) {
      const int i = (head - 1 - k + 2 * capacity) % capacity;
      alpha[k] = rho[i] * s[i].dot(q);
      q -= alpha[k] * y[i];
    }
    q *= gamma;
    for (int k = size - 1; k >= 0; --k) {
      const int i = (head - 1 - k + 2 * capacity) % capacity;
      const double beta = rho[i] * y[i].dot(q);
      q += (alpha[k] - beta) * s[i];
    }
    return q;
  }
};

}  // namespace

Result minimize(const Objective& objective, Eigen::VectorXd& x,
                const Options& opt) {
  Result res;
  const int n = static_cast<int>(x.size());
  Memory mem(std::max(1, opt.memory));

  Eigen::VectorXd g(n), g_new(n), x_new(n);
  double f = objective(x, g);
  ++res.evaluations;
  res.f_history.push_back(f);
  double gamma = 1.0;

  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    res.grad_norm = g.norm();
    res.f = f;
    if (res.grad_norm <= opt.grad_tol) {
      res.converged = true;
      break;
    }

    Eigen::VectorXd d = mem.direction(g, gamma);
    double dg = d.dot(g);
    if (!(dg < 0.0) || !d.allFinite()) {
      mem.clear();  // stale curvature; fall back to steepest descent
      d = -g;
      dg = -g.squaredNorm();
    }

    double step = iter == 0 ? 1.0 / std::max(res.grad_norm, 1e-12) : 1.0;
    bool accepted = false;
    double f_new = f;
    for (int ls = 0; ls < opt.max_linesearch; ++ls) {
      x_new = x + step * d;
      f_new = objective(x_new, g_new);
      ++res.evaluations;
      if (std::isfinite(f_new) && f_new <= f + opt.f_dec * step * dg) {
        accepted = true;
        break;
      }
      step *= opt.step_shrink;
    }
    if (!accepted) {
      if (mem.size > 0) {
        mem.clear();  // retry the whole iteration along -g
        continue;
      }
      res.line_search_failed = true;
      break;
    }

    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd yv = g_new - g;
    const double ys = yv.dot(s);
    if (ys > 1e-12 * s.norm() * yv.norm()) {
      mem.push(s, yv, ys);
      gamma = ys / yv.squaredNorm();
    }

    x = x_new;
    f = f_new;
    g = g_new;
    res.f_history.push_back(f);
    res.iterations = iter + 1;
  }
  res.f = f;
  res.grad_norm = g.norm();
  if (res.grad_norm <= opt.grad_tol) res.converged = true;
  return res;
}

}  // namespace band::lbfgs
