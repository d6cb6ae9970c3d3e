#include "gsure/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gsure {

namespace {

Vector soft(const Vector& v, double t) {
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]) - t;
    out[i] = a > 0.0 ? (v[i] > 0.0 ? a : -a) : 0.0;
  }
  return out;
}

// Distance from r to the set {lambda L' g} with g ranging over the
// subdifferential box (entries with |(L theta)_i| above a small tolerance
// carry their sign, the rest live in [-1, 1]).  Solved exactly by an
// active-set pass: unconstrained least squares on the free entries, then
// box violators are clamped and removed until the solution is feasible.
double subdifferential_distance(const Matrix& L, const Vector& Ltheta,
                                double lambda, const Vector& r) {
  const Eigen::Index p = L.rows();
  if (lambda == 0.0 || p == 0) return r.norm();
  const double ztol = 1e-7 * (1.0 + Ltheta.cwiseAbs().maxCoeff());

  Vector g(p);
  std::vector<Eigen::Index> free_idx;
  for (Eigen::Index i = 0; i < p; ++i) {
    if (std::abs(Ltheta[i]) > ztol) {
      g[i] = Ltheta[i] > 0.0 ? 1.0 : -1.0;
    } else {
      g[i] = 0.0;
      free_idx.push_back(i);
    }
  }

  const Matrix AtA = (lambda * lambda) * (L * L.transpose());
  const Vector Atr = lambda * (L * r);
  for (int pass = 0; pass <= p && !free_idx.empty(); ++pass) {
    const Eigen::Index k = static_cast<Eigen::Index>(free_idx.size());
    Matrix Azz(k, k);
    Vector rhs(k);
    for (Eigen::Index a = 0; a < k; ++a) {
      double dot_fixed = 0.0;
      for (Eigen::Index i = 0; i < p; ++i)
        if (g[i] != 0.0) dot_fixed += AtA(free_idx[a], i) * g[i];
      rhs[a] = Atr[free_idx[a]] - dot_fixed;
      for (Eigen::Index b = 0; b < k; ++b)
        Azz(a, b) = AtA(free_idx[a], free_idx[b]);
    }
    const Vector gz = Azz.ldlt().solve(rhs);
    std::vector<Eigen::Index> still_free;
    bool clamped = false;
    for (Eigen::Index a = 0; a < k; ++a) {
      if (std::abs(gz[a]) > 1.0 + 1e-12) {
        g[free_idx[a]] = gz[a] > 0.0 ? 1.0 : -1.0;
        clamped = true;
      } else {
        still_free.push_back(free_idx[a]);
      }
    }
    if (!clamped) {
      for (Eigen::Index a = 0; a < k; ++a) g[free_idx[a]] = gz[a];
      break;
    }
    // clamped entries joined the fixed set; re-solve for the rest
    for (const auto i : still_free) g[i] = 0.0;
    free_idx = std::move(still_free);
  }
  return (r - lambda * (L.transpose() * g)).norm();
}

Vector admm_solve(const LinearGaussianModel& model, const Matrix& L,
                  const Vector& u, double lambda,
                  const SolverSettings& settings, double objective_offset) {
  const Eigen::Index m = L.cols(), p = L.rows();
  const Matrix Q2 = 2.0 * model.Q();
  const Matrix LtL = L.transpose() * L;
  const Vector u2 = 2.0 * u;
  const int check = std::max(1, settings.check_interval);

  const auto kkt_from_u = [&](const Vector& theta) {
    const Vector g2 = 2.0 * (Vector(model.Q() * theta) - u);
    const double dist =
        subdifferential_distance(L, Vector(L * theta), lambda, Vector(-g2));
    return dist / (1.0 + g2.norm());
  };

  double rho = settings.rho0 > 0.0 ? settings.rho0 : 1.0;
  Vector z = Vector::Zero(p), w = Vector::Zero(p);
  if (settings.warm && settings.warm->z.size() == p) {
    z = settings.warm->z;
    w = settings.warm->w;
    if (settings.warm->rho > 0.0) rho = settings.warm->rho;
  }

  Eigen::LLT<Matrix> llt(Q2 + rho * LtL);
  if (llt.info() != Eigen::Success)
    throw Error("degenerate-regularization",
                "2Q + rho L'L is not positive definite");

  Vector theta = Vector::Zero(m);
  double kkt = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= settings.max_iters; ++it) {
    theta = llt.solve(u2 + rho * (L.transpose() * (z - w)));
    const Vector Lth = L * theta;
    const Vector z_old = z;
    z = soft(Lth + w, lambda / rho);
    w += Lth - z;

    if (it % check == 0 || it == settings.max_iters) {
      kkt = kkt_from_u(theta);
      if (settings.iterate_log) {
        const double obj = theta.dot(model.Q() * theta) -
                           2.0 * theta.dot(u) + objective_offset +
                           lambda * Lth.lpNorm<1>();
        settings.iterate_log->push_back({static_cast<double>(it), obj, kkt});
      }
      if (kkt <= settings.rel_tol) {
        if (settings.warm) {
          settings.warm->z = z;
          settings.warm->w = w;
          settings.warm->rho = rho;
        }
        return theta;
      }
      const double pri = (Lth - z).norm();
      const double dua = rho * (L.transpose() * (z - z_old)).norm();
      if (pri > 10.0 * dua) {
        rho *= 2.0;
        w *= 0.5;
        llt.compute(Q2 + rho * LtL);
      } else if (dua > 10.0 * pri) {
        rho *= 0.5;
        w *= 2.0;
        llt.compute(Q2 + rho * LtL);
      }
    }
  }
  throw Error("non-converged", "ADMM reached max_iters with KKT residual " +
                                   std::to_string(kkt));
}

}  // namespace

Matrix diff_op2(int m) {
  if (m < 3) throw Error("invalid-argument", "diff_op2 needs m >= 3");
  Matrix L = Matrix::Zero(m - 2, m);
  for (int i = 0; i < m - 2; ++i) {
    L(i, i) = 1.0;
    L(i, i + 1) = -2.0;
    L(i, i + 2) = 1.0;
  }
  return L;
}

double objective_value(const LinearGaussianModel& model, const Matrix& L,
                       const Vector& x, double lambda, const Vector& theta) {
  const Vector r = x - model.H() * theta;
  return r.dot(model.apply_Cinv(r)) + lambda * (L * theta).lpNorm<1>();
}

double kkt_residual(const LinearGaussianModel& model, const Matrix& L,
                    const Vector& x, double lambda, const Vector& theta) {
  const Vector u = model.sufficient_statistic(x);
  const Vector grad_smooth = 2.0 * (Vector(model.Q() * theta) - u);
  const double dist = subdifferential_distance(L, Vector(L * theta), lambda,
                                               Vector(-grad_smooth));
  return dist / (1.0 + grad_smooth.norm());
}

Vector solve_l1_pen(const LinearGaussianModel& model, const Matrix& L,
                    const Vector& x, double lambda,
                    const SolverSettings& settings) {
  if (lambda < 0.0) throw Error("invalid-argument", "lambda must be >= 0");
  if (L.cols() != model.ambient_dim())
    throw Error("invalid-argument", "L must have m columns");
  const Vector u = model.sufficient_statistic(x);
  if (lambda == 0.0) return model.ml_from_statistic(u);
  return admm_solve(model, L, u, lambda, settings,
                    x.dot(model.apply_Cinv(x)));
}

Vector solve_l1_pen_from_statistic(const LinearGaussianModel& model,
                                   const Matrix& L, const Vector& u,
                                   double lambda,
                                   const SolverSettings& settings) {
  if (lambda < 0.0) throw Error("invalid-argument", "lambda must be >= 0");
  if (L.cols() != model.ambient_dim())
    throw Error("invalid-argument", "L must have m columns");
  if (lambda == 0.0) return model.ml_from_statistic(u);
  // objective logged up to the theta-independent data constant
  return admm_solve(model, L, u, lambda, settings, 0.0);
}

}  // namespace gsure
