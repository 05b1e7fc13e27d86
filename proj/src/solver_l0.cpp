#include "sparsefix/solver_l0.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sparsefix {

namespace {

void resolve_config(L0Config& cfg, const LinearOp& B) {
  if (!(cfg.lambda > 0.0)) throw std::invalid_argument("solve_l0: lambda must be positive");
  if (!(cfg.gamma > 0.0)) throw std::invalid_argument("solve_l0: gamma must be positive");
  if (!(cfg.alpha > 0.0) || cfg.alpha > 2.0) {
    throw std::invalid_argument("solve_l0: alpha must be in (0, 2]");
  }
  if (!(cfg.p > 0.0)) throw std::invalid_argument("solve_l0: p must be positive");
  double norm_b = estimate_spectral_norm(B).value;
  if (cfg.q <= 0.0) cfg.q = (1.0 + 1e-6) * norm_b * norm_b / cfg.p;
  if (!(cfg.p * cfg.q > norm_b * norm_b)) {
    throw std::invalid_argument("solve_l0: pq must exceed ||B||_2^2");
  }
}

}  // namespace

L0State default_l0_state(const LinearOp& B, const LinearOp& D, Vector v1) {
  L0State s;
  s.u = D.apply(v1);
  s.v = std::move(v1);
  s.w = Vector::Zero(B.out_dim());
  s.k = 0;
  return s;
}

double objective_F(const Vector& u, const Vector& v, const LinearOp& B,
                   const LinearOp& D, const Fidelity& psi, double lambda,
                   double gamma) {
  double fit = psi.value(B.apply(v));
  double couple = (lambda / (2.0 * gamma)) * (u - D.apply(v)).squaredNorm();
  return fit + couple + lambda * nnz(u);
}

Vector grad_H(const Vector& v, const Vector& u, const LinearOp& B,
              const LinearOp& D, const Fidelity& psi, double lambda,
              double gamma) {
  return (lambda / gamma) * (v - D.adjoint(u)) + B.adjoint(psi.gradient(B.apply(v)));
}

Vector outer_u_step(const L0State& state, const L0Config& cfg, const LinearOp& D) {
  return hard_threshold((1.0 - cfg.alpha) * state.u + cfg.alpha * D.apply(state.v),
                        cfg.alpha * cfg.gamma);
}

std::pair<Vector, Vector> inner_fppa_step(const Vector& v_l, const Vector& w_l,
                                          const Vector& u_next, const L0Config& cfg,
                                          const LinearOp& B, const LinearOp& D,
                                          const Fidelity& psi) {
  const double pg = cfg.p * cfg.gamma;
  const double c1 = cfg.lambda / (pg + cfg.lambda);
  const double c2 = pg / (pg + cfg.lambda);
  Vector v_next = c1 * D.adjoint(u_next) + c2 * (v_l - (1.0 / cfg.p) * B.adjoint(w_l));
  Vector arg = cfg.q * w_l + B.apply(2.0 * v_next - v_l);
  Vector w_next = (arg - psi.resolvent(arg, cfg.q)) / cfg.q;
  return {std::move(v_next), std::move(w_next)};
}

bool inner_stop_check(const Vector& v_candidate, const Vector& v_prev_outer,
                      const Vector& u_next, const Vector& u_prev, int k,
                      const L0Config& cfg, const LinearOp& B, const LinearOp& D,
                      const Fidelity& psi) {
  double f_cand = objective_F(u_next, v_candidate, B, D, psi, cfg.lambda, cfg.gamma);
  double f_prev = objective_F(u_next, v_prev_outer, B, D, psi, cfg.lambda, cfg.gamma);
  double du2 = (u_next - u_prev).squaredNorm();
  if (f_cand - f_prev > 0.5 * cfg.resolved_rho_prime() * du2) return false;
  double gh = grad_H(v_candidate, u_next, B, D, psi, cfg.lambda, cfg.gamma).norm();
  return gh <= cfg.error_seq.at(k);
}

L0Result solve_l0(const LinearOp& B, const LinearOp& D, const Fidelity& psi,
                  const L0Config& cfg_in, L0State init) {
  const Eigen::Index n = D.out_dim();
  const Eigen::Index m = D.in_dim();
  if (B.in_dim() != m) throw std::invalid_argument("solve_l0: B and D disagree on m");
  if (B.out_dim() != psi.dim()) throw std::invalid_argument("solve_l0: psi dimension mismatch");
  if (init.u.size() != n || init.v.size() != m || init.w.size() != B.out_dim()) {
    throw std::invalid_argument("solve_l0: initial state has wrong dimensions");
  }

  L0Config cfg = cfg_in;
  resolve_config(cfg, B);

  const double lam = cfg.lambda;
  const double gam = cfg.gamma;
  const double rho = cfg.resolved_rho_prime();
  const double theory_bound =
      cfg.alpha < 1.0 ? (lam / gam) * (1.0 - cfg.alpha) / cfg.alpha
                      : 0.0;

  L0Result result;
  result.descent_guaranteed = cfg.alpha < 1.0 && rho < theory_bound;

  Vector u = std::move(init.u);
  Vector v = std::move(init.v);
  Vector w = std::move(init.w);

  const double c1 = lam / (cfg.p * gam + lam);
  const double c2 = cfg.p * gam / (cfg.p * gam + lam);

  double f_prev = std::numeric_limits<double>::quiet_NaN();
  int k_done = 0;

  for (int k = 1; k <= cfg.max_outer; ++k) {
    Vector dv = D.apply(v);
    Vector u_next = hard_threshold((1.0 - cfg.alpha) * u + cfg.alpha * dv, cfg.alpha * gam);
    const double du2 = (u_next - u).squaredNorm();
    const double lam_nnz = lam * nnz(u_next);

    Vector dtu = D.adjoint(u_next);
    Vector bv = B.apply(v);
    Vector gh0 = (lam / gam) * (v - dtu) + B.adjoint(psi.gradient(bv));

    int inner = 0;
    bool cap = false;
    double gh_norm = gh0.norm();
    double f_val;

    const Vector v_before = v;
    const Vector w_before = w;
    if (du2 + gh0.squaredNorm() > 0.0) {
      const double f_prev_outer =
          psi.value(bv) + (lam / (2.0 * gam)) * (u_next - dv).squaredNorm() + lam_nnz;
      const double e_k = cfg.error_seq.at(k);
      Vector v_l = v;
      Vector w_l = w;
      Vector bv_l = bv;
      f_val = f_prev_outer;
      while (true) {
        Vector v_next = c1 * dtu + c2 * (v_l - (1.0 / cfg.p) * B.adjoint(w_l));
        Vector bv_next = B.apply(v_next);
        Vector arg = cfg.q * w_l + 2.0 * bv_next - bv_l;
        Vector w_next = (arg - psi.resolvent(arg, cfg.q)) / cfg.q;
        ++inner;

        double f_cand = psi.value(bv_next) +
                        (lam / (2.0 * gam)) * (u_next - D.apply(v_next)).squaredNorm() +
                        lam_nnz;
        Vector gh = (lam / gam) * (v_next - dtu) + B.adjoint(psi.gradient(bv_next));
        gh_norm = gh.norm();
        bool accept = (f_cand - f_prev_outer <= 0.5 * rho * du2) && (gh_norm <= e_k);

        v_l = std::move(v_next);
        w_l = std::move(w_next);
        bv_l = std::move(bv_next);
        f_val = f_cand;
        if (accept) break;
        if (inner >= cfg.max_inner) {
          cap = true;
          break;
        }
      }
      v = std::move(v_l);
      w = std::move(w_l);
    } else {
      // exact fixed point reached; carry (v, w) forward unchanged
      f_val = psi.value(bv) + (lam / (2.0 * gam)) * (u_next - dv).squaredNorm() + lam_nnz;
    }

    IterationRecord rec;
    rec.k = k;
    rec.F_value = f_val;
    rec.u_step_norm = std::sqrt(du2);
    rec.grad_H_norm = gh_norm;
    rec.nnz = nnz(u_next);
    if (cfg.keep_support) rec.support = support(u_next);
    rec.inner_iters = inner;
    rec.hit_inner_cap = cap;
    if (cfg.keep_iterates) {
      rec.u = u_next;
      rec.v = v;
    }
    result.trace.push_back(std::move(rec));

    if (!std::isnan(f_prev) && f_val > f_prev + 1e-10) result.non_monotone = true;
    f_prev = f_val;

    // Relative u-change stop. While u sits at exactly zero the ratio is
    // undefined, so fall back to the (v, w) pair until the whole state
    // settles; the dual can keep charging for several steps while u and v
    // stand still.
    const double un = u_next.norm();
    double rel;
    if (un > 0.0) {
      rel = std::sqrt(du2) / un;
    } else if (du2 > 0.0) {
      rel = std::numeric_limits<double>::infinity();
    } else {
      auto ratio = [](double step, double norm) {
        if (norm > 0.0) return step / norm;
        return step > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
      };
      rel = std::max(ratio((v - v_before).norm(), v.norm()),
                     ratio((w - w_before).norm(), w.norm()));
    }
    u = std::move(u_next);
    k_done = k;
    if (rel < cfg.outer_tol) {
      result.converged = true;
      break;
    }
  }

  result.state.u = std::move(u);
  result.state.v = std::move(v);
  result.state.w = std::move(w);
  result.state.k = k_done;
  return result;
}

}  // namespace sparsefix
