#pragma once

#include <utility>
#include <vector>

#include "sparsefix/error_sequence.hpp"
#include "sparsefix/fidelity.hpp"
#include "sparsefix/linops.hpp"
#include "sparsefix/prox.hpp"

namespace sparsefix {

// Parameters of the two-variable l0 solver. Negative rho_prime / q mean
// "derive the default": rho_prime = 0.99 (lambda/gamma)(1/alpha - 1) for
// alpha < 1 (0 otherwise), q = (1 + 1e-6) ||B||_2^2 / p.
struct L0Config {
  double lambda = 1.0;
  double gamma = 0.5;
  double alpha = 0.99;      // relaxation, (0, 2]; descent guaranteed for < 1
  double rho_prime = -1.0;  // slack in the inner F-decrease test
  double p = 1.0;
  double q = -1.0;
  ErrorSequence error_seq = ErrorSequence::inverse_square(1e16);
  double outer_tol = 1e-6;  // relative u-change stopping tolerance
  int max_outer = 100000;
  int max_inner = 100000;
  bool keep_support = true;    // store support sets in the trace
  bool keep_iterates = false;  // store u, v snapshots in the trace

  double resolved_rho_prime() const {
    if (rho_prime >= 0.0) return rho_prime;
    if (alpha >= 1.0) return 0.0;
    return 0.99 * (lambda / gamma) * (1.0 / alpha - 1.0);
  }
};

struct L0State {
  Vector u;  // sparse variable, R^n
  Vector v;  // smooth variable, R^m
  Vector w;  // inner-loop dual, R^p
  int k = 0; // outer iterations performed
};

// Default start: u = D v1, w = 0.
L0State default_l0_state(const LinearOp& B, const LinearOp& D, Vector v1);

struct IterationRecord {
  int k = 0;
  double F_value = 0.0;
  double u_step_norm = 0.0;
  double grad_H_norm = 0.0;
  int nnz = 0;
  SupportSet support;  // empty unless cfg.keep_support
  int inner_iters = 0;
  bool hit_inner_cap = false;
  Vector u, v;  // empty unless cfg.keep_iterates
};

struct L0Result {
  L0State state;
  std::vector<IterationRecord> trace;
  bool converged = false;
  bool non_monotone = false;      // some F increase beyond 1e-10 slack
  bool descent_guaranteed = false;  // alpha < 1 and rho' within theory range
};

// F(u, v) = psi(Bv) + (lambda/2gamma) ||u - Dv||^2 + lambda ||u||_0.
double objective_F(const Vector& u, const Vector& v, const LinearOp& B,
                   const LinearOp& D, const Fidelity& psi, double lambda,
                   double gamma);

// Gradient of H(v; u) = (lambda/2gamma) ||v - D^T u||^2 + psi(Bv).
Vector grad_H(const Vector& v, const Vector& u, const LinearOp& B,
              const LinearOp& D, const Fidelity& psi, double lambda,
              double gamma);

// hard_threshold((1 - alpha) u + alpha D v, alpha gamma).
Vector outer_u_step(const L0State& state, const L0Config& cfg,
                    const LinearOp& D);

// One primal-dual step of the inner iteration that evaluates the prox of
// psi o B. Requires p q > ||B||_2^2 to converge.
std::pair<Vector, Vector> inner_fppa_step(const Vector& v_l, const Vector& w_l,
                                          const Vector& u_next,
                                          const L0Config& cfg,
                                          const LinearOp& B, const LinearOp& D,
                                          const Fidelity& psi);

// True when the candidate satisfies both inner exit conditions:
//   F(u_next, v_cand) - F(u_next, v_prev) <= (rho'/2) ||u_next - u_prev||^2
//   ||grad_H(v_cand; u_next)|| <= e^{k+1}
bool inner_stop_check(const Vector& v_candidate, const Vector& v_prev_outer,
                      const Vector& u_next, const Vector& u_prev, int k,
                      const L0Config& cfg, const LinearOp& B,
                      const LinearOp& D, const Fidelity& psi);

L0Result solve_l0(const LinearOp& B, const LinearOp& D, const Fidelity& psi,
                  const L0Config& cfg, L0State init);

}  // namespace sparsefix
