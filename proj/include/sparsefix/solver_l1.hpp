#pragma once

#include <vector>

#include "sparsefix/error_sequence.hpp"
#include "sparsefix/fidelity.hpp"
#include "sparsefix/linops.hpp"
#include "sparsefix/prox.hpp"

namespace sparsefix {

// Baseline l1 solvers. p/q drive the D = I scheme (needs p q > ||B||^2);
// p1/q1/p2/q2 drive the general-D scheme (needs p1 q1 > ||D||^2 and
// p2 q2 > ||B||^2). Negative q's derive (1 + 1e-6) ||.||^2 / p defaults.
struct L1Config {
  double lambda = 1.0;
  double p = 1.0;
  double q = -1.0;
  double p1 = 1.0;
  double q1 = -1.0;
  double p2 = 1.0;
  double q2 = -1.0;
  ErrorSequence error_seq = ErrorSequence::inverse_square(1e16);
  double tol = 1e-6;
  int max_outer = 100000;
  int max_inner = 100000;
};

struct L1IterationRecord {
  int k = 0;
  double objective = 0.0;  // psi(Bv) + lambda ||Dv||_1
  double step_norm = 0.0;
  double grad_T_norm = 0.0;  // final inner gradient (general scheme only)
  int nnz = 0;
  int inner_iters = 0;
  bool hit_inner_cap = false;
};

struct L1Result {
  Vector v;
  Vector w;
  std::vector<L1IterationRecord> trace;
  bool converged = false;
};

// Primal-dual scheme for argmin psi(Bv) + lambda ||v||_1 (D = identity):
//   v_{l+1} = soft_threshold(v_l - (1/p) B^T w_l, lambda / p)
//   w_{l+1} = (1/q)(I - (I + q grad psi)^-1)(q w_l + B(2 v_{l+1} - v_l))
L1Result solve_l1_identity(const LinearOp& B, const Fidelity& psi,
                           const L1Config& cfg, Vector v0);

// Gradient of T(v; v_outer, w_outer) =
//   (p1/2) ||v - (v_outer - (1/p1) D^T w_outer)||^2 + psi(Bv).
Vector grad_T(const Vector& v, const Vector& v_outer, const Vector& w_outer,
              double p1, const LinearOp& B, const LinearOp& D,
              const Fidelity& psi);

// Inexact scheme for argmin psi(Bv) + lambda ||Dv||_1 with general D: an
// inner primal-dual loop runs until ||grad_T|| <= e^{k+1}, then the outer
// dual update applies (1/q1)(I - soft_threshold(., q1 lambda)).
L1Result solve_l1_general(const LinearOp& B, const LinearOp& D,
                          const Fidelity& psi, const L1Config& cfg, Vector v0);

}  // namespace sparsefix
