#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sparsefix/data_io.hpp"
#include "sparsefix/error_sequence.hpp"
#include "sparsefix/experiment.hpp"
#include "sparsefix/fidelity.hpp"
#include "sparsefix/linops.hpp"
#include "sparsefix/prox.hpp"
#include "sparsefix/solver_l0.hpp"
#include "sparsefix/solver_l1.hpp"

namespace py = pybind11;
using namespace sparsefix;

namespace {

std::vector<Vector> rows_as_points(const Matrix& pts) {
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(pts.rows()));
  for (Eigen::Index i = 0; i < pts.rows(); ++i) out.push_back(pts.row(i).transpose());
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Fixed-point proximity solvers for l0/l1 sparse regularization";

  // ---- proximity operators ----
  m.def("hard_threshold", &hard_threshold, py::arg("u"), py::arg("t"));
  m.def("soft_threshold", &soft_threshold, py::arg("y"), py::arg("s"));
  m.def("support", &support, py::arg("x"));
  m.def("nnz", &nnz, py::arg("x"));
  m.def("project_support", &project_support, py::arg("x"), py::arg("keep"));

  // ---- fidelities ----
  py::class_<Fidelity>(m, "Fidelity")
      .def_static("squared_loss", &Fidelity::squared_loss, py::arg("anchor"))
      .def_static("squared_hinge", &Fidelity::squared_hinge, py::arg("anchor"))
      .def_static("poisson_kl", &Fidelity::poisson_kl, py::arg("anchor"))
      .def("value", &Fidelity::value, py::arg("z"))
      .def("gradient", &Fidelity::gradient, py::arg("z"))
      .def("resolvent", &Fidelity::resolvent, py::arg("z"), py::arg("q"))
      .def_property_readonly("anchor", &Fidelity::anchor)
      .def_property_readonly("dim", &Fidelity::dim);

  // ---- linear operators ----
  py::class_<LinearOp, std::shared_ptr<LinearOp>>(m, "LinearOp")
      .def("apply", &LinearOp::apply, py::arg("x"))
      .def("adjoint", &LinearOp::adjoint, py::arg("y"))
      .def_property_readonly("in_dim", &LinearOp::in_dim)
      .def_property_readonly("out_dim", &LinearOp::out_dim);

  py::class_<DenseOp, LinearOp, std::shared_ptr<DenseOp>>(m, "DenseOp")
      .def(py::init<Matrix>(), py::arg("matrix"))
      .def_property_readonly("matrix", &DenseOp::matrix);

  py::class_<IdentityOp, LinearOp, std::shared_ptr<IdentityOp>>(m, "IdentityOp")
      .def(py::init<Eigen::Index>(), py::arg("n"));

  py::class_<MotionBlurOp, LinearOp, std::shared_ptr<MotionBlurOp>>(m, "MotionBlurOp")
      .def(py::init<int, int, int, double>(), py::arg("img_w"), py::arg("img_h"),
           py::arg("length"), py::arg("angle_deg"))
      .def_property_readonly("kernel", &MotionBlurOp::kernel);

  py::class_<DctFrameletOp, LinearOp, std::shared_ptr<DctFrameletOp>>(m, "DctFrameletOp")
      .def(py::init<int, int, int>(), py::arg("img_w"), py::arg("img_h"),
           py::arg("block") = 7)
      .def_property_readonly("block", &DctFrameletOp::block);

  py::class_<FirstDifferenceOp, LinearOp, std::shared_ptr<FirstDifferenceOp>>(
      m, "FirstDifferenceOp")
      .def(py::init<int, int>(), py::arg("img_w"), py::arg("img_h"));

  m.def(
      "gaussian_kernel_matrix",
      [](const Matrix& points, double sigma) {
        return gaussian_kernel_matrix(rows_as_points(points), sigma).matrix();
      },
      py::arg("points"), py::arg("sigma"),
      "Gaussian kernel Gram matrix from points given as rows");

  m.def(
      "estimate_spectral_norm",
      [](const LinearOp& op, double tol, int max_iter) {
        SpectralEstimate est = estimate_spectral_norm(op, tol, max_iter);
        return py::make_tuple(est.value, est.converged);
      },
      py::arg("op"), py::arg("tol") = 1e-9, py::arg("max_iter") = 10000);

  // ---- solver configuration ----
  py::class_<ErrorSequence>(m, "ErrorSequence")
      .def(py::init<>())
      .def_static("inverse_square", &ErrorSequence::inverse_square, py::arg("m"))
      .def_static("inverse_power", &ErrorSequence::inverse_power, py::arg("m"),
                  py::arg("exponent") = 1.01)
      .def_readwrite("scale", &ErrorSequence::scale)
      .def_readwrite("exponent", &ErrorSequence::exponent)
      .def("at", &ErrorSequence::at, py::arg("k"));

  py::class_<L0Config>(m, "L0Config")
      .def(py::init<>())
      .def_readwrite("lambda_", &L0Config::lambda)
      .def_readwrite("gamma", &L0Config::gamma)
      .def_readwrite("alpha", &L0Config::alpha)
      .def_readwrite("rho_prime", &L0Config::rho_prime)
      .def_readwrite("p", &L0Config::p)
      .def_readwrite("q", &L0Config::q)
      .def_readwrite("error_seq", &L0Config::error_seq)
      .def_readwrite("outer_tol", &L0Config::outer_tol)
      .def_readwrite("max_outer", &L0Config::max_outer)
      .def_readwrite("max_inner", &L0Config::max_inner)
      .def_readwrite("keep_support", &L0Config::keep_support)
      .def_readwrite("keep_iterates", &L0Config::keep_iterates);

  py::class_<L0State>(m, "L0State")
      .def(py::init<>())
      .def_readwrite("u", &L0State::u)
      .def_readwrite("v", &L0State::v)
      .def_readwrite("w", &L0State::w)
      .def_readwrite("k", &L0State::k);

  py::class_<IterationRecord>(m, "IterationRecord")
      .def_readonly("k", &IterationRecord::k)
      .def_readonly("F_value", &IterationRecord::F_value)
      .def_readonly("u_step_norm", &IterationRecord::u_step_norm)
      .def_readonly("grad_H_norm", &IterationRecord::grad_H_norm)
      .def_readonly("nnz", &IterationRecord::nnz)
      .def_readonly("support", &IterationRecord::support)
      .def_readonly("inner_iters", &IterationRecord::inner_iters)
      .def_readonly("hit_inner_cap", &IterationRecord::hit_inner_cap);

  py::class_<L0Result>(m, "L0Result")
      .def_readonly("state", &L0Result::state)
      .def_readonly("trace", &L0Result::trace)
      .def_readonly("converged", &L0Result::converged)
      .def_readonly("non_monotone", &L0Result::non_monotone)
      .def_readonly("descent_guaranteed", &L0Result::descent_guaranteed);

  m.def("default_l0_state", &default_l0_state, py::arg("B"), py::arg("D"), py::arg("v1"));
  m.def("objective_F", &objective_F, py::arg("u"), py::arg("v"), py::arg("B"),
        py::arg("D"), py::arg("psi"), py::arg("lambda_"), py::arg("gamma"));
  m.def("grad_H", &grad_H, py::arg("v"), py::arg("u"), py::arg("B"), py::arg("D"),
        py::arg("psi"), py::arg("lambda_"), py::arg("gamma"));
  m.def("solve_l0", &solve_l0, py::arg("B"), py::arg("D"), py::arg("psi"),
        py::arg("cfg"), py::arg("init"));

  py::class_<L1Config>(m, "L1Config")
      .def(py::init<>())
      .def_readwrite("lambda_", &L1Config::lambda)
      .def_readwrite("p", &L1Config::p)
      .def_readwrite("q", &L1Config::q)
      .def_readwrite("p1", &L1Config::p1)
      .def_readwrite("q1", &L1Config::q1)
      .def_readwrite("p2", &L1Config::p2)
      .def_readwrite("q2", &L1Config::q2)
      .def_readwrite("error_seq", &L1Config::error_seq)
      .def_readwrite("tol", &L1Config::tol)
      .def_readwrite("max_outer", &L1Config::max_outer)
      .def_readwrite("max_inner", &L1Config::max_inner);

  py::class_<L1IterationRecord>(m, "L1IterationRecord")
      .def_readonly("k", &L1IterationRecord::k)
      .def_readonly("objective", &L1IterationRecord::objective)
      .def_readonly("step_norm", &L1IterationRecord::step_norm)
      .def_readonly("grad_T_norm", &L1IterationRecord::grad_T_norm)
      .def_readonly("nnz", &L1IterationRecord::nnz)
      .def_readonly("inner_iters", &L1IterationRecord::inner_iters);

  py::class_<L1Result>(m, "L1Result")
      .def_readonly("v", &L1Result::v)
      .def_readonly("w", &L1Result::w)
      .def_readonly("trace", &L1Result::trace)
      .def_readonly("converged", &L1Result::converged);

  m.def("solve_l1_identity", &solve_l1_identity, py::arg("B"), py::arg("psi"),
        py::arg("cfg"), py::arg("v0"));
  m.def("grad_T", &grad_T, py::arg("v"), py::arg("v_outer"), py::arg("w_outer"),
        py::arg("p1"), py::arg("B"), py::arg("D"), py::arg("psi"));
  m.def("solve_l1_general", &solve_l1_general, py::arg("B"), py::arg("D"),
        py::arg("psi"), py::arg("cfg"), py::arg("v0"));

  // ---- images, noise, metrics ----
  py::class_<Image>(m, "Image")
      .def(py::init<int, int>(), py::arg("width"), py::arg("height"))
      .def_readonly("width", &Image::width)
      .def_readonly("height", &Image::height)
      .def_readwrite("pixels", &Image::pixels);

  m.def("read_pgm", &read_pgm, py::arg("path"));
  m.def("write_pgm", &write_pgm, py::arg("img"), py::arg("path"));
  m.def("add_gaussian_noise", &add_gaussian_noise, py::arg("img"), py::arg("sigma"),
        py::arg("seed"));
  m.def("sample_poisson", &sample_poisson, py::arg("img"), py::arg("seed"));
  m.def("mse", &mse, py::arg("pred"), py::arg("truth"));
  m.def("accuracy", &accuracy, py::arg("pred_labels"), py::arg("truth"));
  m.def("psnr", &psnr, py::arg("clean"), py::arg("restored"));

  m.def(
      "read_libsvm",
      [](const std::string& path) {
        LabeledDataset ds = read_libsvm(path);
        Matrix x(ds.size(), ds.dim());
        Vector y(static_cast<Eigen::Index>(ds.size()));
        for (std::size_t i = 0; i < ds.size(); ++i) {
          x.row(static_cast<Eigen::Index>(i)) = ds.features[i].transpose();
          y[static_cast<Eigen::Index>(i)] = ds.labels[i];
        }
        return py::make_tuple(x, y);
      },
      py::arg("path"), "Returns (features, labels) with samples as rows");

  m.def(
      "predict_regression",
      [](const Vector& v, const Matrix& train_points, double sigma, const Vector& x) {
        return predict_regression(v, rows_as_points(train_points), sigma, x);
      },
      py::arg("v"), py::arg("train_points"), py::arg("sigma"), py::arg("x"));
  m.def(
      "predict_classification",
      [](const Vector& v, const Matrix& train_points, double sigma, const Vector& x) {
        return predict_classification(v, rows_as_points(train_points), sigma, x);
      },
      py::arg("v"), py::arg("train_points"), py::arg("sigma"), py::arg("x"));
}
