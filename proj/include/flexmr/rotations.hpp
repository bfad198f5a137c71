#pragma once

#include <cmath>

#include "flexmr/core.hpp"

namespace flexmr {

/// Scalars and direction vectors of the two nested plane-rotation
/// recurrences. Between updates the state holds the values entering the
/// next step: rho/rho_bar/c_bar/s_bar from step k-1, alpha_bar and xi_bar
/// for step k. |xi_bar| after an update is the subproblem residual, which
/// for a fixed preconditioner equals the normal-equation residual norm in
/// the preconditioned metric.
template <typename Scalar>
struct RotationState {
  Scalar rho = Scalar(1);
  Scalar rho_bar = Scalar(1);
  Scalar c = Scalar(1);
  Scalar s = Scalar(0);
  Scalar c_bar = Scalar(1);
  Scalar s_bar = Scalar(0);
  Scalar theta = Scalar(0);
  Scalar theta_bar = Scalar(0);
  Scalar alpha_bar = Scalar(0);
  Scalar xi = Scalar(0);
  Scalar xi_bar = Scalar(0);
  DenseVector<Scalar> h;
  DenseVector<Scalar> h_bar;
  DenseVector<Scalar> x;
  Index step = 0;
};

template <typename Scalar>
RotationState<Scalar> lsmr_rotation_init(Scalar alpha1, Scalar beta1,
                                         const DenseVector<Scalar>& v1,
                                         StorageAudit* audit = nullptr) {
  RotationState<Scalar> st;
  st.alpha_bar = alpha1;
  st.xi_bar = alpha1 * beta1;
  st.h = v1;
  st.h_bar = DenseVector<Scalar>::Zero(v1.size());
  st.x = DenseVector<Scalar>::Zero(v1.size());
  if (audit) audit->acquire_n(3);
  return st;
}

/// Applies the two plane rotations and the direction/iterate updates for
/// step k, consuming the freshly produced (alpha_{k+1}, beta_{k+1}, v_{k+1}).
/// Passing v_next = nullptr skips the h refresh; that is only valid on the
/// final update after a bidiagonalization breakdown, where alpha_next and/or
/// beta_next are zero and no further step will consume h.
template <typename Scalar>
void lsmr_rotation_update(RotationState<Scalar>& st, Scalar alpha_next, Scalar beta_next,
                          const DenseVector<Scalar>* v_next, FlopCounter* flops = nullptr) {
  const Scalar rho_prev = st.rho;
  const Scalar rho_bar_prev = st.rho_bar;

  const Scalar rho = std::hypot(st.alpha_bar, beta_next);
  const Scalar c = st.alpha_bar / rho;
  const Scalar s = beta_next / rho;
  const Scalar theta_next = s * alpha_next;
  const Scalar alpha_bar_next = c * alpha_next;

  const Scalar theta_bar = st.s_bar * rho;
  const Scalar rho_bar = std::hypot(st.c_bar * rho, theta_next);
  const Scalar c_bar = st.c_bar * rho / rho_bar;
  const Scalar s_bar = theta_next / rho_bar;
  const Scalar xi = c_bar * st.xi_bar;
  const Scalar xi_bar_next = -s_bar * st.xi_bar;

  if (!std::isfinite(static_cast<double>(rho)) || !std::isfinite(static_cast<double>(rho_bar)) ||
      !std::isfinite(static_cast<double>(xi)))
    throw NumericalFault("lsmr_rotation_update: non-finite intermediate");

  st.h_bar = st.h - (theta_bar * rho / (rho_prev * rho_bar_prev)) * st.h_bar;
  st.x += (xi / (rho * rho_bar)) * st.h_bar;
  if (v_next) st.h = *v_next - (theta_next / rho) * st.h;

  st.rho = rho;
  st.rho_bar = rho_bar;
  st.c = c;
  st.s = s;
  st.c_bar = c_bar;
  st.s_bar = s_bar;
  st.theta = theta_next;
  st.theta_bar = theta_bar;
  st.alpha_bar = alpha_bar_next;
  st.xi = xi;
  st.xi_bar = xi_bar_next;
  ++st.step;
  if (flops) flops->record_vector_work(6.0 * static_cast<double>(st.x.size()));
}

template <typename Scalar>
void lsmr_rotation_update(RotationState<Scalar>& st, Scalar alpha_next, Scalar beta_next,
                          const DenseVector<Scalar>& v_next, FlopCounter* flops = nullptr) {
  lsmr_rotation_update(st, alpha_next, beta_next, &v_next, flops);
}

}  // namespace flexmr
