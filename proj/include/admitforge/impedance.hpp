#pragma once

#include <vector>

#include "admitforge/transfer_function.hpp"

namespace admitforge {

/// Second-order mechanical impedance (m s^2 + b s + k) / s.
struct ImpedanceParams {
  double mass = 0.0;       // kg
  double damping = 0.0;    // Ns/m
  double stiffness = 0.0;  // N/m

  friend bool operator==(const ImpedanceParams&, const ImpedanceParams&) = default;
};

struct ImpedanceBounds {
  double m_lo = 0.0, m_hi = 5.0;
  double b_lo = 0.0, b_hi = 41.0;
  double k_lo = 401.0, k_hi = 17000.0;

  void validate() const;
};

/// Virtual mass and damping of the admittance controller Y(s) = 1/(m s + b).
struct AdmittanceParams {
  double m = 1.0;  // kg
  double b = 1.0;  // Ns/m

  friend bool operator==(const AdmittanceParams&, const AdmittanceParams&) = default;
};

/// Which impedance components take both their bound values in corner_set.
struct VarySet {
  bool mass = false;
  bool damping = false;
  bool stiffness = false;
};

void validate(const ImpedanceParams& p);
void validate(const AdmittanceParams& p);

/// (m s^2 + b s + k)/s. Throws "degenerate impedance" when all three are zero.
TransferFunction impedance_tf(const ImpedanceParams& p);

/// Like impedance_tf but maps the all-zero triple to 0/s instead of throwing.
/// Used where a released contact (no impedance at all) is a legitimate case.
TransferFunction impedance_tf_allow_zero(const ImpedanceParams& p);

/// 1/(m s + b).
TransferFunction admittance_tf(const AdmittanceParams& p);

/// Series coupling of human arm and environment: componentwise sum.
ImpedanceParams equivalent(const ImpedanceParams& human, const ImpedanceParams& env);

/// Cartesian product of {lo, hi} over the varied components; the other
/// components take their value from `pinned`. Duplicates (lo == hi) collapse.
/// Order: mass outermost, then damping, then stiffness, lo before hi.
std::vector<ImpedanceParams> corner_set(const ImpedanceBounds& bounds, VarySet vary,
                                        const ImpedanceParams& pinned);

}  // namespace admitforge
