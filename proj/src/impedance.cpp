#include "admitforge/impedance.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "admitforge/error.hpp"

namespace admitforge {

void ImpedanceBounds::validate() const {
  auto check = [](double lo, double hi, const char* name) {
    if (!(lo >= 0.0) || !(hi >= lo)) {
      throw ConfigError(fmt::format("impedance bounds for {} must satisfy 0 <= lo <= hi (got {}, {})",
                                    name, lo, hi));
    }
  };
  check(m_lo, m_hi, "mass");
  check(b_lo, b_hi, "damping");
  check(k_lo, k_hi, "stiffness");
}

void validate(const ImpedanceParams& p) {
  if (!(p.mass >= 0.0) || !(p.damping >= 0.0) || !(p.stiffness >= 0.0)) {
    throw Error(fmt::format("impedance parameters must be non-negative (got {}, {}, {})", p.mass,
                            p.damping, p.stiffness));
  }
}

void validate(const AdmittanceParams& p) {
  if (!(p.m > 0.0) || !(p.b > 0.0)) {
    throw Error(fmt::format("admittance parameters must be positive (got m={}, b={})", p.m, p.b));
  }
}

TransferFunction impedance_tf(const ImpedanceParams& p) {
  validate(p);
  if (p.mass == 0.0 && p.damping == 0.0 && p.stiffness == 0.0) throw Error("degenerate impedance");
  return TransferFunction(Polynomial({p.mass, p.damping, p.stiffness}), Polynomial::s());
}

TransferFunction impedance_tf_allow_zero(const ImpedanceParams& p) {
  validate(p);
  return TransferFunction(Polynomial({p.mass, p.damping, p.stiffness}), Polynomial::s());
}

TransferFunction admittance_tf(const AdmittanceParams& p) {
  validate(p);
  return TransferFunction(Polynomial::constant(1.0), Polynomial({p.m, p.b}));
}

ImpedanceParams equivalent(const ImpedanceParams& human, const ImpedanceParams& env) {
  validate(human);
  validate(env);
  return {human.mass + env.mass, human.damping + env.damping, human.stiffness + env.stiffness};
}

std::vector<ImpedanceParams> corner_set(const ImpedanceBounds& bounds, VarySet vary,
                                        const ImpedanceParams& pinned) {
  bounds.validate();
  if (!vary.mass && !vary.damping && !vary.stiffness) throw Error("corner_set needs a nonempty vary set");

  auto values = [](bool varied, double lo, double hi, double fixed) {
    std::vector<double> v;
    if (!varied) {
      v.push_back(fixed);
    } else {
      v.push_back(lo);
      if (hi != lo) v.push_back(hi);
    }
    return v;
  };
  const auto ms = values(vary.mass, bounds.m_lo, bounds.m_hi, pinned.mass);
  const auto bs = values(vary.damping, bounds.b_lo, bounds.b_hi, pinned.damping);
  const auto ks = values(vary.stiffness, bounds.k_lo, bounds.k_hi, pinned.stiffness);

  std::vector<ImpedanceParams> corners;
  for (double m : ms) {
    for (double b : bs) {
      for (double k : ks) corners.push_back({m, b, k});
    }
  }
  return corners;
}

}  // namespace admitforge
