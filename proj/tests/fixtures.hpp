#pragma once

#include "admitforge/kinematics.hpp"
#include "admitforge/presets.hpp"

namespace admitforge::testing {

// G(s) of the iiwa along x at the nominal configuration.
inline const TransferFunction& iiwa_robot() {
  static const TransferFunction g = cartesian_tf(DhTable::iiwa7_r800(), JointConfig::nominal(), iiwa_joint_models(),
                                                 CartesianAxis::kVx, CartesianAxis::kVx)
                                        .tf;
  return g;
}

inline std::vector<ImpedanceParams> task_corners(double k_eq) {
  return corner_set(ImpedanceBounds{}, {true, true, false}, {0.0, 0.0, k_eq});
}

}  // namespace admitforge::testing
