#pragma once

#include <array>

#include "admitforge/impedance.hpp"
#include "admitforge/kinematics.hpp"
#include "admitforge/transfer_function.hpp"

namespace admitforge {

// Identified position-loop models of the LBR iiwa 7 R800 joints that move the
// end effector along x at the nominal configuration. Other joints are identity.
inline TransferFunction iiwa_joint2() { return {Polynomial({25.69, 749.3}), Polynomial({1.0, 29.04, 752.7})}; }
inline TransferFunction iiwa_joint4() { return {Polynomial({65.99, 1679.0}), Polynomial({1.0, 72.97, 1723.0})}; }
inline TransferFunction iiwa_joint6() { return {Polynomial({63.77, 6564.0}), Polynomial({1.0, 95.39, 6513.0})}; }

inline DiagonalJointTf iiwa_joint_models() {
  DiagonalJointTf t;
  t.entries[1] = iiwa_joint2();
  t.entries[3] = iiwa_joint4();
  t.entries[5] = iiwa_joint6();
  return t;
}

/// Force-sensor filter: 2nd-order Butterworth at 5 Hz.
inline TransferFunction default_force_filter() { return butterworth(2, 5.0); }

/// Controller sets used for collaborative drilling: I, II, III.
inline std::array<AdmittanceParams, 3> drilling_presets() { return {{{20.0, 1500.0}, {20.0, 900.0}, {50.0, 900.0}}}; }

}  // namespace admitforge
