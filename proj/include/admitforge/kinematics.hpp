#pragma once

#include <array>
#include <filesystem>
#include <string>

#include <Eigen/Dense>

#include "admitforge/transfer_function.hpp"

namespace admitforge {

inline constexpr int kNumJoints = 7;

using JointVector = Eigen::Matrix<double, kNumJoints, 1>;
using JacobianMatrix = Eigen::Matrix<double, 6, kNumJoints>;

/// One standard Denavit-Hartenberg row: Rot_z(theta + offset) Trans_z(d)
/// Trans_x(a) Rot_x(alpha).
struct DhRow {
  double d = 0.0;             // m
  double a = 0.0;             // m
  double alpha = 0.0;         // rad
  double theta_offset = 0.0;  // rad
};

struct DhTable {
  std::array<DhRow, kNumJoints> rows{};

  /// KUKA LBR iiwa 7 R800 with media flange (flange offset 0.152 m).
  static DhTable iiwa7_r800();
  /// CSV `joint,d_m,a_m,alpha_rad,theta_offset_rad`, one row per joint 1..7.
  static DhTable load_csv(const std::filesystem::path& path);
  void save_csv(const std::filesystem::path& path) const;
};

struct JointLimits {
  JointVector lower;
  JointVector upper;

  /// +-2.967 rad on joints 1,3,5,7 and +-2.094 rad on joints 2,4,6.
  static JointLimits iiwa_defaults();
};

/// Joint angles in rad, checked against limits at construction.
class JointConfig {
 public:
  explicit JointConfig(const JointVector& angles,
                       const JointLimits& limits = JointLimits::iiwa_defaults());

  const JointVector& angles() const { return angles_; }

  /// [0, pi/3, 0, -pi/4, 0, 5pi/12, 0], the linearization point for the x axis.
  static JointConfig nominal();

 private:
  JointVector angles_;
};

struct Pose {
  Eigen::Vector3d position;
  Eigen::Matrix3d rotation;
};

enum class CartesianAxis { kVx = 0, kVy, kVz, kWx, kWy, kWz };

CartesianAxis parse_axis(const std::string& name);

Pose forward_kinematics(const DhTable& dh, const JointConfig& q);

/// Geometric Jacobian in the base frame, rows [v; omega].
JacobianMatrix jacobian(const DhTable& dh, const JointConfig& q);

/// Moore-Penrose pseudoinverse via SVD; singular values below
/// relative_tolerance * sigma_max are treated as zero.
Eigen::MatrixXd pseudoinverse(const Eigen::MatrixXd& m, double relative_tolerance = 1e-10);

/// Diagonal joint dynamics T(s) = diag(T_1 ... T_7); identity by default.
struct DiagonalJointTf {
  std::array<TransferFunction, kNumJoints> entries{};
};

struct CartesianModel {
  TransferFunction tf;
  // k_i = J(row, i) * Jpinv(i, col).
  std::array<double, kNumJoints> weights{};
};

/// K_rc(s) = sum_i J_ri Jpinv_ic T_i(s) at the given configuration.
CartesianModel cartesian_tf(const DhTable& dh, const JointConfig& q, const DiagonalJointTf& joints,
                            CartesianAxis row, CartesianAxis col);

}  // namespace admitforge
