#include "admitforge/kinematics.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include <fmt/format.h>

#include "admitforge/csv.hpp"
#include "admitforge/error.hpp"

namespace admitforge {

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::Matrix4d dh_transform(const DhRow& row, double theta) {
  const double ct = std::cos(theta + row.theta_offset);
  const double st = std::sin(theta + row.theta_offset);
  const double ca = std::cos(row.alpha);
  const double sa = std::sin(row.alpha);
  Eigen::Matrix4d t;
  t << ct, -st * ca, st * sa, row.a * ct,
       st, ct * ca, -ct * sa, row.a * st,
       0.0, sa, ca, row.d,
       0.0, 0.0, 0.0, 1.0;
  return t;
}

// Frames 0..7; frame i holds joint i+1's axis (z) and origin.
std::array<Eigen::Matrix4d, kNumJoints + 1> chain(const DhTable& dh, const JointConfig& q) {
  std::array<Eigen::Matrix4d, kNumJoints + 1> frames;
  frames[0] = Eigen::Matrix4d::Identity();
  for (int i = 0; i < kNumJoints; ++i) {
    frames[static_cast<std::size_t>(i + 1)] =
        frames[static_cast<std::size_t>(i)] * dh_transform(dh.rows[static_cast<std::size_t>(i)], q.angles()(i));
  }
  return frames;
}

}  // namespace

DhTable DhTable::iiwa7_r800() {
  DhTable t;
  t.rows = {{{0.340, 0.0, -kPi / 2, 0.0},
             {0.0, 0.0, kPi / 2, 0.0},
             {0.400, 0.0, kPi / 2, 0.0},
             {0.0, 0.0, -kPi / 2, 0.0},
             {0.400, 0.0, -kPi / 2, 0.0},
             {0.0, 0.0, kPi / 2, 0.0},
             {0.152, 0.0, 0.0, 0.0}}};
  return t;
}

DhTable DhTable::load_csv(const std::filesystem::path& path) {
  const CsvTable csv = read_csv(path);
  csv.require_columns({"joint", "d_m", "a_m", "alpha_rad", "theta_offset_rad"});
  if (csv.rows() != kNumJoints) {
    throw ConfigError(fmt::format("{}: DH table needs exactly {} rows, found {}", path.string(),
                                  kNumJoints, csv.rows()));
  }
  DhTable t;
  std::array<bool, kNumJoints> seen{};
  for (std::size_t r = 0; r < csv.rows(); ++r) {
    const double j = csv.at(r, "joint");
    const int joint = static_cast<int>(j);
    if (joint != j || joint < 1 || joint > kNumJoints || seen[static_cast<std::size_t>(joint - 1)]) {
      throw ConfigError(fmt::format("{}: bad or duplicate joint index {}", path.string(), j));
    }
    seen[static_cast<std::size_t>(joint - 1)] = true;
    t.rows[static_cast<std::size_t>(joint - 1)] = {csv.at(r, "d_m"), csv.at(r, "a_m"), csv.at(r, "alpha_rad"),
                                                   csv.at(r, "theta_offset_rad")};
  }
  return t;
}

void DhTable::save_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError(fmt::format("cannot write {}", path.string()));
  out << "joint,d_m,a_m,alpha_rad,theta_offset_rad\n";
  for (int i = 0; i < kNumJoints; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    out << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g}\n", i + 1, r.d, r.a, r.alpha, r.theta_offset);
  }
}

JointLimits JointLimits::iiwa_defaults() {
  JointLimits l;
  l.upper << 2.967, 2.094, 2.967, 2.094, 2.967, 2.094, 2.967;
  l.lower = -l.upper;
  return l;
}

JointConfig::JointConfig(const JointVector& angles, const JointLimits& limits) : angles_(angles) {
  for (int i = 0; i < kNumJoints; ++i) {
    if (!std::isfinite(angles(i)) || angles(i) < limits.lower(i) || angles(i) > limits.upper(i)) {
      throw Error(fmt::format("joint {} angle {} rad outside limits [{}, {}]", i + 1, angles(i),
                              limits.lower(i), limits.upper(i)));
    }
  }
}

JointConfig JointConfig::nominal() {
  JointVector q;
  q << 0.0, kPi / 3, 0.0, -kPi / 4, 0.0, 5 * kPi / 12, 0.0;
  return JointConfig(q);
}

CartesianAxis parse_axis(const std::string& name) {
  static const std::array<const char*, 6> names{"vx", "vy", "vz", "wx", "wy", "wz"};
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (name == names[i]) return static_cast<CartesianAxis>(i);
  }
  if (name == "x") return CartesianAxis::kVx;
  if (name == "y") return CartesianAxis::kVy;
  if (name == "z") return CartesianAxis::kVz;
  throw ConfigError(fmt::format("unknown Cartesian axis '{}'", name));
}

Pose forward_kinematics(const DhTable& dh, const JointConfig& q) {
  const auto frames = chain(dh, q);
  const Eigen::Matrix4d& tip = frames.back();
  return {tip.block<3, 1>(0, 3), tip.block<3, 3>(0, 0)};
}

JacobianMatrix jacobian(const DhTable& dh, const JointConfig& q) {
  const auto frames = chain(dh, q);
  const Eigen::Vector3d tip = frames.back().block<3, 1>(0, 3);
  JacobianMatrix j;
  for (int i = 0; i < kNumJoints; ++i) {
    const Eigen::Matrix4d& f = frames[static_cast<std::size_t>(i)];
    const Eigen::Vector3d axis = f.block<3, 1>(0, 2);
    const Eigen::Vector3d origin = f.block<3, 1>(0, 3);
    j.block<3, 1>(0, i) = axis.cross(tip - origin);
    j.block<3, 1>(3, i) = axis;
  }
  return j;
}

Eigen::MatrixXd pseudoinverse(const Eigen::MatrixXd& m, double relative_tolerance) {
  if (!m.allFinite()) throw Error("pseudoinverse of a non-finite matrix");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sigma = svd.singularValues();
  const double cutoff = sigma.size() > 0 ? relative_tolerance * sigma(0) : 0.0;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(sigma.size());
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > cutoff) inv(i) = 1.0 / sigma(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

CartesianModel cartesian_tf(const DhTable& dh, const JointConfig& q, const DiagonalJointTf& joints,
                            CartesianAxis row, CartesianAxis col) {
  const JacobianMatrix j = jacobian(dh, q);
  const Eigen::MatrixXd j_pinv = pseudoinverse(j);
  const int r = static_cast<int>(row);
  const int c = static_cast<int>(col);

  CartesianModel model;
  double largest = 0.0;
  for (int i = 0; i < kNumJoints; ++i) {
    model.weights[static_cast<std::size_t>(i)] = j(r, i) * j_pinv(i, c);
    largest = std::max(largest, std::abs(model.weights[static_cast<std::size_t>(i)]));
  }

  // Numerically-zero weights are kept in the report but left out of the sum.
  TransferFunction sum(Polynomial(), Polynomial::constant(1.0));
  for (int i = 0; i < kNumJoints; ++i) {
    const double k = model.weights[static_cast<std::size_t>(i)];
    if (std::abs(k) <= 1e-12 * largest) continue;
    const TransferFunction& t = joints.entries[static_cast<std::size_t>(i)];
    // Joints sharing a denominator add numerators instead of multiplying denominators.
    if (sum.den() == t.den()) {
      sum = TransferFunction(sum.num() + t.num() * k, t.den());
    } else {
      sum = combine(sum, k * t, Interconnection::kParallel);
    }
  }
  model.tf = sum;
  return model;
}

}  // namespace admitforge
