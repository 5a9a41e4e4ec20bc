#include <gtest/gtest.h>

#include <Eigen/Geometry>
#include <numbers>
#include <random>

#include "pinch/errors.hpp"
#include "pinch/kinematics.hpp"
#include "test_support.hpp"

using namespace pinch;
using pinch::testing::model;
using pinch::testing::random_configuration;
using std::numbers::pi;

namespace {

// Independent 4x4 composition of one modified-DH row.
Eigen::Matrix4d row_matrix(double alpha, double a, double d, double theta) {
  Eigen::Matrix4d rx = Eigen::Matrix4d::Identity(), tx = Eigen::Matrix4d::Identity(), rz = Eigen::Matrix4d::Identity(),
                  tz = Eigen::Matrix4d::Identity();
  rx.block<3, 3>(0, 0) = Eigen::AngleAxisd(alpha, Eigen::Vector3d::UnitX()).toRotationMatrix();
  tx(0, 3) = a;
  rz.block<3, 3>(0, 0) = Eigen::AngleAxisd(theta, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  tz(2, 3) = d;
  return rx * tx * rz * tz;
}

Eigen::Matrix4d full_product(const KinematicChain& chain, const std::vector<double>& q) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  for (const DhRow& r : chain.rows) {
    const double theta =
        r.actuated() ? q[std::get<ActuatedJoint>(r.theta).index] : std::get<FixedAngle>(r.theta).radians;
    m = m * row_matrix(r.alpha_prev, r.a_prev, r.d, theta);
  }
  return m;
}

}  // namespace

TEST(DhTransform, ZeroRowIsIdentity) {
  const Transform4 t = dh_transform(DhRow{0, 0, 0, FixedAngle{0}}, 0.0);
  EXPECT_TRUE(t.matrix().isApprox(Eigen::Matrix4d::Identity(), 0.0));
}

TEST(DhTransform, PureTranslationAlongX) {
  const Transform4 t = dh_transform(DhRow{0, 1.0, 0, FixedAngle{0}}, 0.0);
  EXPECT_EQ(t.translation, Vec3(1, 0, 0));
  EXPECT_TRUE(t.rotation.isIdentity(0.0));
}

TEST(DhTransform, MatchesHandComposedProduct) {
  const Transform4 t = dh_transform(DhRow{pi / 2, 0.1, 0.0, ActuatedJoint{0}}, pi / 2);
  const Eigen::Matrix4d expected = row_matrix(pi / 2, 0.1, 0.0, pi / 2);
  EXPECT_LT((t.matrix() - expected).cwiseAbs().maxCoeff(), 1e-15);
  // RotX(pi/2) TransX(0.1) RotZ(pi/2): x' = z_old... written out by hand.
  Eigen::Matrix4d by_hand;
  by_hand << 0, -1, 0, 0.1,  //
      0, 0, -1, 0,           //
      1, 0, 0, 0,            //
      0, 0, 0, 1;
  EXPECT_LT((t.matrix() - by_hand).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(DhTransform, FixedRowsIgnoreTheta) {
  const DhRow row{0.3, 0.2, 0.1, FixedAngle{0.7}};
  EXPECT_EQ(dh_transform(row, 0.0).matrix(), dh_transform(row, 1.5).matrix());
}

TEST(ForwardKinematics, RejectsWrongConfigurationLength) {
  const KinematicChain& c = model(CaseId::Case1).chain(FingerId::Index);
  const std::vector<double> q(4, 0.0);
  EXPECT_THROW(forward_kinematics(c, q), ContractViolation);
}

TEST(ForwardKinematics, CaseOneIndexAtZeroMatchesClosedForm) {
  // Rows (pi/2,0,0,pi/2), (pi/2,0.18,0.55,0), (-pi/2,0,0,0), (0,0.23,0,0), (0,0.22,0,0) multiply
  // out symbolically to a fingertip at (0.55, 0, 0.63).
  const std::vector<double> q(3, 0.0);
  const auto frames = forward_kinematics(model(CaseId::Case1).chain(FingerId::Index), q);
  EXPECT_LT((frames.back().translation - Vec3(0.55, 0.0, 0.63)).norm(), 1e-12);
}

TEST(ForwardKinematics, CaseFourThumbAtZeroMatchesClosedForm) {
  // The five-DoF thumb unfolds along +x: a_0' + a_1' + a_2' + a_6' + a_7' = 0.71.
  const std::vector<double> q(5, 0.0);
  const auto frames = forward_kinematics(model(CaseId::Case4).chain(FingerId::Thumb), q);
  EXPECT_LT((frames.back().translation - Vec3(0.71, 0.0, 0.0)).norm(), 1e-12);
  EXPECT_LT((frames[1].translation - Vec3(0.2, 0.0, 0.0)).norm(), 1e-12);
}

TEST(ForwardKinematics, ConsecutiveFramesDifferByOneRow) {
  std::mt19937_64 rng(7);
  for (CaseId c : kAllCases) {
    for (FingerId f : kAllFingers) {
      const KinematicChain& chain = model(c).chain(f);
      const auto q = random_configuration(model(c).joint_ranges(f), rng);
      const auto frames = forward_kinematics(chain, q);
      ASSERT_EQ(frames.size(), chain.rows.size());
      for (std::size_t k = 1; k < frames.size(); ++k) {
        const DhRow& r = chain.rows[k];
        const double theta = r.actuated() ? q[std::get<ActuatedJoint>(r.theta).index] : 0.0;
        const Transform4 step = frames[k - 1] * dh_transform(r, theta);
        EXPECT_LT((step.matrix() - frames[k].matrix()).cwiseAbs().maxCoeff(), 1e-15);
      }
    }
  }
}

TEST(ForwardKinematics, RandomConfigurationProperties) {
  std::mt19937_64 rng(11);
  for (CaseId c : kAllCases) {
    for (FingerId f : kAllFingers) {
      const KinematicChain& chain = model(c).chain(f);
      for (int trial = 0; trial < 200; ++trial) {
        const auto q = random_configuration(model(c).joint_ranges(f), rng);
        const auto frames = forward_kinematics(chain, q);
        for (const Transform4& t : frames) {
          EXPECT_LT((t.rotation.transpose() * t.rotation - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-10);
          EXPECT_NEAR(t.rotation.determinant(), 1.0, 1e-10);
        }
        // Link lengths: |p_k - p_{k-1}| = sqrt(a^2 + d^2) for each row.
        for (std::size_t k = 1; k < frames.size(); ++k) {
          const DhRow& r = chain.rows[k];
          EXPECT_NEAR((frames[k].translation - frames[k - 1].translation).norm(), std::hypot(r.a_prev, r.d), 1e-10);
        }
        const Eigen::Matrix4d one_shot = full_product(chain, q);
        EXPECT_LT((one_shot.block<3, 1>(0, 3) - frames.back().translation).cwiseAbs().maxCoeff(), 1e-12);
      }
    }
  }
}

TEST(FingertipSample, DistalLengths) {
  const std::vector<double> q3(3, 0.0);
  const FingertipSample s3 = fingertip_sample(model(CaseId::Case1).chain(FingerId::Index), q3);
  EXPECT_NEAR((s3.tip - s3.distal_joint).norm(), 0.22, 1e-12);

  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const auto q = random_configuration(model(CaseId::Case3).joint_ranges(FingerId::Ring), rng);
    const FingertipSample s = fingertip_sample(model(CaseId::Case3).chain(FingerId::Ring), q, 5);
    EXPECT_NEAR((s.tip - s.distal_joint).norm(), 0.10, 1e-10);
    EXPECT_NEAR(s.direction.norm(), 1.0, 1e-12);
    EXPECT_NEAR(s.direction.dot(s.tip - s.distal_joint), (s.tip - s.distal_joint).norm(), 1e-12);
    EXPECT_EQ(s.grid_index, 5u);
    EXPECT_EQ(s.finger, FingerId::Ring);
  }
}

TEST(FingertipSample, PhalanxPointsRunProximalToTip) {
  const std::vector<double> q(4, -0.3);
  const FingertipSample s = fingertip_sample(model(CaseId::Case3).chain(FingerId::Index), q);
  ASSERT_EQ(s.phalanx_points.size(), 4u);
  EXPECT_EQ(s.phalanx_points.back(), s.tip);
  EXPECT_EQ(s.phalanx_points[s.phalanx_points.size() - 2], s.distal_joint);
  const double lengths[] = {0.23, 0.12, 0.10};
  for (int k = 0; k < 3; ++k) EXPECT_NEAR((s.phalanx_points[k + 1] - s.phalanx_points[k]).norm(), lengths[k], 1e-12);
}

TEST(FingertipSample, ZeroLengthDistalSegmentIsDegenerate) {
  KinematicChain chain = model(CaseId::Case1).chain(FingerId::Index);
  chain.rows.back().a_prev = 0.0;
  const std::vector<double> q(3, 0.0);
  EXPECT_THROW(fingertip_sample(chain, q), DegenerateGeometry);
  EXPECT_THROW(unit_direction(Vec3(1, 2, 3), Vec3(1, 2, 3)), DegenerateGeometry);
}
