#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "wsn3d/geometry.hpp"

using namespace wsn3d;

namespace {
const CorrelationModel kModel{30.0, 1.0};
}

TEST(Correlation, ZeroDistanceIsOne) { EXPECT_EQ(correlation(kModel, 0.0), 1.0); }

TEST(Correlation, InverseAtThreshold) { EXPECT_NEAR(correlation(kModel, 30.0 * std::log(1.0 / 0.85)), 0.85, 1e-12); }

TEST(Correlation, SixMeters) { EXPECT_NEAR(correlation(kModel, 6.0), 0.8187307530779818, 1e-12); }

TEST(Correlation, NegativeDistanceRejected) { EXPECT_THROW(correlation(kModel, -0.1), DomainError); }

TEST(Correlation, StrictlyDecreasing) {
  double prev = correlation(kModel, 0.0);
  for (double d = 0.5; d < 200.0; d += 0.5) {
    const double c = correlation(kModel, d);
    ASSERT_LT(c, prev);
    ASSERT_GT(c, 0.0);
    prev = c;
  }
}

TEST(Correlation, ModelValidation) {
  EXPECT_THROW(CorrelationModel(0.0, 1.0), DomainError);
  EXPECT_THROW(CorrelationModel(-1.0, 1.0), DomainError);
  EXPECT_THROW(CorrelationModel(30.0, 0.0), DomainError);
  EXPECT_THROW(CorrelationModel(30.0, 2.5), DomainError);
  EXPECT_NO_THROW(CorrelationModel(30.0, 2.0));
}

TEST(CorrelationRadius, Examples) {
  EXPECT_NEAR(correlation_radius(kModel, 0.85), 4.875567884933248, 1e-12);
  EXPECT_NEAR(correlation_radius(CorrelationModel(30.0, 2.0), 0.85), 2.208068813450624, 1e-12);
  EXPECT_EQ(correlation_radius(kModel, 1.0), 0.0);
  EXPECT_LT(correlation_radius(kModel, 1.0 - 1e-12), 1e-9);
}

TEST(CorrelationRadius, RejectsOutOfRange) {
  EXPECT_THROW(correlation_radius(kModel, 0.0), DomainError);
  EXPECT_THROW(correlation_radius(kModel, -0.5), DomainError);
  EXPECT_THROW(correlation_radius(kModel, 1.0001), DomainError);
}

TEST(CorrelationRadius, RoundTripProperty) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> theta(1.0, 100.0);
  std::uniform_real_distribution<double> tau(0.01, 0.99);
  const double alphas[] = {0.5, 1.0, 1.5, 2.0};
  for (int i = 0; i < 2000; ++i) {
    const CorrelationModel m(theta(rng), alphas[i % 4]);
    const double t = tau(rng);
    ASSERT_NEAR(correlation(m, correlation_radius(m, t)), t, 1e-12);
  }
}

TEST(EventVolume, Examples) {
  EXPECT_NEAR(event_volume(kModel, 0.85), 485.47205116056335, 1e-9);
  EXPECT_GT(event_volume(kModel, 0.7), event_volume(kModel, 0.85));
  EXPECT_LT(event_volume(kModel, 1.0 - 1e-12), 1e-20);
}

TEST(EventVolume, MatchesSphereOfRadius) {
  for (double tau : {0.1, 0.3, 0.5, 0.85, 0.99}) {
    const double r = correlation_radius(kModel, tau);
    EXPECT_DOUBLE_EQ(event_volume(kModel, tau), 4.0 / 3.0 * std::numbers::pi * r * r * r);
  }
}

TEST(Dodecahedron, Circumradius) {
  EXPECT_NEAR(dodeca_circumradius(Dodecahedron(1.0)), 1.4012585384440734, 1e-12);
  EXPECT_NEAR(dodeca_circumradius(Dodecahedron(2.0)), 2.8025170768881468, 1e-12);
  EXPECT_NEAR(kDodecaCircumradiusPerEdge, std::sqrt(3.0) / 4.0 * (1.0 + std::sqrt(5.0)), 1e-15);
}

TEST(Dodecahedron, CircumradiusMatchesVertexNorm) {
  // canonical vertices have edge 2/phi; every vertex sits on the circumsphere
  const double edge = 2.0 / ((1.0 + std::sqrt(5.0)) / 2.0);
  for (const auto& v : oracle::dodecahedron_vertices()) {
    EXPECT_NEAR(std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]), dodeca_circumradius(Dodecahedron(edge)), 1e-12);
  }
}

TEST(Dodecahedron, EdgeFromCircumradius) {
  EXPECT_NEAR(dodeca_edge_from_circumradius(1.40126), 1.0, 1e-5);
  EXPECT_EQ(dodeca_edge_from_circumradius(0.0), 0.0);
  EXPECT_NEAR(dodeca_edge_from_circumradius(4.8763), 3.4800, 1e-3);
  EXPECT_THROW(dodeca_edge_from_circumradius(-1.0), DomainError);
  for (double e : {0.1, 1.0, 3.3, 17.0}) {
    EXPECT_NEAR(dodeca_edge_from_circumradius(dodeca_circumradius(Dodecahedron(e))), e, 1e-12 * e);
  }
}

TEST(Dodecahedron, VolumeCubicScaling) {
  EXPECT_NEAR(dodeca_volume(Dodecahedron(1.0)), 7.663118960624632, 1e-12);
  EXPECT_NEAR(dodeca_volume(Dodecahedron(2.0)), 61.30495168499706, 1e-10);
  for (double k : {0.5, 3.0, 10.0}) {
    EXPECT_NEAR(dodeca_volume(Dodecahedron(k)), k * k * k * dodeca_volume(Dodecahedron(1.0)), 1e-9 * k * k * k);
  }
}

TEST(Dodecahedron, InsideCircumsphere) {
  for (double e : {0.01, 1.0, 5.0}) {
    const Dodecahedron d(e);
    EXPECT_LT(dodeca_volume(d), sphere_volume(dodeca_circumradius(d)));
  }
}

TEST(Dodecahedron, MonteCarloHullVolume) {
  const auto mc = oracle::monte_carlo_unit_dodecahedron(400000, 3);
  EXPECT_EQ(mc.facets, 12u);
  EXPECT_NEAR(mc.volume / dodeca_volume(Dodecahedron(1.0)), 1.0, 0.01);
}

TEST(Dodecahedron, RejectsNonPositiveEdge) {
  EXPECT_THROW(Dodecahedron(0.0), DomainError);
  EXPECT_THROW(Dodecahedron(-2.0), DomainError);
}

TEST(EventSource, ThresholdValidated) {
  EXPECT_THROW(validate(EventSource{{0, 0, 0}, 0.0}), DomainError);
  EXPECT_THROW(validate(EventSource{{0, 0, 0}, 1.5}), DomainError);
  EXPECT_NO_THROW(validate(EventSource{{0, 0, 0}, 1.0}));
}

TEST(Distance, Examples) {
  EXPECT_NEAR(euclidean_distance({3.756, 5.074, 7.998}, {2.257, 4.472, 8.467}), 1.682, 1e-3);
  EXPECT_EQ(euclidean_distance({1, 2, 3}, {1, 2, 3}), 0.0);
  EXPECT_EQ(euclidean_distance({0, 0, 0}, {3, 4, 0}), 5.0);
}
