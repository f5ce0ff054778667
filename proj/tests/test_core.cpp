#include <cmath>
#include <random>

#include "anisotex/core.hpp"
#include "doctest.h"

using namespace anisotex;

namespace {

bool close(const Mat2& a, const Mat2& b, double tol) {
  return std::abs(a.a11 - b.a11) <= tol && std::abs(a.a12 - b.a12) <= tol && std::abs(a.a21 - b.a21) <= tol &&
         std::abs(a.a22 - b.a22) <= tol;
}

std::vector<Anisotropy> sample_anisotropies() {
  const double s = std::sqrt(0.5);
  return {Anisotropy(), Anisotropy::diagonal(0.6), Anisotropy::diagonal(1.5),
          validate_anisotropy(0.3, 1.7, {s, s}, {s, -s}).value(),
          // not orthogonal
          validate_anisotropy(0.8, 1.2, {1, 0}, {0.6, 0.8}).value()};
}

}  // namespace

TEST_CASE("validate_anisotropy accepts the identity and the field anisotropy") {
  auto iso = validate_anisotropy(1, 1, {1, 0}, {0, 1});
  REQUIRE(iso.ok());
  CHECK(iso.value().lambda1() == 1.0);
  auto e0 = validate_anisotropy(0.6, 1.4, {1, 0}, {0, 1});
  REQUIRE(e0.ok());
  CHECK(e0.value().lambda1() == doctest::Approx(0.6));
  CHECK(e0.value().lambda2() == doctest::Approx(1.4));
}

TEST_CASE("validate_anisotropy reports each violated invariant") {
  auto bad_trace = validate_anisotropy(0.5, 1.0, {1, 0}, {0, 1});
  CHECK_FALSE(bad_trace.ok());
  REQUIRE(bad_trace.errors.size() == 1);
  CHECK(bad_trace.errors[0].find("trace") != std::string::npos);
  CHECK_THROWS_AS(bad_trace.value(), DomainError);

  CHECK_FALSE(validate_anisotropy(-0.5, 2.5, {1, 0}, {0, 1}).ok());
  CHECK_FALSE(validate_anisotropy(1, 1, {1, 0}, {1, 0}).ok());
  CHECK_FALSE(validate_anisotropy(1, 1, {2, 0}, {0, 1}).ok());
  CHECK(validate_anisotropy(0.5, 1.0, {2, 0}, {1, 0}).errors.size() == 3);
}

TEST_CASE("eigenvalues are stored in ascending order with their eigenvectors") {
  auto d = validate_anisotropy(1.4, 0.6, {1, 0}, {0, 1}).value();
  CHECK(d.lambda1() == doctest::Approx(0.6));
  CHECK(d.e1()[0] == 0.0);
  CHECK(d.e1()[1] == 1.0);
  CHECK(d.axis_eigenvalue(0) == doctest::Approx(1.4));
  CHECK(d.axis_eigenvalue(1) == doctest::Approx(0.6));
}

TEST_CASE("normalized rescales to trace two without changing the ratio") {
  auto d = Anisotropy::normalized(3.0, 7.0, {1, 0}, {0, 1});
  CHECK(d.lambda1() + d.lambda2() == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(d.lambda1() == doctest::Approx(0.6));
  CHECK_THROWS_AS(Anisotropy::normalized(-1.0, 3.0, {1, 0}, {0, 1}), DomainError);
  CHECK_THROWS_AS(Anisotropy::diagonal(2.0), DomainError);
}

TEST_CASE("matrix_power examples") {
  const auto d = Anisotropy::diagonal(0.6);
  CHECK(close(matrix_power(d, 1.0), Mat2{1, 0, 0, 1}, 1e-15));
  const Mat2 p4 = matrix_power(d, 4.0);
  CHECK(p4.a11 == doctest::Approx(std::pow(4.0, 0.6)).epsilon(1e-14));
  CHECK(p4.a22 == doctest::Approx(std::pow(4.0, 1.4)).epsilon(1e-14));
  CHECK(p4.a11 == doctest::Approx(2.2973967));
  CHECK(p4.a22 == doctest::Approx(6.9644045));
  CHECK(p4.a12 == 0.0);
  CHECK(close(matrix_power(d, 2) * matrix_power(d, 3), matrix_power(d, 6), 1e-12));
}

TEST_CASE("matrix_power properties: semigroup, eigenvectors, determinant") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (const auto& d : sample_anisotropies()) {
    for (int t = 0; t < 200; ++t) {
      const double a = u(gen), b = u(gen);
      const Mat2 lhs = matrix_power(d, a) * matrix_power(d, b);
      const Mat2 rhs = matrix_power(d, a * b);
      const double scale = std::max({std::abs(rhs.a11), std::abs(rhs.a12), std::abs(rhs.a21), std::abs(rhs.a22)});
      CHECK(close(lhs, rhs, 1e-10 * std::max(1.0, scale)));
      const Mat2 p = matrix_power(d, a);
      const Vec2 v1 = p * d.e1(), v2 = p * d.e2();
      const double s1 = std::pow(a, d.lambda1()), s2 = std::pow(a, d.lambda2());
      CHECK(std::abs(v1[0] - s1 * d.e1()[0]) <= 1e-10 * std::max(1.0, s1));
      CHECK(std::abs(v1[1] - s1 * d.e1()[1]) <= 1e-10 * std::max(1.0, s1));
      CHECK(std::abs(v2[0] - s2 * d.e2()[0]) <= 1e-10 * std::max(1.0, s2));
      CHECK(std::abs(v2[1] - s2 * d.e2()[1]) <= 1e-10 * std::max(1.0, s2));
      CHECK(p.det() == doctest::Approx(a * a).epsilon(1e-10));
    }
  }
}

TEST_CASE("matrix reconstructs D from its eigendecomposition") {
  const double s = std::sqrt(0.5);
  const auto d = validate_anisotropy(0.3, 1.7, {s, s}, {s, -s}).value();
  const Mat2 m = d.matrix();
  CHECK(m.a11 == doctest::Approx(1.0));
  CHECK(m.a12 == doctest::Approx(-0.7));
  CHECK(m.a11 + m.a22 == doctest::Approx(2.0));
  CHECK_FALSE(d.is_diagonal());
  CHECK(Anisotropy::diagonal(0.6).is_diagonal());
}

TEST_CASE("field specs: admissibility and grid size") {
  CHECK(field_spec_errors(make_field_spec(0.6, 0.4, 256, 1)).empty());
  CHECK_THROWS_AS(make_field_spec(0.6, 0.7, 256, 1), DomainError);
  try {
    make_field_spec(0.6, 0.7, 256, 1);
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("min(0.6,1.4)=0.6") != std::string::npos);
  }
  CHECK_THROWS_AS(make_field_spec(0.6, 0.4, 300, 1), DomainError);
  CHECK_THROWS_AS(make_field_spec(0.6, 0.0, 256, 1), DomainError);
  CHECK(make_field_spec(1.0, 0.99, 64, 0).alpha0() == 1.0);
  CHECK(is_power_of_two(1024));
  CHECK_FALSE(is_power_of_two(0));
  CHECK_FALSE(is_power_of_two(96));
}
