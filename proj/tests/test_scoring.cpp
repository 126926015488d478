#include <doctest.h>

#include <cmath>

#include "actmine/rng.hpp"
#include "actmine/scoring.hpp"

using namespace actmine;

namespace {

// Literal composition of the four scoring formulas, written independently of
// the library path as the oracle for the pipeline test: plain exp/sum softmax
// (no max subtraction), explicit min-max, branchy rescale, explicit product.
Matrix literal_odds(const Matrix &phi, double tau) {
  const auto n = phi.rows();
  const auto c = phi.cols();
  Matrix p(n, c);
  for (Eigen::Index i = 0; i < n; ++i) {
    double denom = 0.0;
    for (Eigen::Index k = 0; k < c; ++k) denom += std::exp(phi(i, k));
    for (Eigen::Index k = 0; k < c; ++k) p(i, k) = std::exp(phi(i, k)) / denom;
  }
  Matrix alpha(n, c);
  for (Eigen::Index j = 0; j < c; ++j) {
    double lo = phi(0, j), hi = phi(0, j);
    for (Eigen::Index i = 1; i < n; ++i) {
      lo = std::min(lo, phi(i, j));
      hi = std::max(hi, phi(i, j));
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (hi - lo < 1e-12) {
        alpha(i, j) = 0.0;
      } else {
        const double x = (phi(i, j) - lo) / (hi - lo);
        alpha(i, j) = x > tau ? 1.0 : x / tau;
      }
    }
  }
  Matrix s(n, c);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < c; ++j) s(i, j) = alpha(i, j) * p(i, j);
  return s;
}

Matrix random_matrix(KeyedRng &rng, int n, int c, double scale) {
  Matrix m(n, c);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = (rng.uniform() * 2.0 - 1.0) * scale;
  return m;
}

}  // namespace

TEST_CASE("softmax rows on known inputs") {
  Matrix phi(3, 2);
  phi << 0.0, 0.0, std::log(2.0), 0.0, 1000.0, 0.0;
  const Matrix p = softmax_rows(phi);
  CHECK(p(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p(1, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(p(1, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  // the big-logit row must not overflow
  CHECK(std::abs(p(2, 0) - 1.0) < 1e-12);
  CHECK(p(2, 1) < 1e-12);
  CHECK(p.allFinite());
}

TEST_CASE("softmax rows are shift invariant per row") {
  auto rng = (StreamKey() << std::uint64_t{21} << "softmax-shift").rng();
  const Matrix phi = random_matrix(rng, 6, 4, 3.0);
  Matrix shifted = phi;
  shifted.row(2).array() += 17.5;
  const Matrix a = softmax_rows(phi);
  const Matrix b = softmax_rows(shifted);
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("delta_tau branches") {
  MaskParams half{0.5};
  CHECK(delta_tau(0.7, half) == 1.0);
  CHECK(delta_tau(0.25, half) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(delta_tau(0.5, half) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(delta_tau(0.0, half) == 0.0);
  CHECK(delta_tau(1.0, half) == 1.0);
  CHECK_THROWS_AS(delta_tau(1.5, half), std::domain_error);
  CHECK_THROWS_AS(delta_tau(-0.1, half), std::domain_error);
  CHECK_THROWS_AS(delta_tau(0.5, MaskParams{0.0}), ValidationError);
}

TEST_CASE("delta_tau is monotone") {
  auto rng = (StreamKey() << std::uint64_t{22} << "delta-mono").rng();
  for (int trial = 0; trial < 200; ++trial) {
    MaskParams params{0.05 + 0.95 * rng.uniform()};
    double x = rng.uniform();
    double y = rng.uniform();
    if (x > y) std::swap(x, y);
    CHECK(delta_tau(x, params) <= delta_tau(y, params));
  }
}

TEST_CASE("soft mask on known columns") {
  MaskParams half{0.5};
  Matrix phi(3, 2);
  phi << 2.0, 3.0, 4.0, 3.0, 6.0, 3.0;
  const MaskMatrix alpha = soft_mask(phi, half);
  // column [2,4,6]: min-max [0, 0.5, 1] -> [0, 1, 1]
  CHECK(alpha(0, 0) == doctest::Approx(0.0));
  CHECK(alpha(1, 0) == doctest::Approx(1.0));
  CHECK(alpha(2, 0) == doctest::Approx(1.0));
  // constant column: no spread, no evidence
  CHECK(alpha.col(1).cwiseAbs().maxCoeff() == 0.0);

  Matrix two(2, 2);
  two << 0.0, 0.0, 1.0, 1.0;
  const MaskMatrix a1 = soft_mask(two, MaskParams{1.0});
  CHECK(a1(0, 0) == doctest::Approx(0.0));
  CHECK(a1(1, 0) == doctest::Approx(1.0));
}

TEST_CASE("soft mask is shift invariant per column") {
  auto rng = (StreamKey() << std::uint64_t{23} << "mask-shift").rng();
  const Matrix phi = random_matrix(rng, 8, 3, 4.0);
  Matrix shifted = phi;
  shifted.col(1).array() += 123.0;
  MaskParams params{0.4};
  const MaskMatrix a = soft_mask(phi, params);
  const MaskMatrix b = soft_mask(shifted, params);
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("column argmax keeps mask value one") {
  auto rng = (StreamKey() << std::uint64_t{24} << "mask-argmax").rng();
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix phi = random_matrix(rng, 7, 4, 5.0);
    MaskParams params{0.05 + 0.9 * rng.uniform()};
    const MaskMatrix alpha = soft_mask(phi, params);
    for (int j = 0; j < 4; ++j) {
      Eigen::Index argmax;
      phi.col(j).maxCoeff(&argmax);
      CHECK(alpha(argmax, j) == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("erasing odds") {
  Matrix alpha(1, 2), p(1, 2);
  alpha << 0.5, 0.0;
  p << 0.4, 0.9;
  const Matrix s = erasing_odds(alpha, p);
  CHECK(s(0, 0) == doctest::Approx(0.2));
  CHECK(s(0, 1) == 0.0);
  CHECK_THROWS_AS(erasing_odds(alpha, Matrix::Zero(2, 2)), ValidationError);
}

TEST_CASE("full scoring pipeline matches the literal oracle") {
  auto rng = (StreamKey() << std::uint64_t{25} << "scoring-oracle").rng();
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix phi = random_matrix(rng, 6, 3, 3.0);
    MaskParams params{0.05 + 0.9 * rng.uniform()};
    const Matrix s = erasing_odds(soft_mask(phi, params), softmax_rows(phi));
    const Matrix oracle = literal_odds(phi, params.tau);
    CHECK((s - oracle).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(s.minCoeff() >= 0.0);
    CHECK(s.maxCoeff() <= 1.0);
  }
}
