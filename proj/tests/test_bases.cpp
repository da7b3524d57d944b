#include "oracles.hpp"
#include "pcs/bases.hpp"

#include <doctest.h>

#include <cmath>

using namespace pcs;

namespace {

double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("every basis is orthonormal with a constant first column") {
  for (auto kind : {BasisKind::DCT, BasisKind::DHT, BasisKind::DWT}) {
    for (int p : {2, 4, 8, 16, 64, 256}) {
      const Basis b = make_basis(kind, p);
      CHECK(max_abs_diff(b.D.transpose() * b.D, Matrix::Identity(p, p)) <= 1e-10);
      for (int j = 0; j < p; ++j) CHECK(b.D(j, 0) == 1.0 / std::sqrt(static_cast<double>(p)));
      CHECK(b.L <= 1.0);
      CHECK(b.L == doctest::Approx(b.D.cwiseAbs().maxCoeff()));
    }
  }
  const Basis odd = make_basis(BasisKind::DCT, 12);
  CHECK(max_abs_diff(odd.D.transpose() * odd.D, Matrix::Identity(12, 12)) <= 1e-10);
}

TEST_CASE("bases agree with independent constructions") {
  for (int p : {4, 8, 32}) {
    CHECK(max_abs_diff(make_basis(BasisKind::DCT, p).D, oracle::dct(p)) <= 1e-12);
    CHECK(max_abs_diff(make_basis(BasisKind::DHT, p).D, oracle::hadamard(p)) <= 1e-12);
    CHECK(max_abs_diff(make_basis(BasisKind::DWT, p).D, oracle::haar(p)) <= 1e-12);
  }
}

TEST_CASE("small basis examples") {
  const Basis dct4 = make_basis(BasisKind::DCT, 4);
  for (int j = 0; j < 4; ++j) CHECK(dct4.D(j, 0) == 0.5);

  const Basis dwt2 = make_basis(BasisKind::DWT, 2);
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(dwt2.D(0, 0) == doctest::Approx(r));
  CHECK(dwt2.D(1, 0) == doctest::Approx(r));
  CHECK(dwt2.D(0, 1) == doctest::Approx(r));
  CHECK(dwt2.D(1, 1) == doctest::Approx(-r));

  const Basis dht4 = make_basis(BasisKind::DHT, 4);
  CHECK((dht4.D.cwiseAbs().array() == 0.5).all());
  CHECK(max_abs_diff(dht4.D.transpose() * dht4.D, Matrix::Identity(4, 4)) <= 1e-15);
}

TEST_CASE("dimension errors") {
  CHECK_THROWS_AS(make_basis(BasisKind::DCT, 1), InvalidDimension);
  CHECK_THROWS_AS(make_basis(BasisKind::DHT, 12), InvalidDimension);
  CHECK_THROWS_AS(make_basis(BasisKind::DWT, 6), InvalidDimension);
  const Basis b = make_basis(BasisKind::DCT, 8);
  CHECK_THROWS_AS(synthesize(b, Vector::Zero(7)), InvalidDimension);
  CHECK_THROWS_AS(analyze(b, Vector::Zero(9)), InvalidDimension);
  CHECK_THROWS_AS(parse_basis_kind("fft"), InvalidArgument);
}

TEST_CASE("synthesize and analyze") {
  for (auto kind : {BasisKind::DCT, BasisKind::DHT, BasisKind::DWT}) {
    const int p = 16;
    const Basis b = make_basis(kind, p);
    Vector theta = Vector::Zero(p);
    theta(0) = 1.0 / std::sqrt(16.0);
    const Vector f = synthesize(b, theta);
    CHECK((f.array() - 1.0 / p).abs().maxCoeff() <= 1e-15);
    const Vector back = analyze(b, Vector::Constant(p, 1.0 / p));
    CHECK(back(0) == doctest::Approx(0.25));
    CHECK(back.tail(p - 1).cwiseAbs().maxCoeff() <= 1e-15);

    const Vector r = Vector::LinSpaced(p, -1.0, 2.0);
    CHECK((analyze(b, synthesize(b, r)) - r).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(std::abs(analyze(b, r).norm() - r.norm()) <= 1e-10);
  }

  const Basis dwt4 = make_basis(BasisKind::DWT, 4);
  Vector theta(4);
  theta << 0.5, 0.5, 1.0 / std::sqrt(2.0), 0.0;
  const Vector f = synthesize(dwt4, theta);
  Vector e1 = Vector::Zero(4);
  e1(0) = 1.0;
  CHECK((f - e1).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((analyze(dwt4, e1) - theta).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("closed-form lambda examples") {
  CHECK(lambda_closed(BasisKind::DHT, 4, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(lambda_closed(BasisKind::DHT, 4, 1, LambdaForm::Table1) == doctest::Approx(std::sqrt(2.0) / 2));
  CHECK(lambda_closed(BasisKind::DCT, 64, 2) == doctest::Approx(2 * std::sqrt(2.0) / 8).epsilon(1e-14));
  const double limit = 1.0 / (std::sqrt(2.0) - 1.0);
  CHECK(lambda_closed(BasisKind::DWT, 1ULL << 40, 60) == doctest::Approx(limit).epsilon(1e-6));
  CHECK(lambda_closed(BasisKind::DWT, 1024, 3, LambdaForm::Table1) == doctest::Approx(limit));
  // Truncation one scale short of the finest: p = 4, k = 2.
  CHECK(lambda_closed(BasisKind::DWT, 4, 2, LambdaForm::TruncatedScales) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(lambda_closed(BasisKind::DWT, 4, 2) == doctest::Approx(0.5 + 1.0 / std::sqrt(2.0)));
  CHECK_THROWS_AS(lambda_closed(BasisKind::DCT, 8, 0), InvalidArgument);
  CHECK_THROWS_AS(lambda_closed(BasisKind::DCT, 8, 8), InvalidArgument);
}

TEST_CASE("brute-force lambda examples") {
  CHECK(lambda_brute(make_basis(BasisKind::DWT, 4), 1) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(lambda_brute(make_basis(BasisKind::DHT, 4), 2) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(lambda_brute(make_basis(BasisKind::DCT, 8), 1) ==
        doctest::Approx(std::sqrt(2.0 / 8) * std::cos(M_PI / 16)).epsilon(1e-14));
}

TEST_CASE("brute-force lambda matches a plain ternary enumeration") {
  for (auto kind : {BasisKind::DCT, BasisKind::DHT, BasisKind::DWT})
    for (int p : {4, 8, 16})
      for (int k = 1; k <= std::min(3, p - 1); ++k) {
        const Basis b = make_basis(kind, p);
        CHECK(std::abs(lambda_brute(b, k) - oracle::lambda_brute(b.D, k)) <= 1e-12);
      }
}

TEST_CASE("lambda invariants") {
  for (auto kind : {BasisKind::DCT, BasisKind::DHT, BasisKind::DWT}) {
    for (int p : {4, 8, 16, 32}) {
      const Basis b = make_basis(kind, p);
      double prev = 0.0;
      for (int k = 1; k <= std::min(4, p - 1); ++k) {
        const double v = lambda_brute(b, k);
        CHECK(v >= prev - 1e-15);
        prev = v;
        if (kind == BasisKind::DCT)
          CHECK(v <= lambda_closed(kind, p, k) + 1e-12);
        else
          CHECK(std::abs(v - lambda_closed(kind, p, k)) <= 1e-12);
      }
      CHECK(lambda_brute(b, 1) == doctest::Approx(b.Dbar().cwiseAbs().maxCoeff()).epsilon(1e-15));
    }
  }
}

TEST_CASE("brute-force budget guard names the required count") {
  LambdaBruteOptions o;
  o.budget = 100;
  try {
    lambda_brute(make_basis(BasisKind::DCT, 16), 3, o);
    FAIL("expected a complexity guard");
  } catch (const ComplexityGuard& e) {
    CHECK(e.required == doctest::Approx(binomial(15, 3) * 8));
    CHECK(e.budget == 100);
  }
  CHECK_THROWS_AS(lambda_brute(make_basis(BasisKind::DCT, 8), 0), InvalidArgument);
}
