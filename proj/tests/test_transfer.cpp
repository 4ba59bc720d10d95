#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pintlfa/transfer.hpp"

using namespace pintlfa;
using C = std::complex<double>;

TEST_CASE("stencil width for an exactness degree") {
  CHECK(midpoint_stencil_width(6) == 8);
  CHECK(midpoint_stencil_width(2) == 4);
  CHECK(midpoint_stencil_width(1) == 2);
  CHECK(midpoint_stencil_width(0) == 2);
  CHECK_THROWS_AS(midpoint_generator<double>(4, 6), SizeError);
}

TEST_CASE("midpoint weights reproduce monomials at 1/2") {
  for (int deg : {1, 2, 3, 6}) {
    const auto g = midpoint_generator<double>(16, deg);
    const std::size_t w = midpoint_stencil_width(deg);
    CHECK(g.stencil().size() == w);
    for (std::size_t p = 0; p < w; ++p) {
      double s = 0;
      for (const auto& [o, c] : g.stencil()) s += c * std::pow(double(o), double(p));
      CHECK(s == doctest::Approx(std::pow(0.5, double(p))).epsilon(1e-12));
    }
  }
}

TEST_CASE("interweaved interpolation and restriction") {
  const auto t = build_ci_pair<double>(16, 6, 2);
  CHECK(t.interpolation.rows() == 16);
  CHECK(t.interpolation.cols() == 8);
  for (std::size_t j = 0; j < 8; ++j)
    for (std::size_t c = 0; c < 8; ++c) CHECK(t.interpolation(2 * j, c) == (c == j ? 1.0 : 0.0));
  // restriction picks the injected point with weight 1/2
  CHECK(t.restriction(3, 6) == 0.5);
  // constants survive both ways
  const Vector<double> ones_c(8, 1.0), ones_f(16, 1.0);
  CHECK(max_abs_diff(t.interpolate(ones_c), ones_f) < 1e-14);
  CHECK(max_abs_diff(t.restrict_to_coarse(ones_f), ones_c) < 1e-14);
  // smooth data is interpolated to high order
  Vector<double> uc(8), uf(16);
  for (std::size_t j = 0; j < 8; ++j) uc[j] = std::sin(2 * pi<double>() * double(j) / 8);
  for (std::size_t j = 0; j < 16; ++j) uf[j] = std::sin(2 * pi<double>() * double(j) / 16);
  CHECK(max_abs_diff(t.interpolate(uc), uf) < 1e-2);
  CHECK_THROWS_AS(build_ci_pair<double>(15, 1, 1), ParityError);
}

TEST_CASE("transfer transform has the two-diagonal structure") {
  for (std::size_t n : {16u, 32u}) {
    const auto t = build_ci_pair<double>(n, 6, 2);
    const std::size_t h = n / 2;
    const auto psi = dft_matrix<double>(n), psic = dft_matrix<double>(h);
    const auto g = adjoint(psi) * (t.interpolation.cast<C>() * psic);
    const auto r = adjoint(psic) * (t.restriction.cast<C>() * psi);
    // closed form from the generator stencil, evaluated here directly
    auto lam = [&](const CirculantOperator<double>& gen, std::size_t k) {
      C s = 0;
      for (const auto& [o, c] : gen.stencil()) s += c * std::polar(1.0, 2 * pi<double>() * double(k) * double(o) / double(h));
      return s * std::polar(1.0, -2 * pi<double>() * double(k) / double(n));
    };
    double off = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < h; ++k) {
        const C mu = lam(t.generator_interp, k);
        C expect = 0;
        if (i == k) expect = (1.0 + mu) / std::sqrt(2.0);
        if (i == k + h) expect = (1.0 - mu) / std::sqrt(2.0);
        off = std::max(off, std::abs(g(i, k) - expect));
        const C nu = lam(t.generator_restr, k);
        C rexp = 0;
        if (i == k) rexp = 0.5 * std::conj((1.0 + nu) / std::sqrt(2.0));
        if (i == k + h) rexp = 0.5 * std::conj((1.0 - nu) / std::sqrt(2.0));
        off = std::max(off, std::abs(r(k, i) - rexp));
      }
    CHECK(off < 1e-12);

    const auto hd = harmonic_diagonals(t);
    CHECK(hd.structure_residual < 1e-12);
    for (std::size_t k = 0; k < h; ++k) {
      CHECK(std::abs(hd.d[k] - g(k, k)) < 1e-12);
      CHECK(std::abs(hd.d_hat[k] - g(k + h, k)) < 1e-12);
    }
    // the k = 0 pair is {sqrt 2, 0}
    CHECK(std::abs(hd.d[0] - std::sqrt(2.0)) < 1e-12);
    CHECK(std::abs(hd.d_hat[0]) < 1e-12);
    // mirror symmetry of the real stencil
    for (std::size_t k = 1; k < h; ++k) CHECK(std::abs(hd.d[h - k] - std::conj(hd.d_hat[k])) < 1e-12);
  }
}

TEST_CASE("restriction condition") {
  const auto t = build_ci_pair<double>(16, 6, 2);
  CHECK(check_restriction_condition(t, 3).ok);
  CHECK(check_restriction_condition(t, 3).violation.max_abs() == 0);

  Matrix<double> drop(2, 3); // coarse nodes = first two fine nodes
  drop(0, 0) = drop(1, 1) = 1;
  CHECK_FALSE(check_restriction_condition(t, 3, drop).ok);

  Matrix<double> avg(3, 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) avg(i, j) = 1.0 / 3.0;
  CHECK_FALSE(check_restriction_condition(t, 3, avg).ok);
  CHECK_THROWS_AS(check_restriction_condition(t, 3, Matrix<double>(2, 2)), DimensionError);
}
