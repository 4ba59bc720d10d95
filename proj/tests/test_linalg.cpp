#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "pintlfa/kernels.hpp"
#include "pintlfa/linalg.hpp"

using namespace pintlfa;
using C = std::complex<double>;

namespace {

std::vector<double> random_real(std::size_t n, unsigned seed) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> v(n);
  for (auto& x : v) x = u(g);
  return v;
}

std::vector<C> random_complex(std::size_t n, unsigned seed) {
  auto re = random_real(n, seed), im = random_real(n, seed + 1);
  std::vector<C> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = {re[i], im[i]};
  return v;
}

// Companion matrix of prod (z - r_i); its eigenvalues are the r_i.
Matrix<C> companion(const std::vector<C>& roots) {
  std::vector<C> p{1.0};
  for (const C& r : roots) {
    std::vector<C> q(p.size() + 1);
    for (std::size_t i = 0; i < p.size(); ++i) {
      q[i] += p[i];
      q[i + 1] -= r * p[i];
    }
    p = q;
  }
  const std::size_t n = roots.size();
  Matrix<C> a(n, n);
  for (std::size_t j = 0; j < n; ++j) a(0, j) = -p[j + 1];
  for (std::size_t i = 1; i < n; ++i) a(i, i - 1) = 1;
  return a;
}

// Greedy nearest matching; sorting is fragile when real parts tie.
double match_sorted(const std::vector<C>& a, std::vector<C> b) {
  double worst = 0;
  for (const C& x : a) {
    auto it = std::min_element(b.begin(), b.end(), [&](const C& p, const C& q) { return std::abs(p - x) < std::abs(q - x); });
    worst = std::max(worst, std::abs(*it - x));
    b.erase(it);
  }
  return worst;
}

} // namespace

TEST_CASE("simd kernels agree with the scalar reference") {
  if (!kernels::isa_available(kernels::Isa::avx2)) return;
  for (std::size_t n : {1u, 3u, 4u, 7u, 16u, 33u}) {
    const auto xd = random_real(n * n, 1), yd = random_real(n * n, 2);
    const auto xz = random_complex(n * n, 3), yz = random_complex(n * n, 4);
    kernels::set_isa(kernels::Isa::scalar);
    const double d0 = kernels::dot(n, xd.data(), yd.data());
    const C z0 = kernels::dotc(n, xz.data(), yz.data());
    auto ad0 = yd;
    auto az0 = yz;
    kernels::axpy(n, 0.3, xd.data(), ad0.data());
    kernels::axpy(n, C(0.3, -0.7), xz.data(), az0.data());
    std::vector<double> gd0(n * n);
    std::vector<C> gz0(n * n), vz0(n);
    kernels::gemm(n, n, n, xd.data(), yd.data(), gd0.data());
    kernels::gemm(n, n, n, xz.data(), yz.data(), gz0.data());
    kernels::gemv(n, n, xz.data(), yz.data(), vz0.data());
    auto rx0 = xz, ry0 = yz;
    kernels::rot(n, 0.6, C(0.64, 0.48), rx0.data(), ry0.data());

    kernels::set_isa(kernels::Isa::avx2);
    CHECK(kernels::dot(n, xd.data(), yd.data()) == doctest::Approx(d0).epsilon(1e-14));
    CHECK(std::abs(kernels::dotc(n, xz.data(), yz.data()) - z0) < 1e-13);
    auto ad1 = yd;
    auto az1 = yz;
    kernels::axpy(n, 0.3, xd.data(), ad1.data());
    kernels::axpy(n, C(0.3, -0.7), xz.data(), az1.data());
    CHECK(max_abs_diff(ad0, ad1) < 1e-15);
    CHECK(max_abs_diff(az0, az1) < 1e-15);
    std::vector<double> gd1(n * n);
    std::vector<C> gz1(n * n), vz1(n);
    kernels::gemm(n, n, n, xd.data(), yd.data(), gd1.data());
    kernels::gemm(n, n, n, xz.data(), yz.data(), gz1.data());
    kernels::gemv(n, n, xz.data(), yz.data(), vz1.data());
    CHECK(max_abs_diff(gd0, gd1) < 1e-13);
    CHECK(max_abs_diff(gz0, gz1) < 1e-13);
    CHECK(max_abs_diff(vz0, vz1) < 1e-13);
    auto rx1 = xz, ry1 = yz;
    kernels::rot(n, 0.6, C(0.64, 0.48), rx1.data(), ry1.data());
    CHECK(max_abs_diff(rx0, rx1) < 1e-15);
    CHECK(max_abs_diff(ry0, ry1) < 1e-15);
  }
  kernels::set_isa(kernels::Isa::avx2);
}

TEST_CASE("rotation convention") {
  // x' = c x + s y, y' = c y - conj(s) x
  C x = {1, 2}, y = {-3, 0.5};
  const double c = 0.8;
  const C s = {0.36, 0.48};
  C xr = x, yr = y;
  kernels::ref::rot(1, c, s, &xr, &yr);
  CHECK(std::abs(xr - (c * x + s * y)) < 1e-15);
  CHECK(std::abs(yr - (c * y - std::conj(s) * x)) < 1e-15);
}

TEST_CASE("matrix construction and kron") {
  CHECK_THROWS_AS(Matrix<double>(0, 3), DimensionError);
  const Matrix<double> a{{1, 2}, {3, 4}}, b{{0, 1}, {1, 0}};
  const auto k = kron(a, b);
  const Matrix<double> expect{{0, 1, 0, 2}, {1, 0, 2, 0}, {0, 3, 0, 4}, {3, 0, 4, 0}};
  CHECK(max_abs_diff(k, expect) == 0);
  CHECK(max_abs_diff(transpose(transpose(k)), k) == 0);
  CHECK_THROWS_AS(a * Matrix<double>(3, 3), DimensionError);
  const auto e = subdiagonal_ones<double>(3);
  CHECK(e(1, 0) == 1);
  CHECK(e(2, 1) == 1);
  CHECK(e(0, 0) == 0);
}

TEST_CASE("dft matrix is unitary") {
  for (std::size_t n : {2u, 5u, 8u}) {
    const auto f = dft_matrix<double>(n);
    CHECK(max_abs_diff(adjoint(f) * f, Matrix<C>::identity(n)) < 1e-14);
  }
}

TEST_CASE("lu solve, determinant and singular detection") {
  const Matrix<double> a{{2, 1}, {1, 3}};
  CHECK(LU<double>(a).determinant() == doctest::Approx(5.0));
  const auto x = LU<double>(a).solve(Vector<double>{3, 5});
  CHECK(x[0] == doctest::Approx(0.8));
  CHECK(x[1] == doctest::Approx(1.4));
  CHECK_THROWS_AS(LU<double>(Matrix<double>{{1, 2}, {2, 4}}), FactorizationError);

  const std::size_t n = 12;
  Matrix<C> r(n, n);
  const auto v = random_complex(n * n, 9);
  std::copy(v.begin(), v.end(), r.data());
  const auto inv = inverse(r);
  CHECK(max_abs_diff(r * inv, Matrix<C>::identity(n)) < 1e-12);
}

TEST_CASE("quad lu resolves a hilbert system") {
  const std::size_t n = 8;
  Matrix<quad> h(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) h(i, j) = quad(1) / quad(i + j + 1);
  Vector<quad> ones(n, quad(1));
  const auto b = h * ones;
  const auto x = LU<quad>(h).solve(b);
  quad err = 0;
  for (const auto& xi : x) err = std::max(err, abs(xi - quad(1)));
  CHECK(static_cast<double>(err) < 1e-20); // cond ~ 1.5e10
}

TEST_CASE("eigenvalues of companion matrices") {
  const std::vector<C> roots{1.0, 2.0, 3.0, {1, 2}, {1, -2}, {-0.5, 0.1}, 0.0};
  const auto spec = eigenvalues(companion(roots));
  CHECK(spec.values.size() == roots.size());
  CHECK(match_sorted(spec.values, roots) < 1e-9);
  CHECK(spec.radius() == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("eigenvalues of real and structured matrices") {
  const Matrix<double> rot{{0, -1}, {1, 0}};
  CHECK(match_sorted(eigenvalues(rot).values, {C(0, 1), C(0, -1)}) < 1e-14);

  // triangular: diagonal entries
  Matrix<double> t(6, 6);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = i; j < 6; ++j) t(i, j) = i == j ? double(i) - 2.5 : 0.3 * double(i + j);
  std::vector<C> diag;
  for (std::size_t i = 0; i < 6; ++i) diag.push_back(double(i) - 2.5);
  CHECK(match_sorted(eigenvalues(t).values, diag) < 1e-12);

  // Jordan block: a defective eigenvalue is perturbed by about eps^(1/n)
  Matrix<double> j = Matrix<double>::identity(4);
  for (std::size_t i = 0; i + 1 < 4; ++i) j(i, i + 1) = 1;
  for (const C& v : eigenvalues(j).values) CHECK(std::abs(v - 1.0) < 1e-3);

  const auto zero = eigenvalues(Matrix<double>(5, 5));
  CHECK(zero.radius() == 0);
}

TEST_CASE("tridiagonal and hermitian eigenvalues") {
  const std::size_t n = 10;
  std::vector<double> d(n, 2.0), e(n - 1, -1.0);
  auto ev = tridiagonal_eigenvalues(d, e);
  std::sort(ev.begin(), ev.end());
  for (std::size_t k = 1; k <= n; ++k)
    CHECK(ev[k - 1] == doctest::Approx(2 - 2 * std::cos(double(k) * pi<double>() / double(n + 1))).epsilon(1e-12));

  Matrix<C> h{{2, {0, 1}}, {{0, -1}, 2}};
  auto hv = hermitian_eigenvalues(h);
  std::sort(hv.begin(), hv.end());
  CHECK(hv[0] == doctest::Approx(1.0));
  CHECK(hv[1] == doctest::Approx(3.0));
}

TEST_CASE("spectral norm") {
  const Matrix<double> nil{{0, 1}, {0, 0}};
  CHECK(spectral_norm(nil) == doctest::Approx(1.0).epsilon(1e-12));
  // rank one u v^T has norm |u| |v|
  const Vector<double> u{1, 2, 2}, v{3, 4};
  Matrix<double> r(3, 2);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 2; ++j) r(i, j) = u[i] * v[j];
  CHECK(spectral_norm(r) == doctest::Approx(15.0).epsilon(1e-12));
  // oracle: sqrt of the largest eigenvalue of A^H A
  const std::size_t n = 9;
  Matrix<C> a(n, n);
  const auto w = random_complex(n * n, 11);
  std::copy(w.begin(), w.end(), a.data());
  auto ev = hermitian_eigenvalues(adjoint(a) * a);
  CHECK(spectral_norm(a) == doctest::Approx(std::sqrt(*std::max_element(ev.begin(), ev.end()))).epsilon(1e-10));
  CHECK(spectral_norm(Matrix<double>(3, 3)) == 0);
}

TEST_CASE("matrix power") {
  const Matrix<double> a{{1, 1}, {0, 1}};
  const auto p = matrix_power(a, 5);
  CHECK(p(0, 1) == 5);
  CHECK(max_abs_diff(matrix_power(a, 0), Matrix<double>::identity(2)) == 0);
}
