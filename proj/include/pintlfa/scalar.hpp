#ifndef PINTLFA_SCALAR_HPP
#define PINTLFA_SCALAR_HPP

#include <complex>
#include <limits>
#include <type_traits>

#include <boost/multiprecision/float128.hpp>

namespace pintlfa {

using quad = boost::multiprecision::float128;

template <class T> struct scalar_traits {
  using real = T;
  static constexpr bool is_complex = false;
};
template <class R> struct scalar_traits<std::complex<R>> {
  using real = R;
  static constexpr bool is_complex = true;
};

template <class T> using real_of = typename scalar_traits<T>::real;
template <class T> inline constexpr bool is_complex_v = scalar_traits<T>::is_complex;

template <class R> inline R epsilon() { return std::numeric_limits<R>::epsilon(); }

template <class R> inline R pi() {
  using std::acos;
  return acos(R(-1));
}

/// |x| for real or complex scalars, returning the real type.
template <class T> inline real_of<T> magnitude(const T& x) {
  using std::abs;
  return abs(x);
}

template <class T> inline T conj_of(const T& x) {
  if constexpr (is_complex_v<T>)
    return std::conj(x);
  else
    return x;
}

/// |x|^2 without the square root.
template <class T> inline real_of<T> abs2(const T& x) {
  if constexpr (is_complex_v<T>)
    return x.real() * x.real() + x.imag() * x.imag();
  else
    return x * x;
}

template <class To, class From> inline To scalar_cast(const From& x) {
  if constexpr (is_complex_v<To> && is_complex_v<From>)
    return To(static_cast<real_of<To>>(x.real()), static_cast<real_of<To>>(x.imag()));
  else if constexpr (is_complex_v<To>)
    return To(static_cast<real_of<To>>(x), real_of<To>(0));
  else if constexpr (is_complex_v<From>)
    static_assert(!is_complex_v<From>, "complex to real narrowing");
  else
    return static_cast<To>(x);
}

/// e^{i 2 pi p / q}, with the integer phase reduced first so large p stay accurate.
template <class R> inline std::complex<R> unit_root(long long p, long long q) {
  using std::cos;
  using std::sin;
  long long r = p % q;
  if (r < 0) r += q;
  const R angle = R(2) * pi<R>() * R(r) / R(q);
  return {cos(angle), sin(angle)};
}

} // namespace pintlfa

#endif
