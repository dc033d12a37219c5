#pragma once
// Truncated Taylor series arithmetic. A Jet<T> of order n stores
// c[0..n] with f(r0 + h) = sum c[k] h^k. Used wherever the closed forms
// need exact derivatives (identity suites, Frobenius coefficients).
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace knds {

template <class T>
class Jet {
public:
  Jet() : c_(1, T(0)) {}
  explicit Jet(std::size_t order, T v = T(0)) : c_(order + 1, T(0)) { c_[0] = v; }

  static Jet variable(std::size_t order, T r0) {
    Jet j(order, r0);
    if (order >= 1) j.c_[1] = T(1);
    return j;
  }

  std::size_t order() const { return c_.size() - 1; }
  const T& operator[](std::size_t k) const { return c_[k]; }
  T& operator[](std::size_t k) { return c_[k]; }
  T value() const { return c_[0]; }
  // k-th derivative at the expansion point
  T derivative(std::size_t k) const {
    T f(1);
    for (std::size_t i = 2; i <= k; ++i) f *= T(double(i));
    return k <= order() ? c_[k] * f : T(0);
  }
  const std::vector<T>& coeffs() const { return c_; }

  Jet& operator+=(const Jet& o) { for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k]; return *this; }
  Jet& operator-=(const Jet& o) { for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k]; return *this; }
  Jet& operator+=(const T& a) { c_[0] += a; return *this; }
  Jet& operator-=(const T& a) { c_[0] -= a; return *this; }
  Jet& operator*=(const T& a) { for (auto& v : c_) v *= a; return *this; }
  Jet& operator/=(const T& a) { for (auto& v : c_) v /= a; return *this; }
  Jet& operator*=(const Jet& o) { *this = *this * o; return *this; }
  Jet& operator/=(const Jet& o) { *this = *this / o; return *this; }

  Jet operator-() const { Jet r = *this; for (auto& v : r.c_) v = -v; return r; }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator+(Jet a, const T& b) { return a += b; }
  friend Jet operator+(const T& b, Jet a) { return a += b; }
  friend Jet operator-(Jet a, const T& b) { return a -= b; }
  friend Jet operator-(const T& b, const Jet& a) { Jet r = -a; r.c_[0] += b; return r; }
  friend Jet operator*(Jet a, const T& b) { return a *= b; }
  friend Jet operator*(const T& b, Jet a) { return a *= b; }
  friend Jet operator/(Jet a, const T& b) { return a /= b; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    const std::size_t n = a.order();
    Jet r(n);
    for (std::size_t k = 0; k <= n; ++k) {
      T s(0);
      for (std::size_t i = 0; i <= k; ++i) s += a.c_[i] * b.c_[k - i];
      r.c_[k] = s;
    }
    return r;
  }
  friend Jet operator/(const Jet& a, const Jet& b) {
    const std::size_t n = a.order();
    Jet r(n);
    for (std::size_t k = 0; k <= n; ++k) {
      T s = a.c_[k];
      for (std::size_t i = 1; i <= k; ++i) s -= b.c_[i] * r.c_[k - i];
      r.c_[k] = s / b.c_[0];
    }
    return r;
  }
  friend Jet operator/(const T& a, const Jet& b) { return Jet(b.order(), a) / b; }

  friend Jet sqrt(const Jet& a) {
    using std::sqrt;
    const std::size_t n = a.order();
    Jet r(n);
    r.c_[0] = sqrt(a.c_[0]);
    for (std::size_t k = 1; k <= n; ++k) {
      T s = a.c_[k];
      for (std::size_t i = 1; i < k; ++i) s -= r.c_[i] * r.c_[k - i];
      r.c_[k] = s / (T(2) * r.c_[0]);
    }
    return r;
  }
  friend Jet log(const Jet& a) {
    using std::log;
    const std::size_t n = a.order();
    Jet r(n);
    r.c_[0] = log(a.c_[0]);
    // (log a)' = a'/a  =>  k r_k a_0 = k a_k - sum_{i=1}^{k-1} i r_i a_{k-i}
    for (std::size_t k = 1; k <= n; ++k) {
      T s = T(double(k)) * a.c_[k];
      for (std::size_t i = 1; i < k; ++i) s -= T(double(i)) * r.c_[i] * a.c_[k - i];
      r.c_[k] = s / (T(double(k)) * a.c_[0]);
    }
    return r;
  }

  // d/dh of the truncated series; the top coefficient is lost
  Jet diff() const {
    Jet r(order());
    for (std::size_t k = 0; k + 1 <= order(); ++k) r.c_[k] = T(double(k + 1)) * c_[k + 1];
    return r;
  }

private:
  std::vector<T> c_;
};

template <class T> struct is_jet : std::false_type {};
template <class T> struct is_jet<Jet<T>> : std::true_type {};

// value of a plain number or a jet
inline double val(double x) { return x; }
template <class T> T val(const Jet<T>& j) { return j.value(); }

}  // namespace knds
