#pragma once

// Exact multivariate polynomials in (x1, x2, x3) with symbolic
// differentiation; test-side oracle for the curl identities.

#include <array>
#include <map>

#include "kornkit/algebra.hpp"
#include "kornkit/random.hpp"

namespace oracle {

using Exponent = std::array<int, 3>;

class Poly {
 public:
  Poly() = default;
  static Poly constant(double c) {
    Poly p;
    p.add({0, 0, 0}, c);
    return p;
  }
  static Poly monomial(Exponent e, double c) {
    Poly p;
    p.add(e, c);
    return p;
  }

  void add(Exponent e, double c) {
    if (c != 0.0) terms_[e] += c;
  }

  Poly operator+(const Poly& o) const {
    Poly r = *this;
    for (const auto& [e, c] : o.terms_) r.add(e, c);
    return r;
  }
  Poly operator-(const Poly& o) const { return *this + o * -1.0; }
  Poly operator*(double s) const {
    Poly r;
    for (const auto& [e, c] : terms_) r.add(e, c * s);
    return r;
  }
  Poly operator*(const Poly& o) const {
    Poly r;
    for (const auto& [e1, c1] : terms_) {
      for (const auto& [e2, c2] : o.terms_) r.add({e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2]}, c1 * c2);
    }
    return r;
  }

  Poly derivative(int axis) const {
    Poly r;
    for (const auto& [e, c] : terms_) {
      if (e[axis] == 0) continue;
      Exponent d = e;
      d[axis] -= 1;
      r.add(d, c * e[axis]);
    }
    return r;
  }

  double operator()(const kornkit::Vec3& x) const {
    double s = 0.0;
    for (const auto& [e, c] : terms_) {
      double m = c;
      for (int a = 0; a < 3; ++a) {
        for (int k = 0; k < e[a]; ++k) m *= x(a);
      }
      s += m;
    }
    return s;
  }

 private:
  std::map<Exponent, double> terms_;
};

using PolyMat = std::array<std::array<Poly, 3>, 3>;

/// Random polynomial of total degree <= degree with coefficients in [-1, 1].
inline Poly random_poly(kornkit::Rng& rng, int degree) {
  Poly p;
  for (int i = 0; i <= degree; ++i) {
    for (int j = 0; i + j <= degree; ++j) {
      for (int k = 0; i + j + k <= degree; ++k) p.add({i, j, k}, rng.uniform(-1.0, 1.0));
    }
  }
  return p;
}

inline PolyMat random_poly_mat(kornkit::Rng& rng, int degree) {
  PolyMat m;
  for (auto& row : m) {
    for (auto& e : row) e = random_poly(rng, degree);
  }
  return m;
}

inline PolyMat product(const PolyMat& a, const PolyMat& b) {
  PolyMat r;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) r[i][j] = r[i][j] + a[i][k] * b[k][j];
    }
  }
  return r;
}

/// Row-wise curl, each row written out component by component.
inline PolyMat curl(const PolyMat& m) {
  PolyMat r;
  for (int l = 0; l < 3; ++l) {
    r[l][0] = m[l][2].derivative(1) - m[l][1].derivative(2);
    r[l][1] = m[l][0].derivative(2) - m[l][2].derivative(0);
    r[l][2] = m[l][1].derivative(0) - m[l][0].derivative(1);
  }
  return r;
}

inline kornkit::Mat3 eval(const PolyMat& m, const kornkit::Vec3& x) {
  kornkit::Mat3 r;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) r(i, j) = m[i][j](x);
  }
  return r;
}

inline kornkit::Grad27 eval_grad(const PolyMat& m, const kornkit::Vec3& x) {
  kornkit::Grad27 g;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (int d = 0; d < 3; ++d) g(i, j, d) = m[i][j].derivative(d)(x);
    }
  }
  return g;
}

}  // namespace oracle
