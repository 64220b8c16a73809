#include "kornkit/analytic.hpp"

#include <cmath>
#include <string>

#include "kornkit/error.hpp"

namespace kornkit {

AnalyticKind parse_analytic_kind(std::string_view name) {
  if (name == "polynomial") return AnalyticKind::Polynomial;
  if (name == "trigonometric") return AnalyticKind::Trigonometric;
  if (name == "rotation-valued") return AnalyticKind::RotationValued;
  throw Error(ErrorKind::UnknownKind, "unknown analytic field kind '" + std::string(name) + "'");
}

std::string_view to_string(AnalyticKind kind) {
  switch (kind) {
    case AnalyticKind::Polynomial: return "polynomial";
    case AnalyticKind::Trigonometric: return "trigonometric";
    case AnalyticKind::RotationValued: return "rotation-valued";
  }
  return "unknown";
}

// ---------------------------------------------------------------- scalar

AnalyticScalar AnalyticScalar::polynomial(Rng& rng, const AnalyticParams& p) {
  if (p.degree < 0 || p.degree > 2) {
    throw Error(ErrorKind::InvalidArgument, "polynomial degree must be 0, 1 or 2");
  }
  AnalyticScalar s;
  s.c0_ = p.amplitude * rng.uniform(-1.0, 1.0);
  if (p.degree >= 1) {
    for (int d = 0; d < 3; ++d) s.linear_(d) = p.amplitude * rng.uniform(-1.0, 1.0);
  }
  if (p.degree >= 2) {
    for (int d = 0; d < 3; ++d) {
      for (int e = d; e < 3; ++e) {
        const double v = p.amplitude * rng.uniform(-1.0, 1.0);
        if (d == e) {
          if (!p.multilinear) s.quad_(d, d) = v;
        } else {
          s.quad_(d, e) = 0.5 * v;
          s.quad_(e, d) = 0.5 * v;
        }
      }
    }
  }
  return s;
}

AnalyticScalar AnalyticScalar::trigonometric(Rng& rng, const AnalyticParams& p) {
  AnalyticScalar s;
  s.trig_ = true;
  s.amplitude_ = p.amplitude;
  for (int d = 0; d < 3; ++d) s.wave_(d) = p.wavenumber * rng.uniform(-1.0, 1.0);
  s.phase_ = rng.uniform(0.0, 2.0 * M_PI);
  return s;
}

double AnalyticScalar::value(const Vec3& x) const {
  if (trig_) return amplitude_ * std::sin(wave_.dot(x) + phase_);
  return c0_ + linear_.dot(x) + x.dot(quad_ * x);
}

Vec3 AnalyticScalar::gradient(const Vec3& x) const {
  if (trig_) return amplitude_ * std::cos(wave_.dot(x) + phase_) * wave_;
  return linear_ + 2.0 * quad_ * x;
}

// ---------------------------------------------------------------- rotation

Mat3 rodrigues(const Vec3& w) {
  const double theta = w.norm();
  const Mat3 k = smat(w).matrix();
  double a = 1.0;
  double b = 0.5;
  if (theta > 1e-4) {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / (theta * theta);
  } else {
    const double t2 = theta * theta;
    a = 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
    b = 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
  }
  return Mat3::Identity() + a * k + b * k * k;
}

std::array<Mat3, 3> rodrigues_derivatives(const Vec3& w) {
  const double theta = w.norm();
  const Mat3 k = smat(w).matrix();
  double a = 1.0;
  double b = 0.5;
  double alpha = -1.0 / 3.0;  // a'(theta) / theta
  double beta = -1.0 / 12.0;  // b'(theta) / theta
  if (theta > 1e-3) {
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    a = s / theta;
    b = (1.0 - c) / (theta * theta);
    alpha = (theta * c - s) / (theta * theta * theta);
    beta = (theta * s - 2.0 * (1.0 - c)) / (theta * theta * theta * theta);
  } else {
    const double t2 = theta * theta;
    a = 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
    b = 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
    alpha = -1.0 / 3.0 + t2 / 30.0 - t2 * t2 / 840.0;
    beta = -1.0 / 12.0 + t2 / 180.0 - t2 * t2 / 6720.0;
  }
  std::array<Mat3, 3> out;
  for (int m = 0; m < 3; ++m) {
    const Mat3 e = smat(Vec3::Unit(m)).matrix();
    out[static_cast<std::size_t>(m)] =
        alpha * w(m) * k + a * e + beta * w(m) * k * k + b * (e * k + k * e);
  }
  return out;
}

// ---------------------------------------------------------------- matrix

AnalyticMatrixField AnalyticMatrixField::make(AnalyticKind kind, const AnalyticParams& params) {
  AnalyticMatrixField f;
  f.kind_ = kind;
  Rng rng(params.seed);
  switch (kind) {
    case AnalyticKind::Polynomial:
      for (int k = 0; k < 9; ++k) f.entries_.push_back(AnalyticScalar::polynomial(rng, params));
      break;
    case AnalyticKind::Trigonometric:
      for (int k = 0; k < 9; ++k) f.entries_.push_back(AnalyticScalar::trigonometric(rng, params));
      break;
    case AnalyticKind::RotationValued:
      for (int k = 0; k < 3; ++k) f.entries_.push_back(AnalyticScalar::trigonometric(rng, params));
      break;
  }
  return f;
}

Mat3 AnalyticMatrixField::value(const Vec3& x) const {
  if (kind_ == AnalyticKind::RotationValued) {
    return rodrigues({entries_[0].value(x), entries_[1].value(x), entries_[2].value(x)});
  }
  Mat3 m;
  for (int k = 0; k < 9; ++k) m(k / 3, k % 3) = entries_[static_cast<std::size_t>(k)].value(x);
  return m;
}

Grad27 AnalyticMatrixField::gradient(const Vec3& x) const {
  Grad27 g;
  if (kind_ == AnalyticKind::RotationValued) {
    const Vec3 w{entries_[0].value(x), entries_[1].value(x), entries_[2].value(x)};
    const std::array<Mat3, 3> dr = rodrigues_derivatives(w);
    for (int m = 0; m < 3; ++m) {
      const Vec3 dw = entries_[static_cast<std::size_t>(m)].gradient(x);
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
          for (int d = 0; d < 3; ++d) g(r, c, d) += dr[static_cast<std::size_t>(m)](r, c) * dw(d);
        }
      }
    }
    return g;
  }
  for (int k = 0; k < 9; ++k) {
    const Vec3 dk = entries_[static_cast<std::size_t>(k)].gradient(x);
    for (int d = 0; d < 3; ++d) g(k / 3, k % 3, d) = dk(d);
  }
  return g;
}

Mat3 AnalyticMatrixField::curl(const Vec3& x) const { return curl_from_grad(gradient(x)); }

MatrixField AnalyticMatrixField::sample(const GridSpec& grid) const {
  return sample_matrix_field(grid, [this](const Eigen::Vector3d& x) { return value(x); });
}

MatrixField AnalyticMatrixField::sample_curl(const GridSpec& grid) const {
  return sample_matrix_field(grid, [this](const Eigen::Vector3d& x) { return curl(x); });
}

// ---------------------------------------------------------------- vector

AnalyticVectorField AnalyticVectorField::make(AnalyticKind kind, const AnalyticParams& params,
                                              int components) {
  if (components < 1) throw Error(ErrorKind::InvalidArgument, "components < 1");
  AnalyticVectorField f;
  Rng rng(params.seed);
  for (int k = 0; k < components; ++k) {
    switch (kind) {
      case AnalyticKind::Polynomial:
        f.components_.push_back(AnalyticScalar::polynomial(rng, params));
        break;
      case AnalyticKind::Trigonometric:
        f.components_.push_back(AnalyticScalar::trigonometric(rng, params));
        break;
      case AnalyticKind::RotationValued:
        throw Error(ErrorKind::UnknownKind, "rotation-valued is a matrix-only kind");
    }
  }
  return f;
}

Eigen::VectorXd AnalyticVectorField::value(const Vec3& x) const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(components_.size()));
  for (std::size_t k = 0; k < components_.size(); ++k) {
    v(static_cast<Eigen::Index>(k)) = components_[k].value(x);
  }
  return v;
}

Eigen::MatrixXd AnalyticVectorField::jacobian(const Vec3& x) const {
  Eigen::MatrixXd j(static_cast<Eigen::Index>(components_.size()), 3);
  for (std::size_t k = 0; k < components_.size(); ++k) {
    j.row(static_cast<Eigen::Index>(k)) = components_[k].gradient(x).transpose();
  }
  return j;
}

VectorField AnalyticVectorField::sample(const GridSpec& grid) const {
  return sample_vector_field(grid, static_cast<int>(components_.size()),
                             [this](const Eigen::Vector3d& x) { return value(x); });
}

}  // namespace kornkit
