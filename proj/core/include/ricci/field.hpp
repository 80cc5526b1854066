#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace ricci {

class Backend;

/// Real scalar sampled on the collocation grid of a backend.
///
/// Arithmetic between two fields requires compatible backends (same kind,
/// resolution and periods); otherwise a ShapeError is thrown.
class Field {
 public:
  Field(std::shared_ptr<const Backend> backend, std::vector<double> values);

  static Field constant(std::shared_ptr<const Backend> backend, double value);
  static Field zeros(std::shared_ptr<const Backend> backend) { return constant(std::move(backend), 0.0); }

  const Backend& backend() const { return *backend_; }
  const std::shared_ptr<const Backend>& backend_ptr() const { return backend_; }

  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  bool compatible_with(const Field& other) const;
  void require_compatible(const Field& other) const;
  /// Throws NonFiniteError if any value is NaN or Inf.
  const Field& require_finite(const char* where) const;

  double min() const;
  double max() const;
  double sup_norm() const;

  Field map(const std::function<double(double)>& fn) const;

  Field& operator+=(const Field& rhs);
  Field& operator-=(const Field& rhs);
  Field& operator*=(const Field& rhs);
  Field& operator/=(const Field& rhs);
  Field& operator+=(double c);
  Field& operator-=(double c);
  Field& operator*=(double c);

 private:
  std::shared_ptr<const Backend> backend_;
  std::vector<double> values_;
};

Field operator+(Field lhs, const Field& rhs);
Field operator-(Field lhs, const Field& rhs);
Field operator*(Field lhs, const Field& rhs);
Field operator/(Field lhs, const Field& rhs);
Field operator+(Field lhs, double c);
Field operator+(double c, Field rhs);
Field operator-(Field lhs, double c);
Field operator-(double c, Field rhs);
Field operator*(Field lhs, double c);
Field operator*(double c, Field rhs);
Field operator-(Field f);

double sup_distance(const Field& a, const Field& b);

}  // namespace ricci
