#include "ricci/field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ricci/errors.hpp"
#include "ricci/geometry.hpp"

namespace ricci {

Field::Field(std::shared_ptr<const Backend> backend, std::vector<double> values)
    : backend_(std::move(backend)), values_(std::move(values)) {
  if (!backend_) throw ShapeError("Field: null backend");
  if (values_.size() != backend_->size()) {
    throw ShapeError("Field: expected " + std::to_string(backend_->size()) + " values, got " +
                     std::to_string(values_.size()));
  }
}

Field Field::constant(std::shared_ptr<const Backend> backend, double value) {
  const auto n = backend->size();
  return Field(std::move(backend), std::vector<double>(n, value));
}

bool Field::compatible_with(const Field& other) const {
  if (backend_ == other.backend_) return true;
  return backend_->signature() == other.backend_->signature();
}

void Field::require_compatible(const Field& other) const {
  if (!compatible_with(other)) {
    throw ShapeError("incompatible fields: " + backend_->signature() + " vs " + other.backend_->signature());
  }
}

const Field& Field::require_finite(const char* where) const {
  for (double v : values_) {
    if (!std::isfinite(v)) throw NonFiniteError(std::string("non-finite value produced by ") + where);
  }
  return *this;
}

double Field::min() const { return *std::min_element(values_.begin(), values_.end()); }
double Field::max() const { return *std::max_element(values_.begin(), values_.end()); }

double Field::sup_norm() const {
  double s = 0.0;
  for (double v : values_) s = std::max(s, std::abs(v));
  return s;
}

Field Field::map(const std::function<double(double)>& fn) const {
  Field out = *this;
  for (double& v : out.values_) v = fn(v);
  return out;
}

Field& Field::operator+=(const Field& rhs) {
  require_compatible(rhs);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += rhs.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& rhs) {
  require_compatible(rhs);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= rhs.values_[i];
  return *this;
}

Field& Field::operator*=(const Field& rhs) {
  require_compatible(rhs);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] *= rhs.values_[i];
  return *this;
}

Field& Field::operator/=(const Field& rhs) {
  require_compatible(rhs);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] /= rhs.values_[i];
  return *this;
}

Field& Field::operator+=(double c) {
  for (double& v : values_) v += c;
  return *this;
}

Field& Field::operator-=(double c) {
  for (double& v : values_) v -= c;
  return *this;
}

Field& Field::operator*=(double c) {
  for (double& v : values_) v *= c;
  return *this;
}

Field operator+(Field lhs, const Field& rhs) { return lhs += rhs; }
Field operator-(Field lhs, const Field& rhs) { return lhs -= rhs; }
Field operator*(Field lhs, const Field& rhs) { return lhs *= rhs; }
Field operator/(Field lhs, const Field& rhs) { return lhs /= rhs; }
Field operator+(Field lhs, double c) { return lhs += c; }
Field operator+(double c, Field rhs) { return rhs += c; }
Field operator-(Field lhs, double c) { return lhs -= c; }
Field operator-(double c, Field rhs) {
  for (double& v : rhs.values()) v = c - v;
  return rhs;
}
Field operator*(Field lhs, double c) { return lhs *= c; }
Field operator*(double c, Field rhs) { return rhs *= c; }
Field operator-(Field f) { return f *= -1.0; }

double sup_distance(const Field& a, const Field& b) {
  a.require_compatible(b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
  return s;
}

}  // namespace ricci
