#include "fracwell/mesh.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "fracwell/errors.hpp"

namespace fracwell {

Mesh1D::Mesh1D(double length, int interior_nodes, double radius, int levels)
    : L(length), M(interior_nodes), R(radius > 0 ? radius : 4.0 * length),
      near_diag_levels(levels) {
  validate();
}

void Mesh1D::validate() const {
  if (!(L > 0.0)) throw ConfigError("mesh: L must be positive");
  if (M < 4) throw ConfigError("mesh: need at least 4 interior nodes");
  if (!(R >= 2.0 * L)) throw ConfigError("mesh: exterior radius must be at least 2L");
  if (near_diag_levels < 0 || near_diag_levels > 40)
    throw ConfigError("mesh: near-diagonal levels out of range");
}

GridFunction::GridFunction(const Mesh1D& mesh) : mesh_(mesh), values_(mesh.M, 0.0) {}

GridFunction::GridFunction(const Mesh1D& mesh, std::vector<double> values)
    : mesh_(mesh), values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != mesh_.M)
    throw ConfigError("grid function: value count does not match the mesh");
  for (double v : values_)
    if (!std::isfinite(v)) throw DomainError("grid function: non-finite value");
}

GridFunction GridFunction::from(const Mesh1D& mesh, const std::function<double(double)>& fn) {
  std::vector<double> v(mesh.M);
  for (int i = 0; i < mesh.M; ++i) v[i] = fn(mesh.node(i + 1));
  return GridFunction(mesh, std::move(v));
}

double GridFunction::node_value(int i) const {
  if (i <= 0 || i > mesh_.M) return 0.0;
  return values_[i - 1];
}

double GridFunction::operator()(double x) const {
  if (x <= 0.0 || x >= mesh_.L) return 0.0;
  const double h = mesh_.h();
  const int c = std::min(static_cast<int>(x / h), mesh_.M);
  const double xi = x / h - c;
  return (1.0 - xi) * node_value(c) + xi * node_value(c + 1);
}

bool GridFunction::is_zero() const {
  for (double v : values_)
    if (v != 0.0) return false;
  return true;
}

GridFunction GridFunction::operator*(double c) const {
  GridFunction out(*this);
  for (double& v : out.values_) v *= c;
  return out;
}

GridFunction GridFunction::operator+(const GridFunction& o) const {
  GridFunction out(*this);
  for (int i = 0; i < size(); ++i) out.values_[i] += o.values_[i];
  return out;
}

GridFunction GridFunction::operator-(const GridFunction& o) const {
  GridFunction out(*this);
  for (int i = 0; i < size(); ++i) out.values_[i] -= o.values_[i];
  return out;
}

void GridFunction::write_csv(std::ostream& os) const {
  os << "node,x,value\n";
  char buf[96];
  for (int i = 0; i < size(); ++i) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", i + 1, mesh_.node(i + 1), values_[i]);
    os << buf;
  }
}

GridFunction GridFunction::read_csv(std::istream& is, const Mesh1D& mesh) {
  std::string line;
  std::vector<double> v(mesh.M, 0.0);
  std::vector<bool> seen(mesh.M, false);
  bool header = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (header && line.find_first_of("0123456789") != 0) {
      header = false;
      continue;
    }
    header = false;
    std::istringstream ls(line);
    std::string a, b, c;
    if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',') || !std::getline(ls, c))
      throw ConfigError("grid function CSV: malformed line '" + line + "'");
    const int idx = std::stoi(a);
    if (idx < 1 || idx > mesh.M) throw ConfigError("grid function CSV: node index out of range");
    v[idx - 1] = std::stod(c);
    seen[idx - 1] = true;
  }
  for (bool s : seen)
    if (!s) throw ConfigError("grid function CSV: missing nodes");
  return GridFunction(mesh, std::move(v));
}

}  // namespace fracwell
