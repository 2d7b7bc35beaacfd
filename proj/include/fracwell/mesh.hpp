#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace fracwell {

// Uniform mesh of Omega = (0, L): nodes x_i = i h, i = 0..M+1, h = L/(M+1).
// Only the M interior nodes carry unknowns.
struct Mesh1D {
  double L = 1.0;
  int M = 64;
  double R = 4.0;          // exterior truncation radius (reporting only)
  int near_diag_levels = 6;

  Mesh1D() = default;
  Mesh1D(double length, int interior_nodes, double radius = -1.0, int levels = 6);

  double h() const { return L / (M + 1); }
  double node(int i) const { return i * h(); }
  void validate() const;
  bool operator==(const Mesh1D&) const = default;
};

// Piecewise-linear function on a mesh, zero at the two boundary nodes and
// outside Omega.
class GridFunction {
 public:
  GridFunction() = default;
  explicit GridFunction(const Mesh1D& mesh);
  GridFunction(const Mesh1D& mesh, std::vector<double> values);

  static GridFunction from(const Mesh1D& mesh, const std::function<double(double)>& fn);

  const Mesh1D& mesh() const { return mesh_; }
  int size() const { return static_cast<int>(values_.size()); }
  std::span<const double> values() const { return values_; }
  std::vector<double>& data() { return values_; }
  double operator[](int i) const { return values_[i]; }
  double& operator[](int i) { return values_[i]; }

  // Value at node index 0..M+1 (boundary nodes read as 0).
  double node_value(int i) const;
  // Linear interpolation; 0 outside (0, L).
  double operator()(double x) const;
  bool is_zero() const;

  GridFunction operator*(double c) const;
  GridFunction operator+(const GridFunction& o) const;
  GridFunction operator-(const GridFunction& o) const;

  void write_csv(std::ostream& os) const;
  static GridFunction read_csv(std::istream& is, const Mesh1D& mesh);

 private:
  Mesh1D mesh_;
  std::vector<double> values_;
};

}  // namespace fracwell
