#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <vector>

namespace srusk {

enum class CoordKind { Time, Position, Tau, Momentum, Velocity };

// A bundle coordinate of T*E x_E J^1pi. Indexed kinds carry a 1-based fibre index.
struct Coord {
  CoordKind kind = CoordKind::Time;
  int index = 0;

  static Coord time() { return {CoordKind::Time, 0}; }
  static Coord tau() { return {CoordKind::Tau, 0}; }
  static Coord position(int a);
  static Coord momentum(int a);
  static Coord velocity(int a);

  bool indexed() const { return kind == CoordKind::Position || kind == CoordKind::Momentum || kind == CoordKind::Velocity; }

  // DSL spelling: t, q1, tau, p1, qd1.
  std::string name() const;

  // Throws std::invalid_argument when the index is outside 1..n (or nonzero for t, tau).
  void check(int n) const;

  friend auto operator<=>(const Coord&, const Coord&) = default;
};

// Position of a coordinate in the fixed mixed-space order (t, q^1..q^n, tau, p_1..p_n, qd^1..qd^n).
int mixed_index(Coord c, int n);
int mixed_dim(int n);
Coord mixed_coord(int i, int n);

// An ordered list of coordinates naming the basis of a coordinate patch.
class Chart {
 public:
  Chart() = default;
  explicit Chart(std::vector<Coord> coords, int n) : coords_(std::move(coords)), n_(n) {}

  // (t, q, tau, p, qd) on T*E x_E J^1pi.
  static Chart mixed(int n);
  // (t, q, qd) on J^1pi.
  static Chart jet(int n);
  // (t, q, tau, qd): the parametrization of M_L obtained by eliminating p.
  static Chart mixed_without_momenta(int n);
  // (t, q, p, qd) on J^1pi* x_E J^1pi.
  static Chart dual_mixed(int n);

  std::size_t size() const { return coords_.size(); }
  int fibre_dim() const { return n_; }
  const Coord& operator[](std::size_t i) const { return coords_[i]; }
  const std::vector<Coord>& coords() const { return coords_; }
  // -1 when absent.
  int index_of(Coord c) const;
  bool contains(Coord c) const { return index_of(c) >= 0; }

  friend bool operator==(const Chart&, const Chart&) = default;

 private:
  std::vector<Coord> coords_;
  int n_ = 0;
};

}  // namespace srusk
