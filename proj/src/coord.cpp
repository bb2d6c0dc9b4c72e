#include "srusk/coord.hpp"

#include <stdexcept>

namespace srusk {

Coord Coord::position(int a) {
  if (a < 1) throw std::invalid_argument("coordinate index must be >= 1");
  return {CoordKind::Position, a};
}

Coord Coord::momentum(int a) {
  if (a < 1) throw std::invalid_argument("coordinate index must be >= 1");
  return {CoordKind::Momentum, a};
}

Coord Coord::velocity(int a) {
  if (a < 1) throw std::invalid_argument("coordinate index must be >= 1");
  return {CoordKind::Velocity, a};
}

std::string Coord::name() const {
  switch (kind) {
    case CoordKind::Time: return "t";
    case CoordKind::Tau: return "tau";
    case CoordKind::Position: return "q" + std::to_string(index);
    case CoordKind::Momentum: return "p" + std::to_string(index);
    case CoordKind::Velocity: return "qd" + std::to_string(index);
  }
  return "?";
}

void Coord::check(int n) const {
  if (indexed()) {
    if (index < 1 || index > n)
      throw std::invalid_argument("unknown coordinate " + name() + " (fibre dimension " + std::to_string(n) + ")");
  } else if (index != 0) {
    throw std::invalid_argument("coordinate " + name() + " carries no index");
  }
}

int mixed_dim(int n) { return 3 * n + 2; }

int mixed_index(Coord c, int n) {
  c.check(n);
  switch (c.kind) {
    case CoordKind::Time: return 0;
    case CoordKind::Position: return c.index;
    case CoordKind::Tau: return n + 1;
    case CoordKind::Momentum: return n + 1 + c.index;
    case CoordKind::Velocity: return 2 * n + 1 + c.index;
  }
  return -1;
}

Coord mixed_coord(int i, int n) {
  if (i < 0 || i >= mixed_dim(n)) throw std::out_of_range("mixed coordinate index out of range");
  if (i == 0) return Coord::time();
  if (i <= n) return Coord::position(i);
  if (i == n + 1) return Coord::tau();
  if (i <= 2 * n + 1) return Coord::momentum(i - n - 1);
  return Coord::velocity(i - 2 * n - 1);
}

Chart Chart::mixed(int n) {
  std::vector<Coord> cs;
  for (int i = 0; i < mixed_dim(n); ++i) cs.push_back(mixed_coord(i, n));
  return Chart(std::move(cs), n);
}

Chart Chart::jet(int n) {
  std::vector<Coord> cs{Coord::time()};
  for (int a = 1; a <= n; ++a) cs.push_back(Coord::position(a));
  for (int a = 1; a <= n; ++a) cs.push_back(Coord::velocity(a));
  return Chart(std::move(cs), n);
}

Chart Chart::mixed_without_momenta(int n) {
  std::vector<Coord> cs{Coord::time()};
  for (int a = 1; a <= n; ++a) cs.push_back(Coord::position(a));
  cs.push_back(Coord::tau());
  for (int a = 1; a <= n; ++a) cs.push_back(Coord::velocity(a));
  return Chart(std::move(cs), n);
}

Chart Chart::dual_mixed(int n) {
  std::vector<Coord> cs{Coord::time()};
  for (int a = 1; a <= n; ++a) cs.push_back(Coord::position(a));
  for (int a = 1; a <= n; ++a) cs.push_back(Coord::momentum(a));
  for (int a = 1; a <= n; ++a) cs.push_back(Coord::velocity(a));
  return Chart(std::move(cs), n);
}

int Chart::index_of(Coord c) const {
  for (std::size_t i = 0; i < coords_.size(); ++i)
    if (coords_[i] == c) return static_cast<int>(i);
  return -1;
}

}  // namespace srusk
