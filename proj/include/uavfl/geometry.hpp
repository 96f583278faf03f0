#pragma once

#include <cmath>

namespace uavfl {

// Point in the horizontal plane, meters unless stated otherwise.
struct Coord2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Coord2&, const Coord2&) = default;
};

inline double distance(const Coord2& a, const Coord2& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

// Axis-aligned rectangle of the flight area.
struct AreaBounds {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 10000.0;
  double y_max = 10000.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  bool contains(const Coord2& q) const {
    return q.x >= x_min && q.x <= x_max && q.y >= y_min && q.y <= y_max;
  }

  friend bool operator==(const AreaBounds&, const AreaBounds&) = default;
};

}  // namespace uavfl
