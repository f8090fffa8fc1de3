// Copyright 2026 The PriLok Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PRILOK_GEOMETRY_HPP_
#define PRILOK_GEOMETRY_HPP_

#include <cmath>
#include <span>

namespace prilok {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct BoundingBox {
  Point2 min;
  Point2 max;

  Point2 center() const { return {(min.x + max.x) / 2, (min.y + max.y) / 2}; }
  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct RangeReading {
  Point2 centroid;
  double distance = 0.0;  // meters
};

struct Triangulation {
  Point2 position;
  double residual = 0.0;  // RMS of (|position - centroid| - distance)
};

// Least-squares multilateration. The linearised system (each reading minus
// the first) gives a closed-form start; Gauss-Newton then minimises the
// range residuals directly so noisy inputs land on the true least-squares
// point. Throws kInsufficientReadings (< 3) or kDegenerateGeometry
// (collinear centroids).
Triangulation triangulate(std::span<const RangeReading> readings);

}  // namespace prilok

#endif  // PRILOK_GEOMETRY_HPP_
