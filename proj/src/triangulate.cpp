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

#include <algorithm>
#include <cmath>

#include "prilok/error.hpp"
#include "prilok/geometry.hpp"

namespace prilok {

namespace {

double cost(std::span<const RangeReading> readings, Point2 p) {
  double sum = 0.0;
  for (const RangeReading& r : readings) {
    double e = distance(p, r.centroid) - r.distance;
    sum += e * e;
  }
  return sum;
}

}  // namespace

Triangulation triangulate(std::span<const RangeReading> readings) {
  if (readings.size() < 3) {
    fail(ErrorCode::kInsufficientReadings, "triangulation needs at least 3 readings");
  }
  const Point2 c0 = readings[0].centroid;
  double scale = 0.0;
  for (const RangeReading& r : readings) scale = std::max(scale, distance(r.centroid, c0));
  double max_cross = 0.0;
  for (std::size_t i = 1; i < readings.size(); ++i) {
    for (std::size_t j = i + 1; j < readings.size(); ++j) {
      double ax = readings[i].centroid.x - c0.x, ay = readings[i].centroid.y - c0.y;
      double bx = readings[j].centroid.x - c0.x, by = readings[j].centroid.y - c0.y;
      max_cross = std::max(max_cross, std::abs(ax * by - ay * bx));
    }
  }
  if (scale == 0.0 || max_cross <= 1e-9 * scale * scale) {
    fail(ErrorCode::kDegenerateGeometry, "base-station centroids are collinear");
  }

  // 2 (c_i - c_0) . p = d_0^2 - d_i^2 + |c_i|^2 - |c_0|^2, solved through the
  // 2x2 normal equations.
  double ata00 = 0, ata01 = 0, ata11 = 0, atb0 = 0, atb1 = 0;
  const double d0 = readings[0].distance;
  for (std::size_t i = 1; i < readings.size(); ++i) {
    const Point2 ci = readings[i].centroid;
    double a0 = 2 * (ci.x - c0.x);
    double a1 = 2 * (ci.y - c0.y);
    double b = d0 * d0 - readings[i].distance * readings[i].distance + ci.x * ci.x + ci.y * ci.y -
               c0.x * c0.x - c0.y * c0.y;
    ata00 += a0 * a0;
    ata01 += a0 * a1;
    ata11 += a1 * a1;
    atb0 += a0 * b;
    atb1 += a1 * b;
  }
  double det = ata00 * ata11 - ata01 * ata01;
  Point2 p{(ata11 * atb0 - ata01 * atb1) / det, (ata00 * atb1 - ata01 * atb0) / det};

  // Gauss-Newton on the range residuals, step-halving when the cost rises.
  double current = cost(readings, p);
  for (int iter = 0; iter < 100 && current > 0.0; ++iter) {
    double j00 = 0, j01 = 0, j11 = 0, g0 = 0, g1 = 0;
    for (const RangeReading& r : readings) {
      double dist = distance(p, r.centroid);
      if (dist < 1e-12) continue;
      double ux = (p.x - r.centroid.x) / dist;
      double uy = (p.y - r.centroid.y) / dist;
      double e = dist - r.distance;
      j00 += ux * ux;
      j01 += ux * uy;
      j11 += uy * uy;
      g0 += ux * e;
      g1 += uy * e;
    }
    double jdet = j00 * j11 - j01 * j01;
    if (std::abs(jdet) < 1e-15) break;
    Point2 step{(j11 * g0 - j01 * g1) / jdet, (j00 * g1 - j01 * g0) / jdet};
    double factor = 1.0;
    bool improved = false;
    for (int h = 0; h < 30; ++h) {
      Point2 candidate{p.x - factor * step.x, p.y - factor * step.y};
      double c = cost(readings, candidate);
      if (c < current) {
        p = candidate;
        improved = current - c > 1e-15 * std::max(1.0, current);
        current = c;
        break;
      }
      factor /= 2;
    }
    if (!improved) break;
  }
  return {p, std::sqrt(current / static_cast<double>(readings.size()))};
}

}  // namespace prilok
