#include "risiort/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "risiort/error.hpp"

namespace risiort {

double distance(const Position& a, const Position& b) {
  return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z);
}

bool Obstacle::contains(const Position& p) const {
  return p.x >= corner_min.x && p.x <= corner_max.x && p.y >= corner_min.y &&
         p.y <= corner_max.y && p.z >= corner_min.z && p.z <= corner_max.z;
}

bool Obstacle::contains_interior(const Position& p) const {
  return p.x > corner_min.x && p.x < corner_max.x && p.y > corner_min.y &&
         p.y < corner_max.y && p.z >= corner_min.z && p.z <= corner_max.z;
}

namespace {

bool finite(const Position& p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

// Clips the parameter interval [t0, t1] against one slab; closed bounds.
bool clip_slab(double origin, double delta, double lo, double hi, double& t0, double& t1) {
  if (delta == 0.0) return origin >= lo && origin <= hi;
  double ta = (lo - origin) / delta;
  double tb = (hi - origin) / delta;
  if (ta > tb) std::swap(ta, tb);
  t0 = std::max(t0, ta);
  t1 = std::min(t1, tb);
  return t0 <= t1;
}

}  // namespace

bool segment_intersects_box(const Position& p, const Position& q, const Obstacle& box) {
  // Canonical endpoint order makes the floating-point test exactly symmetric.
  const bool swap = std::tie(q.x, q.y, q.z) < std::tie(p.x, p.y, p.z);
  const Position& a = swap ? q : p;
  const Position& b = swap ? p : q;
  double t0 = 0.0;
  double t1 = 1.0;
  return clip_slab(a.x, b.x - a.x, box.corner_min.x, box.corner_max.x, t0, t1) &&
         clip_slab(a.y, b.y - a.y, box.corner_min.y, box.corner_max.y, t0, t1) &&
         clip_slab(a.z, b.z - a.z, box.corner_min.z, box.corner_max.z, t0, t1);
}

bool los_blocked(const Topology& t, const Position& a, const Position& b) {
  return std::any_of(t.obstacles.begin(), t.obstacles.end(),
                     [&](const Obstacle& o) { return segment_intersects_box(a, b, o); });
}

void validate_topology(const Topology& t) {
  if (t.bs_list.empty()) throw ConfigError("topology: at least one base station required");
  for (std::size_t i = 0; i < t.bs_list.size(); ++i) {
    if (t.bs_list[i].antennas < 1)
      throw ConfigError("topology.bs[" + std::to_string(i) + "].antennas must be >= 1");
    if (!finite(t.bs_list[i].position))
      throw ConfigError("topology.bs[" + std::to_string(i) + "].position not finite");
  }
  if (t.ris.elements < 1) throw ConfigError("topology.ris.elements must be >= 1");
  if (!finite(t.ris.position)) throw ConfigError("topology.ris.position not finite");
  for (std::size_t i = 0; i < t.obstacles.size(); ++i) {
    const auto& o = t.obstacles[i];
    if (o.corner_min.x > o.corner_max.x || o.corner_min.y > o.corner_max.y ||
        o.corner_min.z > o.corner_max.z)
      throw ConfigError("topology.obstacles[" + std::to_string(i) +
                        "]: corner_min must be <= corner_max componentwise");
  }
  for (std::size_t d = 0; d < t.devices.size(); ++d) {
    if (!finite(t.devices[d]))
      throw ConfigError("topology.devices[" + std::to_string(d) + "] not finite");
    for (std::size_t i = 0; i < t.obstacles.size(); ++i)
      if (t.obstacles[i].contains_interior(t.devices[d]))
        throw ConfigError("topology.devices[" + std::to_string(d) +
                          "] lies inside obstacle " + std::to_string(i));
  }
}

}  // namespace risiort
