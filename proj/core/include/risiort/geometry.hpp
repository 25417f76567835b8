#pragma once

#include <cstddef>
#include <vector>

namespace risiort {

struct Position {
  double x = 0.0;  // m
  double y = 0.0;  // m
  double z = 0.0;  // m

  friend bool operator==(const Position&, const Position&) = default;
};

double distance(const Position& a, const Position& b);

// Axis-aligned box; z extent may be degenerate for planar maps.
struct Obstacle {
  Position corner_min;
  Position corner_max;

  bool contains(const Position& p) const;           // closed box
  bool contains_interior(const Position& p) const;  // open in x/y
};

struct BaseStation {
  Position position;
  int antennas = 1;
};

struct RisPlacement {
  Position position;
  int elements = 1;
};

// Which links obstacles may block. Only the direct BS<->device link is
// blockable by default; the RIS is assumed deployed with clear views.
struct BlockageRules {
  bool direct = true;
  bool bs_ris = false;
  bool ris_device = false;
};

struct Topology {
  std::vector<BaseStation> bs_list;
  RisPlacement ris;
  std::vector<Position> devices;
  std::vector<Position> targets;
  std::vector<Obstacle> obstacles;
  BlockageRules blockage;
};

// Throws ConfigError naming the first violated invariant.
void validate_topology(const Topology& t);

// True iff the closed segment [a, b] touches any obstacle box (boundary
// contact counts as blocked).
bool los_blocked(const Topology& t, const Position& a, const Position& b);

bool segment_intersects_box(const Position& a, const Position& b, const Obstacle& box);

}  // namespace risiort
