#include "offload/topology.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "offload/errors.hpp"

namespace offload {

double distance(const Position3D& a, const Position3D& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double elevation_angle_deg(const Position3D& ground, const Position3D& air) {
  const double d = distance(ground, air);
  if (d == 0.0) {
    throw ZeroDistance("elevation_angle: coincident positions");
  }
  const double s = (air.z - ground.z) / d;
  return std::asin(s) * 180.0 / M_PI;
}

std::vector<int> associate_nearest(const std::vector<Position3D>& devices,
                                   const std::vector<Position3D>& uavs) {
  std::vector<int> assoc(devices.size(), 0);
  for (std::size_t n = 0; n < devices.size(); ++n) {
    double best = std::numeric_limits<double>::infinity();
    int best_m = 0;
    for (std::size_t m = 0; m < uavs.size(); ++m) {
      const double d = distance(devices[n], uavs[m]);
      if (d < best) {
        best = d;
        best_m = static_cast<int>(m);
      }
    }
    assoc[n] = best_m;
  }
  return assoc;
}

NetworkTopology generate_topology(std::uint64_t seed, int n_devices, int n_uavs,
                                  const Bounds3D& bounds) {
  // An empty device set is a legal degenerate deployment (idle slot).
  if (n_devices < 0 || n_uavs < 1) {
    throw ValidationError("generate_topology: need at least one UAV");
  }
  if (bounds.x <= 0.0 || bounds.y <= 0.0 || bounds.z <= 0.0) {
    throw ValidationError("generate_topology: bounds must be positive");
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.0, bounds.x);
  std::uniform_real_distribution<double> uy(0.0, bounds.y);
  std::uniform_real_distribution<double> uz(0.0, bounds.z);

  auto ground_point = [&] { return Position3D{ux(rng), uy(rng), 0.0}; };
  auto air_point = [&] {
    // z uniform in (0, z_max]: flip the half-open interval.
    return Position3D{ux(rng), uy(rng), bounds.z - uz(rng)};
  };

  NetworkTopology topo;
  topo.device_positions.reserve(n_devices);
  for (int n = 0; n < n_devices; ++n) topo.device_positions.push_back(ground_point());
  topo.uav_positions.reserve(n_uavs);
  for (int m = 0; m < n_uavs; ++m) topo.uav_positions.push_back(air_point());
  topo.mec_position = air_point();
  topo.eve_position = air_point();

  topo.association = associate_nearest(topo.device_positions, topo.uav_positions);
  topo.devices_per_uav.assign(n_uavs, 0);
  for (int m : topo.association) ++topo.devices_per_uav[m];
  return topo;
}

std::string export_topology(const NetworkTopology& topo) {
  std::ostringstream out;
  out.precision(17);
  auto line = [&out](const char* kind, int idx, const Position3D& p) {
    out << kind << ' ' << idx << ' ' << p.x << ' ' << p.y << ' ' << p.z << '\n';
  };
  for (int n = 0; n < topo.n_devices(); ++n) line("device", n, topo.device_positions[n]);
  for (int m = 0; m < topo.n_uavs(); ++m) line("uav", m, topo.uav_positions[m]);
  line("mec", 0, topo.mec_position);
  line("eve", 0, topo.eve_position);
  return out.str();
}

NetworkTopology import_topology(const std::string& text) {
  NetworkTopology topo;
  std::istringstream in(text);
  std::string kind;
  int idx;
  Position3D p;
  while (in >> kind >> idx >> p.x >> p.y >> p.z) {
    if (kind == "device") {
      topo.device_positions.push_back(p);
    } else if (kind == "uav") {
      topo.uav_positions.push_back(p);
    } else if (kind == "mec") {
      topo.mec_position = p;
    } else if (kind == "eve") {
      topo.eve_position = p;
    } else {
      throw ParseError("import_topology: unknown node kind '" + kind + "'");
    }
  }
  if (topo.device_positions.empty() || topo.uav_positions.empty()) {
    throw ParseError("import_topology: missing device or uav entries");
  }
  topo.association = associate_nearest(topo.device_positions, topo.uav_positions);
  topo.devices_per_uav.assign(topo.n_uavs(), 0);
  for (int m : topo.association) ++topo.devices_per_uav[m];
  return topo;
}

}  // namespace offload
