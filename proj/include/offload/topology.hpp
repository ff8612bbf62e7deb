#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace offload {

struct Position3D {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

struct Bounds3D {
  double x = 100.0;
  double y = 100.0;
  double z = 100.0;
};

/// Euclidean distance in meters.
double distance(const Position3D& a, const Position3D& b);

/// Elevation angle in degrees of an airborne node seen from a ground node,
/// arcsin((air.z - ground.z) / distance), in (0, 90]. Throws ZeroDistance
/// if the positions coincide.
double elevation_angle_deg(const Position3D& ground, const Position3D& air);

/// Static 3D deployment of devices, UAVs, MEC server and eavesdropper.
/// Immutable after construction; safe to share read-only across runs.
struct NetworkTopology {
  std::vector<Position3D> device_positions;  // ground nodes, z = 0
  std::vector<Position3D> uav_positions;     // z > 0
  Position3D mec_position;
  Position3D eve_position;
  std::vector<int> association;     // device index -> uav index
  std::vector<int> devices_per_uav;  // N_m per uav

  int n_devices() const { return static_cast<int>(device_positions.size()); }
  int n_uavs() const { return static_cast<int>(uav_positions.size()); }
};

/// Uniform random deployment inside the bounding box. Devices are placed on
/// the ground plane (z = 0); UAVs, MEC and Eve get z uniform in (0, z_max].
/// Each device associates with its nearest UAV, ties to the lowest index.
/// Identical seed yields an identical topology.
NetworkTopology generate_topology(std::uint64_t seed, int n_devices, int n_uavs,
                                  const Bounds3D& bounds = {});

/// Recompute the nearest-UAV association for the given positions.
std::vector<int> associate_nearest(const std::vector<Position3D>& devices,
                                   const std::vector<Position3D>& uavs);

/// Plain-text export, one node per line: kind index x y z.
std::string export_topology(const NetworkTopology& topo);
NetworkTopology import_topology(const std::string& text);

}  // namespace offload
