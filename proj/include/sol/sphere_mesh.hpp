#pragma once

// Metric spheres S_L of Sol as triangulated meshes: the exponential image of
// the Lie-algebra sphere for L < pi*sqrt(2), and of the 4-holed sphere
// S''_L = S'_L n (N' u dN') with its fold loops glued 2-to-1 for larger L.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sol/core.hpp"
#include "sol/specfun.hpp"

namespace sol {

enum class VertexTag : std::uint8_t { Smooth = 0, Singular = 1, Cusp = 2 };

struct SphereMesh {
  double L = 0.0;
  struct Vertex {
    SolPoint p;
    VertexTag tag = VertexTag::Smooth;
  };
  std::vector<Vertex> vertices;
  std::vector<std::array<int, 3>> faces;
  /// Ordered vertex chains of the singular arcs (empty for L <= pi*sqrt(2)).
  std::vector<std::vector<int>> singular_arcs;
};

struct SphereBuildOptions {
  double dt = 2e-3;  ///< integrator step for the exponential pushforward
  int threads = 0;   ///< 0 = hardware concurrency
};

/// Builds the metric sphere of radius L. resolution controls the grid:
/// roughly `resolution` longitude columns and 2*resolution latitude rows.
/// Throws InputError when the resolution cannot resolve the fold loops.
SphereMesh build_sphere(double L, int resolution, const SphereBuildOptions& opts = {});

/// One fold loop of the clipped Lie-algebra sphere, with partner-matched
/// samples: upper[i] and lower[i] are (x,y,+z) and (x,y,-z) scaled to
/// length L, so the 2-to-1 gluing is exact by construction.
struct BoundaryLoop {
  Sector sector;
  std::vector<TangentVector> upper;
  std::vector<TangentVector> lower;
};

struct ClippedSphere {
  double L = 0.0;
  LoopLevelSet level;
  std::vector<BoundaryLoop> loops;
};

/// Returns the boundary data of the 4-holed sphere domain for L > pi*sqrt(2):
/// the four loops homothetic to the loop level set of period L.
ClippedSphere clip_lie_sphere(double L, int resolution);

enum class MeshFormat { OBJ, PLY, CSV };

void export_mesh(const SphereMesh& mesh, MeshFormat format, std::ostream& out);
void export_mesh(const SphereMesh& mesh, MeshFormat format, const std::string& path);

}  // namespace sol
