#pragma once

// P2 triangular meshes for the channel and the half confined-cylinder geometry.

#include <array>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "logconf/tensor2.hpp"

namespace logconf {

enum class BoundaryTag : std::uint8_t { Inflow, Outflow, Wall, Cylinder, Symmetry };

inline constexpr std::array<BoundaryTag, 5> kAllBoundaryTags{BoundaryTag::Inflow, BoundaryTag::Outflow,
                                                              BoundaryTag::Wall, BoundaryTag::Cylinder,
                                                              BoundaryTag::Symmetry};

std::string_view to_string(BoundaryTag tag);

struct BoundaryEdge {
  std::array<int, 3> nodes{};  ///< end, end, mid
  BoundaryTag tag{BoundaryTag::Wall};
  int element{-1};
  int local_edge{-1};
  bool curved{false};
};

struct Mesh {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 6>> elements;  ///< 3 vertices (counter-clockwise), then midnodes 01, 12, 20
  std::vector<BoundaryEdge> boundary_edges;
  std::vector<std::uint8_t> affine;          ///< per element: 1 unless it owns a curved edge
  double cylinder_radius{0.0};               ///< 0 when the mesh has no cylinder; centre is the origin

  [[nodiscard]] int num_nodes() const { return static_cast<int>(nodes.size()); }
  [[nodiscard]] int num_elements() const { return static_cast<int>(elements.size()); }
  [[nodiscard]] bool has_tag(BoundaryTag tag) const;
};

class MeshError : public std::runtime_error {
 public:
  enum class Kind {
    Io,
    Parse,
    UnsupportedVersion,
    UnsupportedElementOrder,
    MissingPhysicalNames,
    MissingPhysicalGroup,
    InvertedElement,
    InvalidTopology,
    InvalidGeometry,
  };
  MeshError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  [[nodiscard]] Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

Mesh gen_channel_mesh(double length, double height, int nx, int ny);

/// Block layout of the cylinder mesh. Zero-valued counts are derived from n_cyl.
struct GradingParams {
  double upstream_length{15.0};    ///< in units of R
  double downstream_length{15.0};  ///< in units of R
  double height{2.0};              ///< channel half height in units of R
  double box_half_width{2.0};      ///< half width of the O-grid box in units of R
  int radial_layers{0};            ///< default n_cyl / 4
  double first_layer{0.5};         ///< first radial layer thickness relative to the arc spacing
  int upstream_columns{0};         ///< default round(20 n_cyl / 48)
  int downstream_columns{0};       ///< default round(37 n_cyl / 48)
};

Mesh gen_cylinder_mesh(double R, int n_cyl, const GradingParams& grading = {});

Mesh import_gmsh(const std::filesystem::path& path);
void export_gmsh(const Mesh& mesh, const std::filesystem::path& path);

/// h = sqrt(2 * area) of the vertex triangle.
double element_length(const Vec2& a, const Vec2& b, const Vec2& c);
double element_length(const Mesh& mesh, int element);
/// Signed area of the vertex triangle.
double element_area(const Mesh& mesh, int element);

/// Isoparametric map of an element at a reference point.
struct ElementMap {
  Vec2 x;
  Tensor2 jacobian;  ///< dx/dref, columns are d/dxi and d/deta
  double det{0.0};
};
ElementMap map_point(const Mesh& mesh, int element, const Vec2& ref);

/// Throws MeshError describing the first violated invariant.
void validate_mesh(const Mesh& mesh);

/// Length of the discrete cylinder boundary (isoparametric, 4-point Gauss per edge).
double cylinder_arc_length(const Mesh& mesh);

}  // namespace logconf
