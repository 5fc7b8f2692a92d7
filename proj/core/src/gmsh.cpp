#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <unordered_map>

#include "logconf/fem/reference.hpp"
#include "logconf/mesh.hpp"

// Gmsh MSH 2.2 ASCII reader and writer.

namespace logconf {

namespace {

using K = MeshError::Kind;

constexpr int kLine3 = 8;
constexpr int kTriangle6 = 9;
constexpr int kPoint = 15;
constexpr int kFluidPhysical = 100;

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::optional<BoundaryTag> tag_from_name(const std::string& name) {
  const std::string n = lower(name);
  for (BoundaryTag t : kAllBoundaryTags) {
    if (n == to_string(t)) return t;
  }
  return std::nullopt;
}

int element_order_violation(int type) {
  // first-order or higher-order variants of lines and triangles
  switch (type) {
    case 1: case 2: case 21: case 22: case 23: case 24: case 25: case 26: case 27: case 28: return 1;
    default: return 0;
  }
}

struct Reader {
  std::istream& in;
  std::string path;

  std::string token() {
    std::string t;
    if (!(in >> t)) throw MeshError(K::Parse, path + ": unexpected end of file");
    return t;
  }
  template <class T>
  T number() {
    T v{};
    if (!(in >> v)) throw MeshError(K::Parse, path + ": malformed number");
    return v;
  }
  void expect(const std::string& word) {
    const std::string t = token();
    if (t != word) throw MeshError(K::Parse, path + ": expected " + word + ", found " + t);
  }
};

}  // namespace

Mesh import_gmsh(const std::filesystem::path& path) {
  std::ifstream file(path);
  if (!file) throw MeshError(K::Io, "cannot open mesh file " + path.string());
  Reader r{file, path.string()};

  std::map<int, std::string> physical_names;  // 1D and 2D names by tag
  bool have_names = false;
  std::unordered_map<long, int> node_index;
  std::vector<Vec2> nodes;
  struct RawLine { std::array<long, 3> n; int phys; };
  struct RawTri { std::array<long, 6> n; };
  std::vector<RawLine> lines;
  std::vector<RawTri> tris;

  std::string section;
  while (file >> section) {
    if (section == "$MeshFormat") {
      const std::string version = r.token();
      const int file_type = r.number<int>();
      r.number<int>();
      if (version.rfind("2.2", 0) != 0) throw MeshError(K::UnsupportedVersion, r.path + ": unsupported MSH version " + version + " (need 2.2)");
      if (file_type != 0) throw MeshError(K::UnsupportedVersion, r.path + ": binary MSH files are not supported");
      r.expect("$EndMeshFormat");
    } else if (section == "$PhysicalNames") {
      have_names = true;
      const int count = r.number<int>();
      for (int i = 0; i < count; ++i) {
        r.number<int>();
        const int tag = r.number<int>();
        std::string name;
        file >> std::ws;
        std::getline(file, name);
        name.erase(std::remove(name.begin(), name.end(), '"'), name.end());
        while (!name.empty() && std::isspace(static_cast<unsigned char>(name.back()))) name.pop_back();
        physical_names[tag] = name;
      }
      r.expect("$EndPhysicalNames");
    } else if (section == "$Nodes") {
      const int count = r.number<int>();
      for (int i = 0; i < count; ++i) {
        const long id = r.number<long>();
        const double x = r.number<double>();
        const double y = r.number<double>();
        r.number<double>();
        node_index[id] = static_cast<int>(nodes.size());
        nodes.push_back({x, y});
      }
      r.expect("$EndNodes");
    } else if (section == "$Elements") {
      const int count = r.number<int>();
      for (int i = 0; i < count; ++i) {
        r.number<long>();
        const int type = r.number<int>();
        const int ntags = r.number<int>();
        std::vector<int> tags(ntags);
        for (int& t : tags) t = r.number<int>();
        const int phys = ntags > 0 ? tags[0] : 0;
        if (type == kLine3) {
          RawLine l{{r.number<long>(), r.number<long>(), r.number<long>()}, phys};
          lines.push_back(l);
        } else if (type == kTriangle6) {
          RawTri t{};
          for (long& n : t.n) n = r.number<long>();
          tris.push_back(t);
        } else if (type == kPoint) {
          r.number<long>();
        } else if (element_order_violation(type)) {
          throw MeshError(K::UnsupportedElementOrder,
                          r.path + ": unsupported element order (type " + std::to_string(type) +
                              "); need 6-node triangles and 3-node lines");
        } else {
          throw MeshError(K::Parse, r.path + ": unsupported element type " + std::to_string(type));
        }
      }
      r.expect("$EndElements");
    } else if (!section.empty() && section[0] == '$' && section.rfind("$End", 0) != 0) {
      // skip unknown sections
      const std::string end = "$End" + section.substr(1);
      std::string t;
      while (file >> t && t != end) {}
    } else {
      throw MeshError(K::Parse, r.path + ": unexpected token " + section);
    }
  }
  if (tris.empty()) throw MeshError(K::Parse, r.path + ": no 6-node triangles found");
  if (!have_names) throw MeshError(K::MissingPhysicalNames, r.path + ": no $PhysicalNames section");

  std::map<int, BoundaryTag> phys_tag;
  for (const auto& [tag, name] : physical_names) {
    if (auto t = tag_from_name(name)) phys_tag[tag] = *t;
  }
  for (BoundaryTag required : {BoundaryTag::Inflow, BoundaryTag::Outflow, BoundaryTag::Wall, BoundaryTag::Symmetry}) {
    const bool present = std::any_of(phys_tag.begin(), phys_tag.end(), [&](const auto& kv) { return kv.second == required; });
    if (!present) {
      throw MeshError(K::MissingPhysicalGroup, r.path + ": missing physical group \"" + std::string(to_string(required)) + "\"");
    }
  }

  // compact: keep only nodes used by triangles, in file order
  const auto lookup = [&](long id) {
    const auto it = node_index.find(id);
    if (it == node_index.end()) throw MeshError(K::Parse, r.path + ": element references unknown node " + std::to_string(id));
    return it->second;
  };
  std::vector<int> remap(nodes.size(), -1);
  for (const RawTri& t : tris) {
    for (long id : t.n) remap[lookup(id)] = 0;
  }
  Mesh mesh;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (remap[i] == 0) {
      remap[i] = mesh.num_nodes();
      mesh.nodes.push_back(nodes[i]);
    }
  }
  for (const RawTri& t : tris) {
    std::array<int, 6> conn{};
    for (int a = 0; a < 6; ++a) conn[a] = remap[lookup(t.n[a])];
    mesh.elements.push_back(conn);
    const int e = mesh.num_elements() - 1;
    const double area = element_area(mesh, e);
    if (!(area > 0.0)) {
      throw MeshError(K::InvertedElement, r.path + ": element " + std::to_string(e) + " is inverted or degenerate");
    }
  }
  mesh.affine.assign(mesh.elements.size(), 1);

  std::map<std::pair<int, int>, std::pair<int, int>> edge_owner;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    for (int le = 0; le < 3; ++le) {
      int a = mesh.elements[e][fem::kElementEdges[le][0]];
      int b = mesh.elements[e][fem::kElementEdges[le][1]];
      if (a > b) std::swap(a, b);
      edge_owner[{a, b}] = {e, le};
    }
  }
  double radius_sum = 0.0;
  int radius_count = 0;
  for (const RawLine& l : lines) {
    const auto pt = phys_tag.find(l.phys);
    if (pt == phys_tag.end()) {
      const auto nm = physical_names.find(l.phys);
      throw MeshError(K::MissingPhysicalGroup, r.path + ": boundary line has unknown physical group " +
                                                  (nm != physical_names.end() ? "\"" + nm->second + "\"" : std::to_string(l.phys)));
    }
    const int a = remap[lookup(l.n[0])];
    const int b = remap[lookup(l.n[1])];
    const int m = remap[lookup(l.n[2])];
    if (a < 0 || b < 0 || m < 0) throw MeshError(K::InvalidTopology, r.path + ": boundary line is not attached to a triangle");
    const auto it = edge_owner.find({std::min(a, b), std::max(a, b)});
    if (it == edge_owner.end()) throw MeshError(K::InvalidTopology, r.path + ": boundary line is not an element edge");
    const auto [e, le] = it->second;
    BoundaryEdge edge;
    edge.nodes = {mesh.elements[e][fem::kElementEdges[le][0]], mesh.elements[e][fem::kElementEdges[le][1]], m};
    edge.tag = pt->second;
    edge.element = e;
    edge.local_edge = le;
    edge.curved = edge.tag == BoundaryTag::Cylinder;
    if (edge.curved) {
      mesh.affine[e] = 0;
      for (int n : edge.nodes) {
        radius_sum += norm(mesh.nodes[n]);
        ++radius_count;
      }
    }
    mesh.boundary_edges.push_back(edge);
  }
  if (radius_count > 0) mesh.cylinder_radius = radius_sum / radius_count;
  validate_mesh(mesh);
  return mesh;
}

void export_gmsh(const Mesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw MeshError(K::Io, "cannot write mesh file " + path.string());
  out << std::setprecision(17);
  out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";
  out << "$PhysicalNames\n" << kAllBoundaryTags.size() + 1 << "\n";
  for (BoundaryTag t : kAllBoundaryTags) out << "1 " << static_cast<int>(t) + 1 << " \"" << to_string(t) << "\"\n";
  out << "2 " << kFluidPhysical << " \"fluid\"\n$EndPhysicalNames\n";
  out << "$Nodes\n" << mesh.nodes.size() << "\n";
  for (int i = 0; i < mesh.num_nodes(); ++i) out << i + 1 << ' ' << mesh.nodes[i].x << ' ' << mesh.nodes[i].y << " 0\n";
  out << "$EndNodes\n";
  out << "$Elements\n" << mesh.boundary_edges.size() + mesh.elements.size() << "\n";
  long id = 1;
  for (const BoundaryEdge& b : mesh.boundary_edges) {
    const int phys = static_cast<int>(b.tag) + 1;
    out << id++ << ' ' << kLine3 << " 2 " << phys << ' ' << phys;
    for (int n : b.nodes) out << ' ' << n + 1;
    out << '\n';
  }
  for (const auto& conn : mesh.elements) {
    out << id++ << ' ' << kTriangle6 << " 2 " << kFluidPhysical << " 1";
    for (int n : conn) out << ' ' << n + 1;
    out << '\n';
  }
  out << "$EndElements\n";
  if (!out) throw MeshError(K::Io, "failed while writing " + path.string());
}

}  // namespace logconf
