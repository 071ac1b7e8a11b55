#include "cvfe/mesh.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace cvfe {

namespace {

// gmsh element type ids
constexpr int kLine = 1;
constexpr int kTriangle = 2;
constexpr int kPoint = 15;

bool is_2d_type(int type)
{
    // 3: quad, 9: 6-node triangle, 10: 9-node quad, 16: 8-node quad, 20-25: high-order triangles
    return type == 3 || type == 9 || type == 10 || type == 16 || (type >= 20 && type <= 25);
}

std::string lowercase(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

class LineReader {
  public:
    explicit LineReader(std::istream& in) : in_(in) {}

    bool next(std::string& line)
    {
        if (!std::getline(in_, line))
            return false;
        ++number_;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        return true;
    }

    std::string expect(const char* what)
    {
        std::string line;
        if (!next(line))
            throw ParseError(std::string("unexpected end of file, expected ") + what, number_ + 1);
        return line;
    }

    std::size_t number() const { return number_; }

  private:
    std::istream& in_;
    std::size_t number_ = 0;
};

template <class T>
T parse_count(const std::string& line, std::size_t number, const char* what)
{
    std::istringstream ss(line);
    T value{};
    if (!(ss >> value))
        throw ParseError(std::string("cannot parse ") + what, number);
    return value;
}

} // namespace

Mesh read_msh(const std::filesystem::path& path)
{
    std::ifstream file(path);
    if (!file)
        throw std::runtime_error("read_msh: cannot open " + path.string());
    LineReader reader(file);

    Mesh mesh;
    std::unordered_map<long, Index> node_index;
    std::vector<Point> nodes;
    std::vector<std::array<Index, 3>> triangles;
    std::vector<BoundaryFacet> facets;
    std::map<int, std::string> names;
    bool have_format = false;

    std::string line;
    while (reader.next(line)) {
        if (line.empty())
            continue;
        if (line == "$MeshFormat") {
            const std::string header = reader.expect("format header");
            std::istringstream ss(header);
            std::string version;
            int file_type = -1;
            int data_size = 0;
            if (!(ss >> version >> file_type >> data_size))
                throw ParseError("malformed $MeshFormat header", reader.number());
            if (file_type != 0)
                throw ParseError("binary unsupported (only ASCII MSH 2.2 is read)", reader.number());
            if (version.rfind("2.2", 0) != 0)
                throw ParseError("unsupported MSH version " + version + " (need 2.2)", reader.number());
            if (reader.expect("$EndMeshFormat") != "$EndMeshFormat")
                throw ParseError("expected $EndMeshFormat", reader.number());
            have_format = true;
        }
        else if (line == "$PhysicalNames") {
            const auto count = parse_count<long>(reader.expect("physical name count"), reader.number(), "physical name count");
            for (long i = 0; i < count; ++i) {
                const std::string entry = reader.expect("physical name");
                std::istringstream ss(entry);
                int dim = 0, tag = 0;
                std::string name;
                if (!(ss >> dim >> tag))
                    throw ParseError("malformed physical name", reader.number());
                std::getline(ss >> std::ws, name);
                if (name.size() >= 2 && name.front() == '"' && name.back() == '"')
                    name = name.substr(1, name.size() - 2);
                if (dim == 1)
                    names[tag] = name;
            }
            if (reader.expect("$EndPhysicalNames") != "$EndPhysicalNames")
                throw ParseError("expected $EndPhysicalNames", reader.number());
        }
        else if (line == "$Nodes") {
            if (!have_format)
                throw ParseError("$Nodes before $MeshFormat", reader.number());
            const auto count = parse_count<long>(reader.expect("node count"), reader.number(), "node count");
            nodes.reserve(static_cast<std::size_t>(count));
            for (long i = 0; i < count; ++i) {
                const std::string entry = reader.expect("node");
                std::istringstream ss(entry);
                long id = 0;
                double x = 0, y = 0, z = 0;
                if (!(ss >> id >> x >> y >> z))
                    throw ParseError("malformed node entry", reader.number());
                if (z != 0.0)
                    throw ParseError("nonzero z-coordinate; only planar 2D meshes are supported", reader.number());
                node_index[id] = static_cast<Index>(nodes.size());
                nodes.emplace_back(x, y);
            }
            if (reader.expect("$EndNodes") != "$EndNodes")
                throw ParseError("expected $EndNodes", reader.number());
        }
        else if (line == "$Elements") {
            if (!have_format)
                throw ParseError("$Elements before $MeshFormat", reader.number());
            const auto count = parse_count<long>(reader.expect("element count"), reader.number(), "element count");
            for (long i = 0; i < count; ++i) {
                const std::string entry = reader.expect("element");
                std::istringstream ss(entry);
                long id = 0;
                int type = 0, ntags = 0;
                if (!(ss >> id >> type >> ntags))
                    throw ParseError("malformed element entry", reader.number());
                std::vector<int> tags(static_cast<std::size_t>(std::max(ntags, 0)));
                for (auto& tag : tags)
                    if (!(ss >> tag))
                        throw ParseError("malformed element tags", reader.number());
                const auto read_nodes = [&](int n) {
                    std::vector<Index> out(static_cast<std::size_t>(n));
                    for (auto& v : out) {
                        long node = 0;
                        if (!(ss >> node))
                            throw ParseError("malformed element node list", reader.number());
                        const auto it = node_index.find(node);
                        if (it == node_index.end())
                            throw ParseError("element references unknown node " + std::to_string(node), reader.number());
                        v = it->second;
                    }
                    return out;
                };
                if (type == kTriangle) {
                    const auto v = read_nodes(3);
                    triangles.push_back({v[0], v[1], v[2]});
                }
                else if (type == kLine) {
                    const auto v = read_nodes(2);
                    facets.push_back({{v[0], v[1]}, tags.empty() ? 0 : tags[0]});
                }
                else if (type == kPoint) {
                    continue;
                }
                else if (is_2d_type(type)) {
                    throw ParseError("non-triangle 2D element of gmsh type " + std::to_string(type), reader.number());
                }
                else {
                    throw ParseError("unsupported element type " + std::to_string(type), reader.number());
                }
            }
            if (reader.expect("$EndElements") != "$EndElements")
                throw ParseError("expected $EndElements", reader.number());
        }
        else if (line.front() == '$') {
            // skip unknown sections
            const std::string end = "$End" + line.substr(1);
            std::string inner;
            while (reader.next(inner) && inner != end) {
            }
        }
    }
    if (!have_format)
        throw ParseError("missing $MeshFormat section", reader.number());
    if (triangles.empty())
        throw ParseError("no triangle elements found", reader.number());

    // drop nodes that belong to no triangle (geometry points)
    std::vector<Index> remap(nodes.size(), -1);
    for (const auto& t : triangles)
        for (Index v : t)
            remap[v] = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (remap[i] == 0) {
            remap[i] = static_cast<Index>(mesh.vertices.size());
            mesh.vertices.push_back(nodes[i]);
        }
    for (auto t : triangles) {
        for (auto& v : t)
            v = remap[v];
        if (signed_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]) < 0.0)
            std::swap(t[1], t[2]);
        mesh.triangles.push_back(t);
    }
    for (auto facet : facets) {
        for (auto& v : facet.vertices) {
            if (remap[v] < 0)
                throw InvalidMesh("boundary line references a node outside the triangulation");
            v = remap[v];
        }
        mesh.boundary_facets.push_back(facet);
        if (!mesh.markers.contains(facet.marker)) {
            const auto it = names.find(facet.marker);
            const bool neumann = it != names.end() && lowercase(it->second).find("neumann") != std::string::npos;
            mesh.markers[facet.marker] = neumann ? BoundaryKind::Neumann : BoundaryKind::Dirichlet;
        }
    }
    mesh.marker_names = std::move(names);
    validate(mesh);
    return mesh;
}

} // namespace cvfe
