#include "logsob/mesh_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace logsob {

namespace {

std::string lower_ext(const std::string& path) {
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos) return "";
    std::string ext = path.substr(dot + 1);
    for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return ext;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Strips comments and returns whitespace tokens.
std::vector<std::string> tokenize(const std::string& text, char comment) {
    std::vector<std::string> tokens;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        const auto pos = line.find(comment);
        if (pos != std::string::npos) line.erase(pos);
        std::istringstream ls(line);
        std::string tok;
        while (ls >> tok) tokens.push_back(tok);
    }
    return tokens;
}

EmbeddedMesh read_off(const std::string& text) {
    auto tokens = tokenize(text, '#');
    std::size_t pos = 0;
    auto next = [&]() -> const std::string& {
        if (pos >= tokens.size()) throw Error(ErrorCode::ParseError, "truncated OFF file");
        return tokens[pos++];
    };
    if (next() != "OFF") throw Error(ErrorCode::ParseError, "missing OFF header");
    const int nv = std::stoi(next());
    const int nf = std::stoi(next());
    next(); // edge count, ignored
    Eigen::MatrixXd verts(nv, 3);
    for (int i = 0; i < nv; ++i)
        for (int j = 0; j < 3; ++j) verts(i, j) = std::stod(next());
    Eigen::MatrixXi cells(nf, 3);
    for (int i = 0; i < nf; ++i) {
        const int arity = std::stoi(next());
        if (arity != 3) throw Error(ErrorCode::ParseError, "only triangle faces are supported");
        for (int j = 0; j < 3; ++j) cells(i, j) = std::stoi(next());
    }
    return build_mesh(verts, cells, 3);
}

EmbeddedMesh read_obj(const std::string& text) {
    std::vector<Eigen::RowVector3d> verts;
    std::vector<Eigen::RowVector3i> faces;
    std::istringstream lines(text);
    std::string line;
    auto face_index = [](const std::string& tok) {
        // "v", "v/vt", "v/vt/vn", "v//vn" all start with the vertex index
        return std::stoi(tok.substr(0, tok.find('/')));
    };
    while (std::getline(lines, line)) {
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag == "v") {
            Eigen::RowVector3d p;
            ls >> p(0) >> p(1) >> p(2);
            verts.push_back(p);
        } else if (tag == "f") {
            std::vector<int> idx;
            std::string tok;
            while (ls >> tok) idx.push_back(face_index(tok) - 1);
            if (idx.size() != 3) throw Error(ErrorCode::ParseError, "only triangle faces are supported");
            faces.emplace_back(idx[0], idx[1], idx[2]);
        }
    }
    Eigen::MatrixXd V(static_cast<Eigen::Index>(verts.size()), 3);
    for (std::size_t i = 0; i < verts.size(); ++i) V.row(static_cast<Eigen::Index>(i)) = verts[i];
    Eigen::MatrixXi F(static_cast<Eigen::Index>(faces.size()), 3);
    for (std::size_t i = 0; i < faces.size(); ++i) F.row(static_cast<Eigen::Index>(i)) = faces[i];
    return build_mesh(V, F, 3);
}

} // namespace

EmbeddedMesh read_mesh_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
    if (!j.contains("ambient_dim") || !j.contains("vertices") || !j.contains("cells"))
        throw Error(ErrorCode::ParseError, "mesh JSON needs ambient_dim, vertices, cells");
    const int ambient = j["ambient_dim"].get<int>();
    const auto& jv = j["vertices"];
    const auto& jc = j["cells"];
    if (jv.empty() || jc.empty()) throw Error(ErrorCode::ParseError, "empty vertices or cells");
    Eigen::MatrixXd verts(static_cast<Eigen::Index>(jv.size()), ambient);
    for (std::size_t i = 0; i < jv.size(); ++i) {
        if (static_cast<int>(jv[i].size()) != ambient)
            throw Error(ErrorCode::ParseError, "vertex coordinate count mismatch");
        for (int k = 0; k < ambient; ++k) verts(static_cast<Eigen::Index>(i), k) = jv[i][k].get<double>();
    }
    const int arity = static_cast<int>(jc[0].size());
    Eigen::MatrixXi cells(static_cast<Eigen::Index>(jc.size()), arity);
    for (std::size_t i = 0; i < jc.size(); ++i) {
        if (static_cast<int>(jc[i].size()) != arity)
            throw Error(ErrorCode::ParseError, "mixed cell arities");
        for (int k = 0; k < arity; ++k) cells(static_cast<Eigen::Index>(i), k) = jc[i][k].get<int>();
    }
    return build_mesh(verts, cells, ambient);
}

EmbeddedMesh read_mesh(const std::string& path) {
    const std::string ext = lower_ext(path);
    const std::string text = slurp(path);
    if (ext == "off") return read_off(text);
    if (ext == "obj") return read_obj(text);
    if (ext == "json") return read_mesh_json(text);
    throw Error(ErrorCode::IoError, "unsupported mesh format: " + path);
}

std::string mesh_to_json(const EmbeddedMesh& mesh) {
    nlohmann::ordered_json j;
    j["ambient_dim"] = mesh.ambient_dim;
    auto& jv = j["vertices"] = nlohmann::json::array();
    for (Eigen::Index i = 0; i < mesh.num_vertices(); ++i) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (int k = 0; k < mesh.ambient_dim; ++k) row.push_back(mesh.vertices(i, k));
        jv.push_back(std::move(row));
    }
    auto& jc = j["cells"] = nlohmann::json::array();
    for (Eigen::Index c = 0; c < mesh.num_cells(); ++c) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        for (int k = 0; k <= mesh.intrinsic_dim; ++k) row.push_back(mesh.cells(c, k));
        jc.push_back(std::move(row));
    }
    return j.dump(2);
}

void write_mesh(const EmbeddedMesh& mesh, const std::string& path) {
    const std::string ext = lower_ext(path);
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
    if (ext == "off") {
        if (mesh.intrinsic_dim != 2 || mesh.ambient_dim != 3)
            throw Error(ErrorCode::IoError, "OFF output requires a surface in R^3");
        out << "OFF\n" << mesh.num_vertices() << " " << mesh.num_cells() << " 0\n";
        out.precision(17);
        for (Eigen::Index i = 0; i < mesh.num_vertices(); ++i)
            out << mesh.vertices(i, 0) << " " << mesh.vertices(i, 1) << " " << mesh.vertices(i, 2) << "\n";
        for (Eigen::Index c = 0; c < mesh.num_cells(); ++c)
            out << "3 " << mesh.cells(c, 0) << " " << mesh.cells(c, 1) << " " << mesh.cells(c, 2) << "\n";
    } else if (ext == "json") {
        out << mesh_to_json(mesh) << "\n";
    } else {
        throw Error(ErrorCode::IoError, "unsupported mesh output format: " + path);
    }
}

} // namespace logsob
