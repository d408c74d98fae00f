#include "posctl/io.hpp"

#include "posctl/error.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

namespace posctl::io {

namespace {

std::string position(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, position(text, e.byte == 0 ? 0 : e.byte - 1) + ": " + e.what());
    }
}

double to_double(const json& v, const std::string& where) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf") return kInf;
        if (s == "-inf") return -kInf;
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    }
    throw Error(ErrorCode::InvalidArgument, where + ": expected a number");
}

Matrix to_matrix(const json& v, const std::string& name) {
    if (!v.is_array() || v.empty()) throw Error(ErrorCode::InvalidArgument, name + " must be a nonempty array of rows");
    const auto rows = static_cast<Eigen::Index>(v.size());
    if (!v[0].is_array() || v[0].empty()) throw Error(ErrorCode::InvalidArgument, name + " rows must be nonempty arrays");
    const auto cols = static_cast<Eigen::Index>(v[0].size());
    Matrix M(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const json& row = v[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            throw Error(ErrorCode::InvalidArgument, name + " is ragged at row " + std::to_string(i + 1));
        }
        for (Eigen::Index j = 0; j < cols; ++j) {
            M(i, j) = to_double(row[static_cast<std::size_t>(j)],
                                name + "[" + std::to_string(i + 1) + "][" + std::to_string(j + 1) + "]");
        }
    }
    return M;
}

Matrix matrix_or_identity(const json& obj, const char* key, Eigen::Index n) {
    if (!obj.contains(key)) throw Error(ErrorCode::InvalidArgument, std::string("missing \"") + key + "\"");
    const json& v = obj[key];
    if (v.is_string() && v.get<std::string>() == "identity") return Matrix::Identity(n, n);
    return to_matrix(v, key);
}

int node_index(const json& v, int n, const std::string& where) {
    if (!v.is_number_integer()) throw Error(ErrorCode::InvalidArgument, where + " must be an integer node number");
    const int k = v.get<int>();
    if (k < 1 || k > n) throw Error(ErrorCode::InvalidArgument, where + " = " + std::to_string(k) + " out of range 1.." + std::to_string(n));
    return k - 1;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

double parse_number(const std::string& s, const std::string& where) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError, where + ": '" + s + "' is not a number");
    }
}

json one_based(const std::vector<int>& v) {
    json a = json::array();
    for (int i : v) a.push_back(i + 1);
    return a;
}

}  // namespace

PositiveSystem parse_system(const std::string& text) {
    const json j = parse_json(text);
    if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "system file must hold a JSON object");
    if (!j.contains("A")) throw Error(ErrorCode::InvalidArgument, "missing \"A\"");
    PositiveSystem sys;
    sys.A = to_matrix(j["A"], "A");
    sys.B = matrix_or_identity(j, "B", sys.A.rows());
    sys.C = matrix_or_identity(j, "C", sys.A.rows());
    if (!j.contains("D")) throw Error(ErrorCode::InvalidArgument, "missing \"D\"");
    sys.D = to_matrix(j["D"], "D");
    return sys;
}

DirectedNetwork parse_network_json(const std::string& text) {
    const json j = parse_json(text);
    if (!j.is_object() || !j.contains("n") || !j["n"].is_number_integer()) {
        throw Error(ErrorCode::InvalidArgument, "network needs an integer \"n\"");
    }
    const int n = j["n"].get<int>();
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "\"n\" must be positive");
    std::vector<Edge> edges;
    if (j.contains("edges")) {
        if (!j["edges"].is_array()) throw Error(ErrorCode::InvalidArgument, "\"edges\" must be an array");
        std::size_t k = 0;
        for (const json& e : j["edges"]) {
            ++k;
            const std::string where = "edge " + std::to_string(k);
            if (!e.is_object() || !e.contains("from") || !e.contains("to")) {
                throw Error(ErrorCode::InvalidArgument, where + " needs \"from\" and \"to\"");
            }
            const double w = e.contains("w") ? to_double(e["w"], where + " w") : 1.0;
            edges.push_back({node_index(e["from"], n, where + " from"), node_index(e["to"], n, where + " to"), w});
        }
    }
    return DirectedNetwork(n, std::move(edges));
}

DirectedNetwork parse_network_csv(const std::string& text) {
    std::stringstream ss(text);
    std::string line;
    int line_no = 0;
    bool header = false;
    std::vector<std::array<double, 3>> rows;
    int max_node = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto cells = split(line, ',');
        if (!header) {
            if (cells.size() < 2 || cells[0] != "from" || cells[1] != "to" || (cells.size() == 3 && cells[2] != "w") ||
                cells.size() > 3) {
                throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ", column 1: expected header from,to,w");
            }
            header = true;
            continue;
        }
        if (cells.size() < 2 || cells.size() > 3) {
            throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ", column 1: expected from,to[,w]");
        }
        const std::string where = "line " + std::to_string(line_no);
        const double f = parse_number(cells[0], where + ", column 1");
        const double t = parse_number(cells[1], where + ", column 2");
        const double w = cells.size() == 3 ? parse_number(cells[2], where + ", column 3") : 1.0;
        if (f != std::floor(f) || t != std::floor(t) || f < 1 || t < 1) {
            throw Error(ErrorCode::InvalidArgument, where + ": node numbers must be positive integers");
        }
        rows.push_back({f, t, w});
        max_node = std::max({max_node, static_cast<int>(f), static_cast<int>(t)});
    }
    if (!header) throw Error(ErrorCode::ParseError, "line 1, column 1: empty CSV");
    std::vector<Edge> edges;
    for (const auto& r : rows) edges.push_back({static_cast<int>(r[0]) - 1, static_cast<int>(r[1]) - 1, r[2]});
    return DirectedNetwork(std::max(max_node, 1), std::move(edges));
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ParseError, "cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

PositiveSystem load_system(const std::string& path) { return parse_system(read_file(path)); }

DirectedNetwork load_network(const std::string& path) {
    const std::string text = read_file(path);
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0) return parse_network_csv(text);
    return parse_network_json(text);
}

Vector parse_vector(const std::string& text) {
    std::string s = trim(text);
    if (!s.empty() && s.front() == '[') {
        if (s.back() != ']') throw Error(ErrorCode::ParseError, "unterminated vector '" + text + "'");
        s = s.substr(1, s.size() - 2);
    }
    const auto cells = split(s, ',');
    Vector v(static_cast<Eigen::Index>(cells.size()));
    for (std::size_t i = 0; i < cells.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = parse_number(cells[i], "entry " + std::to_string(i + 1));
    }
    if (v.size() == 0) throw Error(ErrorCode::ParseError, "empty vector");
    return v;
}

json number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

json to_json(const Vector& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v(i)));
    return a;
}

json to_json(const Matrix& M) {
    json a = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) a.push_back(to_json(Vector(M.row(i).transpose())));
    return a;
}

json to_json(const SubgradientBundle& b, bool one_based_idx) {
    json blocks = json::array();
    for (const auto& blk : b.blocks) {
        blocks.push_back({{"block", blk.block + (one_based_idx ? 1 : 0)},
                          {"value", number(blk.value)},
                          {"gradient", to_json(blk.gradient)}});
    }
    return {{"value", number(b.value)}, {"tie_tolerance", number(b.tie_tolerance)}, {"active_blocks", blocks}};
}

json to_json(const SolveReport& r) {
    json trace = json::array();
    for (double t : r.trace) trace.push_back(number(t));
    return {{"u", to_json(r.u)},
            {"objective", r.trace.empty() ? json(nullptr) : number(r.trace.back())},
            {"stationarity", number(r.stationarity)},
            {"iterations", r.iterations},
            {"termination", std::string(to_string(r.termination))},
            {"trace", trace}};
}

json to_json(const LeaderResult& r) {
    json warnings = json::array();
    for (const auto& w : r.warnings) warnings.push_back(w);
    return {{"leaders", one_based(r.leaders)},
            {"u", to_json(r.u)},
            {"J", number(r.J)},
            {"J_lb", number(r.J_lb)},
            {"gap", number(r.gap)},
            {"method", r.method},
            {"warnings", warnings}};
}

json to_json(const HomotopyPath& p) {
    json points = json::array();
    for (const auto& pt : p.points) {
        points.push_back({{"gamma", number(pt.gamma)},
                          {"cardinality", pt.cardinality},
                          {"J", number(pt.J)},
                          {"reweights", pt.reweights},
                          {"u", to_json(pt.u)}});
    }
    json polished = json::array();
    for (const auto& pr : p.polished) {
        polished.push_back({{"N", static_cast<int>(pr.support.size())},
                            {"support", one_based(pr.support)},
                            {"u", to_json(pr.u)},
                            {"J", number(pr.J)},
                            {"objective", number(pr.objective)}});
    }
    return {{"epsilon", number(p.epsilon)}, {"reached", p.reached}, {"path", points}, {"polished", polished}};
}

json to_json(const PositiveSystem& sys) {
    return {{"A", to_json(sys.A)}, {"B", to_json(sys.B)}, {"C", to_json(sys.C)}, {"D", to_json(sys.D)}};
}

json to_json(const DirectedNetwork& net) {
    json edges = json::array();
    for (const auto& e : net.edges()) edges.push_back({{"from", e.from + 1}, {"to", e.to + 1}, {"w", number(e.weight)}});
    return {{"n", net.size()}, {"edges", edges}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace posctl::io
