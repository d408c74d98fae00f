#pragma once

// File formats. Systems: {"A": [[...]], "B": ..., "C": ..., "D": ...} with
// row-major nested arrays, "B"/"C" optionally the string "identity".
// Networks: {"n": 4, "edges": [{"from": 1, "to": 2, "w": 1.0}, ...]} or a CSV
// with header "from,to,w"; node numbers are 1-based in both.
// Non-finite numbers are written as the strings "inf", "-inf" and "nan".

#include "posctl/drugdesign.hpp"
#include "posctl/leadersel.hpp"
#include "posctl/metrics.hpp"
#include "posctl/netgraph.hpp"
#include "posctl/possys.hpp"
#include "posctl/solvers.hpp"

#include <json.hpp>

#include <string>

namespace posctl::io {

using json = nlohmann::ordered_json;

// All parsers throw Error(ParseError) with "line L, column C" when the text
// is malformed and Error(InvalidArgument) for well-formed but invalid content.
PositiveSystem parse_system(const std::string& text);
DirectedNetwork parse_network_json(const std::string& text);
DirectedNetwork parse_network_csv(const std::string& text);

std::string read_file(const std::string& path);  // throws ParseError if unreadable
PositiveSystem load_system(const std::string& path);
// Picks CSV for a ".csv" suffix, JSON otherwise.
DirectedNetwork load_network(const std::string& path);

// "1,2.5,3" or "[1, 2.5, 3]".
Vector parse_vector(const std::string& text);

json number(double x);
json to_json(const Vector& v);
json to_json(const Matrix& M);
json to_json(const SubgradientBundle& b, bool one_based = true);
json to_json(const SolveReport& r);
json to_json(const LeaderResult& r);  // leaders 1-based
json to_json(const HomotopyPath& p);  // supports 1-based
json to_json(const PositiveSystem& sys);
json to_json(const DirectedNetwork& net);

std::string dump(const json& j);  // two-space indent, trailing newline

}  // namespace posctl::io
