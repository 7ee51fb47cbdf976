#ifndef DILATRON_PROBLEMIO_HPP
#define DILATRON_PROBLEMIO_HPP

// Versioned JSON problem files and run reports. Complex entries are
// [re, im] pairs, row-major; canonical writing keeps key order fixed so
// that parse-then-write round-trips byte for byte.

#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dilatron/graphsys.hpp"
#include "dilatron/liftops.hpp"

namespace dilatron {

using Json = nlohmann::ordered_json;

inline constexpr const char* kFileVersion = "dilatron/1";

class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

struct GraphSpec {
  int vertices = 0;
  std::vector<std::pair<int, int>> edges;
};

struct ProblemFile {
  std::string version = kFileVersion;
  std::string kind;                       // dilate | lift | intertwine-lift |
                                          // ando | find-q | graph | verify
  std::string position = "L";             // L | M | R
  std::string side = "lift";              // lift | extend
  int case_no = 1;
  std::string relation;                   // lift kinds: e.g. "XT=QTX"
  Index truncation = 12;
  std::optional<double> tol;
  std::optional<uint64_t> seed;
  std::vector<std::pair<std::string, CMat>> matrices;  // insertion order
  std::optional<GraphSpec> graph;

  const CMat* matrix(const std::string& name) const {
    for (const auto& [n, m] : matrices)
      if (n == name) return &m;
    return nullptr;
  }
  const CMat& require(const std::string& name) const {
    const CMat* m = matrix(name);
    if (!m) throw ParseError("problem file: missing matrix '" + name + "'");
    return *m;
  }
};

inline Json matrix_to_json(const CMat& m) {
  Json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  Json data = Json::array();
  for (Index i = 0; i < m.rows(); ++i)
    for (Index k = 0; k < m.cols(); ++k)
      data.push_back({m(i, k).real(), m(i, k).imag()});
  j["data"] = std::move(data);
  return j;
}

inline CMat matrix_from_json(const Json& j) {
  if (!j.contains("rows") || !j.contains("cols") || !j.contains("data"))
    throw ParseError("matrix: rows/cols/data required");
  Index rows = j["rows"].get<Index>(), cols = j["cols"].get<Index>();
  const Json& data = j["data"];
  if (static_cast<Index>(data.size()) != rows * cols)
    throw ParseError("matrix: data length must be rows*cols");
  CMat m(rows, cols);
  Index idx = 0;
  for (Index i = 0; i < rows; ++i)
    for (Index k = 0; k < cols; ++k, ++idx) {
      const Json& ent = data[idx];
      if (!ent.is_array() || ent.size() != 2)
        throw ParseError("matrix: entries are [re, im] pairs");
      double re = ent[0].get<double>(), im = ent[1].get<double>();
      if (!std::isfinite(re) || !std::isfinite(im))
        throw ParseError("matrix: non-finite entry");
      m(i, k) = Complex(re, im);
    }
  return m;
}

inline Json problem_to_json(const ProblemFile& p) {
  Json j;
  j["version"] = p.version;
  j["kind"] = p.kind;
  j["position"] = p.position;
  j["side"] = p.side;
  j["case"] = p.case_no;
  if (!p.relation.empty()) j["relation"] = p.relation;
  j["truncation"] = p.truncation;
  if (p.tol) j["tol"] = *p.tol;
  if (p.seed) j["seed"] = *p.seed;
  Json mats;
  for (const auto& [name, m] : p.matrices) mats[name] = matrix_to_json(m);
  j["matrices"] = std::move(mats);
  if (p.graph) {
    Json g;
    g["vertices"] = p.graph->vertices;
    Json edges = Json::array();
    for (const auto& e : p.graph->edges) edges.push_back({e.first, e.second});
    g["edges"] = std::move(edges);
    j["graph"] = std::move(g);
  }
  return j;
}

inline ProblemFile problem_from_json(const Json& j) {
  ProblemFile p;
  if (!j.contains("version") || j["version"].get<std::string>() != kFileVersion)
    throw ParseError("problem file: unsupported or missing version");
  if (!j.contains("kind")) throw ParseError("problem file: missing kind");
  p.kind = j["kind"].get<std::string>();
  p.position = j.value("position", std::string("L"));
  p.side = j.value("side", std::string("lift"));
  p.case_no = j.value("case", 1);
  p.relation = j.value("relation", std::string());
  p.truncation = j.value("truncation", Index{12});
  if (j.contains("tol")) p.tol = j["tol"].get<double>();
  if (j.contains("seed")) p.seed = j["seed"].get<uint64_t>();
  if (j.contains("matrices"))
    for (const auto& [name, mj] : j["matrices"].items())
      p.matrices.emplace_back(name, matrix_from_json(mj));
  if (j.contains("graph")) {
    GraphSpec g;
    g.vertices = j["graph"]["vertices"].get<int>();
    for (const auto& e : j["graph"]["edges"])
      g.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    p.graph = g;
  }
  return p;
}

inline std::string write_problem(const ProblemFile& p) {
  return problem_to_json(p).dump(2) + "\n";
}

inline ProblemFile parse_problem(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("problem file: ") + e.what());
  }
  try {
    return problem_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("problem file: ") + e.what());
  }
}

inline ProblemFile load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_problem(text);
}

// -------------------------------- reports ---------------------------------

struct Report {
  std::string kind;
  std::string engine;
  double tolerance = 1e-8;
  std::optional<uint64_t> seed;
  CertificateMap certificates;
  std::map<std::string, double> norms;
  double timing_ms = 0.0;
  std::vector<std::string> notes;

  bool pass() const {
    for (const auto& [name, r] : certificates)
      if (!(r <= tolerance)) return false;
    return true;
  }

  Json to_json() const {
    Json j;
    j["kind"] = kind;
    j["engine"] = engine;
    j["tolerance"] = tolerance;
    if (seed) j["seed"] = *seed;
    Json certs;
    for (const auto& [name, r] : certificates) {
      Json c;
      c["residual"] = r;
      c["pass"] = r <= tolerance;
      certs[name] = std::move(c);
    }
    j["certificates"] = std::move(certs);
    Json ns;
    for (const auto& [name, v] : norms) ns[name] = v;
    j["norms"] = std::move(ns);
    if (!notes.empty()) j["notes"] = notes;
    j["pass"] = pass();
    j["timing_ms"] = timing_ms;
    return j;
  }

  std::string to_text() const {
    std::string out;
    out += "kind: " + kind + "  engine: " + engine + "\n";
    char buf[160];
    for (const auto& [name, r] : certificates) {
      std::snprintf(buf, sizeof buf, "  %-28s %11.3e  %s\n", name.c_str(), r,
                    r <= tolerance ? "pass" : "FAIL");
      out += buf;
    }
    for (const auto& [name, v] : norms) {
      std::snprintf(buf, sizeof buf, "  %-28s %11.6f\n", name.c_str(), v);
      out += buf;
    }
    for (const auto& n : notes) out += "  note: " + n + "\n";
    out += pass() ? "PASS\n" : "FAIL\n";
    return out;
  }
};

}  // namespace dilatron

#endif  // DILATRON_PROBLEMIO_HPP
