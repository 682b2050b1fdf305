#include <fstream>
#include <iomanip>
#include <sstream>

#include "lowbend/sampling.hpp"

namespace lowbend {

std::string triple_header(ManifoldKind kind) {
  std::ostringstream os;
  const int n = chart_dim(kind);
  os << "index";
  for (const char* slot : {"x", "y", "mid"})
    for (int i = 0; i < n; ++i) os << ' ' << slot << '.' << i;
  os << " dist payload";
  return os.str();
}

void write_triples(const std::filesystem::path& path, ManifoldKind kind,
                   std::span<const SampleTriple> triples) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  out << "# lowbend-triples v1 kind=" << to_string(kind) << '\n';
  out << triple_header(kind) << '\n';
  out << std::setprecision(17);
  for (std::size_t r = 0; r < triples.size(); ++r) {
    const SampleTriple& t = triples[r];
    out << r;
    for (const ManifoldPoint* p : {&t.x, &t.y, &t.mid})
      for (Eigen::Index i = 0; i < p->coords.size(); ++i) out << ' ' << p->coords[i];
    out << ' ' << t.dist << ' ' << (t.has_payload() ? static_cast<long long>(r) : -1LL) << '\n';
  }
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

TripleTable read_triples(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::Io, "empty triple file");
  const auto pos = line.find("kind=");
  if (line.rfind("# lowbend-triples", 0) != 0 || pos == std::string::npos)
    throw Error(ErrorCode::Io, "missing triple file preamble in " + path.string());
  TripleTable table;
  table.kind = kind_from_string(line.substr(pos + 5));
  if (!std::getline(in, line) || line != triple_header(table.kind))
    throw Error(ErrorCode::Io, "unexpected triple header in " + path.string());
  const int n = chart_dim(table.kind);
  std::size_t lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream is(line);
    long long index = 0;
    long long payload = 0;
    SampleTriple t;
    is >> index;
    for (ManifoldPoint* p : {&t.x, &t.y, &t.mid}) {
      p->kind = table.kind;
      p->coords.resize(n);
      for (int i = 0; i < n; ++i) is >> p->coords[i];
    }
    is >> t.dist >> payload;
    if (!is)
      throw Error(ErrorCode::Io, path.string() + ":" + std::to_string(lineno) + ": bad record");
    table.triples.push_back(std::move(t));
  }
  return table;
}

}  // namespace lowbend
