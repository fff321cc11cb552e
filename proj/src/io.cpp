#include "pef/io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "pef/errors.hpp"

namespace pef {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return in;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  return out;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  s = s.substr(first, last - first + 1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return std::string(s);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_double(const std::string& s, const fs::path& path, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw DataError(path.string() + ":" + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

CsvTable read_csv(const fs::path& path) {
  auto in = open_in(path);
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto fields = split_csv(line);
    if (t.header.empty()) {
      t.header = std::move(fields);
      continue;
    }
    if (fields.size() != t.header.size()) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                      std::to_string(t.header.size()) + " fields, got " +
                      std::to_string(fields.size()));
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(parse_double(f, path, lineno));
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw DataError("'" + path.string() + "' is empty");
  return t;
}

bool is_time_series_header(const std::vector<std::string>& header) {
  return header.size() >= 2 && header[0] == "seq_id" && header[1] == "slice_id";
}

std::pair<int, int> index_pair(const json& e, int n) {
  if (!e.is_array() || e.size() != 2) throw DataError("edge must be a two-element array");
  const int i = e[0].get<int>();
  const int j = e[1].get<int>();
  if (i < 0 || j < 0 || i >= n || j >= n) throw DataError("edge index out of range");
  return {i, j};
}

TimeSeriesDataset time_series_from_table(const CsvTable& t, const fs::path& path) {
  std::vector<std::string> names(t.header.begin() + 2, t.header.end());
  const std::size_t n = names.size();
  if (t.rows.empty()) throw DataError("'" + path.string() + "' has no rows");
  int sequences = 0;
  int length = -1;
  std::vector<double> values;
  values.reserve(t.rows.size() * n);
  std::size_t r = 0;
  while (r < t.rows.size()) {
    const double seq = t.rows[r][0];
    int slices = 0;
    while (r < t.rows.size() && t.rows[r][0] == seq) {
      if (t.rows[r][1] != slices) {
        throw DataError(path.string() + ": slices of sequence " + format_double(seq) +
                        " are not 0, 1, 2, ... in order");
      }
      values.insert(values.end(), t.rows[r].begin() + 2, t.rows[r].end());
      ++slices;
      ++r;
    }
    if (length >= 0 && slices != length) {
      throw DataError(path.string() + ": sequences have different lengths");
    }
    length = slices;
    ++sequences;
  }
  return {sequences, length, std::move(names), std::move(values)};
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

json graph_to_json(const NamedGraph& g) {
  json directed = json::array();
  for (const Edge& e : g.graph.directed_edges()) directed.push_back({e.from, e.to});
  json undirected = json::array();
  for (const NodePair& p : g.graph.undirected_edges()) undirected.push_back({p.a, p.b});
  json out = {{"nodes", g.names}, {"directed", directed}, {"undirected", undirected}};
  if (g.tiers) out["tiers"] = {{"past", g.tiers->past}, {"future", g.tiers->future}};
  return out;
}

NamedGraph graph_from_json(const json& j) {
  try {
    NamedGraph g;
    g.names = j.at("nodes").get<std::vector<std::string>>();
    const int n = static_cast<int>(g.names.size());
    if (std::set<std::string>(g.names.begin(), g.names.end()).size() != g.names.size()) {
      throw DataError("graph JSON lists a node name twice");
    }
    g.graph = Pdag(n);
    for (const auto& e : j.value("directed", json::array())) {
      auto [a, b] = index_pair(e, n);
      g.graph.add_directed(a, b);
    }
    for (const auto& e : j.value("undirected", json::array())) {
      auto [a, b] = index_pair(e, n);
      g.graph.add_undirected(a, b);
    }
    if (j.contains("tiers")) {
      g.tiers = TierLists{j["tiers"].value("past", std::vector<std::string>{}),
                          j["tiers"].value("future", std::vector<std::string>{})};
    }
    return g;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed graph JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("invalid graph: ") + e.what());
  }
}

NamedGraph read_graph_json(const fs::path& path) { return graph_from_json(read_json(path)); }

void write_graph_json(const fs::path& path, const NamedGraph& g) {
  write_json(path, graph_to_json(g));
}

Pdag align_graph(const NamedGraph& g, std::span<const std::string> names) {
  if (g.names.size() != names.size()) {
    throw DataError("graphs have different node counts (" + std::to_string(g.names.size()) +
                    " vs " + std::to_string(names.size()) + ")");
  }
  std::unordered_map<std::string, int> target;
  for (std::size_t k = 0; k < names.size(); ++k) target[names[k]] = static_cast<int>(k);
  std::vector<int> map(g.names.size());
  for (std::size_t k = 0; k < g.names.size(); ++k) {
    auto it = target.find(g.names[k]);
    if (it == target.end()) throw DataError("node '" + g.names[k] + "' is missing from the other graph");
    map[k] = it->second;
  }
  Pdag out(static_cast<int>(names.size()));
  for (const Edge& e : g.graph.directed_edges()) out.add_directed(map[e.from], map[e.to]);
  for (const NodePair& p : g.graph.undirected_edges()) out.add_undirected(map[p.a], map[p.b]);
  return out;
}

TierLists transition_tiers(std::span<const std::string> names) {
  TierLists t;
  const std::size_t n = names.size() / 2;
  t.past.assign(names.begin(), names.begin() + static_cast<std::ptrdiff_t>(n));
  t.future.assign(names.begin() + static_cast<std::ptrdiff_t>(n), names.end());
  return t;
}

TimeSeriesDataset read_time_series_csv(const fs::path& path) {
  const CsvTable t = read_csv(path);
  if (!is_time_series_header(t.header)) {
    throw DataError("'" + path.string() + "' does not start with seq_id,slice_id");
  }
  return time_series_from_table(t, path);
}

void write_time_series_csv(const fs::path& path, const TimeSeriesDataset& ts) {
  auto out = open_out(path);
  out << "seq_id,slice_id";
  for (const auto& name : ts.names()) out << ',' << name;
  out << '\n';
  for (int k = 0; k < ts.sequences(); ++k) {
    for (int t = 0; t < ts.length(); ++t) {
      out << k << ',' << t;
      for (double v : ts.slice(k, t)) out << ',' << format_double(v);
      out << '\n';
    }
  }
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

StaticDataset read_static_csv(const fs::path& path) {
  const CsvTable t = read_csv(path);
  Eigen::MatrixXd values(static_cast<Eigen::Index>(t.rows.size()),
                         static_cast<Eigen::Index>(t.header.size()));
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    for (std::size_t c = 0; c < t.header.size(); ++c) {
      values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = t.rows[r][c];
    }
  }
  return {std::move(values), t.header};
}

void write_static_csv(const fs::path& path, const StaticDataset& ds) {
  auto out = open_out(path);
  for (int c = 0; c < ds.cols(); ++c) out << (c ? "," : "") << ds.names()[c];
  out << '\n';
  for (int r = 0; r < ds.rows(); ++r) {
    for (int c = 0; c < ds.cols(); ++c) out << (c ? "," : "") << format_double(ds.values()(r, c));
    out << '\n';
  }
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

std::variant<TimeSeriesDataset, StaticDataset> read_dataset_csv(const fs::path& path) {
  const CsvTable t = read_csv(path);
  if (is_time_series_header(t.header)) return time_series_from_table(t, path);
  Eigen::MatrixXd values(static_cast<Eigen::Index>(t.rows.size()),
                         static_cast<Eigen::Index>(t.header.size()));
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    for (std::size_t c = 0; c < t.header.size(); ++c) {
      values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = t.rows[r][c];
    }
  }
  return StaticDataset(std::move(values), t.header);
}

json clusters_to_json(const ClusterAssignment& c) {
  return {{"p", c.cluster_count()}, {"labels", c.labels()}};
}

ClusterAssignment clusters_from_json(const json& j) {
  try {
    ClusterAssignment c(j.at("labels").get<std::vector<int>>());
    if (j.contains("p") && j["p"].get<int>() != c.cluster_count()) {
      throw DataError("cluster count does not match labels");
    }
    return c;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed cluster JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }
}

TierLists read_tier_file(const fs::path& path) {
  const json j = read_json(path);
  try {
    return {j.at("past").get<std::vector<std::string>>(),
            j.at("future").get<std::vector<std::string>>()};
  } catch (const json::exception& e) {
    throw DataError("malformed tier file '" + path.string() + "': " + e.what());
  }
}

BaseNetwork read_edge_list(const fs::path& path) {
  auto in = open_in(path);
  BaseNetwork net;
  net.name = path.stem().string();
  std::map<std::string, int> index;
  std::vector<std::pair<int, int>> edges;
  auto node = [&](const std::string& name) {
    auto [it, inserted] = index.emplace(name, static_cast<int>(net.nodes.size()));
    if (inserted) net.nodes.push_back(name);
    return it->second;
  };
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    std::vector<std::string> tokens;
    for (std::string w; words >> w;) {
      if (w != "->") tokens.push_back(w);
    }
    if (tokens.empty()) continue;
    if (tokens.size() == 1) {
      node(tokens[0]);
      continue;
    }
    if (tokens.size() != 2) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": expected 'from to'");
    }
    const int a = node(tokens[0]);
    const int b = node(tokens[1]);
    edges.emplace_back(a, b);
  }
  Pdag g(static_cast<int>(net.nodes.size()));
  try {
    for (auto [a, b] : edges) g.add_directed(a, b);
    net.dag = Dag::from_pdag(std::move(g));
  } catch (const std::invalid_argument& e) {
    throw DataError("edge list '" + path.string() + "' is not a DAG: " + e.what());
  }
  return net;
}

json metrics_to_json(const MetricsReport& r) {
  auto counts = [](const ConfusionCounts& c) {
    return json{{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}};
  };
  return {{"f1_adjacent", r.adjacent.f1},
          {"f1_arrowhead", r.arrowhead.f1},
          {"counts", {{"adjacent", counts(r.adjacent.counts)}, {"arrowhead", counts(r.arrowhead.counts)}}},
          {"runtime_seconds", r.runtime_seconds},
          {"timed_out", r.timed_out},
          {"arrowhead_convention",
           "exact directed match; undirected estimate edges earn no arrowhead credit"}};
}

json read_json(const fs::path& path) {
  auto in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError("cannot parse '" + path.string() + "': " + e.what());
  }
}

void write_json(const fs::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

}  // namespace pef
