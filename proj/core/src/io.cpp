#include "pmm/io.hpp"

#include <cstdio>
#include <sstream>

namespace pmm {

std::string format_double(double v) {
  if (v == kLogZero) return "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  const int n = traj.observations.size();
  if (traj.observations.is_discrete()) {
    out << "t,x,y\n";
    for (int t = 1; t <= n; ++t) {
      out << t << ',' << traj.observations.symbol(t) << ',' << traj.hidden[t - 1] << '\n';
    }
  } else {
    const int d = n > 0 ? static_cast<int>(traj.observations.point(1).size()) : 0;
    out << 't';
    for (int k = 1; k <= d; ++k) out << ",x_" << k;
    out << ",y\n";
    for (int t = 1; t <= n; ++t) {
      out << t;
      const auto& x = traj.observations.point(t);
      for (int k = 0; k < d; ++k) out << ',' << format_double(x[k]);
      out << ',' << traj.hidden[t - 1] << '\n';
    }
  }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_table(std::istream& in) {
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw UsageError("empty CSV input");
  table.header = split_csv(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_csv(line);
    if (cells.size() != table.header.size()) throw UsageError("ragged CSV row: " + line);
    table.rows.push_back(std::move(cells));
  }
  return table;
}

}  // namespace

Trajectory read_trajectory_csv(std::istream& in) {
  const CsvTable table = read_table(in);
  if (table.header.size() < 3 || table.header.front() != "t" || table.header.back() != "y") {
    throw UsageError("expected trajectory CSV header t,...,y");
  }
  Trajectory traj;
  const std::size_t d = table.header.size() - 2;
  const bool discrete = d == 1 && table.header[1] == "x";
  std::vector<int> xs;
  std::vector<Eigen::VectorXd> pts;
  for (const auto& row : table.rows) {
    if (discrete) {
      xs.push_back(std::stoi(row[1]));
    } else {
      Eigen::VectorXd x(d);
      for (std::size_t k = 0; k < d; ++k) x[static_cast<Eigen::Index>(k)] = std::stod(row[1 + k]);
      pts.push_back(std::move(x));
    }
    traj.hidden.push_back(std::stoi(row.back()));
  }
  traj.observations = discrete ? ObsSeq::discrete(std::move(xs)) : ObsSeq::euclidean(std::move(pts));
  return traj;
}

ObsSeq read_obs_csv(std::istream& in) {
  const CsvTable table = read_table(in);
  if (table.header.size() < 2 || table.header.front() != "t") {
    throw UsageError("expected observation CSV header t,x[,...]");
  }
  const bool has_y = table.header.back() == "y";
  const std::size_t first = 1;
  const std::size_t last = table.header.size() - (has_y ? 1 : 0);  // exclusive
  if (last <= first) throw UsageError("no observation columns in CSV");
  const bool discrete = (last - first) == 1 && table.header[1] == "x";
  std::vector<int> xs;
  std::vector<Eigen::VectorXd> pts;
  for (const auto& row : table.rows) {
    if (discrete) {
      xs.push_back(std::stoi(row[1]));
    } else {
      Eigen::VectorXd x(last - first);
      for (std::size_t k = first; k < last; ++k) {
        x[static_cast<Eigen::Index>(k - first)] = std::stod(row[k]);
      }
      pts.push_back(std::move(x));
    }
  }
  return discrete ? ObsSeq::discrete(std::move(xs)) : ObsSeq::euclidean(std::move(pts));
}

void write_decode_csv(std::ostream& out, const std::vector<int>& path, long long t0) {
  out << "t,v\n";
  for (std::size_t i = 0; i < path.size(); ++i) {
    out << (t0 + static_cast<long long>(i)) << ',' << path[i] << '\n';
  }
}

// ---------------------------------------------------------------------------

using json = nlohmann::json;

json to_json(const NodeReport& rep) {
  return json{{"t", rep.t},
              {"order", rep.order},
              {"node_states", rep.node_states},
              {"strong_states", rep.strong_states}};
}

json to_json(const WitnessTriple& w) {
  json j{{"i", w.i}, {"j", w.j}, {"k", w.k}};
  j["log_margin"] = std::isinf(w.log_margin) ? json("inf") : json(w.log_margin);
  return j;
}

json to_json(const BarrierCertificate& cert) {
  json witnesses = json::array();
  for (const auto& w : cert.witnesses) witnesses.push_back(to_json(w));
  return json{{"block", cert.block},
              {"split", cert.split},
              {"order", cert.order},
              {"target_state", cert.target_state},
              {"strict", cert.strict},
              {"method", cert.method == BarrierCertificate::Method::Prop21 ? "endpoint_split"
                                                                           : "cyclic_center"},
              {"witnesses", witnesses}};
}

json to_json(const BarrierCheck& check) {
  if (certified(check)) {
    return json{{"certified", true}, {"certificate", to_json(std::get<BarrierCertificate>(check))}};
  }
  const auto& r = std::get<BarrierRefusal>(check);
  return json{{"certified", false}, {"violating", to_json(r.violating)}, {"reason", r.reason}};
}

json to_json(const AConditionsReport& rep) {
  json certs = json::array();
  for (const auto& c : rep.certificates) certs.push_back(to_json(c));
  return json{{"a1", rep.a1},        {"a1_strict", rep.a1_strict},
              {"a2", rep.a2},        {"a3", rep.a3},
              {"a3_value", rep.a3_value}, {"pass", rep.pass},
              {"failures", rep.failures}, {"certificates", certs}};
}

json to_json(const HmmCorollaryReport& rep) {
  json score = json::array();
  for (const auto& row : rep.condition_i.score) {
    json r = json::array();
    for (const auto& v : row) r.push_back(to_string(v));
    score.push_back(r);
  }
  json weak = json::array();
  for (const auto& c : rep.clusters.weak_cluster_primitivity) {
    weak.push_back(json{{"states", c.states}, {"primitive", c.primitive}, {"exponent", c.exponent}});
  }
  return json{
      {"items",
       json::array(
           {json{{"id", "emission_dominance"},
                 {"pass", rep.condition_i.pass},
                 {"witness_symbols", rep.condition_i.witnesses},
                 {"score", score}},
            json{{"id", "primitive_weak_cluster"},
                 {"pass", rep.has_primitive_weak_cluster},
                 {"weak_clusters", weak},
                 {"clusters", rep.clusters.clusters}},
            json{{"id", "irreducible"}, {"pass", rep.irreducible}}})},
      {"pass", rep.pass}};
}

json to_json(const DiscreteCorollaryReport& rep) {
  json cycle = nullptr;
  if (rep.cycle) {
    cycle = json{{"cycle", rep.cycle->cycle},
                 {"anchor_state", rep.cycle->anchor_state},
                 {"margin_center", rep.cycle->margin_center},
                 {"margin_row", rep.cycle->margin_row},
                 {"margin_col", rep.cycle->margin_col}};
  }
  return json{
      {"items", json::array({json{{"id", "irreducible_recurrent"}, {"pass", rep.irreducible_recurrent}},
                             json{{"id", "subpositive_word"},
                                  {"pass", rep.condition_i},
                                  {"witness", rep.subpositive_word}},
                             json{{"id", "dominant_cycle"},
                                  {"pass", rep.condition_ii},
                                  {"witness", cycle},
                                  {"row_strict", rep.row_strict},
                                  {"col_strict", rep.col_strict},
                                  {"anchor_reachable", rep.anchor_reachable}}})},
      {"pass", rep.pass}};
}

json to_json(const GlmConditionReport& rep) {
  json hij = json::array();
  for (const auto& e : rep.hij) {
    hij.push_back(json{{"i", e.i},
                       {"j", e.j},
                       {"empty", e.empty},
                       {"ratio", std::isinf(e.ratio) ? json("inf") : json(e.ratio)},
                       {"quad_form", e.quad_form},
                       {"threshold", e.threshold},
                       {"pass", e.pass}});
  }
  std::vector<double> fp(rep.fixed_point.data(), rep.fixed_point.data() + rep.fixed_point.size());
  return json{
      {"items",
       json::array({json{{"id", "primitivity"}, {"pass", rep.primitive}, {"exponent", rep.exponent}},
                    json{{"id", "column_dominance"},
                         {"pass", rep.column_dominance},
                         {"margin", rep.dominance_margin}},
                    json{{"id", "offset_sets_empty"},
                         {"pass", rep.hij_all_pass},
                         {"fixed_point_ok", rep.fixed_point_ok},
                         {"fixed_point", fp},
                         {"entries", hij}},
                    json{{"id", "drift"}, {"pass", rep.drift_ok}, {"value", rep.drift_value}}})},
      {"harris_certified", rep.harris_certified},
      {"pass", rep.pass}};
}

json to_json(const StreamDiagnostics& diag) {
  return json{{"steps", diag.steps},
              {"nodes_seen", diag.nodes_seen},
              {"commits", diag.commits},
              {"buffer_high_water", diag.buffer_high_water},
              {"committed_length", diag.committed_length},
              {"committed_log_likelihood", diag.committed_log_likelihood},
              {"zero_likelihood", diag.zero_likelihood},
              {"forced_commits", diag.forced_commits}};
}

}  // namespace pmm
