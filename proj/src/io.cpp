#include "purify/io.hpp"

#include <cstdio>
#include <ostream>
#include <sstream>

namespace purify {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvTable::CsvTable(std::string schema, std::vector<std::string> header)
    : schema_(std::move(schema)), header_(std::move(header)) {}

void CsvTable::add_row(std::vector<CsvCell> row) {
  if (row.size() != header_.size())
    throw InvalidParameter("CSV row has " + std::to_string(row.size()) + " cells, header has " +
                           std::to_string(header_.size()));
  rows_.push_back(std::move(row));
}

void CsvTable::write(std::ostream& out) const {
  out << "# schema: " << schema_ << '\n';
  for (std::size_t c = 0; c < header_.size(); ++c) out << (c ? "," : "") << header_[c];
  out << '\n';
  for (const auto& row : rows_) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      std::visit(
          [&](const auto& v) {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, double>)
              out << format_double(v);
            else
              out << v;
          },
          row[c]);
    }
    out << '\n';
  }
}

std::string CsvTable::str() const {
  std::ostringstream out;
  write(out);
  return out.str();
}

Json CsvTable::to_json() const {
  Json rows = Json::array();
  for (const auto& row : rows_) {
    Json obj = Json::object();
    for (std::size_t c = 0; c < row.size(); ++c)
      std::visit([&](const auto& v) { obj[header_[c]] = v; }, row[c]);
    rows.push_back(std::move(obj));
  }
  Json doc = Json::object();
  doc["schema"] = schema_;
  doc["rows"] = std::move(rows);
  return doc;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

CsvTable ladder_table(const IterationLadder& ladder, bool retained_only) {
  CsvTable table(kLadderSchema, {"k", "F_k", "t_k", "s_k", "R_k", "mu_k", "sigma2_k",
                                 "A", "B", "C", "D", "retained"});
  for (const LadderLevel& level : retained_only ? ladder.retained_levels() : ladder.levels()) {
    table.add_row({std::int64_t{level.k}, level.fidelity, level.success_prob,
                   level.cumulative_success, level.rate, level.mean_cost, level.cost_variance,
                   level.state.a(), level.state.b(), level.state.c(), level.state.d(),
                   std::int64_t{static_cast<std::size_t>(level.k) < ladder.retained()}});
  }
  return table;
}

Json ladder_to_json(const IterationLadder& ladder, bool retained_only) {
  Json doc = ladder_table(ladder, retained_only).to_json();
  doc["retained"] = ladder.retained();
  doc["notice"] = ladder.truncation_notice() ? Json(*ladder.truncation_notice()) : Json();
  return doc;
}

Json joint_law_to_json(const JointLawTable& table) {
  Json doc = Json::object();
  doc["schema"] = kJointLawSchema;
  doc["kind"] = "exact";
  doc["N"] = table.pool;
  doc["i"] = table.i;
  doc["j"] = table.j;
  doc["p_i"] = table.p_i;
  Json rows = Json::array();
  for (std::size_t m = 0; m < table.rows.size(); ++m) {
    const JointLawRow& row = table.rows[m];
    rows.push_back(Json{{"m", m},
                        {"success", row.success},
                        {"joint_i", row.joint_i},
                        {"joint_j", row.joint_j}});
  }
  doc["rows"] = std::move(rows);
  return doc;
}

Json joint_law_to_json(const EmpiricalLaw& law) {
  Json doc = Json::object();
  doc["schema"] = kJointLawSchema;
  doc["kind"] = "empirical";
  doc["N"] = law.pool;
  doc["i"] = law.i;
  doc["j"] = law.j;
  doc["p_i"] = law.p_i;
  doc["generator"] = kGeneratorName;
  doc["seed"] = law.seed;
  doc["trials"] = law.trials;
  Json rows = Json::array();
  for (std::int64_t m = 0; m <= law.max_outputs(); ++m) {
    rows.push_back(Json{{"m", m},
                        {"success", law.success(m)},
                        {"joint_i", law.joint(m, 0)},
                        {"joint_j", law.joint(m, 1)},
                        {"success_se", law.success_error(m)},
                        {"joint_i_se", law.joint_error(m, 0)},
                        {"joint_j_se", law.joint_error(m, 1)}});
  }
  doc["rows"] = std::move(rows);
  return doc;
}

JointLawTable joint_law_from_json(const Json& doc) {
  if (doc.value("schema", "") != kJointLawSchema || doc.value("kind", "") != "exact")
    throw InvalidParameter("not an exact joint-law document");
  JointLawTable table;
  table.pool = doc.at("N").get<std::int64_t>();
  table.i = doc.at("i").get<int>();
  table.j = doc.at("j").get<int>();
  table.p_i = doc.at("p_i").get<double>();
  for (const Json& row : doc.at("rows")) {
    table.rows.push_back(JointLawRow{row.at("joint_i").get<double>(),
                                     row.at("joint_j").get<double>(),
                                     row.at("success").get<double>()});
  }
  return table;
}

Json m_bounds_to_json(const FiniteRunSpec& spec, const MBounds& bounds) {
  Json doc = Json::object();
  doc["schema"] = kBoundsSchema;
  doc["N"] = spec.pool;
  doc["i"] = spec.i;
  doc["j"] = spec.j;
  doc["p_i"] = spec.p_i;
  doc["epsilon"] = spec.epsilon;
  doc["mode"] = to_string(spec.mode);
  doc["F_prime"] = spec.f_prime;
  doc["lower_general"] = bounds.lower_general;
  doc["lower_uninterpolated"] =
      bounds.lower_uninterpolated ? Json(*bounds.lower_uninterpolated) : Json();
  doc["upper"] = bounds.upper;
  doc["F_doubleprime"] = bounds.f_doubleprime;
  return doc;
}

Json consumption_to_json(const EmpiricalConsumption& sample) {
  Json doc = Json::object();
  doc["schema"] = kConsumptionSchema;
  doc["kind"] = "empirical";
  doc["k"] = sample.k;
  doc["m"] = sample.outputs;
  doc["generator"] = kGeneratorName;
  doc["seed"] = sample.seed;
  doc["trials"] = sample.trials;
  doc["mean"] = sample.mean;
  doc["variance"] = sample.variance;
  doc["mean_se"] = sample.mean_error;
  doc["variance_se"] = sample.variance_error;
  doc["histogram"] = sample.histogram;
  return doc;
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

}  // namespace purify
