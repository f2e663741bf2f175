#pragma once

// CSV and JSON emission. CSV files open with a "# schema: <name>/<version>"
// line, then a header row; floats use 17 significant digits. JSON documents
// carry a "schema" key and keep insertion order so that parse + dump is
// byte-identical.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "purify/dejmps.hpp"
#include "purify/finitesize.hpp"
#include "purify/mc_oracle.hpp"

namespace purify {

using Json = nlohmann::ordered_json;

inline constexpr const char* kLadderSchema = "purify.ladder/1";
inline constexpr const char* kJointLawSchema = "purify.joint_law/1";
inline constexpr const char* kBoundsSchema = "purify.m_bounds/1";
inline constexpr const char* kConsumptionSchema = "purify.consumption/1";

/// Shortest-safe decimal text for a double: %.17g.
std::string format_double(double x);

using CsvCell = std::variant<std::string, double, std::int64_t>;

class CsvTable {
 public:
  CsvTable(std::string schema, std::vector<std::string> header);

  void add_row(std::vector<CsvCell> row);
  const std::string& schema() const { return schema_; }
  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<CsvCell>>& rows() const { return rows_; }

  void write(std::ostream& out) const;
  std::string str() const;
  /// Rows as JSON objects keyed by header, wrapped with the schema name.
  Json to_json() const;

 private:
  std::string schema_;
  std::vector<std::string> header_;
  std::vector<std::vector<CsvCell>> rows_;
};

/// Splits one CSV line; the schema line and quoting are not handled.
std::vector<std::string> split_csv_line(const std::string& line);

/// Ladder rows; with `retained_only` the levels after fidelity stops rising
/// are left out.
CsvTable ladder_table(const IterationLadder& ladder, bool retained_only = false);
Json ladder_to_json(const IterationLadder& ladder, bool retained_only = false);

Json joint_law_to_json(const JointLawTable& table);
Json joint_law_to_json(const EmpiricalLaw& law);
/// Reads an "exact" joint-law document back.
JointLawTable joint_law_from_json(const Json& doc);

Json m_bounds_to_json(const FiniteRunSpec& spec, const MBounds& bounds);
Json consumption_to_json(const EmpiricalConsumption& sample);

/// Two-space indented dump with a trailing newline.
std::string dump(const Json& doc);

}  // namespace purify
