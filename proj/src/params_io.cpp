#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "sabft/detectors.hpp"

namespace sabft {

using nlohmann::json;

void write_params(std::ostream& out, const ParamsDocument& doc) {
  doc.params.validate();
  json j = {{"a", doc.params.a},
            {"b", doc.params.b},
            {"theta_freq", doc.params.theta_freq},
            {"provenance", doc.provenance}};
  out << j.dump(2) << '\n';
}

ParamsDocument read_params(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("params document: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("params document must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (key != "a" && key != "b" && key != "theta_freq" && key != "provenance")
      throw ParseError("params document: unknown key '" + key + "'");
  if (!j.contains("theta_freq") || !j["theta_freq"].is_number_integer() || j["theta_freq"].get<std::int64_t>() < 0)
    throw ParseError("params document: theta_freq must be a non-negative integer");
  ParamsDocument doc;
  try {
    doc.params.a = j.at("a").get<double>();
    doc.params.b = j.at("b").get<double>();
    doc.params.theta_freq = j.at("theta_freq").get<std::uint64_t>();
    if (j.contains("provenance")) doc.provenance = j.at("provenance").get<std::string>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("params document: ") + e.what());
  }
  try {
    doc.params.validate();
  } catch (const InvalidInput& e) {
    throw ParseError(std::string("params document: ") + e.what());
  }
  return doc;
}

void save_params(const std::string& path, const ParamsDocument& doc) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write params file '" + path + "'");
  write_params(out, doc);
}

ParamsDocument load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open params file '" + path + "'");
  return read_params(in);
}

}  // namespace sabft
