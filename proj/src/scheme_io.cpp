#include "embedsplit/scheme_io.hpp"

#include <fstream>
#include <sstream>

#include "embedsplit/error.hpp"
#include "json.hpp"

namespace embedsplit {

using nlohmann::json;

namespace {

template <class T>
T field(const json& j, const char* key, const char* where) {
  auto it = j.find(key);
  if (it == j.end()) throw Error(std::string(where) + ": missing field '" + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw Error(std::string(where) + ": bad field '" + key + "': " + e.what());
  }
}

}  // namespace

SchemeFile parse_scheme_file(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("scheme file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error("scheme file must be a JSON object");

  SchemeFile out;
  out.name = doc.value("name", std::string{});
  out.scheme.family = family_from_string(field<std::string>(doc, "family", "scheme"));
  out.scheme.declared_order = field<int>(doc, "declared_order", "scheme");
  const auto stages = field<json>(doc, "stages", "scheme");
  if (!stages.is_array()) throw Error("scheme: 'stages' must be an array");
  for (const auto& st : stages) {
    out.scheme.stages.push_back({role_from_string(field<std::string>(st, "role", "stage")),
                                 field<double>(st, "coeff", "stage")});
  }
  out.scheme.validate();

  if (auto it = doc.find("estimators"); it != doc.end()) {
    for (const auto& ej : *it) {
      SchemeFileEstimator est;
      est.recipe.order = field<int>(ej, "order", "estimator");
      est.recipe.note = ej.value("note", std::string{});
      if (auto s = ej.find("symmetry"); s != ej.end())
        for (const auto& p : *s)
          est.recipe.symmetry.push_back({field<int>(p, "i", "symmetry"),
                                         field<int>(p, "j", "symmetry"),
                                         p.value("sign", 1)});
      if (auto s = ej.find("pins"); s != ej.end())
        for (const auto& p : *s)
          est.recipe.pins.push_back({field<int>(p, "index", "pin"), field<double>(p, "value", "pin")});
      if (auto s = ej.find("weights"); s != ej.end()) {
        est.weights = s->get<std::vector<double>>();
        if (est.weights->size() != out.scheme.output_count())
          throw Error("estimator weights have length " + std::to_string(est.weights->size()) +
                      ", scheme has " + std::to_string(out.scheme.output_count()) + " outputs");
      }
      out.estimators.push_back(std::move(est));
    }
  }
  return out;
}

SchemeFile load_scheme_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scheme file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scheme_file(buf.str());
}

std::string dump_scheme_file(const SchemeFile& file) {
  // nlohmann writes doubles with max_digits10, so the text round-trips
  json doc = json::object();
  if (!file.name.empty()) doc["name"] = file.name;
  doc["family"] = std::string(to_string(file.scheme.family));
  doc["declared_order"] = file.scheme.declared_order;
  json stages = json::array();
  for (const Stage& s : file.scheme.stages)
    stages.push_back({{"role", std::string(to_string(s.role))}, {"coeff", s.coeff}});
  doc["stages"] = std::move(stages);

  json ests = json::array();
  for (const auto& e : file.estimators) {
    json ej = {{"order", e.recipe.order}};
    json sym = json::array();
    for (const auto& p : e.recipe.symmetry) sym.push_back({{"i", p.i}, {"j", p.j}, {"sign", p.sign}});
    ej["symmetry"] = std::move(sym);
    json pins = json::array();
    for (const auto& p : e.recipe.pins) pins.push_back({{"index", p.index}, {"value", p.value}});
    ej["pins"] = std::move(pins);
    if (e.weights) ej["weights"] = *e.weights;
    if (!e.recipe.note.empty()) ej["note"] = e.recipe.note;
    ests.push_back(std::move(ej));
  }
  doc["estimators"] = std::move(ests);
  return doc.dump(2) + "\n";
}

SchemeFile scheme_file_from_method(const EmbeddedMethod& method) {
  SchemeFile f;
  f.name = method.name;
  f.scheme = method.scheme;
  for (std::size_t k = 0; k < method.recipes.size(); ++k) {
    SchemeFileEstimator e;
    e.recipe = method.recipes[k];
    if (k < method.estimators.size()) e.weights = method.estimators[k].w;
    f.estimators.push_back(std::move(e));
  }
  return f;
}

}  // namespace embedsplit
