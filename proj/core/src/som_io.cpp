#include "music/som_io.hpp"

#include "music/version.hpp"

#include <fstream>
#include <stdexcept>
#include <vector>

namespace music {

void to_json(nlohmann::json& j, const PrototypeSet& som) {
  if (!som.weights.allFinite())
    throw ContractError("prototype set serialization: non-finite weight");
  if (som.units() != som.lattice_rows * som.lattice_cols)
    throw ContractError(
        "prototype set serialization: weight rows do not match lattice size");
  if (!som.labels.empty() &&
      static_cast<int>(som.labels.size()) != som.units())
    throw ContractError(
        "prototype set serialization: label count does not match units");

  std::vector<double> flat;
  flat.reserve(static_cast<size_t>(som.units()) * som.dim());
  for (int r = 0; r < som.units(); ++r)
    for (int c = 0; c < som.dim(); ++c) flat.push_back(som.weights(r, c));

  j = nlohmann::json{
      {"format", "prototype-set"},
      {"version", kVersion},
      {"lattice_rows", som.lattice_rows},
      {"lattice_cols", som.lattice_cols},
      {"topology",
       som.topology == Topology::Toroidal ? "toroidal" : "rectangular"},
      {"dim", som.dim()},
      {"weights", flat},
  };
  if (!som.labels.empty()) j["labels"] = som.labels;
}

void from_json(const nlohmann::json& j, PrototypeSet& som) {
  if (j.value("format", "") != std::string("prototype-set"))
    throw ContractError("prototype set load: unrecognized format field");

  som.lattice_rows = j.at("lattice_rows").get<int>();
  som.lattice_cols = j.at("lattice_cols").get<int>();
  const std::string topo = j.at("topology").get<std::string>();
  if (topo == "toroidal")
    som.topology = Topology::Toroidal;
  else if (topo == "rectangular")
    som.topology = Topology::Rectangular;
  else
    throw ContractError("prototype set load: unknown topology '" + topo + "'");

  const int dim = j.at("dim").get<int>();
  const auto flat = j.at("weights").get<std::vector<double>>();
  const int units = som.lattice_rows * som.lattice_cols;
  if (som.lattice_rows < 1 || som.lattice_cols < 1 || dim < 1)
    throw ContractError("prototype set load: non-positive dimensions");
  if (static_cast<int>(flat.size()) != units * dim)
    throw ContractError("prototype set load: weight array size mismatch");

  som.weights.resize(units, dim);
  for (int r = 0; r < units; ++r)
    for (int c = 0; c < dim; ++c)
      som.weights(r, c) = flat[static_cast<size_t>(r) * dim + c];

  som.labels.clear();
  if (j.contains("labels")) {
    som.labels = j.at("labels").get<std::vector<int>>();
    if (static_cast<int>(som.labels.size()) != units)
      throw ContractError("prototype set load: label count mismatch");
  }
}

void save_prototype_set(const std::string& path, const PrototypeSet& som) {
  nlohmann::json j = som;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

PrototypeSet load_prototype_set(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  nlohmann::json j;
  in >> j;
  return j.get<PrototypeSet>();
}

} // namespace music
