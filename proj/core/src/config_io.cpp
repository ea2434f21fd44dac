#include "music/config_io.hpp"

#include <fstream>

namespace music {

namespace {

std::string trust_name(TrustRegion::Kind k) {
  return k == TrustRegion::Kind::Absolute ? "absolute" : "bmu-relative";
}

std::string subsample_name(SubsampleRule::Kind k) {
  switch (k) {
    case SubsampleRule::Kind::All: return "all";
    case SubsampleRule::Kind::FixedK: return "fixed-k";
    case SubsampleRule::Kind::BernoulliP: return "bernoulli-p";
    case SubsampleRule::Kind::SingleRandom: return "single-random";
  }
  return "all";
}

template <typename T>
T parse_enum(const std::string& value,
             const std::vector<std::pair<std::string, T>>& table,
             const char* field) {
  for (const auto& [name, kind] : table)
    if (name == value) return kind;
  throw ContractError(std::string("config: unknown ") + field + " '" + value +
                      "'");
}

} // namespace

void to_json(nlohmann::json& j, const MusicConfig& cfg) {
  j = nlohmann::json{
      {"gamma", cfg.gamma},
      {"lambda", cfg.lambda},
      {"eta", cfg.eta},
      {"trust",
       {{"kind", trust_name(cfg.trust.kind)}, {"value", cfg.trust.value}}},
      {"sigma_z", cfg.sigma_z},
      {"sigma_b", cfg.sigma_b},
      {"jitter", cfg.jitter},
      {"passes", cfg.passes},
      {"subsample",
       {{"kind", subsample_name(cfg.subsample.kind)},
        {"k", cfg.subsample.k},
        {"p", cfg.subsample.p}}},
      {"weight_scheme",
       {{"kind", cfg.weight_scheme.kind == WeightScheme::Kind::Uniform
                     ? "uniform"
                     : "gaussian-distance"},
        {"bandwidth", cfg.weight_scheme.bandwidth}}},
      {"preserve_scope",
       {{"kind", cfg.preserve_scope.kind == PreserveScope::Kind::AllNonTargets
                     ? "all-non-targets"
                     : "ring"},
        {"ring_radius", cfg.preserve_scope.ring_radius}}},
      {"normalize_rows", cfg.normalize_rows},
      {"distance_targets", cfg.distance_targets},
      {"seed", cfg.seed},
  };
}

void from_json(const nlohmann::json& j, MusicConfig& cfg) {
  cfg = MusicConfig{};
  cfg.gamma = j.value("gamma", cfg.gamma);
  cfg.lambda = j.value("lambda", cfg.lambda);
  cfg.eta = j.value("eta", cfg.eta);
  if (j.contains("trust")) {
    const auto& t = j.at("trust");
    if (t.contains("kind"))
      cfg.trust.kind = parse_enum<TrustRegion::Kind>(
          t.at("kind").get<std::string>(),
          {{"absolute", TrustRegion::Kind::Absolute},
           {"bmu-relative", TrustRegion::Kind::BmuRelative}},
          "trust kind");
    cfg.trust.value = t.value("value", cfg.trust.value);
  }
  cfg.sigma_z = j.value("sigma_z", cfg.sigma_z);
  cfg.sigma_b = j.value("sigma_b", cfg.sigma_b);
  cfg.jitter = j.value("jitter", cfg.jitter);
  cfg.passes = j.value("passes", cfg.passes);
  if (j.contains("subsample")) {
    const auto& s = j.at("subsample");
    if (s.contains("kind"))
      cfg.subsample.kind = parse_enum<SubsampleRule::Kind>(
          s.at("kind").get<std::string>(),
          {{"all", SubsampleRule::Kind::All},
           {"fixed-k", SubsampleRule::Kind::FixedK},
           {"bernoulli-p", SubsampleRule::Kind::BernoulliP},
           {"single-random", SubsampleRule::Kind::SingleRandom}},
          "subsample kind");
    cfg.subsample.k = s.value("k", cfg.subsample.k);
    cfg.subsample.p = s.value("p", cfg.subsample.p);
  }
  if (j.contains("weight_scheme")) {
    const auto& w = j.at("weight_scheme");
    if (w.contains("kind"))
      cfg.weight_scheme.kind = parse_enum<WeightScheme::Kind>(
          w.at("kind").get<std::string>(),
          {{"uniform", WeightScheme::Kind::Uniform},
           {"gaussian-distance", WeightScheme::Kind::GaussianDistance}},
          "weight scheme");
    cfg.weight_scheme.bandwidth = w.value("bandwidth",
                                          cfg.weight_scheme.bandwidth);
  }
  if (j.contains("preserve_scope")) {
    const auto& p = j.at("preserve_scope");
    if (p.contains("kind"))
      cfg.preserve_scope.kind = parse_enum<PreserveScope::Kind>(
          p.at("kind").get<std::string>(),
          {{"all-non-targets", PreserveScope::Kind::AllNonTargets},
           {"ring", PreserveScope::Kind::Ring}},
          "preserve scope");
    cfg.preserve_scope.ring_radius =
        p.value("ring_radius", cfg.preserve_scope.ring_radius);
  }
  cfg.normalize_rows = j.value("normalize_rows", cfg.normalize_rows);
  cfg.distance_targets = j.value("distance_targets", cfg.distance_targets);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.validate();
}

MusicConfig load_music_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  nlohmann::json j;
  in >> j;
  return j.get<MusicConfig>();
}

} // namespace music
