#include "idv/serialization.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "idv/error.hpp"

namespace idv {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw InvalidInput(std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

template <class T>
T get(const Json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace

Json to_json(const ValuationFunction& v) {
  Json params = std::visit(
      overloaded{
          [](const forms::Additive& f) { return Json{{"weights", f.weights}}; },
          [](const forms::WeightedMax& f) { return Json{{"weights", f.weights}}; },
          [&](const forms::OwnSignalOnly& f) {
            return Json{{"agent", f.agent}, {"arity", v.arity()}};
          },
          [](const forms::SumPlusConstant& f) {
            return Json{{"base", f.base}, {"weights", f.weights}};
          },
          [&](const forms::IndicatorPower& f) {
            return Json{{"exponent", f.exponent}, {"watched", f.watched}, {"arity", v.arity()}};
          },
          [&](const forms::Product& f) {
            return Json{{"indices", f.indices}, {"arity", v.arity()}};
          },
          [](const forms::LookupTable& f) { return Json{{"axes", f.axes}, {"values", f.values}}; },
          [&](const forms::CoverageSubmodular& f) {
            return Json{{"arity", v.arity()},
                        {"element_weights", f.element_weights},
                        {"covered_by", f.covered_by}};
          },
      },
      v.form());
  return Json{{"form", std::string(v.form_name())}, {"params", std::move(params)}};
}

ValuationFunction valuation_from_json(const Json& j) {
  const auto form = get<std::string>(j, "form");
  const Json& p = field(j, "params");
  if (form == "Additive") return ValuationFunction::additive(get<std::vector<double>>(p, "weights"));
  if (form == "WeightedMax") {
    return ValuationFunction::weighted_max(get<std::vector<double>>(p, "weights"));
  }
  if (form == "OwnSignalOnly") {
    return ValuationFunction::own_signal(get<std::size_t>(p, "agent"), get<std::size_t>(p, "arity"));
  }
  if (form == "SumPlusConstant") {
    return ValuationFunction::sum_plus_constant(get<double>(p, "base"),
                                                get<std::vector<double>>(p, "weights"));
  }
  if (form == "IndicatorPower") {
    const auto arity = get<std::size_t>(p, "arity");
    const auto watched = p.contains("watched") ? get<std::size_t>(p, "watched") : arity - 1;
    return {arity, forms::IndicatorPower{get<int>(p, "exponent"), watched}};
  }
  if (form == "Product") {
    return ValuationFunction::product(get<std::vector<std::size_t>>(p, "indices"),
                                      get<std::size_t>(p, "arity"));
  }
  if (form == "LookupTable") {
    return ValuationFunction::lookup_table(get<std::vector<std::vector<double>>>(p, "axes"),
                                           get<std::vector<double>>(p, "values"));
  }
  if (form == "CoverageSubmodular") {
    return ValuationFunction::coverage(get<std::size_t>(p, "arity"),
                                       get<std::vector<double>>(p, "element_weights"),
                                       get<std::vector<std::vector<std::size_t>>>(p, "covered_by"));
  }
  throw InvalidInput("unknown valuation form '" + form + "'");
}

Json to_json(const SignalDistribution& d) {
  Json params = std::visit(
      overloaded{
          [](const dists::PointMass& k) { return Json{{"value", k.value}}; },
          [](const dists::FiniteSupport& k) {
            Json atoms = Json::array();
            for (const auto& a : k.atoms) {
              atoms.push_back({{"value", a.value}, {"probability", a.probability}});
            }
            return Json{{"atoms", std::move(atoms)}};
          },
          [](const dists::Uniform& k) { return Json{{"lo", k.lo}, {"hi", k.hi}}; },
          [](const dists::TwoPoint& k) {
            return Json{{"low", k.low}, {"high", k.high}, {"p_high", k.p_high}};
          },
      },
      d.kind());
  return Json{{"kind", std::string(d.kind_name())}, {"params", std::move(params)}};
}

SignalDistribution distribution_from_json(const Json& j) {
  if (j.is_number()) return SignalDistribution::point_mass(j.get<double>());
  const auto kind = get<std::string>(j, "kind");
  const Json& p = field(j, "params");
  if (kind == "PointMass") return SignalDistribution::point_mass(get<double>(p, "value"));
  if (kind == "FiniteSupport") {
    std::vector<Atom> atoms;
    for (const auto& a : field(p, "atoms")) {
      atoms.push_back({get<double>(a, "value"), get<double>(a, "probability")});
    }
    return SignalDistribution::finite(std::move(atoms));
  }
  if (kind == "Uniform") return SignalDistribution::uniform(get<double>(p, "lo"), get<double>(p, "hi"));
  if (kind == "TwoPoint") {
    return SignalDistribution::two_point(get<double>(p, "low"), get<double>(p, "high"),
                                         get<double>(p, "p_high"));
  }
  throw InvalidInput("unknown distribution kind '" + kind + "'");
}

Json to_json(const Instance& inst) {
  Json agents = Json::array();
  for (const auto& a : inst.agents()) {
    agents.push_back({{"valuation", to_json(a.valuation)}, {"signal", to_json(a.signal)}});
  }
  return Json{{"schema_version", kInstanceSchemaVersion},
              {"model", std::string(to_string(inst.model()))},
              {"temporality", std::string(to_string(inst.temporality()))},
              {"agents", std::move(agents)}};
}

Instance instance_from_json(const Json& j) {
  if (j.contains("schema_version") && get<int>(j, "schema_version") != kInstanceSchemaVersion) {
    throw InvalidInput("unsupported instance schema_version " +
                       std::to_string(get<int>(j, "schema_version")));
  }
  std::vector<Agent> agents;
  for (const auto& a : field(j, "agents")) {
    agents.push_back({valuation_from_json(field(a, "valuation")),
                      distribution_from_json(field(a, "signal"))});
  }
  return {std::move(agents), parse_arrival_model(get<std::string>(j, "model")),
          parse_temporality(get<std::string>(j, "temporality"))};
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput("'" + path.string() + "': " + e.what());
  }
}

Instance load_instance(const std::filesystem::path& path) {
  const Json j = read_json_file(path);
  try {
    return instance_from_json(j);
  } catch (const std::exception& e) {
    throw InvalidInput("'" + path.string() + "': " + e.what());
  }
}

void save_instance(const Instance& inst, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << to_json(inst).dump(2) << '\n';
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

Json to_json(const Outcome& o) {
  Json j{{"stopping_time", nullptr},
         {"winner", nullptr},
         {"myopic_welfare", o.myopic_welfare},
         {"farsighted_welfare", o.farsighted_welfare},
         {"payment", o.payment},
         {"coin", std::string(to_string(o.coin))}};
  if (o.stopping_time) j["stopping_time"] = *o.stopping_time + 1;
  if (o.winner) j["winner"] = *o.winner;
  return j;
}

Json to_json(const TraceStep& step) {
  return Json{{"t", step.t + 1},
              {"agent", step.agent},
              {"observed_signal", step.observed_signal},
              {"arrived_values", step.arrived_values},
              {"future_values", step.future_values},
              {"stop", step.stop},
              {"reason", step.reason}};
}

std::string instance_hash(const Instance& inst) {
  const std::string text = to_json(inst).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace idv
