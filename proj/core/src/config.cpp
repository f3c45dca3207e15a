#include "batchq/config.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace batchq::config {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& key, const std::string& what) {
  throw std::invalid_argument("config error at '" + key + "': " + what);
}

const json& require(const json& j, const std::string& parent,
                    const std::string& key) {
  if (!j.contains(key)) fail(parent.empty() ? key : parent + "." + key, "missing");
  return j.at(key);
}

double require_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

BatchLaw parse_batch(const json& j) {
  if (j.contains("pmf")) {
    const json& pmf = j.at("pmf");
    if (!pmf.is_array() || pmf.empty()) fail("batch.pmf", "expected a nonempty array");
    std::vector<double> w;
    for (const auto& v : pmf) w.push_back(v.get<double>());
    try {
      return BatchLaw(std::move(w));
    } catch (const std::exception& e) {
      fail("batch.pmf", e.what());
    }
  }
  const std::string family = require(j, "batch", "family").get<std::string>();
  if (family == "unit") return BatchLaw::unit();
  if (family == "deterministic") {
    return BatchLaw::deterministic(
        require(j, "batch", "size").get<int>());
  }
  if (family == "geometric") {
    const double p = require_number(require(j, "batch", "p"), "batch.p");
    const int cap = j.value("cap", 64);
    try {
      return BatchLaw::geometric(p, cap);
    } catch (const std::exception& e) {
      fail("batch.p", e.what());
    }
  }
  fail("batch.family", "unsupported family '" + family + "'");
}

ServiceLaw parse_service(const json& j) {
  const std::string family = require(j, "service", "family").get<std::string>();
  try {
    if (family == "exponential")
      return ServiceLaw::exponential(
          require_number(require(j, "service", "rate"), "service.rate"));
    if (family == "erlang")
      return ServiceLaw::erlang(
          require(j, "service", "shape").get<int>(),
          require_number(require(j, "service", "rate"), "service.rate"));
    if (family == "hyperexponential") {
      std::vector<double> w = require(j, "service", "weights").get<std::vector<double>>();
      std::vector<double> r = require(j, "service", "rates").get<std::vector<double>>();
      return ServiceLaw::hyperexponential(std::move(w), std::move(r));
    }
    if (family == "deterministic")
      return ServiceLaw::deterministic(
          require_number(require(j, "service", "value"), "service.value"));
    if (family == "empirical") {
      const json& pts = require(j, "service", "points");
      if (!pts.is_array()) fail("service.points", "expected an array of [t, F] pairs");
      std::vector<std::pair<double, double>> points;
      for (const auto& p : pts) {
        if (!p.is_array() || p.size() != 2)
          fail("service.points", "each entry must be a [t, F] pair");
        points.emplace_back(p[0].get<double>(), p[1].get<double>());
      }
      return ServiceLaw::empirical(std::move(points));
    }
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception& e) {
    fail("service", e.what());
  }
  fail("service.family", "unsupported family '" + family + "'");
}

}  // namespace

QueueModel model_from_json(const json& j) {
  const json& arrival = require(j, "", "arrival");
  const double mu = require_number(require(arrival, "arrival", "mu"), "arrival.mu");
  BatchLaw batch = parse_batch(require(j, "", "batch"));
  ServiceLaw service = parse_service(require(j, "", "service"));
  const json& jump = require(j, "", "jump");
  const double lambda =
      require_number(require(jump, "jump", "lambda"), "jump.lambda");
  const json& buffer = require(j, "", "buffer");
  if (!require(buffer, "buffer", "B").is_number_integer())
    fail("buffer.B", "expected an integer");
  const int b = buffer.at("B").get<int>();
  try {
    return QueueModel(mu, std::move(batch), std::move(service), lambda, b);
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("config error: ") + e.what());
  }
}

QueueModel model_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("config parse failure: ") + e.what());
  }
  return model_from_json(j);
}

QueueModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return model_from_json_text(text.str());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string(e.what()) + " (in '" + path + "')");
  }
}

std::string config_hash_text(const std::string& json_text) {
  // canonicalize through the parser: object keys come out sorted
  const std::string dump = json::parse(json_text).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream out;
  out << std::hex << h;
  return out.str();
}

}  // namespace batchq::config
