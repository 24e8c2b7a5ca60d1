#include "netfuse/scenario.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace netfuse {

using nlohmann::json;

void Scenario::validate() const {
  system.validate();
  if (sensors.empty()) throw ConfigError("sensors: at least one sensor required");
  for (const SensorModel& s : sensors) s.validate(system);
  if (horizon < 1) throw ConfigError("horizon: must be >= 1");
  if (N < 0) throw ConfigError("N: must be >= 0");
  if (dropout_prob < 0.0 || dropout_prob > 1.0)
    throw ConfigError("dropout_prob: must be in [0, 1], got " + std::to_string(dropout_prob));
  if (alpha <= 0.0) throw ConfigError("alpha: must be > 0");
  if (monte_carlo_runs < 1) throw ConfigError("monte_carlo_runs: must be >= 1");
  if (!gamma.empty() && gamma.size() != sensors.size() && gamma.size() != 1)
    throw ConfigError("gamma: give one value or one per sensor");
  DelayModel dm = delay_model;
  dm.N = N;
  dm.validate();
  trigger.validate(system.r());
}

namespace {

Mat mat_from(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw ConfigError(field + ": expected a nested array (row-major matrix)");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j[0].size());
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(j[i].size()) != cols) throw ConfigError(field + ": ragged rows");
    for (int c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
  }
  return m;
}

Mat col_from(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw ConfigError(field + ": expected an array");
  if (j[0].is_array()) return mat_from(j, field);
  Mat m(static_cast<int>(j.size()), 1);
  for (int i = 0; i < m.rows(); ++i) m(i, 0) = j[i].get<double>();
  return m;
}

Vec vec_from(const json& j, const std::string& field) {
  const Mat m = col_from(j, field);
  return m.col(0);
}

Signal signal_from(const json& j, const std::string& field) {
  if (j.is_number()) return Signal::constant(j.get<double>());
  const std::string kind = j.value("kind", "zero");
  if (kind == "zero") return Signal::zero();
  if (kind == "constant") return Signal::constant(j.at("amplitude").get<double>());
  if (kind == "cosine")
    return Signal::cosine(j.at("amplitude").get<double>(), j.at("frequency").get<double>());
  if (kind == "sine")
    return Signal::sine(j.at("amplitude").get<double>(), j.at("frequency").get<double>());
  throw ConfigError(field + ": unknown signal kind '" + kind + "'");
}

DelayModel delay_from(const json& j, int N) {
  if (j.is_null()) return DelayModel::uniform(N);
  const std::string kind = j.value("kind", "uniform-integer");
  if (kind == "uniform-integer") return DelayModel::uniform(N);
  if (kind == "custom-weights")
    return DelayModel::custom(N, j.at("weights").get<std::vector<double>>());
  if (kind == "fixed-table") {
    std::map<int, int> table;
    for (const auto& [key, val] : j.at("table").items()) table[std::stoi(key)] = val.get<int>();
    return DelayModel::fixed(N, std::move(table));
  }
  throw ConfigError("delay_model.kind: unknown kind '" + kind + "'");
}

}  // namespace

Scenario load_scenario_text(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario parse failure: ") + e.what());
  }

  Scenario sc;
  sc.name = j.value("name", "scenario");
  const json& js = j.at("system");
  sc.system.A = mat_from(js.at("A"), "system.A");
  sc.system.Fcal = col_from(js.at("Fcal"), "system.Fcal");
  sc.system.E = mat_from(js.at("E"), "system.E");
  if (js.contains("A_mult"))
    for (std::size_t i = 0; i < js["A_mult"].size(); ++i)
      sc.system.A_mult.push_back(mat_from(js["A_mult"][i], "system.A_mult"));
  sc.system.theta_lower = js.value("theta_lower", std::vector<double>{});
  sc.system.theta_upper = js.value("theta_upper", std::vector<double>{});
  sc.system.B = col_from(js.at("B"), "system.B");
  sc.system.G = col_from(js.at("G"), "system.G");
  sc.system.R = js.at("R").get<double>();
  sc.system.mu0 = vec_from(js.at("mu0"), "system.mu0");
  sc.system.P0 = mat_from(js.at("P0"), "system.P0");
  sc.system.w_signal = js.contains("w_signal") ? signal_from(js["w_signal"], "system.w_signal")
                                               : Signal::zero();
  sc.system.f_signal = js.contains("f_signal") ? signal_from(js["f_signal"], "system.f_signal")
                                               : Signal::zero();

  int id = 0;
  for (const json& jsen : j.at("sensors")) {
    SensorModel s;
    s.id = id++;
    s.C = mat_from(jsen.at("C"), "sensor.C");
    s.Hcal = col_from(jsen.at("Hcal"), "sensor.Hcal");
    s.E_s = jsen.contains("E_s") ? mat_from(jsen["E_s"], "sensor.E_s") : sc.system.E;
    s.B_s = col_from(jsen.at("B_s"), "sensor.B_s");
    s.G_s = col_from(jsen.at("G_s"), "sensor.G_s");
    sc.sensors.push_back(std::move(s));
  }

  sc.horizon = j.value("horizon", 300);
  sc.N = j.value("N", 0);
  sc.delay_model = delay_from(j.contains("delay_model") ? j["delay_model"] : json(), sc.N);
  sc.delay_model.N = sc.N;
  sc.dropout_prob = j.value("dropout_prob", 0.0);
  if (j.contains("trigger")) {
    sc.trigger.Omega = mat_from(j["trigger"].at("Omega"), "trigger.Omega");
    sc.trigger.delta = j["trigger"].value("delta", 0.0);
  } else {
    sc.trigger = TriggerConfig::disabled(sc.system.r());
  }
  sc.alpha = j.value("alpha", 3.0);
  if (j.contains("gamma")) {
    if (j["gamma"].is_number())
      sc.gamma.assign(sc.sensors.size(), j["gamma"].get<double>());
    else
      sc.gamma = j["gamma"].get<std::vector<double>>();
  }
  sc.monte_carlo_runs = j.value("monte_carlo_runs", 1);
  sc.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("w_cov")) {
    const std::string mode = j["w_cov"].value("mode", "exact");
    if (mode == "exact")
      sc.w_cov = WCovModel::exact();
    else if (mode == "constant")
      sc.w_cov = WCovModel::constant(j["w_cov"].at("value").get<double>());
    else
      throw ConfigError("w_cov.mode: unknown mode '" + mode + "'");
  }

  sc.validate();
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_scenario_text(ss.str());
}

std::uint64_t scenario_hash(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Scenario tracking3_scenario() {
  const double T = 0.1;       // sample period
  const double T2h = 0.005;   // T^2 / 2
  Scenario sc;
  sc.name = "tracking3";
  SystemModel& sys = sc.system;
  sys.A.resize(3, 3);
  sys.A << 0.9, T, T2h, 0, 0.9, T, 0, 0, 0.9;
  Mat A1(3, 3);
  A1 << 0.02, 0.03, 0.01, 0.06, 0.05, 0.02, 0.05, 0.03, 0.01;
  sys.A_mult = {A1};
  sys.theta_lower = {0.01};
  sys.theta_upper = {0.02};
  sys.Fcal.resize(3, 1);
  sys.Fcal << 0.1, 0.1, 0.1;
  sys.E.resize(1, 3);
  sys.E << 0.02, 0.02, 0.02;
  sys.B.resize(3, 1);
  sys.B << 0.1, 0.3, 0.2;
  sys.G.resize(3, 1);
  sys.G << T2h, T, 1.0;
  sys.R = 0.09;
  sys.mu0 = Vec::Ones(3);
  sys.P0 = 0.01 * Mat::Identity(3, 3);
  sys.w_signal = Signal::cosine(2.0, 0.6);
  sys.f_signal = Signal::sine(1.0, 0.6);

  auto sensor = [&sys](int id, std::initializer_list<double> c,
                       std::initializer_list<double> b) {
    SensorModel s;
    s.id = id;
    s.C = Mat::Zero(3, 3);
    int i = 0;
    for (double v : c) s.C(i, i) = v, ++i;
    s.Hcal = 0.8 * Mat::Ones(3, 1);
    s.E_s = sys.E;
    s.B_s = Mat(3, 1);
    i = 0;
    for (double v : b) s.B_s(i++, 0) = v;
    s.G_s = s.B_s;
    return s;
  };
  sc.sensors = {sensor(0, {0.6, 0.8, 1.0}, {0.1, 0.3, 0.2}),
                sensor(1, {1.0, 0.8, 0.5}, {0.2, 0.4, 0.5}),
                sensor(2, {0.3, 1.0, 0.7}, {0.4, 0.5, 0.2})};

  sc.horizon = 300;
  sc.N = 5;
  sc.delay_model = DelayModel::custom(5, {0.50, 0.22, 0.12, 0.08, 0.05, 0.03});
  sc.dropout_prob = 0.05;
  sc.trigger = TriggerConfig::disabled(3);
  sc.alpha = 3.0;
  sc.gamma = {0.2, 0.2, 0.2};
  sc.monte_carlo_runs = 100;
  sc.seed = 20260801ULL;
  sc.w_cov = WCovModel::constant(4.0);  // sup_k w_k^2 for w = 2 cos(0.6 k)
  sc.validate();
  return sc;
}

Scenario golden_disorder_scenario() {
  Scenario sc;
  sc.name = "golden-disorder";
  SystemModel& sys = sc.system;
  sys.A = 0.9 * Mat::Identity(1, 1);
  sys.Fcal = Mat::Zero(1, 1);
  sys.E = Mat::Zero(1, 1);
  sys.B = Mat::Zero(1, 1);
  sys.G = Mat::Ones(1, 1);
  sys.R = 0.01;
  sys.mu0 = Vec::Zero(1);
  sys.P0 = Mat::Identity(1, 1);

  SensorModel s;
  s.id = 0;
  s.C = Mat::Identity(1, 1);
  s.Hcal = Mat::Zero(1, 1);
  s.E_s = Mat::Zero(1, 1);
  s.B_s = Mat::Zero(1, 1);
  s.G_s = Mat::Ones(1, 1);
  sc.sensors = {s};

  sc.horizon = 15;
  sc.N = 5;
  sc.delay_model = golden_disorder_table();
  sc.dropout_prob = 0.0;
  sc.trigger = TriggerConfig::disabled(1);
  sc.alpha = 3.0;
  sc.gamma = {0.2};
  sc.monte_carlo_runs = 1;
  sc.seed = 7ULL;
  sc.w_cov = WCovModel::exact();
  sc.validate();
  return sc;
}

}  // namespace netfuse
