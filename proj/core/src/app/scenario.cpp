#include "risiort/app/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "risiort/error.hpp"
#include "risiort/hash.hpp"

namespace risiort::app {

using nlohmann::json;

namespace {

constexpr double kDeg = 3.14159265358979323846 / 180.0;

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

std::string join(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

// Reads one JSON object with defaults, records the normalized form and
// rejects keys that were never read.
class Obj {
 public:
  Obj(const json* j, std::string path) : j_(j), path_(std::move(path)), out_(json::object()) {
    if (j_ && !j_->is_object()) field_error(path_.empty() ? "<root>" : path_, "expected an object");
  }

  const json* raw(const std::string& key) {
    seen_.insert(key);
    if (!j_) return nullptr;
    auto it = j_->find(key);
    return it == j_->end() || it->is_null() ? nullptr : &*it;
  }

  bool has(const std::string& key) const { return j_ && j_->contains(key); }

  double number(const std::string& key, std::optional<double> def) {
    const json* v = raw(key);
    double x;
    if (!v) {
      if (!def) field_error(join(path_, key), "required field is missing");
      x = *def;
    } else {
      if (!v->is_number()) field_error(join(path_, key), "expected a number");
      x = v->get<double>();
    }
    if (!std::isfinite(x)) field_error(join(path_, key), "must be finite");
    out_[key] = x;
    return x;
  }

  long long integer(const std::string& key, std::optional<long long> def) {
    const json* v = raw(key);
    long long x;
    if (!v) {
      if (!def) field_error(join(path_, key), "required field is missing");
      x = *def;
    } else {
      if (!v->is_number_integer()) field_error(join(path_, key), "expected an integer");
      x = v->get<long long>();
    }
    out_[key] = x;
    return x;
  }

  bool boolean(const std::string& key, bool def) {
    const json* v = raw(key);
    bool x = def;
    if (v) {
      if (!v->is_boolean()) field_error(join(path_, key), "expected true or false");
      x = v->get<bool>();
    }
    out_[key] = x;
    return x;
  }

  std::string string(const std::string& key, std::optional<std::string> def) {
    const json* v = raw(key);
    std::string x;
    if (!v) {
      if (!def) field_error(join(path_, key), "required field is missing");
      x = *def;
    } else {
      if (!v->is_string()) field_error(join(path_, key), "expected a string");
      x = v->get<std::string>();
    }
    out_[key] = x;
    return x;
  }

  std::vector<double> numbers(const std::string& key, std::optional<std::vector<double>> def) {
    const json* v = raw(key);
    std::vector<double> x;
    if (!v) {
      if (!def) field_error(join(path_, key), "required field is missing");
      x = *def;
    } else {
      if (!v->is_array()) field_error(join(path_, key), "expected an array of numbers");
      for (std::size_t i = 0; i < v->size(); ++i) {
        const json& e = (*v)[i];
        if (!e.is_number()) field_error(join(path_, key) + "[" + std::to_string(i) + "]", "expected a number");
        x.push_back(e.get<double>());
      }
    }
    out_[key] = x;
    return x;
  }

  Position position(const std::string& key, std::optional<Position> def) {
    const json* v = raw(key);
    Position p;
    if (!v) {
      if (!def) field_error(join(path_, key), "required field is missing");
      p = *def;
    } else {
      p = parse_position(*v, join(path_, key));
    }
    out_[key] = json::array({p.x, p.y, p.z});
    return p;
  }

  static Position parse_position(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() < 2 || v.size() > 3)
      field_error(path, "expected [x, y] or [x, y, z] in metres");
    for (const auto& e : v)
      if (!e.is_number()) field_error(path, "coordinates must be numbers");
    return {v[0].get<double>(), v[1].get<double>(), v.size() == 3 ? v[2].get<double>() : 0.0};
  }

  std::vector<Position> positions(const std::string& key, bool required) {
    const json* v = raw(key);
    std::vector<Position> out;
    if (!v) {
      if (required) field_error(join(path_, key), "required field is missing");
    } else {
      if (!v->is_array()) field_error(join(path_, key), "expected an array of positions");
      for (std::size_t i = 0; i < v->size(); ++i)
        out.push_back(parse_position((*v)[i], join(path_, key) + "[" + std::to_string(i) + "]"));
    }
    json arr = json::array();
    for (const auto& p : out) arr.push_back(json::array({p.x, p.y, p.z}));
    out_[key] = arr;
    return out;
  }

  // Sub-object; a missing one reads as all defaults.
  Obj object(const std::string& key) { return Obj(raw(key), join(path_, key)); }

  std::vector<const json*> array_of_objects(const std::string& key, bool required) {
    const json* v = raw(key);
    std::vector<const json*> out;
    if (!v) {
      if (required) field_error(join(path_, key), "required field is missing");
      return out;
    }
    if (!v->is_array()) field_error(join(path_, key), "expected an array");
    for (const auto& e : *v) out.push_back(&e);
    return out;
  }

  void put(const std::string& key, json value) { out_[key] = std::move(value); }

  // Unknown keys are errors so that typos never pass silently.
  json finish() const {
    if (j_)
      for (auto it = j_->begin(); it != j_->end(); ++it)
        if (!seen_.count(it.key())) field_error(join(path_, it.key()), "unknown field");
    return out_;
  }

  const std::string& path() const { return path_; }
  bool present() const { return j_ != nullptr; }

 private:
  const json* j_;
  std::string path_;
  json out_;
  std::set<std::string> seen_;
};

void read_topology(Obj& root, ScenarioSpec& s) {
  Obj t = root.object("topology");
  if (!t.present()) field_error("topology", "required block is missing");
  json bs_list = json::array();
  const auto stations = t.array_of_objects("base_stations", true);
  for (std::size_t i = 0; i < stations.size(); ++i) {
    Obj b(stations[i], "topology.base_stations[" + std::to_string(i) + "]");
    BaseStation bs;
    bs.position = b.position("position", std::nullopt);
    bs.antennas = static_cast<int>(b.integer("antennas", 4));
    s.topology.bs_list.push_back(bs);
    bs_list.push_back(b.finish());
  }
  t.put("base_stations", bs_list);
  {
    Obj r = t.object("ris");
    if (!r.present()) field_error("topology.ris", "required block is missing");
    s.topology.ris.position = r.position("position", std::nullopt);
    s.topology.ris.elements = static_cast<int>(r.integer("elements", std::nullopt));
    t.put("ris", r.finish());
  }
  s.topology.devices = t.positions("devices", true);
  s.topology.targets = t.positions("targets", false);
  json obstacles = json::array();
  const auto obs = t.array_of_objects("obstacles", false);
  for (std::size_t i = 0; i < obs.size(); ++i) {
    Obj o(obs[i], "topology.obstacles[" + std::to_string(i) + "]");
    Obstacle box;
    box.corner_min = o.position("min", std::nullopt);
    box.corner_max = o.position("max", std::nullopt);
    s.topology.obstacles.push_back(box);
    obstacles.push_back(o.finish());
  }
  t.put("obstacles", obstacles);
  {
    Obj b = t.object("blockage");
    s.topology.blockage.direct = b.boolean("direct", true);
    s.topology.blockage.bs_ris = b.boolean("bs_ris", false);
    s.topology.blockage.ris_device = b.boolean("ris_device", false);
    t.put("blockage", b.finish());
  }
  root.put("topology", t.finish());
  try {
    validate_topology(s.topology);
  } catch (const ConfigError& e) {
    field_error("topology", e.what());
  }
}

void read_link(Obj& root, ScenarioSpec& s) {
  Obj l = root.object("link");
  LinkParams& lp = s.link;
  const LinkParams def;
  lp.ref_loss_db = l.number("ref_loss_db", def.ref_loss_db);
  {
    Obj e = l.object("exponents");
    lp.exponent[0] = e.number("bs_device", def.exponent[0]);
    lp.exponent[1] = e.number("bs_ris", def.exponent[1]);
    lp.exponent[2] = e.number("ris_device", def.exponent[2]);
    l.put("exponents", e.finish());
  }
  {
    Obj k = l.object("rician_k");
    lp.rician_k[0] = k.number("bs_device", def.rician_k[0]);
    lp.rician_k[1] = k.number("bs_ris", def.rician_k[1]);
    lp.rician_k[2] = k.number("ris_device", def.rician_k[2]);
    l.put("rician_k", k.finish());
  }
  lp.noise_power_dbm = l.number("noise_power_dbm", def.noise_power_dbm);
  lp.blockage_loss_db = l.number("blockage_loss_db", def.blockage_loss_db);
  root.put("link", l.finish());
  try {
    validate_link_params(lp);
  } catch (const ConfigError& e) {
    field_error("link", e.what());
  }
}

void read_schedule(Obj& root, ScenarioSpec& s) {
  Obj o = root.object("schedule");
  learn::TrainSchedule& t = s.schedule;
  const learn::TrainSchedule d;
  t.episodes = static_cast<int>(o.integer("episodes", d.episodes));
  t.steps_per_episode = static_cast<int>(o.integer("steps_per_episode", d.steps_per_episode));
  t.batch_size = static_cast<int>(o.integer("batch_size", d.batch_size));
  t.gamma = o.number("gamma", d.gamma);
  t.actor_lr = o.number("actor_lr", d.actor_lr);
  t.critic_lr = o.number("critic_lr", d.critic_lr);
  t.tau = o.number("tau", d.tau);
  t.entropy_coef = o.number("entropy_coef", d.entropy_coef);
  {
    const json* v = o.raw("aggregation_interval");
    if (!v || (v->is_string() && v->get<std::string>() == "never")) {
      t.aggregation_interval.reset();
      o.put("aggregation_interval", "never");
    } else if (v->is_number_integer()) {
      t.aggregation_interval = v->get<int>();
      o.put("aggregation_interval", *t.aggregation_interval);
    } else {
      field_error("schedule.aggregation_interval", "expected a positive integer or \"never\"");
    }
  }
  {
    const std::vector<double> h = o.numbers("hidden", std::vector<double>{128, 32});
    t.hidden.clear();
    for (double x : h) {
      if (x != std::floor(x)) field_error("schedule.hidden", "layer widths must be integers");
      t.hidden.push_back(static_cast<int>(x));
    }
  }
  t.replay_capacity = static_cast<int>(o.integer("replay_capacity", d.replay_capacity));
  t.warmup_steps = static_cast<int>(o.integer("warmup_steps", d.warmup_steps));
  t.update_every = static_cast<int>(o.integer("update_every", d.update_every));
  t.epsilon_start = o.number("epsilon_start", d.epsilon_start);
  t.epsilon_end = o.number("epsilon_end", d.epsilon_end);
  t.epsilon_decay_steps = static_cast<int>(o.integer("epsilon_decay_steps", d.epsilon_decay_steps));
  t.target_sync_interval = static_cast<int>(o.integer("target_sync_interval", d.target_sync_interval));
  t.exploration_noise = o.number("exploration_noise", d.exploration_noise);
  t.max_grad_norm = o.number("max_grad_norm", d.max_grad_norm);
  t.reward_floor = o.number("reward_floor", d.reward_floor);
  root.put("schedule", o.finish());
  try {
    learn::validate_schedule(t);
  } catch (const ConfigError& e) {
    throw ConfigError(e.what());  // already carries the "schedule." path
  }
}

void read_case1(Obj& root, ScenarioSpec& s) {
  Obj o = root.object("case1");
  if (!o.present()) field_error("case1", "required block is missing for case1 scenarios");
  case1::Case1Config& c = s.case1.config;
  const case1::Case1Config d;
  c.destinations = o.positions("destinations", true);
  c.deadline = static_cast<int>(o.integer("deadline", d.deadline));
  c.speed = o.number("speed", d.speed);
  c.decision_interval = o.number("decision_interval", d.decision_interval);
  c.power_levels = o.numbers("power_levels_w", d.power_levels);
  c.max_power_dbm = o.number("max_power_dbm", d.max_power_dbm);
  const std::string mode = o.string("access_mode", "noma");
  if (mode == "noma")
    c.access_mode = case1::AccessMode::kNoma;
  else if (mode == "oma")
    c.access_mode = case1::AccessMode::kOma;
  else
    field_error("case1.access_mode", "expected \"noma\" or \"oma\"");
  c.motion_power = o.number("motion_power_w", d.motion_power);
  c.circuit_power = o.number("circuit_power_w", d.circuit_power);
  {
    Obj r = o.object("reward");
    c.reward_weights.rate_w = r.number("rate_w", d.reward_weights.rate_w);
    c.reward_weights.time_penalty_w = r.number("time_penalty_w", d.reward_weights.time_penalty_w);
    c.reward_weights.goal_bonus = r.number("goal_bonus", d.reward_weights.goal_bonus);
    o.put("reward", r.finish());
  }
  c.ris_bits = static_cast<int>(o.integer("ris_bits", d.ris_bits));
  c.arrival_radius = o.number("arrival_radius", d.arrival_radius);
  if (o.has("area")) {
    Obj a = o.object("area");
    c.area = case1::Area{a.position("min", std::nullopt), a.position("max", std::nullopt)};
    o.put("area", a.finish());
  } else {
    o.raw("area");
    o.put("area", nullptr);
  }
  s.case1.eval_episodes = static_cast<int>(o.integer("eval_episodes", 100));
  if (s.case1.eval_episodes < 1) field_error("case1.eval_episodes", "must be >= 1");
  root.put("case1", o.finish());
  c.topology = s.topology;
  c.link = s.link;
  try {
    case1::validate_config(c);
  } catch (const ConfigError& e) {
    field_error("case1", e.what());
  }
}

void read_case2(Obj& root, ScenarioSpec& s) {
  Obj o = root.object("case2");
  if (!o.present()) field_error("case2", "required block is missing for case2 scenarios");
  Case2Block& c = s.case2;
  std::vector<double> deg = o.numbers("target_angles_deg", std::vector<double>{});
  if (deg.empty()) {
    // Angles of the topology's targets seen from BS 0.
    if (s.topology.targets.empty())
      field_error("case2.target_angles_deg", "give target angles or topology.targets");
    for (const auto& tg : s.topology.targets)
      deg.push_back(std::asin(ula_sine(s.topology.bs_list.front().position, tg)) / kDeg);
    o.put("target_angles_deg", deg);
  }
  c.target_angles.clear();
  for (double a : deg) {
    if (a < -90.0 || a > 90.0) field_error("case2.target_angles_deg", "angles must lie in [-90, 90]");
    c.target_angles.push_back(a * kDeg);
  }
  c.ris_phases = o.numbers("ris_phases_rad", std::vector<double>{});
  if (!c.ris_phases.empty() &&
      c.ris_phases.size() != static_cast<std::size_t>(s.topology.ris.elements))
    field_error("case2.ris_phases_rad", "needs one phase per RIS element");
  c.power_budget_dbm = o.number("power_budget_dbm", 25.0);
  c.mainlobe_halfwidth = o.number("mainlobe_halfwidth_deg", 5.0) * kDeg;
  if (!(c.mainlobe_halfwidth > 0.0)) field_error("case2.mainlobe_halfwidth_deg", "must be > 0");
  c.weight_count = static_cast<int>(o.integer("weights", 11));
  if (c.weight_count < 2) field_error("case2.weights", "must be >= 2");
  {
    Obj v = o.object("solver");
    const isac::SolverParams d;
    c.solver.step_size = v.number("step_size", d.step_size);
    c.solver.iterations = static_cast<int>(v.integer("iterations", d.iterations));
    c.solver.restarts = static_cast<int>(v.integer("restarts", d.restarts));
    c.solver.temperature = v.number("temperature", d.temperature);
    if (!(c.solver.step_size > 0.0)) field_error("case2.solver.step_size", "must be > 0");
    if (c.solver.iterations < 1) field_error("case2.solver.iterations", "must be >= 1");
    if (c.solver.restarts < 0) field_error("case2.solver.restarts", "must be >= 0");
    if (!(c.solver.temperature > 0.0)) field_error("case2.solver.temperature", "must be > 0");
    o.put("solver", v.finish());
  }
  c.compare_independent = o.boolean("compare_independent", true);
  root.put("case2", o.finish());
}

void read_case3(Obj& root, ScenarioSpec& s) {
  Obj o = root.object("case3");
  if (!o.present()) field_error("case3", "required block is missing for case3 scenarios");
  aircomp::Case3Config& c = s.case3.config;
  const aircomp::Case3Config d;
  c.tau_dl = o.number("tau_dl", d.tau_dl);
  c.tau_ul = o.number("tau_ul", d.tau_ul);
  c.eh_efficiency = o.number("eh_efficiency", d.eh_efficiency);
  c.aging.rho = o.number("rho", d.aging.rho);
  c.aging.velocity_mps = o.number("velocity_mps", d.aging.velocity_mps);
  c.csi.error_variance = o.number("csi_error_variance", d.csi.error_variance);
  c.csi.relative = o.boolean("csi_error_relative", d.csi.relative);
  c.bs_power_budget = o.number("bs_power_budget_w", d.bs_power_budget);
  c.penalty_weight = o.number("penalty_weight", d.penalty_weight);
  c.episode_length = static_cast<int>(o.integer("episode_length", d.episode_length));
  try {
    s.case3.variant = learn::parse_variant(o.string("variant", "double_sac"));
  } catch (const ConfigError& e) {
    field_error("case3.variant", e.what());
  }
  root.put("case3", o.finish());
  c.topology = s.topology;
  c.link = s.link;
  try {
    aircomp::validate_config(c);
  } catch (const ConfigError& e) {
    field_error("case3", e.what());
  }
}

void apply_override(json& doc, const Override& ov) {
  json* node = &doc;
  std::string rest = ov.path;
  while (true) {
    const auto dot = rest.find('.');
    const std::string key = rest.substr(0, dot);
    if (key.empty()) throw ConfigError("override '" + ov.path + "': empty path segment");
    if (!node->is_object()) throw ConfigError("override '" + ov.path + "': '" + key + "' is not inside an object");
    if (dot == std::string::npos) {
      json value;
      try {
        value = json::parse(ov.value);
      } catch (const json::parse_error&) {
        value = ov.value;
      }
      (*node)[key] = std::move(value);
      return;
    }
    json& next = (*node)[key];
    if (next.is_null()) next = json::object();
    node = &next;
    rest = rest.substr(dot + 1);
  }
}

std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

std::string case_name(CaseId c) {
  switch (c) {
    case CaseId::kCase1: return "case1";
    case CaseId::kCase2: return "case2";
    case CaseId::kCase3: return "case3";
  }
  return "unknown";
}

CaseId parse_case(const std::string& name) {
  if (name == "case1") return CaseId::kCase1;
  if (name == "case2") return CaseId::kCase2;
  if (name == "case3") return CaseId::kCase3;
  throw ConfigError("case: expected case1, case2 or case3, got '" + name + "'");
}

Override parse_override(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override '" + text + "': expected key.path=value");
  return {text.substr(0, eq), text.substr(eq + 1)};
}

ScenarioSpec parse_scenario(const std::string& text, const std::vector<Override>& overrides,
                            const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // e.byte is one past the offending character.
    const auto [line, col] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
    std::string msg = e.what();
    const auto p = msg.find("syntax error");
    throw ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " +
                      (p == std::string::npos ? msg : msg.substr(p)));
  }
  for (const auto& ov : overrides) apply_override(doc, ov);

  ScenarioSpec s;
  Obj root(&doc, "");
  s.case_id = parse_case(root.string("case", std::nullopt));
  s.name = root.string("name", "scenario");
  if (s.name.empty() || s.name.find_first_of("/\\ \t\n") != std::string::npos)
    field_error("name", "must be non-empty and contain no whitespace or path separators");
  {
    const json* v = root.raw("seeds");
    if (!v) field_error("seeds", "required field is missing");
    if (!v->is_array() || v->empty()) field_error("seeds", "expected a non-empty array of integers");
    json arr = json::array();
    for (std::size_t i = 0; i < v->size(); ++i) {
      const json& e = (*v)[i];
      if (!e.is_number_unsigned()) field_error("seeds[" + std::to_string(i) + "]", "expected a non-negative integer");
      s.seeds.push_back(e.get<std::uint64_t>());
      arr.push_back(s.seeds.back());
    }
    root.put("seeds", arr);
  }
  if (const json* v = root.raw("output_dir")) {
    if (!v->is_string()) field_error("output_dir", "expected a string");
    s.output_dir = v->get<std::string>();
  }
  read_topology(root, s);
  read_link(root, s);
  read_schedule(root, s);
  // Only the selected case block is read; others must be absent.
  const std::string blocks[] = {"case1", "case2", "case3"};
  for (const auto& b : blocks)
    if (b != case_name(s.case_id) && root.has(b))
      field_error(b, "block does not belong to a " + case_name(s.case_id) + " scenario");
  switch (s.case_id) {
    case CaseId::kCase1: read_case1(root, s); break;
    case CaseId::kCase2: read_case2(root, s); break;
    case CaseId::kCase3: read_case3(root, s); break;
  }
  json normalized = root.finish();
  normalized.erase("output_dir");
  s.canonical = normalized.dump();
  s.hash = fnv1a64(s.canonical);
  return s;
}

ScenarioSpec load_scenario(const std::string& path, const std::vector<Override>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open scenario file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), overrides, path);
}

}  // namespace risiort::app
