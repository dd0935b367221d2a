#include "ucql/run_config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace ucql {

using Json = nlohmann::ordered_json;

namespace {

Json point_json(Point2 p) { return Json::array({p.x, p.y}); }
Json rect_json(const Rect& r) { return Json::array({r.x0, r.y0, r.x1, r.y1}); }

Point2 point_from(const Json& j) { return {j[0].get<double>(), j[1].get<double>()}; }
Rect rect_from(const Json& j) {
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

std::string_view policy_name(PolicyKind::Type t) {
  switch (t) {
    case PolicyKind::Type::Greedy:
      return "greedy";
    case PolicyKind::Type::EpsilonGreedy:
      return "epsilon_greedy";
    case PolicyKind::Type::Softmax:
      return "softmax";
  }
  return "softmax";
}

Json policy_json(const PolicyKind& p) {
  return {{"type", std::string(policy_name(p.type))}, {"epsilon", p.epsilon}};
}

PolicyKind policy_from(const Json& j, const std::string& where) {
  const auto type = j["type"].get<std::string>();
  const double eps = j["epsilon"].get<double>();
  if (type == "greedy") return PolicyKind::greedy();
  if (type == "softmax") return PolicyKind::softmax();
  if (type == "epsilon_greedy") {
    if (!(eps >= 0.0 && eps <= 1.0)) throw ConfigError(where + ".epsilon must be in [0,1]");
    return PolicyKind::epsilon_greedy(eps);
  }
  throw ConfigError(where + ".type must be greedy, epsilon_greedy or softmax");
}

Json to_json(const RunConfig& c) {
  const LearnerParams& l = c.learner;
  const EstimatorConfig& e = c.estimator;
  const WorldConfig& w = c.world;
  Json j;
  j["seed"] = c.seed;
  j["episodes"] = {{"train", c.episodes.train}, {"evaluate", c.episodes.evaluate}};
  j["learner"] = {{"alpha", l.alpha}, {"gamma", l.gamma}, {"k_T", l.k_T}, {"T_min", l.T_min},
                  {"q_C", l.q_C},     {"q_H", l.q_H},     {"c_a", l.c_a}, {"c_s", l.c_s},
                  {"c_g", l.c_g}};
  j["estimator"] = {{"exhibit_pos", point_json(e.exhibit_pos)},
                    {"engage_radius", e.engage_radius},
                    {"look_cone_rad", e.look_cone_rad},
                    {"walk_speed_min", e.walk_speed_min},
                    {"dwell_established_s", e.dwell_established_s},
                    {"approach_dot_min", e.approach_dot_min},
                    {"velocity_window_s", e.velocity_window_s},
                    {"gaze_window_s", e.gaze_window_s}};
  j["world"] = {{"exhibit", point_json(w.exhibit)},
                {"exhibition_space", rect_json(w.exhibition_space)},
                {"aisle", rect_json(w.aisle)},
                {"seat_space", rect_json(w.seat_space)},
                {"wc_path", rect_json(w.wc_path)},
                {"sensing_region", rect_json(w.sensing_region)},
                {"aisle_y", w.aisle_y},
                {"viewing_point", point_json(w.viewing_point)},
                {"engage_point", point_json(w.engage_point)},
                {"head_height", w.head_height},
                {"dt", w.dt},
                {"max_episode_s", w.max_episode_s},
                {"position_noise_sd", w.position_noise_sd},
                {"yaw_noise_sd", w.yaw_noise_sd},
                {"curious_weight", w.curious_weight},
                {"base_engage", w.base_engage},
                {"greeting_boost", w.greeting_boost},
                {"annoy_probability", w.annoy_probability},
                {"gaze_attract_probability", w.gaze_attract_probability},
                {"glance_probability", w.glance_probability},
                {"glance_s", w.glance_s},
                {"walk_speed", w.walk_speed},
                {"walk_speed_jitter", w.walk_speed_jitter},
                {"hurried_speed", w.hurried_speed},
                {"curious_speed", w.curious_speed},
                {"approach_speed", w.approach_speed},
                {"dwell_min_s", w.dwell_min_s},
                {"dwell_max_s", w.dwell_max_s},
                {"gaze_period_s", w.gaze_period_s},
                {"patience_s", w.patience_s},
                {"unsure_s", w.unsure_s},
                {"service_s", w.service_s}};
  j["policy"] = {{"train", policy_json(c.train_policy)}, {"evaluate", policy_json(c.eval_policy)}};
  j["evaluation"] = {{"significance", c.significance},
                     {"workers", c.workers},
                     {"cleanse",
                      {{"min_duration_s", c.cleanse.min_duration_s},
                       {"drop_all_s00", c.cleanse.drop_all_s00}}}};
  j["out"] = c.out_dir;
  return j;
}

RunConfig from_json(const Json& j) {
  RunConfig c;
  c.seed = j["seed"].get<std::uint64_t>();
  c.episodes.train = j["episodes"]["train"].get<std::uint64_t>();
  c.episodes.evaluate = j["episodes"]["evaluate"].get<std::uint64_t>();

  const Json& l = j["learner"];
  c.learner = {l["alpha"].get<double>(), l["gamma"].get<double>(), l["k_T"].get<double>(),
               l["T_min"].get<double>(), l["q_C"].get<double>(),   l["q_H"].get<double>(),
               l["c_a"].get<double>(),   l["c_s"].get<double>(),   l["c_g"].get<double>()};

  const Json& e = j["estimator"];
  EstimatorConfig& ec = c.estimator;
  ec.exhibit_pos = point_from(e["exhibit_pos"]);
  ec.engage_radius = e["engage_radius"].get<double>();
  ec.look_cone_rad = e["look_cone_rad"].get<double>();
  ec.walk_speed_min = e["walk_speed_min"].get<double>();
  ec.dwell_established_s = e["dwell_established_s"].get<double>();
  ec.approach_dot_min = e["approach_dot_min"].get<double>();
  ec.velocity_window_s = e["velocity_window_s"].get<double>();
  ec.gaze_window_s = e["gaze_window_s"].get<double>();

  const Json& w = j["world"];
  WorldConfig& wc = c.world;
  wc.exhibit = point_from(w["exhibit"]);
  wc.exhibition_space = rect_from(w["exhibition_space"]);
  wc.aisle = rect_from(w["aisle"]);
  wc.seat_space = rect_from(w["seat_space"]);
  wc.wc_path = rect_from(w["wc_path"]);
  wc.sensing_region = rect_from(w["sensing_region"]);
  wc.aisle_y = w["aisle_y"].get<double>();
  wc.viewing_point = point_from(w["viewing_point"]);
  wc.engage_point = point_from(w["engage_point"]);
  wc.head_height = w["head_height"].get<double>();
  wc.dt = w["dt"].get<double>();
  wc.max_episode_s = w["max_episode_s"].get<double>();
  wc.position_noise_sd = w["position_noise_sd"].get<double>();
  wc.yaw_noise_sd = w["yaw_noise_sd"].get<double>();
  wc.curious_weight = w["curious_weight"].get<double>();
  wc.base_engage = w["base_engage"].get<double>();
  wc.greeting_boost = w["greeting_boost"].get<double>();
  wc.annoy_probability = w["annoy_probability"].get<double>();
  wc.gaze_attract_probability = w["gaze_attract_probability"].get<double>();
  wc.glance_probability = w["glance_probability"].get<double>();
  wc.glance_s = w["glance_s"].get<double>();
  wc.walk_speed = w["walk_speed"].get<double>();
  wc.walk_speed_jitter = w["walk_speed_jitter"].get<double>();
  wc.hurried_speed = w["hurried_speed"].get<double>();
  wc.curious_speed = w["curious_speed"].get<double>();
  wc.approach_speed = w["approach_speed"].get<double>();
  wc.dwell_min_s = w["dwell_min_s"].get<double>();
  wc.dwell_max_s = w["dwell_max_s"].get<double>();
  wc.gaze_period_s = w["gaze_period_s"].get<double>();
  wc.patience_s = w["patience_s"].get<double>();
  wc.unsure_s = w["unsure_s"].get<double>();
  wc.service_s = w["service_s"].get<double>();

  c.train_policy = policy_from(j["policy"]["train"], "policy.train");
  c.eval_policy = policy_from(j["policy"]["evaluate"], "policy.evaluate");

  const Json& ev = j["evaluation"];
  c.significance = ev["significance"].get<double>();
  c.workers = ev["workers"].get<unsigned>();
  c.cleanse.min_duration_s = ev["cleanse"]["min_duration_s"].get<double>();
  c.cleanse.drop_all_s00 = ev["cleanse"]["drop_all_s00"].get<bool>();
  c.out_dir = j["out"].get<std::string>();
  return c;
}

// Every key of `user` must exist in `defaults` with a compatible type.
void check_shape(const Json& user, const Json& defaults, const std::string& path) {
  const std::string where = path.empty() ? "config" : path;
  if (defaults.is_object()) {
    if (!user.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [key, value] : user.items()) {
      const std::string sub = path.empty() ? key : path + "." + key;
      if (!defaults.contains(key)) throw ConfigError("unknown key '" + sub + "'");
      check_shape(value, defaults[key], sub);
    }
  } else if (defaults.is_array()) {
    if (!user.is_array() || user.size() != defaults.size()) {
      throw ConfigError(where + " must be an array of " + std::to_string(defaults.size()) + " numbers");
    }
    for (const Json& v : user) {
      if (!v.is_number()) throw ConfigError(where + " must contain only numbers");
    }
  } else if (defaults.is_number_unsigned()) {
    if (!user.is_number_unsigned()) throw ConfigError(where + " must be a non-negative integer");
  } else if (defaults.is_number()) {
    if (!user.is_number()) throw ConfigError(where + " must be a number");
  } else if (defaults.is_boolean()) {
    if (!user.is_boolean()) throw ConfigError(where + " must be true or false");
  } else if (defaults.is_string()) {
    if (!user.is_string()) throw ConfigError(where + " must be a string");
  }
}

}  // namespace

std::optional<std::string> validate(const RunConfig& c) {
  if (c.episodes.train < 1) return "episodes.train must be >= 1";
  if (c.episodes.evaluate < 1) return "episodes.evaluate must be >= 1";
  if (auto err = validate(c.learner)) return "learner: " + *err;
  if (auto err = validate(c.estimator)) return "estimator: " + *err;
  if (auto err = validate(c.world)) return "world: " + *err;
  if (!(c.significance > 0.0 && c.significance < 1.0)) return "evaluation.significance must be in (0,1)";
  if (c.workers < 1) return "evaluation.workers must be >= 1";
  if (!(c.cleanse.min_duration_s > 0.0)) return "evaluation.cleanse.min_duration_s must be > 0";
  if (c.out_dir.empty()) return "out must not be empty";
  return std::nullopt;
}

std::string to_json_text(const RunConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

std::string default_config_text() { return to_json_text(RunConfig{}); }

RunConfig parse_run_config(const std::string& text) {
  Json user;
  try {
    user = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  Json merged = to_json(RunConfig{});
  check_shape(user, merged, "");
  merged.merge_patch(user);
  RunConfig cfg = from_json(merged);
  if (auto err = validate(cfg)) throw ConfigError(*err);
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

}  // namespace ucql
