#include "ucql/episode_log.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace ucql {

using Json = nlohmann::ordered_json;

std::string episode_to_json_line(const Episode& e) {
  Json j;
  j["id"] = e.id;
  j["condition"] = e.condition ? Json(std::string(to_string(*e.condition))) : Json(nullptr);
  j["scenario"] = e.scenario ? Json(std::string(to_string(*e.scenario))) : Json(nullptr);

  Json frames = Json::array();
  const auto& fs = e.trajectory.frames();
  for (std::size_t i = 0; i < fs.size(); ++i) {
    const PasserbyFrame& f = fs[i];
    Json jf;
    jf["t"] = f.t;
    jf["state"] = i < e.states.size() ? code(e.states[i]) : 0;
    if (f.detected) {
      jf["p"] = {f.p.x, f.p.y, f.p.z};
      jf["theta"] = {f.theta.yaw, f.theta.roll, f.theta.pitch};
    }
    frames.push_back(std::move(jf));
  }
  j["frames"] = std::move(frames);

  Json events = Json::array();
  for (const ActionEvent& ev : e.events) {
    events.push_back({{"t", ev.t_a},
                      {"action", action(ev.action).symbol()},
                      {"state", ev.state_at_selection.symbol()},
                      {"finished", ev.finished}});
  }
  j["events"] = std::move(events);

  if (e.labels) {
    j["labels"] = {{"used_service", e.labels->used_service}, {"discomforted", e.labels->discomforted}};
  } else {
    j["labels"] = nullptr;
  }
  return j.dump();
}

Episode episode_from_json_line(const std::string& line) {
  Episode e;
  try {
    const Json j = Json::parse(line);
    e.id = j.at("id").get<std::uint64_t>();
    if (!j.at("condition").is_null()) e.condition = parse_condition(j["condition"].get<std::string>());
    if (!j.at("scenario").is_null()) e.scenario = parse_scenario(j["scenario"].get<std::string>());
    for (const Json& jf : j.at("frames")) {
      PasserbyFrame f = PasserbyFrame::missing(jf.at("t").get<double>());
      if (jf.contains("p")) {
        const auto& p = jf["p"];
        const auto& th = jf.at("theta");
        f.detected = true;
        f.p = {p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()};
        f.theta = {th.at(0).get<double>(), th.at(1).get<double>(), th.at(2).get<double>()};
      }
      e.trajectory.push_back(f);
      e.states.push_back(base_state_from_code(jf.at("state").get<int>()));
    }
    for (const Json& je : j.at("events")) {
      e.events.push_back({je.at("t").get<double>(), parse_action_symbol(je.at("action").get<std::string>()),
                          TransitionState::parse(je.at("state").get<std::string>()),
                          je.at("finished").get<bool>()});
    }
    if (!j.at("labels").is_null()) {
      e.labels = EpisodeLabels{j["labels"].at("used_service").get<bool>(),
                               j["labels"].at("discomforted").get<bool>()};
    }
  } catch (const nlohmann::json::exception& ex) {
    throw std::runtime_error(std::string("malformed episode record: ") + ex.what());
  } catch (const std::invalid_argument& ex) {
    throw std::runtime_error(std::string("malformed episode record: ") + ex.what());
  } catch (const std::out_of_range& ex) {
    throw std::runtime_error(std::string("malformed episode record: ") + ex.what());
  }
  return e;
}

void write_episode_log(std::ostream& out, const std::vector<Episode>& episodes) {
  for (const Episode& e : episodes) out << episode_to_json_line(e) << '\n';
}

std::vector<Episode> read_episode_log(std::istream& in) {
  std::vector<Episode> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(episode_from_json_line(line));
  }
  return out;
}

std::vector<Episode> read_episode_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return read_episode_log(in);
}

}  // namespace ucql
