#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ucql/domain.hpp"

namespace ucql {

// One JSON object per line:
//   {"id":..,"condition":"before"|"after"|null,"scenario":"pass_through"|"curious"|null,
//    "frames":[{"t":..,"state":..,"p":[x,y,z],"theta":[yaw,roll,pitch]},..],
//    "events":[{"t":..,"action":"a1","state":"s01","finished":true},..],
//    "labels":{"used_service":..,"discomforted":..}|null}
// "p" and "theta" are omitted for frames where nobody was detected.
std::string episode_to_json_line(const Episode& e);
Episode episode_from_json_line(const std::string& line);

void write_episode_log(std::ostream& out, const std::vector<Episode>& episodes);
std::vector<Episode> read_episode_log(std::istream& in);
std::vector<Episode> read_episode_log(const std::filesystem::path& path);

}  // namespace ucql
