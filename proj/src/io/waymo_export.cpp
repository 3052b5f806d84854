// Copyright 2026 The cascade3d Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cascade3d/waymo_export.hpp"

#include <json.hpp>

#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "cascade3d/kitti.hpp"
#include "text_util.hpp"

namespace cascade3d::waymo
{

using nlohmann::json;

std::vector<ExportLabel> parse_labels(std::istream & in, const std::string & source)
{
  std::vector<ExportLabel> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = detail::trim(line);
    if (body.empty() || body.front() == '#') {
      continue;
    }
    try {
      const json j = json::parse(line);
      ExportLabel l;
      l.frame_id = j.at("frame").is_string() ? j.at("frame").get<std::string>()
                                             : std::to_string(j.at("frame").get<long long>());
      l.class_name = j.at("class").get<std::string>();
      l.box = {j.at("cx").get<double>(), j.at("cy").get<double>(), j.at("cz").get<double>(),
               j.at("l").get<double>(),  j.at("w").get<double>(),  j.at("h").get<double>(),
               j.at("yaw").get<double>()};
      l.num_points = j.value("num_points", std::size_t{0});
      if (j.contains("score")) {
        l.score = j.at("score").get<double>();
      }
      out.push_back(std::move(l));
    } catch (const json::exception & e) {
      throw kitti::ParseError(source, line_no, e.what());
    }
  }
  return out;
}

std::vector<ExportLabel> read_labels(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw kitti::ParseError(path.string(), 0, "cannot open file");
  }
  return parse_labels(in, path.string());
}

void write_labels(std::ostream & out, std::span<const ExportLabel> labels)
{
  for (const ExportLabel & l : labels) {
    json j = {
      {"frame", l.frame_id}, {"class", l.class_name}, {"cx", l.box.cx}, {"cy", l.box.cy},
      {"cz", l.box.cz},      {"l", l.box.l},          {"w", l.box.w},   {"h", l.box.h},
      {"yaw", l.box.yaw},    {"num_points", l.num_points}};
    if (l.score) {
      j["score"] = *l.score;
    }
    out << j.dump() << '\n';
  }
}

void write_labels(const std::filesystem::path & path, std::span<const ExportLabel> labels)
{
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error(path.string() + ": cannot open for writing");
  }
  write_labels(out, labels);
}

}  // namespace cascade3d::waymo
