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

#include "cascade3d/kitti.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "cascade3d/geometry.hpp"
#include "text_util.hpp"

namespace cascade3d::kitti
{
namespace
{

namespace fs = std::filesystem;

Eigen::Matrix4d rect_from_velo(const CalibBundle & c)
{
  Eigen::Matrix4d r0 = Eigen::Matrix4d::Identity();
  Eigen::Matrix4d tr = Eigen::Matrix4d::Identity();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      r0(i, j) = c.R0_rect[static_cast<std::size_t>(i * 3 + j)];
    }
    for (int j = 0; j < 4; ++j) {
      tr(i, j) = c.Tr_velo_to_cam[static_cast<std::size_t>(i * 4 + j)];
    }
  }
  return r0 * tr;
}

Eigen::Matrix4d velo_from_rect(const CalibBundle & c)
{
  const Eigen::Matrix4d t = rect_from_velo(c);
  if (std::fabs(t.determinant()) < 1e-12) {
    throw std::domain_error("singular camera-to-LiDAR transform");
  }
  return t.inverse();
}

bool orthonormal(const Eigen::Matrix3d & m, double tol)
{
  return (m * m.transpose() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <= tol;
}

std::string fmt6(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  // Avoid "-0.000000", which would not round-trip byte-for-byte.
  if (std::strcmp(buf, "-0.000000") == 0) {
    return "0.000000";
  }
  return buf;
}

std::string read_text(const fs::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError(path.string(), 0, "cannot open file");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

ParseError::ParseError(const std::string & path, std::size_t line, const std::string & what)
: std::runtime_error(
    (path.empty() ? std::string("<input>") : path) +
    (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + what),
  path_(path),
  line_(line)
{
}

PointCloud read_velodyne_bin(const fs::path & path, ReadStats * stats)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError(path.string(), 0, "cannot open file");
  }
  const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (bytes.size() % 16 != 0) {
    throw ParseError(path.string(), 0, "truncated point record");
  }
  const std::size_t n = bytes.size() / 16;
  PointCloud cloud;
  cloud.reserve(n);
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < n; ++i) {
    float v[4];
    for (int k = 0; k < 4; ++k) {
      std::uint32_t raw = 0;
      std::memcpy(&raw, bytes.data() + i * 16 + static_cast<std::size_t>(k) * 4, 4);
      if constexpr (std::endian::native == std::endian::big) {
        raw = ((raw & 0xffu) << 24) | ((raw & 0xff00u) << 8) | ((raw >> 8) & 0xff00u) |
              (raw >> 24);
      }
      v[k] = std::bit_cast<float>(raw);
    }
    if (!std::isfinite(v[0]) || !std::isfinite(v[1]) || !std::isfinite(v[2])) {
      ++dropped;
      continue;
    }
    cloud.push_back(v[0], v[1], v[2], v[3]);
  }
  if (stats != nullptr) {
    stats->dropped_non_finite = dropped;
  }
  return cloud;
}

void write_velodyne_bin(const fs::path & path, const PointCloud & cloud)
{
  std::string bytes(cloud.size() * 16, '\0');
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const float v[4] = {
      static_cast<float>(cloud.x()[i]), static_cast<float>(cloud.y()[i]),
      static_cast<float>(cloud.z()[i]), static_cast<float>(cloud.intensity()[i])};
    for (int k = 0; k < 4; ++k) {
      auto raw = std::bit_cast<std::uint32_t>(v[k]);
      if constexpr (std::endian::native == std::endian::big) {
        raw = ((raw & 0xffu) << 24) | ((raw & 0xff00u) << 8) | ((raw >> 8) & 0xff00u) |
              (raw >> 24);
      }
      std::memcpy(bytes.data() + i * 16 + static_cast<std::size_t>(k) * 4, &raw, 4);
    }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()))) {
    throw std::runtime_error(path.string() + ": write failed");
  }
}

Label parse_label_line(std::string_view line, const std::string & path, std::size_t line_no)
{
  const std::vector<std::string_view> f = detail::split_ws(line);
  if (f.size() != 15 && f.size() != 16) {
    throw ParseError(
      path, line_no, "expected 15 or 16 fields, got " + std::to_string(f.size()));
  }
  auto num = [&](std::size_t i) {
    const auto v = detail::parse_double(f[i]);
    if (!v) {
      throw ParseError(path, line_no, "bad number '" + std::string(f[i]) + "'");
    }
    return *v;
  };
  Label l;
  l.class_name = std::string(f[0]);
  l.truncation = num(1);
  {
    const auto occ = detail::parse_int(f[2]);
    if (!occ) {
      throw ParseError(path, line_no, "bad occlusion '" + std::string(f[2]) + "'");
    }
    l.occlusion = *occ;
  }
  l.alpha = num(3);
  l.bbox2d = {num(4), num(5), num(6), num(7)};
  l.dims_cam = {num(8), num(9), num(10)};
  l.loc_cam = {num(11), num(12), num(13)};
  l.ry = num(14);
  if (f.size() == 16) {
    l.score = num(15);
  }
  return l;
}

std::vector<Label> parse_label_file(const fs::path & path)
{
  const std::string text = read_text(path);
  std::vector<Label> out;
  std::size_t line_no = 0;
  for (std::string_view line : detail::split_lines(text)) {
    ++line_no;
    if (detail::split_ws(line).empty()) {
      continue;
    }
    out.push_back(parse_label_line(line, path.string(), line_no));
  }
  return out;
}

std::string format_label(const Label & l)
{
  std::string s = l.class_name;
  s += ' ' + fmt6(l.truncation);
  s += ' ' + std::to_string(l.occlusion);
  s += ' ' + fmt6(l.alpha);
  for (double v : l.bbox2d) {
    s += ' ' + fmt6(v);
  }
  for (double v : l.dims_cam) {
    s += ' ' + fmt6(v);
  }
  for (double v : l.loc_cam) {
    s += ' ' + fmt6(v);
  }
  s += ' ' + fmt6(l.ry);
  if (l.score) {
    s += ' ' + fmt6(*l.score);
  }
  return s;
}

CalibBundle CalibBundle::canonical()
{
  CalibBundle c;
  c.R0_rect = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  c.Tr_velo_to_cam = {0, -1, 0, 0, 0, 0, -1, 0, 1, 0, 0, 0};
  c.P2 = {721.5377, 0, 609.5593, 44.85728, 0, 721.5377, 172.854, 0.2163791, 0, 0, 1, 0.002745884};
  return c;
}

CalibBundle parse_calib_text(std::string_view text, const std::string & path)
{
  CalibBundle c;
  bool have_r0 = false;
  bool have_tr = false;
  std::size_t line_no = 0;
  for (std::string_view line : detail::split_lines(text)) {
    ++line_no;
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) {
      continue;
    }
    const std::string key{detail::trim(line.substr(0, colon))};
    const std::vector<std::string_view> f = detail::split_ws(line.substr(colon + 1));
    auto take = [&](auto & dst) {
      if (f.size() != dst.size()) {
        throw ParseError(
          path, line_no,
          key + ": expected " + std::to_string(dst.size()) + " values, got " +
            std::to_string(f.size()));
      }
      for (std::size_t i = 0; i < f.size(); ++i) {
        const auto v = detail::parse_double(f[i]);
        if (!v) {
          throw ParseError(path, line_no, key + ": bad number '" + std::string(f[i]) + "'");
        }
        dst[i] = *v;
      }
    };
    if (key == "P2") {
      take(c.P2);
    } else if (key == "R0_rect" || key == "R_rect") {
      take(c.R0_rect);
      have_r0 = true;
    } else if (key == "Tr_velo_to_cam" || key == "Tr_velo_cam") {
      take(c.Tr_velo_to_cam);
      have_tr = true;
    }
  }
  if (!have_r0 || !have_tr) {
    throw ParseError(path, 0, "calibration needs R0_rect and Tr_velo_to_cam");
  }
  validate_calib(c, path);
  return c;
}

CalibBundle parse_calib_file(const fs::path & path)
{
  return parse_calib_text(read_text(path), path.string());
}

void validate_calib(const CalibBundle & c, const std::string & path)
{
  Eigen::Matrix3d r0;
  Eigen::Matrix3d tr;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      r0(i, j) = c.R0_rect[static_cast<std::size_t>(i * 3 + j)];
      tr(i, j) = c.Tr_velo_to_cam[static_cast<std::size_t>(i * 4 + j)];
    }
  }
  if (!orthonormal(r0, 1e-3)) {
    throw ParseError(path, 0, "R0_rect is not orthonormal");
  }
  if (!orthonormal(tr, 1e-3)) {
    throw ParseError(path, 0, "Tr_velo_to_cam rotation is not orthonormal");
  }
}

std::string format_calib(const CalibBundle & c)
{
  auto row = [](std::string_view key, std::span<const double> v) {
    std::string s{key};
    s += ':';
    for (double x : v) {
      char buf[40];
      std::snprintf(buf, sizeof(buf), " %.12e", x);
      s += buf;
    }
    return s + '\n';
  };
  const std::array<double, 12> zeros{};
  return row("P0", zeros) + row("P1", zeros) + row("P2", c.P2) + row("P3", zeros) +
         row("R0_rect", c.R0_rect) + row("Tr_velo_to_cam", c.Tr_velo_to_cam);
}

Box3D camera_box_to_lidar(const Label & label, const CalibBundle & calib)
{
  const double h = label.dims_cam[0];
  const double w = label.dims_cam[1];
  const double l = label.dims_cam[2];
  // Camera Y points down: the geometric center is h/2 above the bottom.
  const Eigen::Vector4d center_rect(
    label.loc_cam[0], label.loc_cam[1] - 0.5 * h, label.loc_cam[2], 1.0);
  const Eigen::Vector4d p = velo_from_rect(calib) * center_rect;
  return {p.x(), p.y(), p.z(), l, w, h, normalize_angle(-label.ry - 0.5 * std::numbers::pi)};
}

Label lidar_box_to_camera(const Box3D & box, const CalibBundle & calib, Label base)
{
  const Eigen::Matrix4d t = rect_from_velo(calib);
  const Eigen::Vector4d c = t * Eigen::Vector4d(box.cx, box.cy, box.cz, 1.0);
  base.dims_cam = {box.h, box.w, box.l};
  base.loc_cam = {c.x(), c.y() + 0.5 * box.h, c.z()};
  base.ry = normalize_angle(-box.yaw - 0.5 * std::numbers::pi);
  base.alpha = normalize_angle(base.ry - std::atan2(c.x(), c.z()));

  const bool has_p2 = std::any_of(calib.P2.begin(), calib.P2.end(), [](double v) { return v != 0.0; });
  if (has_p2) {
    double u_min = INFINITY;
    double v_min = INFINITY;
    double u_max = -INFINITY;
    double v_max = -INFINITY;
    bool in_front = true;
    for (const auto & corner : corners(box)) {
      const Eigen::Vector4d q = t * Eigen::Vector4d(corner[0], corner[1], corner[2], 1.0);
      const auto & P = calib.P2;
      const double zc = P[8] * q.x() + P[9] * q.y() + P[10] * q.z() + P[11];
      if (zc <= 1e-3) {
        in_front = false;
        break;
      }
      const double u = (P[0] * q.x() + P[1] * q.y() + P[2] * q.z() + P[3]) / zc;
      const double v = (P[4] * q.x() + P[5] * q.y() + P[6] * q.z() + P[7]) / zc;
      u_min = std::min(u_min, u);
      u_max = std::max(u_max, u);
      v_min = std::min(v_min, v);
      v_max = std::max(v_max, v);
    }
    if (in_front) {
      base.bbox2d = {u_min, v_min, u_max, v_max};
    }
  }
  return base;
}

std::string_view to_string(Difficulty d)
{
  switch (d) {
    case Difficulty::Easy:
      return "Easy";
    case Difficulty::Moderate:
      return "Moderate";
    case Difficulty::Hard:
      return "Hard";
    case Difficulty::Ignored:
      return "Ignored";
  }
  return "?";
}

Difficulty difficulty_of(const Label & label)
{
  if (label.is_dont_care()) {
    return Difficulty::Ignored;
  }
  const double height = label.bbox2d[3] - label.bbox2d[1];
  const int occ = label.occlusion;
  const double trunc = label.truncation;
  if (height >= 40.0 && occ <= 0 && trunc <= 0.15) {
    return Difficulty::Easy;
  }
  if (height >= 25.0 && occ <= 1 && trunc <= 0.30) {
    return Difficulty::Moderate;
  }
  if (height >= 25.0 && occ <= 2 && trunc <= 0.50) {
    return Difficulty::Hard;
  }
  return Difficulty::Ignored;
}

std::string frame_file_stem(std::string_view frame_id)
{
  const bool numeric = !frame_id.empty() &&
                       std::all_of(frame_id.begin(), frame_id.end(), [](char ch) {
                         return ch >= '0' && ch <= '9';
                       });
  if (!numeric || frame_id.size() >= 6) {
    return std::string(frame_id);
  }
  return std::string(6 - frame_id.size(), '0') + std::string(frame_id);
}

void write_detections(
  std::span<const DetectionRecord> records, const CalibLookup & calib, const fs::path & out_dir,
  std::span<const std::string> extra_frames)
{
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    throw std::runtime_error(out_dir.string() + ": " + ec.message());
  }
  std::map<std::string, std::vector<const DetectionRecord *>> by_frame;
  for (const std::string & f : extra_frames) {
    by_frame[frame_file_stem(f)];
  }
  for (const DetectionRecord & r : records) {
    by_frame[frame_file_stem(r.frame_id)].push_back(&r);
  }
  for (const auto & [stem, recs] : by_frame) {
    const fs::path path = out_dir / (stem + ".txt");
    std::ofstream out(path);
    if (!out) {
      throw std::runtime_error(path.string() + ": cannot open for writing");
    }
    for (const DetectionRecord * r : recs) {
      Label base;
      base.class_name = r->class_name;
      base.truncation = -1.0;
      base.occlusion = -1;
      base.score = r->score;
      out << format_label(lidar_box_to_camera(r->box, calib(r->frame_id), base)) << '\n';
    }
    if (!out) {
      throw std::runtime_error(path.string() + ": write failed");
    }
  }
}

std::vector<DetectionRecord> read_detections(const fs::path & dir, const CalibLookup & calib)
{
  std::error_code ec;
  std::vector<fs::path> files;
  for (const auto & entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      files.push_back(entry.path());
    }
  }
  if (ec) {
    throw std::runtime_error(dir.string() + ": " + ec.message());
  }
  std::sort(files.begin(), files.end());
  std::vector<DetectionRecord> out;
  for (const fs::path & path : files) {
    const std::string frame = path.stem().string();
    const std::vector<Label> labels = parse_label_file(path);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const Label & l = labels[i];
      if (!l.score) {
        throw ParseError(path.string(), i + 1, "result line without score");
      }
      out.push_back({frame, camera_box_to_lidar(l, calib(frame)), l.class_name, *l.score});
    }
  }
  return out;
}

}  // namespace cascade3d::kitti
