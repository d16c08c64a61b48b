// Copyright 2026 The BeamsNet Authors. All Rights Reserved.
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

#include "beamsnet/data_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace bn {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_double(const std::string& s, const fs::path& file,
                    std::size_t lineno) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw MissionError(MissionError::Kind::bad_value,
                       file.string() + ":" + std::to_string(lineno) +
                           ": unparseable number \"" + s + "\"");
  return v;
}

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

CsvTable read_csv(const fs::path& file) {
  std::ifstream in(file);
  if (!in)
    throw MissionError(MissionError::Kind::unreadable,
                       "cannot open " + file.string());
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line))
    throw MissionError(MissionError::Kind::unreadable,
                       file.string() + ": empty file");
  ++lineno;
  t.columns = split_csv_line(line);
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != t.columns.size())
      throw MissionError(MissionError::Kind::bad_value,
                         file.string() + ":" + std::to_string(lineno) +
                             ": wrong field count");
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(parse_double(f, file, lineno));
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::size_t require_column(const CsvTable& t, const std::string& name,
                           const fs::path& file) {
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    if (t.columns[i] == name) return i;
  throw MissionError(MissionError::Kind::missing_column,
                     file.string() + ": missing column \"" + name + "\"");
}

std::optional<std::size_t> find_column(const CsvTable& t,
                                       const std::string& name) {
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    if (t.columns[i] == name) return i;
  return std::nullopt;
}

void check_monotone(const std::vector<double>& ts, const fs::path& file) {
  for (std::size_t i = 1; i < ts.size(); ++i)
    if (!(ts[i] > ts[i - 1]))
      throw MissionError(MissionError::Kind::non_monotone_time,
                         file.string() + ": timestamps must be strictly "
                         "increasing (row " + std::to_string(i + 1) + ")");
}

void check_rate(const std::vector<double>& ts, double nominal_hz,
                const std::string& table, std::vector<std::string>& warnings) {
  if (ts.size() < 2 || nominal_hz <= 0.0) return;
  const double span = ts.back() - ts.front();
  const double observed =
      static_cast<double>(ts.size() - 1) / span;
  if (std::abs(observed - nominal_hz) > 0.01 * nominal_hz)
    warnings.push_back(table + ": observed rate " + fmt_double(observed) +
                       " Hz deviates more than 1% from nominal " +
                       fmt_double(nominal_hz) + " Hz");
}

// FNV-1a 64 over explicit little-endian bytes.
struct Fnv1a {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  void bytes(const void* p, std::size_t n) {
    const auto* c = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= c[i];
      h *= 0x100000001b3ULL;
    }
  }
  void u64(std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = (v >> (8 * i)) & 0xff;
    bytes(b, 8);
  }
  void f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    u64(bits);
  }
};

constexpr char kCheckpointMagic[8] = {'B', 'N', 'C', 'K', 'P', 'T', '0', '1'};

void write_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = (v >> (8 * i)) & 0xff;
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t read_u64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) throw std::runtime_error("checkpoint: truncated file");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace

MissionFile load_mission(const fs::path& dir) {
  MissionFile m;

  std::ifstream meta_in(dir / "meta.json");
  if (!meta_in)
    throw MissionError(MissionError::Kind::unreadable,
                       "cannot open " + (dir / "meta.json").string());
  json meta;
  try {
    meta = json::parse(meta_in);
  } catch (const json::parse_error& e) {
    throw MissionError(MissionError::Kind::unreadable,
                       (dir / "meta.json").string() + ": " + e.what());
  }
  m.meta.id = meta.value("mission_id", dir.filename().string());
  m.meta.imu_rate_hz = meta.value("imu_rate_hz", 100.0);
  m.meta.dvl_rate_hz = meta.value("dvl_rate_hz", 1.0);
  m.meta.notes = meta.value("notes", "");

  const fs::path imu_path = dir / "imu.csv";
  CsvTable imu = read_csv(imu_path);
  const std::size_t it = require_column(imu, "t", imu_path);
  const std::size_t ifx = require_column(imu, "fx", imu_path);
  const std::size_t ify = require_column(imu, "fy", imu_path);
  const std::size_t ifz = require_column(imu, "fz", imu_path);
  const std::size_t igx = require_column(imu, "gx", imu_path);
  const std::size_t igy = require_column(imu, "gy", imu_path);
  const std::size_t igz = require_column(imu, "gz", imu_path);
  m.imu.reserve(imu.rows.size());
  for (const auto& r : imu.rows)
    m.imu.push_back({r[it], {r[ifx], r[ify], r[ifz]},
                     {r[igx], r[igy], r[igz]}});

  const fs::path dvl_path = dir / "dvl.csv";
  CsvTable dvl = read_csv(dvl_path);
  const std::size_t dt = require_column(dvl, "t", dvl_path);
  const std::size_t dvx = require_column(dvl, "vx", dvl_path);
  const std::size_t dvy = require_column(dvl, "vy", dvl_path);
  const std::size_t dvz = require_column(dvl, "vz", dvl_path);
  const auto b1 = find_column(dvl, "b1");
  std::optional<std::array<std::size_t, 4>> bcols;
  if (b1) {
    bcols = {{*b1, require_column(dvl, "b2", dvl_path),
              require_column(dvl, "b3", dvl_path),
              require_column(dvl, "b4", dvl_path)}};
  }
  m.dvl.reserve(dvl.rows.size());
  for (const auto& r : dvl.rows) {
    DvlRow row;
    row.t = r[dt];
    row.v = {r[dvx], r[dvy], r[dvz]};
    if (bcols)
      row.beams = Vec4{r[(*bcols)[0]], r[(*bcols)[1]], r[(*bcols)[2]],
                       r[(*bcols)[3]]};
    m.dvl.push_back(row);
  }

  std::vector<double> imu_ts, dvl_ts;
  for (const auto& r : m.imu) imu_ts.push_back(r.t);
  for (const auto& r : m.dvl) dvl_ts.push_back(r.t);
  check_monotone(imu_ts, imu_path);
  check_monotone(dvl_ts, dvl_path);
  check_rate(imu_ts, m.meta.imu_rate_hz, "imu.csv", m.warnings);
  check_rate(dvl_ts, m.meta.dvl_rate_hz, "dvl.csv", m.warnings);
  return m;
}

void save_mission(const MissionFile& mission, const fs::path& dir) {
  fs::create_directories(dir);

  json meta;
  meta["mission_id"] = mission.meta.id;
  meta["imu_rate_hz"] = mission.meta.imu_rate_hz;
  meta["dvl_rate_hz"] = mission.meta.dvl_rate_hz;
  meta["notes"] = mission.meta.notes;
  std::ofstream meta_out(dir / "meta.json");
  meta_out << meta.dump(2) << "\n";

  std::ofstream imu(dir / "imu.csv");
  imu << "t,fx,fy,fz,gx,gy,gz\n";
  for (const auto& r : mission.imu)
    imu << fmt_double(r.t) << ',' << fmt_double(r.f[0]) << ','
        << fmt_double(r.f[1]) << ',' << fmt_double(r.f[2]) << ','
        << fmt_double(r.w[0]) << ',' << fmt_double(r.w[1]) << ','
        << fmt_double(r.w[2]) << '\n';

  std::ofstream dvl(dir / "dvl.csv");
  const bool beams = mission.has_beams();
  dvl << (beams ? "t,b1,b2,b3,b4,vx,vy,vz\n" : "t,vx,vy,vz\n");
  for (const auto& r : mission.dvl) {
    dvl << fmt_double(r.t);
    if (beams) {
      const Vec4& b = *r.beams;
      for (double x : b) dvl << ',' << fmt_double(x);
    }
    dvl << ',' << fmt_double(r.v[0]) << ',' << fmt_double(r.v[1]) << ','
        << fmt_double(r.v[2]) << '\n';
  }
}

namespace {

// Shared windowing over one mission's tables.
void mission_to_windows(Dataset& ds, const MissionFile& m,
                        const std::vector<Vec4>& beams,
                        const std::vector<Vec3>& gt, int n_past) {
  const double ratio = m.meta.imu_rate_hz / m.meta.dvl_rate_hz;
  const int imu_per_dvl = static_cast<int>(std::llround(ratio));
  if (imu_per_dvl <= 0 || std::abs(ratio - imu_per_dvl) > 1e-9)
    throw std::invalid_argument("mission " + m.meta.id +
                                ": imu rate must be an integer multiple of "
                                "the dvl rate");
  ImuStream imu;
  imu.accel.reserve(m.imu.size());
  imu.gyro.reserve(m.imu.size());
  for (const auto& r : m.imu) {
    imu.accel.push_back(r.f);
    imu.gyro.push_back(r.w);
  }
  const double t0 = m.dvl.empty() ? 0.0 : m.dvl.front().t;
  append_mission_windows(ds, imu, beams, gt, imu_per_dvl, n_past, t0,
                         1.0 / m.meta.dvl_rate_hz);
}

}  // namespace

Dataset dataset_from_missions(std::span<const MissionFile> missions,
                              int n_past) {
  Dataset ds;
  for (const MissionFile& m : missions) {
    if (!m.has_beams())
      throw MissionError(MissionError::Kind::missing_column,
                         "mission " + m.meta.id +
                             " carries no beam columns; use "
                             "recorrupt_recorded for velocity-only data");
    std::vector<Vec4> beams;
    std::vector<Vec3> gt;
    beams.reserve(m.dvl.size());
    gt.reserve(m.dvl.size());
    for (const auto& r : m.dvl) {
      beams.push_back(*r.beams);
      gt.push_back(r.v);
    }
    mission_to_windows(ds, m, beams, gt, n_past);
  }
  apply_chronological_split(ds);
  return ds;
}

Dataset recorrupt_recorded(std::span<const MissionFile> missions,
                           const BeamGeometry& geom,
                           const BeamErrorParams& params, int n_past,
                           RngStream& rng, bool prenoise,
                           double prenoise_std) {
  Dataset ds;
  for (const MissionFile& m : missions) {
    std::vector<Vec4> beams;
    std::vector<Vec3> gt;
    beams.reserve(m.dvl.size());
    gt.reserve(m.dvl.size());
    for (const auto& r : m.dvl) {
      Vec3 v = r.v;
      if (prenoise)
        for (int a = 0; a < 3; ++a) v[a] += prenoise_std * rng.normal();
      beams.push_back(corrupt_beams(geom, v, params, rng));
      gt.push_back(r.v);  // the recording stays the ground truth
    }
    mission_to_windows(ds, m, beams, gt, n_past);
  }
  apply_chronological_split(ds);
  return ds;
}

std::uint64_t dataset_fingerprint(const Dataset& ds) {
  Fnv1a h;
  h.u64(ds.windows.size());
  h.u64(static_cast<std::uint64_t>(ds.split_index));
  h.u64(static_cast<std::uint64_t>(ds.n_past));
  for (const SampleWindow& w : ds.windows) {
    h.f64(w.t);
    for (double v : w.accel.data) h.f64(v);
    for (double v : w.gyro.data) h.f64(v);
    for (double v : w.current_beams) h.f64(v);
    for (const Vec4& p : w.past_beams)
      for (double v : p) h.f64(v);
    for (double v : w.gt_velocity) h.f64(v);
  }
  return h.h;
}

void save_checkpoint(const fs::path& path, const std::string& variant,
                     const json& header,
                     const std::vector<std::pair<std::string, const Tensor*>>&
                         tensors) {
  json full = header;
  full["variant"] = variant;
  json manifest = json::array();
  for (const auto& [name, t] : tensors) {
    json entry;
    entry["name"] = name;
    entry["shape"] = t->shape;
    manifest.push_back(entry);
  }
  full["tensors"] = manifest;
  const std::string header_str = full.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("checkpoint: cannot write " + path.string());
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  write_u64(out, header_str.size());
  out.write(header_str.data(),
            static_cast<std::streamsize>(header_str.size()));
  for (const auto& [name, t] : tensors) {
    write_u64(out, t->size());
    for (double v : t->data) {
      std::uint64_t bits;
      std::memcpy(&bits, &v, 8);
      write_u64(out, bits);
    }
  }
}

LoadedCheckpoint load_checkpoint(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error("checkpoint: cannot open " + path.string());
  char magic[sizeof(kCheckpointMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kCheckpointMagic, 6) != 0)
    throw std::runtime_error("checkpoint: bad magic in " + path.string());
  if (std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0)
    throw std::runtime_error("checkpoint: unknown format version in " +
                             path.string());

  const std::uint64_t hlen = read_u64(in);
  std::string header(hlen, '\0');
  in.read(header.data(), static_cast<std::streamsize>(hlen));
  if (!in) throw std::runtime_error("checkpoint: truncated header");
  json meta;
  try {
    meta = json::parse(header);
  } catch (const json::parse_error&) {
    throw std::runtime_error("checkpoint: corrupt header json");
  }

  LoadedCheckpoint ck;
  ck.variant = meta.value("variant", "");
  ck.header_json = header;
  for (const auto& entry : meta.at("tensors")) {
    const std::uint64_t count = read_u64(in);
    Tensor t(entry.at("shape").get<std::vector<std::size_t>>());
    if (t.size() != count)
      throw std::runtime_error("checkpoint: tensor size disagrees with "
                               "manifest");
    for (std::size_t i = 0; i < count; ++i) {
      const std::uint64_t bits = read_u64(in);
      std::memcpy(&t.data[i], &bits, 8);
    }
    ck.tensors.emplace_back(entry.at("name").get<std::string>(),
                            std::move(t));
  }
  return ck;
}

void restore_params(Model& m,
                    const std::vector<std::pair<std::string, Tensor>>&
                        tensors) {
  auto params = m.named_params();
  if (params.size() != tensors.size())
    throw std::runtime_error("checkpoint: parameter count mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].first != tensors[i].first)
      throw std::runtime_error("checkpoint: parameter name mismatch: " +
                               params[i].first + " vs " + tensors[i].first);
    if (params[i].second->shape != tensors[i].second.shape)
      throw std::runtime_error("checkpoint: shape mismatch for " +
                               params[i].first);
    *params[i].second = tensors[i].second;
  }
}

}  // namespace bn
