#include "ecl/map/semantic_map.hpp"

#include <algorithm>
#include <cstring>
#include <limits>
#include <map>

#include "ecl/common/error.hpp"

namespace ecl {

namespace {

constexpr char kMagic[8] = {'E', 'C', 'L', 'M', 'A', 'P', '0', '1'};

// Cells crossed by a segment from the centre of `from` with length `depth`,
// in order, ending with the cell containing the endpoint.
std::vector<Cell> trace_cells(Cell from, const Eigen::Vector2d& dir, double depth) {
  std::vector<Cell> out{from};
  const double ox = from.x + 0.5, oy = from.y + 0.5;
  const Cell end{static_cast<int>(std::floor(ox + depth * dir.x())),
                 static_cast<int>(std::floor(oy + depth * dir.y()))};
  Cell cur = from;
  const int step_x = dir.x() > 0 ? 1 : (dir.x() < 0 ? -1 : 0);
  const int step_y = dir.y() > 0 ? 1 : (dir.y() < 0 ? -1 : 0);
  constexpr double inf = std::numeric_limits<double>::infinity();
  const double delta_x = step_x ? std::abs(1.0 / dir.x()) : inf;
  const double delta_y = step_y ? std::abs(1.0 / dir.y()) : inf;
  double t_max_x = step_x > 0 ? (cur.x + 1 - ox) * delta_x : (step_x < 0 ? (ox - cur.x) * delta_x : inf);
  double t_max_y = step_y > 0 ? (cur.y + 1 - oy) * delta_y : (step_y < 0 ? (oy - cur.y) * delta_y : inf);
  while (cur != end) {
    double t;
    if (t_max_x < t_max_y) {
      t = t_max_x;
      t_max_x += delta_x;
      cur.x += step_x;
    } else {
      t = t_max_y;
      t_max_y += delta_y;
      cur.y += step_y;
    }
    if (t > depth) break;
    out.push_back(cur);
  }
  if (out.back() != end) out.push_back(end);
  return out;
}

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T take(std::string_view bytes, size_t& pos) {
  if (pos + sizeof(T) > bytes.size()) throw FormatError("map snapshot truncated");
  T v;
  std::memcpy(&v, bytes.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

void carve(SemanticMap& map, const PointCloudFrame& frame) {
  const auto& cfg = map.config();
  for (const auto& ray : frame.rays) {
    for (Cell c : ray.free_cells) {
      if (!map.in_bounds(c)) continue;
      map.occupancy(c) = std::max(-cfg.logodds_clamp, map.occupancy(c) + cfg.logodds_free);
    }
    if (ray.hit && map.in_bounds(ray.end) && ray.end != frame.pose_used.cell)
      map.occupancy(ray.end) = std::min(cfg.logodds_clamp, map.occupancy(ray.end) + cfg.logodds_hit);
  }
  map.mark_traversed(frame.pose_used.cell);
}

double top_probability(const Eigen::VectorXd& p, bool linear) {
  if (linear) return p.maxCoeff() / p.sum();
  const double m = p.maxCoeff();
  return 1.0 / (p.array() - m).exp().sum();
}

}  // namespace

SemanticMap::SemanticMap(int width, int height, int num_classes, ClassId background, MapConfig config)
    : cells_(width, height), occupancy_(width, height, 0.0), num_classes_(num_classes),
      background_(background), config_(config) {
  if (num_classes < 1) throw ConfigError("semantic map needs at least one class");
  if (background < 0 || background >= num_classes) throw ConfigError("background class out of range");
}

Eigen::VectorXd SemanticMap::class_probabilities(Cell c) const {
  const MapCell& m = cells_[c];
  if (!m.observed) return Eigen::VectorXd::Constant(num_classes_, 1.0 / num_classes_);
  if (config_.linear_domain) {
    Eigen::VectorXd p = m.p.cwiseMax(0.0);
    const double s = p.sum();
    return s > 0 ? Eigen::VectorXd(p / s) : Eigen::VectorXd::Constant(num_classes_, 1.0 / num_classes_);
  }
  Eigen::VectorXd p = (m.p.array() - m.p.maxCoeff()).exp();
  return p / p.sum();
}

ClassId SemanticMap::argmax_class(Cell c) const {
  const MapCell& m = cells_[c];
  if (!m.observed) return -1;
  Eigen::Index best = 0;
  m.p.maxCoeff(&best);  // first maximum, i.e. lowest class id on ties
  return static_cast<ClassId>(best);
}

void SemanticMap::mark_traversed(Cell c) {
  if (in_bounds(c)) occupancy_[c] = -config_.logodds_clamp;
}

PointCloudFrame project_observation(const Observation& obs, const AgentPose& pose,
                                    const std::vector<SoftLabel>& labels, const SemanticMap& map) {
  PointCloudFrame frame;
  frame.pose_used = pose;
  if (!map.in_bounds(pose.cell)) {
    frame.transform_error = "pose (" + std::to_string(pose.cell.x) + "," + std::to_string(pose.cell.y) +
                            ") outside the map";
    return frame;
  }
  if (labels.size() != obs.proposals.size()) throw InputError("labels do not align with proposals");
  const auto& cfg = map.config();
  const int nc = map.num_classes();

  auto encode = [&](const std::vector<double>& probs) {
    Eigen::VectorXd v(nc);
    for (int i = 0; i < nc; ++i) {
      const double p = std::max(probs[static_cast<size_t>(i)], cfg.prob_floor);
      v[i] = cfg.linear_domain ? p : std::log(p);
    }
    return v;
  };
  std::vector<Eigen::VectorXd> proposal_vectors;
  for (const auto& l : labels) {
    if (static_cast<int>(l.probabilities.size()) != nc) throw InputError("label has wrong class count");
    proposal_vectors.push_back(encode(l.probabilities));
  }
  const Eigen::VectorXd background = encode(one_hot_label(map.background(), nc).probabilities);
  std::map<Cell, size_t> owner;  // visible cell -> proposal index
  for (size_t i = 0; i < obs.proposals.size(); ++i)
    for (Cell c : obs.proposals[i].visible_cells) owner.emplace(c, i);

  struct Accum {
    Eigen::VectorXd weighted;
    double precision = 0.0;
  };
  std::map<Cell, Accum> voxels;
  for (const auto& ray : obs.rays) {
    const Eigen::Vector2d dir = ray_direction(pose.heading, ray.bearing);
    const bool hit = ray.depth < cfg.max_range;
    std::vector<Cell> cells = trace_cells(pose.cell, dir, std::min(ray.depth, cfg.max_range));
    RayTrace trace;
    trace.hit = hit;
    trace.end = cells.back();
    if (hit) cells.pop_back();
    trace.free_cells = std::move(cells);
    frame.rays.push_back(trace);
    if (!hit || !map.in_bounds(trace.end)) continue;

    const double sigma = std::max(cfg.sigma_scale * std::sqrt(ray.depth_variance), cfg.sigma_floor);
    const auto it = owner.find(trace.end);
    const Eigen::VectorXd& p = it == owner.end() ? background : proposal_vectors[it->second];
    auto& acc = voxels[trace.end];
    const double w = 1.0 / (sigma * sigma);
    if (acc.precision == 0.0) acc.weighted = Eigen::VectorXd::Zero(nc);
    acc.weighted += w * p;
    acc.precision += w;
  }
  for (auto& [c, acc] : voxels)
    frame.points.push_back({c, acc.weighted / acc.precision, 1.0 / std::sqrt(acc.precision)});
  return frame;
}

std::pair<double, double> fuse_scalar(double p_m, double sigma_m, double p_s, double sigma_s) {
  const double vm = sigma_m * sigma_m, vs = sigma_s * sigma_s;
  const double p = vs / (vs + vm) * p_m + vm / (vs + vm) * p_s;
  return {p, 1.0 / std::sqrt(1.0 / vs + 1.0 / vm)};
}

void fuse(SemanticMap& map, const PointCloudFrame& frame) {
  if (!frame.transform_error.empty()) {
    map.note_dropped_frame();
    return;
  }
  const double floor = map.config().sigma_floor;
  for (const auto& pt : frame.points) {
    if (!map.in_bounds(pt.cell)) throw InputError("frame point outside the map");
    MapCell& m = map.cell(pt.cell);
    const double sigma_s = std::max(pt.sigma, floor);
    if (!m.observed) {
      m.p = pt.p;
      m.sigma = sigma_s;
      m.observed = true;
      continue;
    }
    const double vm = m.sigma * m.sigma, vs = sigma_s * sigma_s;
    const double wm = vs / (vs + vm);
    m.p = wm * m.p + (1.0 - wm) * pt.p;
    m.sigma = std::max(1.0 / std::sqrt(1.0 / vs + 1.0 / vm), floor);
  }
  carve(map, frame);
}

void fuse_max(SemanticMap& map, const PointCloudFrame& frame) {
  if (!frame.transform_error.empty()) {
    map.note_dropped_frame();
    return;
  }
  const bool linear = map.config().linear_domain;
  for (const auto& pt : frame.points) {
    if (!map.in_bounds(pt.cell)) throw InputError("frame point outside the map");
    MapCell& m = map.cell(pt.cell);
    if (!m.observed || top_probability(pt.p, linear) > top_probability(m.p, linear)) {
      m.p = pt.p;
      if (!m.observed) m.sigma = std::max(pt.sigma, map.config().sigma_floor);
      m.observed = true;
    }
  }
  carve(map, frame);
}

std::vector<std::pair<Cell, double>> query_class_cells(const SemanticMap& map, ClassId cls) {
  std::vector<std::pair<Cell, double>> out;
  if (cls < 0 || cls >= map.num_classes()) return out;
  for (size_t i = 0; i < map.cells().size(); ++i) {
    const Cell c = map.cells().cell(i);
    if (!map.cell(c).observed || map.argmax_class(c) != cls) continue;
    out.emplace_back(c, map.class_probabilities(c)[cls]);
  }
  return out;
}

std::string SemanticMap::snapshot() const {
  std::string out(kMagic, sizeof(kMagic));
  put<uint32_t>(out, static_cast<uint32_t>(width()));
  put<uint32_t>(out, static_cast<uint32_t>(height()));
  put<uint32_t>(out, static_cast<uint32_t>(num_classes_));
  put<uint32_t>(out, static_cast<uint32_t>(background_));
  put<uint8_t>(out, config_.linear_domain ? 1 : 0);
  put<double>(out, config_.sigma_scale);
  put<double>(out, config_.sigma_floor);
  put<double>(out, config_.prob_floor);
  put<double>(out, config_.logodds_free);
  put<double>(out, config_.logodds_hit);
  put<double>(out, config_.logodds_clamp);
  put<double>(out, config_.max_range);
  put<uint32_t>(out, static_cast<uint32_t>(dropped_frames_));
  for (size_t i = 0; i < cells_.size(); ++i) {
    const MapCell& m = cells_.data()[i];
    put<uint8_t>(out, m.observed ? 1 : 0);
    put<double>(out, occupancy_.data()[i]);
    if (!m.observed) continue;
    put<double>(out, m.sigma);
    for (int k = 0; k < num_classes_; ++k) put<double>(out, m.p[k]);
  }
  return out;
}

SemanticMap SemanticMap::from_snapshot(std::string_view bytes) {
  if (bytes.size() < sizeof(kMagic) || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0)
    throw FormatError("not a semantic map snapshot");
  size_t pos = sizeof(kMagic);
  const auto w = static_cast<int>(take<uint32_t>(bytes, pos));
  const auto h = static_cast<int>(take<uint32_t>(bytes, pos));
  const auto nc = static_cast<int>(take<uint32_t>(bytes, pos));
  const auto bg = static_cast<ClassId>(take<uint32_t>(bytes, pos));
  MapConfig cfg;
  cfg.linear_domain = take<uint8_t>(bytes, pos) != 0;
  cfg.sigma_scale = take<double>(bytes, pos);
  cfg.sigma_floor = take<double>(bytes, pos);
  cfg.prob_floor = take<double>(bytes, pos);
  cfg.logodds_free = take<double>(bytes, pos);
  cfg.logodds_hit = take<double>(bytes, pos);
  cfg.logodds_clamp = take<double>(bytes, pos);
  cfg.max_range = take<double>(bytes, pos);
  SemanticMap map(w, h, nc, bg, cfg);
  map.dropped_frames_ = static_cast<int>(take<uint32_t>(bytes, pos));
  for (size_t i = 0; i < map.cells_.size(); ++i) {
    MapCell& m = map.cells_.data()[i];
    m.observed = take<uint8_t>(bytes, pos) != 0;
    map.occupancy_.data()[i] = take<double>(bytes, pos);
    if (!m.observed) continue;
    m.sigma = take<double>(bytes, pos);
    m.p.resize(nc);
    for (int k = 0; k < nc; ++k) m.p[k] = take<double>(bytes, pos);
  }
  if (pos != bytes.size()) throw FormatError("trailing bytes in map snapshot");
  return map;
}

std::string SemanticMap::bev_digest(const Catalog& catalog) const {
  std::string out;
  for (int y = 0; y < height(); ++y) {
    for (int x = 0; x < width(); ++x) {
      const Cell c{x, y};
      const ClassId cls = argmax_class(c);
      if (cls >= 0 && cls != background_)
        out += catalog[cls].glyph;
      else if (occupancy_[c] > 0)
        out += '#';
      else if (occupancy_[c] < 0)
        out += '.';
      else
        out += '~';
    }
    out += '\n';
  }
  return out;
}

bool operator==(const SemanticMap& a, const SemanticMap& b) { return a.snapshot() == b.snapshot(); }

}  // namespace ecl
