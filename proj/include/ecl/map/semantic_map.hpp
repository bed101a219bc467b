#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ecl/common/grid.hpp"
#include "ecl/concept/labeling.hpp"
#include "ecl/world/sensor.hpp"

namespace ecl {

struct MapConfig {
  double sigma_scale = 1.0;  // sigma_s = sigma_scale * sqrt(depth variance)
  double sigma_floor = 1e-6;
  double prob_floor = 1e-9;  // smallest probability before taking logs
  // Store and fuse linear probabilities instead of log probabilities.
  bool linear_domain = false;
  double logodds_free = -0.4;
  double logodds_hit = 0.85;
  double logodds_clamp = 5.0;
  double max_range = 64.0;  // rays at or beyond this depth hit nothing
};

struct MapCell {
  Eigen::VectorXd p;  // log probabilities (linear when MapConfig::linear_domain)
  double sigma = 0.0;
  bool observed = false;
};

struct FramePoint {
  Cell cell;
  Eigen::VectorXd p;
  double sigma = 1.0;
};

// Geometry of one ray in world cells, for the obstacle channel.
struct RayTrace {
  std::vector<Cell> free_cells;
  Cell end{-1, -1};
  bool hit = false;
};

struct PointCloudFrame {
  std::vector<FramePoint> points;  // at most one per cell
  std::vector<RayTrace> rays;
  AgentPose pose_used;
  std::string transform_error;  // non-empty when the frame was dropped
};

class SemanticMap {
 public:
  SemanticMap() = default;
  SemanticMap(int width, int height, int num_classes, ClassId background, MapConfig config = {});

  int width() const { return cells_.width(); }
  int height() const { return cells_.height(); }
  int num_classes() const { return num_classes_; }
  ClassId background() const { return background_; }
  const MapConfig& config() const { return config_; }
  bool in_bounds(Cell c) const { return cells_.in_bounds(c); }

  const MapCell& cell(Cell c) const { return cells_[c]; }
  MapCell& cell(Cell c) { return cells_[c]; }
  const Grid<MapCell>& cells() const { return cells_; }
  double occupancy(Cell c) const { return occupancy_[c]; }
  double& occupancy(Cell c) { return occupancy_[c]; }
  const Grid<double>& occupancy_grid() const { return occupancy_; }

  // Normalized linear class distribution of an observed cell.
  Eigen::VectorXd class_probabilities(Cell c) const;
  ClassId argmax_class(Cell c) const;

  // Cells the agent has stood on are known free.
  void mark_traversed(Cell c);
  bool likely_occupied(Cell c) const { return occupancy_[c] > 0.0; }
  bool known(Cell c) const { return occupancy_[c] != 0.0 || cells_[c].observed; }

  int dropped_frames() const { return dropped_frames_; }
  void note_dropped_frame() { ++dropped_frames_; }

  // Versioned little-endian binary snapshot.
  std::string snapshot() const;
  static SemanticMap from_snapshot(std::string_view bytes);

  // One glyph per cell: argmax class glyph for observed non-background cells,
  // '#' occupied, '.' free, '~' unknown.
  std::string bev_digest(const Catalog& catalog) const;

  friend bool operator==(const SemanticMap& a, const SemanticMap& b);

 private:
  Grid<MapCell> cells_;
  Grid<double> occupancy_;
  int num_classes_ = 0;
  ClassId background_ = 0;
  int dropped_frames_ = 0;
  MapConfig config_;
};

// Ray endpoints in world cells. An endpoint inside a proposal's visible cells
// takes that proposal's label, otherwise the background label. Points sharing
// a cell are merged by precision weighting.
PointCloudFrame project_observation(const Observation& obs, const AgentPose& pose,
                                    const std::vector<SoftLabel>& labels, const SemanticMap& map);

// Precision-weighted fusion of a frame into the map, plus log-odds ray
// carving of the obstacle channel.
void fuse(SemanticMap& map, const PointCloudFrame& frame);

// Ablation baseline: a cell takes the incoming label when its top class
// probability beats the stored one; sigma plays no role.
void fuse_max(SemanticMap& map, const PointCloudFrame& frame);

// Observed cells whose argmax is `cls`, with the linear probability of `cls`.
std::vector<std::pair<Cell, double>> query_class_cells(const SemanticMap& map, ClassId cls);

// One fusion update on a single channel: returns the new (p, sigma).
std::pair<double, double> fuse_scalar(double p_m, double sigma_m, double p_s, double sigma_s);

}  // namespace ecl
