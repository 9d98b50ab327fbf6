#include "tbresnet/surface.hpp"

#include <algorithm>
#include <cmath>

#include "tbresnet/error.hpp"

namespace tbresnet {
namespace {

double median(Eigen::VectorXd v) {
  std::sort(v.begin(), v.end());
  const Eigen::Index n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Setter for one raw attribute of the reference observation.
struct Slot {
  bool is_x = true;
  Eigen::Index column = 0;
};

Slot locate(const TbResNetModel& model, const std::string& attribute) {
  if (auto c = model.schema.x_column(attribute)) return {true, *c};
  if (auto c = model.schema.z_column(attribute)) return {false, *c};
  throw ConfigError("unknown attribute '" + attribute + "'");
}

void check(const TbResNetModel& model, int k, const ReferenceObservation& ref) {
  if (k < 0 || k >= model.schema.n_alternatives) throw ConfigError("alternative out of range");
  if (ref.x.size() != model.schema.n_x() || ref.z.size() != model.schema.n_z()) {
    throw DimensionError("reference observation does not match the model schema");
  }
}

double utility_at(const TbResNetModel& model, int k, const ReferenceObservation& obs) {
  return combined_utility(model, model.stats.encode_x(obs.x), model.stats.encode_z(obs.z))[k];
}

void assign(ReferenceObservation& obs, const Slot& s, double v) {
  (s.is_x ? obs.x : obs.z)[s.column] = v;
}

}  // namespace

ReferenceObservation median_reference(const ChoiceDataset& data) {
  ReferenceObservation r{Eigen::VectorXd(data.schema().n_x()), Eigen::VectorXd(data.schema().n_z())};
  for (Eigen::Index c = 0; c < r.x.size(); ++c) r.x[c] = median(data.x().col(c));
  for (Eigen::Index c = 0; c < r.z.size(); ++c) r.z[c] = median(data.z().col(c));
  return r;
}

std::vector<double> AxisSpec::points() const {
  if (resolution < 2) throw ConfigError("resolution must be at least 2");
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo)) throw ConfigError("axis range must satisfy lo < hi");
  std::vector<double> p(static_cast<std::size_t>(resolution));
  for (int i = 0; i < resolution; ++i) p[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (resolution - 1);
  p.back() = hi;
  return p;
}

std::vector<SlicePoint> utility_slice(const TbResNetModel& model, int k, const AxisSpec& axis,
                                      const ReferenceObservation& reference) {
  check(model, k, reference);
  const Slot s = locate(model, axis.attribute);
  ReferenceObservation obs = reference;
  std::vector<SlicePoint> out;
  for (double v : axis.points()) {
    assign(obs, s, v);
    out.push_back({v, utility_at(model, k, obs)});
  }
  return out;
}

SurfaceGrid utility_grid(const TbResNetModel& model, int k, const AxisSpec& a, const AxisSpec& b,
                         const ReferenceObservation& reference) {
  check(model, k, reference);
  const Slot sa = locate(model, a.attribute);
  const Slot sb = locate(model, b.attribute);
  if (sa.is_x == sb.is_x && sa.column == sb.column) throw ConfigError("surface axes must differ");
  SurfaceGrid g{k, a, b, reference, a.points(), b.points(), Eigen::MatrixXd(a.resolution, b.resolution)};
  ReferenceObservation obs = reference;
  for (int i = 0; i < a.resolution; ++i) {
    assign(obs, sa, g.a_values[static_cast<std::size_t>(i)]);
    for (int j = 0; j < b.resolution; ++j) {
      assign(obs, sb, g.b_values[static_cast<std::size_t>(j)]);
      g.utilities(i, j) = utility_at(model, k, obs);
    }
  }
  return g;
}

}  // namespace tbresnet
