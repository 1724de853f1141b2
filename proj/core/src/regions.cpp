#include "subpop/regions.hpp"

#include <cmath>
#include <map>
#include <set>
#include <unordered_map>

#include "subpop/error.hpp"

namespace subpop {

IndexSet IndexSet::range(std::size_t lo, std::size_t hi) {
  if (hi < lo) throw PreconditionError("IndexSet::range: hi < lo");
  IndexSet s;
  s.lo_ = lo;
  s.hi_ = hi;
  return s;
}

IndexSet IndexSet::from_sorted(std::vector<std::size_t> items) {
  for (std::size_t i = 1; i < items.size(); ++i) {
    if (items[i] <= items[i - 1]) {
      throw PreconditionError("IndexSet: indices must be strictly increasing");
    }
  }
  IndexSet s;
  s.range_ = false;
  s.items_ = std::move(items);
  return s;
}

IndexSet IndexSet::from_unsorted(std::vector<std::size_t> items) {
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  return from_sorted(std::move(items));
}

bool IndexSet::contains(std::size_t i) const {
  if (range_) return i >= lo_ && i < hi_;
  return std::binary_search(items_.begin(), items_.end(), i);
}

std::vector<std::size_t> IndexSet::to_vector() const {
  if (!range_) return items_;
  std::vector<std::size_t> out;
  out.reserve(size());
  for (std::size_t i = lo_; i < hi_; ++i) out.push_back(i);
  return out;
}

std::size_t IndexSet::intersection_size(const IndexSet& other) const {
  if (range_ && other.range_) {
    const std::size_t lo = std::max(lo_, other.lo_);
    const std::size_t hi = std::min(hi_, other.hi_);
    return hi > lo ? hi - lo : 0;
  }
  const IndexSet& small = size() <= other.size() ? *this : other;
  const IndexSet& large = size() <= other.size() ? other : *this;
  std::size_t count = 0;
  small.for_each([&](std::size_t i) { count += large.contains(i) ? 1 : 0; });
  return count;
}

std::size_t IndexSet::hamming_distance(const IndexSet& other) const {
  return size() + other.size() - 2 * intersection_size(other);
}

bool operator==(const IndexSet& a, const IndexSet& b) {
  if (a.size() != b.size()) return false;
  if (a.range_ && b.range_) return a.size() == 0 || a.lo_ == b.lo_;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] != b[k]) return false;
  }
  return true;
}

const char* to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::kPartition: return "partition";
    case FamilyKind::kIntervals: return "intervals";
    case FamilyKind::kBalls: return "balls";
    case FamilyKind::kExplicit: return "explicit";
  }
  return "explicit";
}

FamilyKind family_kind_from_string(const std::string& s) {
  if (s == "partition") return FamilyKind::kPartition;
  if (s == "intervals") return FamilyKind::kIntervals;
  if (s == "balls") return FamilyKind::kBalls;
  if (s == "explicit") return FamilyKind::kExplicit;
  throw PreconditionError("unknown family kind '" + s + "'");
}

RegionFamily RegionFamily::from_regions(FamilyKind kind, std::vector<Region> regions,
                                        std::size_t universe_size, std::size_t vc_dim,
                                        bool disjoint, bool calibration_bound) {
  if (vc_dim < 1) throw PreconditionError("RegionFamily: vc_dim must be >= 1");
  std::vector<char> seen(disjoint ? universe_size : 0, 0);
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const Region& r = regions[i];
    if (r.id != i) throw PreconditionError("RegionFamily: region ids must equal positions");
    if (!r.members.empty() && r.members.max_index() >= universe_size) {
      throw PreconditionError("RegionFamily: member index outside the universe");
    }
    if (disjoint) {
      r.members.for_each([&](std::size_t m) {
        if (seen[m]) throw PreconditionError("RegionFamily: declared disjoint but regions overlap");
        seen[m] = 1;
      });
    }
  }
  RegionFamily f;
  f.kind_ = kind;
  f.vc_dim_ = vc_dim;
  f.disjoint_ = disjoint;
  f.universe_ = universe_size;
  f.calibration_bound_ = calibration_bound;
  f.regions_ = std::move(regions);
  return f;
}

RegionFamily RegionFamily::intervals(std::size_t n, std::size_t min_size, std::size_t max_size) {
  if (min_size < 1 || min_size > max_size || max_size > n) {
    throw PreconditionError("interval family needs 1 <= min_size <= max_size <= n");
  }
  RegionFamily f;
  f.kind_ = FamilyKind::kIntervals;
  f.vc_dim_ = 2;
  f.disjoint_ = false;
  f.universe_ = n;
  f.generated_ = true;
  f.min_size_ = min_size;
  f.max_size_ = max_size;
  f.length_offsets_.resize(max_size - min_size + 2);
  f.length_offsets_[0] = 0;
  for (std::size_t len = min_size; len <= max_size; ++len) {
    const std::size_t j = len - min_size;
    f.length_offsets_[j + 1] = f.length_offsets_[j] + (n - len + 1);
  }
  return f;
}

std::size_t RegionFamily::size() const {
  return generated_ ? length_offsets_.back() : regions_.size();
}

std::size_t RegionFamily::interval_id(std::size_t lo, std::size_t len) const {
  return length_offsets_[len - min_size_] + lo;
}

Region RegionFamily::region(std::size_t id) const {
  if (id >= size()) throw PreconditionError("RegionFamily::region: id out of range");
  if (!generated_) return regions_[id];
  const auto it = std::upper_bound(length_offsets_.begin(), length_offsets_.end(), id);
  const std::size_t j = static_cast<std::size_t>(it - length_offsets_.begin()) - 1;
  const std::size_t len = min_size_ + j;
  const std::size_t lo = id - length_offsets_[j];
  Region r;
  r.id = id;
  r.members = IndexSet::range(lo, lo + len);
  r.descriptor = IntervalDescriptor{lo, lo + len};
  return r;
}

std::size_t RegionFamily::cardinality(std::size_t id) const {
  if (!generated_) return regions_.at(id).members.size();
  const auto it = std::upper_bound(length_offsets_.begin(), length_offsets_.end(), id);
  return min_size_ + static_cast<std::size_t>(it - length_offsets_.begin()) - 1;
}

IndexSet RegionFamily::members(std::size_t id) const {
  if (!generated_) return regions_.at(id).members;
  return region(id).members;
}

const std::vector<Region>& RegionFamily::stored_regions() const {
  if (generated_) throw PreconditionError("interval families are generated, not stored");
  return regions_;
}

std::size_t RegionFamily::count_of_cardinality(std::size_t card) const {
  if (generated_) {
    return card >= min_size_ && card <= max_size_ ? universe_ - card + 1 : 0;
  }
  return static_cast<std::size_t>(std::count_if(
      regions_.begin(), regions_.end(), [card](const Region& r) { return r.members.size() == card; }));
}

std::size_t RegionFamily::nth_of_cardinality(std::size_t card, std::size_t k) const {
  if (k >= count_of_cardinality(card)) {
    throw PreconditionError("nth_of_cardinality: fewer regions of that size");
  }
  if (generated_) return interval_id(k, card);
  for (const Region& r : regions_) {
    if (r.members.size() == card && k-- == 0) return r.id;
  }
  throw PreconditionError("nth_of_cardinality: unreachable");
}

RegionFamily RegionFamily::with_calibration(std::vector<IndexSet> calib) const {
  if (generated_) {
    throw PreconditionError(
        "interval families are defined over test indices only; build an explicit family "
        "to attach calibration assignments");
  }
  if (calib.size() != regions_.size()) {
    throw PreconditionError("with_calibration: need one calibration set per region");
  }
  RegionFamily f = *this;
  for (std::size_t i = 0; i < calib.size(); ++i) f.regions_[i].calib = std::move(calib[i]);
  f.calibration_bound_ = true;
  return f;
}

RegionFamily RegionFamily::with_vc_dim(std::size_t vc_dim) const {
  if (vc_dim < 1) throw PreconditionError("vc_dim must be >= 1");
  RegionFamily f = *this;
  f.vc_dim_ = vc_dim;
  return f;
}

RegionFamily partition_family(std::span<const std::string> assignments) {
  std::vector<std::string> labels;
  std::unordered_map<std::string, std::size_t> slot;
  std::vector<std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    auto [it, inserted] = slot.try_emplace(assignments[i], labels.size());
    if (inserted) {
      labels.push_back(assignments[i]);
      members.emplace_back();
    }
    members[it->second].push_back(i);
  }
  std::vector<Region> regions;
  regions.reserve(labels.size());
  for (std::size_t g = 0; g < labels.size(); ++g) {
    Region r;
    r.id = g;
    r.members = IndexSet::from_sorted(std::move(members[g]));
    r.descriptor = GroupDescriptor{labels[g]};
    regions.push_back(std::move(r));
  }
  return RegionFamily::from_regions(FamilyKind::kPartition, std::move(regions),
                                    assignments.size(), 1, true);
}

RegionFamily interval_family(std::size_t n, std::size_t min_size, std::size_t max_size) {
  return RegionFamily::intervals(n, min_size, max_size);
}

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

struct Neighbor {
  double dist_sq;
  std::size_t index;
  bool operator<(const Neighbor& o) const {
    return dist_sq < o.dist_sq || (dist_sq == o.dist_sq && index < o.index);
  }
};

/// The `count` nearest points to `center`, closest first.
std::vector<Neighbor> nearest_prefix(std::span<const std::vector<double>> points,
                                     std::size_t center, std::size_t count) {
  std::vector<Neighbor> all;
  all.reserve(points.size());
  for (std::size_t j = 0; j < points.size(); ++j) {
    all.push_back({squared_distance(points[center], points[j]), j});
  }
  count = std::min(count, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(count), all.end());
  all.resize(count);
  return all;
}

}  // namespace

RegionFamily ball_family(std::span<const std::vector<double>> points, std::size_t max_card) {
  if (max_card < 1) throw PreconditionError("ball_family: max_card must be >= 1");
  if (points.empty()) throw PreconditionError("ball_family: no points");
  const std::size_t dim = points.front().size();
  for (const auto& p : points) {
    if (p.size() != dim) throw PreconditionError("ball_family: points differ in dimension");
  }

  std::vector<Region> regions;
  std::set<std::vector<std::size_t>> seen;
  for (std::size_t center = 0; center < points.size(); ++center) {
    const auto neighbors = nearest_prefix(points, center, max_card);
    std::vector<std::size_t> prefix;
    for (std::size_t c = 1; c <= neighbors.size(); ++c) {
      prefix.push_back(neighbors[c - 1].index);
      std::vector<std::size_t> sorted = prefix;
      std::sort(sorted.begin(), sorted.end());
      if (!seen.insert(sorted).second) continue;
      Region r;
      r.id = regions.size();
      r.members = IndexSet::from_sorted(std::move(sorted));
      const double rsq = neighbors[c - 1].dist_sq;
      r.descriptor = BallDescriptor{center, points[center], std::sqrt(rsq), rsq, c};
      regions.push_back(std::move(r));
    }
  }
  return RegionFamily::from_regions(FamilyKind::kBalls, std::move(regions), points.size(),
                                    dim + 1, false);
}

RegionFamily singletons_and_full_family(std::size_t n) {
  if (n < 1) throw PreconditionError("singletons_and_full_family: n must be >= 1");
  std::vector<Region> regions;
  regions.reserve(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    Region r;
    r.id = i;
    r.members = IndexSet::range(i, i + 1);
    regions.push_back(std::move(r));
  }
  Region full;
  full.id = n;
  full.members = IndexSet::range(0, n);
  regions.push_back(std::move(full));
  return RegionFamily::from_regions(FamilyKind::kExplicit, std::move(regions), n, 1, false);
}

RegionFamily bind_calibration(const RegionFamily& family,
                              std::span<const std::vector<double>> calib_points) {
  if (family.generated() || family.kind() == FamilyKind::kPartition) {
    throw PreconditionError(
        std::string(to_string(family.kind())) +
        " families have no geometry; supply explicit calibration assignments instead");
  }
  std::vector<IndexSet> calib;
  calib.reserve(family.size());
  for (const Region& r : family.stored_regions()) {
    const auto* ball = std::get_if<BallDescriptor>(&r.descriptor);
    if (!ball) {
      throw PreconditionError("region " + std::to_string(r.id) +
                              " has no geometric descriptor; supply explicit calibration "
                              "assignments instead");
    }
    std::vector<std::size_t> inside;
    for (std::size_t i = 0; i < calib_points.size(); ++i) {
      if (calib_points[i].size() != ball->center_point.size()) {
        throw PreconditionError("bind_calibration: calibration point dimension mismatch");
      }
      if (squared_distance(calib_points[i], ball->center_point) <= ball->radius_sq) {
        inside.push_back(i);
      }
    }
    calib.push_back(IndexSet::from_sorted(std::move(inside)));
  }
  return family.with_calibration(std::move(calib));
}

RegionFamily bind_partition_calibration(const RegionFamily& family,
                                        std::span<const std::string> calib_labels) {
  if (family.kind() != FamilyKind::kPartition) {
    throw PreconditionError("bind_partition_calibration: family is not a partition");
  }
  std::map<std::string, std::size_t> by_label;
  for (const Region& r : family.stored_regions()) {
    by_label.emplace(std::get<GroupDescriptor>(r.descriptor).label, r.id);
  }
  std::vector<std::vector<std::size_t>> calib(family.size());
  for (std::size_t i = 0; i < calib_labels.size(); ++i) {
    const auto it = by_label.find(calib_labels[i]);
    if (it != by_label.end()) calib[it->second].push_back(i);
  }
  std::vector<IndexSet> sets;
  sets.reserve(calib.size());
  for (auto& c : calib) sets.push_back(IndexSet::from_sorted(std::move(c)));
  return family.with_calibration(std::move(sets));
}

}  // namespace subpop
