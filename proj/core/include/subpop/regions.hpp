#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace subpop {

/// Sorted, duplicate-free set of point indices. Contiguous windows are kept
/// as a [lo, hi) range so interval families cost O(1) memory per region.
class IndexSet {
 public:
  IndexSet() = default;
  static IndexSet range(std::size_t lo, std::size_t hi);
  /// Throws PreconditionError unless strictly increasing.
  static IndexSet from_sorted(std::vector<std::size_t> items);
  static IndexSet from_unsorted(std::vector<std::size_t> items);

  std::size_t size() const { return range_ ? hi_ - lo_ : items_.size(); }
  bool empty() const { return size() == 0; }
  bool is_range() const { return range_; }
  std::size_t operator[](std::size_t k) const { return range_ ? lo_ + k : items_[k]; }
  bool contains(std::size_t i) const;
  std::size_t max_index() const { return (*this)[size() - 1]; }

  template <class F>
  void for_each(F&& f) const {
    if (range_) {
      for (std::size_t i = lo_; i < hi_; ++i) f(i);
    } else {
      for (std::size_t i : items_) f(i);
    }
  }

  std::vector<std::size_t> to_vector() const;
  std::size_t intersection_size(const IndexSet& other) const;
  /// |A symmetric-difference B|.
  std::size_t hamming_distance(const IndexSet& other) const;

  friend bool operator==(const IndexSet& a, const IndexSet& b);

 private:
  bool range_ = true;
  std::size_t lo_ = 0;
  std::size_t hi_ = 0;
  std::vector<std::size_t> items_;
};

struct ExplicitDescriptor {
  bool operator==(const ExplicitDescriptor&) const = default;
};
struct GroupDescriptor {
  std::string label;
  bool operator==(const GroupDescriptor&) const = default;
};
/// Window [lo, hi) over test indices.
struct IntervalDescriptor {
  std::size_t lo = 0;
  std::size_t hi = 0;
  bool operator==(const IntervalDescriptor&) const = default;
};
/// Closed Euclidean ball. `radius_sq` is the squared distance from the
/// center to the farthest member, kept exactly for membership tests.
struct BallDescriptor {
  std::size_t center = 0;
  std::vector<double> center_point;
  double radius = 0.0;
  double radius_sq = 0.0;
  std::size_t cardinality = 0;
  bool operator==(const BallDescriptor&) const = default;
};

using Descriptor =
    std::variant<ExplicitDescriptor, GroupDescriptor, IntervalDescriptor, BallDescriptor>;

/// A subpopulation realized as index sets: `members` over the test points
/// (J(R)) and `calib` over the calibration points (I(R)).
struct Region {
  std::size_t id = 0;
  IndexSet members;
  IndexSet calib;
  Descriptor descriptor;
};

enum class FamilyKind { kPartition, kIntervals, kBalls, kExplicit };

const char* to_string(FamilyKind kind);
FamilyKind family_kind_from_string(const std::string& s);

/// An enumerable collection of regions with a declared VC-dimension. Region
/// ids are positions 0..size()-1. Interval families are generated on demand.
class RegionFamily {
 public:
  /// `regions[i].id` must equal i; members must lie below `universe_size`.
  static RegionFamily from_regions(FamilyKind kind, std::vector<Region> regions,
                                   std::size_t universe_size, std::size_t vc_dim,
                                   bool disjoint, bool calibration_bound = false);

  /// All windows [i, i+len) of [0, n) with min_size <= len <= max_size,
  /// ordered by length, then start. vc_dim 2, not disjoint.
  static RegionFamily intervals(std::size_t n, std::size_t min_size, std::size_t max_size);

  FamilyKind kind() const { return kind_; }
  std::size_t vc_dim() const { return vc_dim_; }
  bool disjoint() const { return disjoint_; }
  std::size_t universe_size() const { return universe_; }
  bool calibration_bound() const { return calibration_bound_; }
  bool generated() const { return generated_; }
  std::size_t interval_min_size() const { return min_size_; }
  std::size_t interval_max_size() const { return max_size_; }

  std::size_t size() const;
  bool empty() const { return size() == 0; }
  Region region(std::size_t id) const;
  std::size_t cardinality(std::size_t id) const;
  IndexSet members(std::size_t id) const;
  /// Stored regions; throws for generated (interval) families.
  const std::vector<Region>& stored_regions() const;

  /// Id of the interval [lo, lo + len); generated families only.
  std::size_t interval_id(std::size_t lo, std::size_t len) const;
  /// Number of regions with exactly `card` members.
  std::size_t count_of_cardinality(std::size_t card) const;
  /// The `k`-th (0-based, in id order) region with exactly `card` members.
  std::size_t nth_of_cardinality(std::size_t card, std::size_t k) const;

  /// Copy with calibration index sets attached, one per region.
  RegionFamily with_calibration(std::vector<IndexSet> calib) const;
  RegionFamily with_vc_dim(std::size_t vc_dim) const;

 private:
  FamilyKind kind_ = FamilyKind::kExplicit;
  std::size_t vc_dim_ = 1;
  bool disjoint_ = false;
  std::size_t universe_ = 0;
  bool calibration_bound_ = false;
  std::vector<Region> regions_;

  bool generated_ = false;
  std::size_t min_size_ = 0;
  std::size_t max_size_ = 0;
  std::vector<std::size_t> length_offsets_;
};

/// Calls f(id, cardinality, sum) for every region in work share `part` of
/// `parts`, where sum adds values[i] over members in increasing index order
/// (the order a direct loop over members uses, so results are bit-identical
/// to it). Interval families cost O(1) per region via running sums.
template <class F>
void for_each_region_sum(const RegionFamily& family, std::span<const double> values,
                         std::size_t part, std::size_t parts, F&& f) {
  if (family.generated()) {
    const std::size_t n = family.universe_size();
    const std::size_t lo_len = family.interval_min_size();
    const std::size_t hi_len = family.interval_max_size();
    for (std::size_t lo = part; lo < n; lo += parts) {
      double s = 0.0;
      const std::size_t end = std::min(n, lo + hi_len);
      for (std::size_t hi = lo; hi < end; ++hi) {
        s += values[hi];
        const std::size_t len = hi - lo + 1;
        if (len >= lo_len) f(family.interval_id(lo, len), len, s);
      }
    }
    return;
  }
  const auto& regions = family.stored_regions();
  for (std::size_t id = part; id < regions.size(); id += parts) {
    const Region& r = regions[id];
    double s = 0.0;
    r.members.for_each([&](std::size_t i) { s += values[i]; });
    f(r.id, r.members.size(), s);
  }
}

template <class F>
void for_each_region_sum(const RegionFamily& family, std::span<const double> values, F&& f) {
  for_each_region_sum(family, values, 0, 1, std::forward<F>(f));
}

/// One region per distinct label, in order of first appearance; disjoint,
/// vc_dim 1.
RegionFamily partition_family(std::span<const std::string> assignments);

/// interval family with precondition checks: 1 <= min <= max <= n.
RegionFamily interval_family(std::size_t n, std::size_t min_size, std::size_t max_size);

/// For every center i and c in 1..max_card, the c nearest points to i
/// (including i) under Euclidean distance, ties to the smaller index.
/// Duplicate member sets are dropped, keeping the first by (center, c).
/// vc_dim = p + 1. Cost O(n^2 log r) by full distance evaluation; a spatial
/// index would slot in behind nearest_prefix() for large n.
RegionFamily ball_family(std::span<const std::vector<double>> points, std::size_t max_card);

/// Singletons {i} for every i plus the full set [0, n); vc_dim 1.
RegionFamily singletons_and_full_family(std::size_t n);

/// Fills calibration index sets by applying each region's geometric
/// predicate (closed ball) to calibration points. Throws PreconditionError
/// for regions without geometry (partition, interval, explicit).
RegionFamily bind_calibration(const RegionFamily& family,
                              std::span<const std::vector<double>> calib_points);

/// Partition families: calibration point i joins the region whose label is
/// calib_labels[i]; unknown labels join nothing.
RegionFamily bind_partition_calibration(const RegionFamily& family,
                                        std::span<const std::string> calib_labels);

}  // namespace subpop
