#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "budgetid/exp_family.hpp"

namespace budgetid {

/// A bandit problem: one exponential-family arm per entry, identified by its mean.
/// Arms are indexed from 0.
class BanditInstance {
 public:
  BanditInstance(std::vector<Family> families, std::vector<double> means);
  /// All arms from the same family.
  BanditInstance(const Family& family, std::vector<double> means);

  std::size_t size() const noexcept { return means_.size(); }
  std::span<const double> means() const noexcept { return means_; }
  double mean(std::size_t k) const { return means_.at(k); }
  const Family& family(std::size_t k) const { return families_.at(k); }
  std::span<const Family> families() const noexcept { return families_; }

  /// True when every arm shares one family (same kind and variance).
  bool homogeneous() const noexcept;
  bool all_gaussian() const noexcept;
  bool all_bernoulli() const noexcept;

  /// Same families, different means (validated against the arm domains).
  BanditInstance with_means(std::vector<double> means) const;

 private:
  std::vector<Family> families_;
  std::vector<double> means_;
};

enum class TaskKind { BestArm, Thresholding, Positivity, HalfSpace };

const char* to_string(TaskKind kind) noexcept;

/// Which identification question is asked about the means.
class TaskSpec {
 public:
  static TaskSpec best_arm() { return TaskSpec(TaskKind::BestArm, 0.0, {}, 0.0); }
  static TaskSpec thresholding(double theta) { return TaskSpec(TaskKind::Thresholding, theta, {}, 0.0); }
  static TaskSpec positivity(double theta) { return TaskSpec(TaskKind::Positivity, theta, {}, 0.0); }
  /// Two answers separated by the hyperplane {x : x^T u = offset}; u must be nonzero.
  static TaskSpec half_space(std::vector<double> normal, double offset);

  TaskKind kind() const noexcept { return kind_; }
  double threshold() const noexcept { return theta_; }
  std::span<const double> normal() const noexcept { return normal_; }
  double offset() const noexcept { return offset_; }

  /// Rescale (u, offset) jointly so that sum_k |u_k| sigma_k = 1 for the
  /// Gaussian arms of `instance`. The hyperplane is unchanged.
  TaskSpec normalized_for(const BanditInstance& instance) const;

 private:
  TaskSpec(TaskKind kind, double theta, std::vector<double> normal, double offset)
      : kind_(kind), theta_(theta), normal_(std::move(normal)), offset_(offset) {}

  TaskKind kind_;
  double theta_;
  std::vector<double> normal_;
  double offset_;
};

/// Answer returned by an identification algorithm.
///   BestArm:      `arm` (0-based)
///   Thresholding: `signs`, +1 when the mean is at or above the threshold, -1 below
///   Positivity:   `label` true for "all above", false for "exists below"
///   HalfSpace:    `label` true when x^T u >= offset
struct Answer {
  TaskKind task = TaskKind::BestArm;
  std::size_t arm = 0;
  std::vector<int> signs;
  bool label = false;

  bool operator==(const Answer&) const = default;
};

std::string to_string(const Answer& answer);

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> issues;    // reasons the instance is degenerate or invalid
  std::vector<std::string> warnings;  // legal but near-degenerate
  double margin = 0.0;                // distance to the nearest answer boundary

  explicit operator bool() const noexcept { return ok; }
};

/// Margin below which a legal instance is flagged as near-degenerate.
inline constexpr double kNearDegenerateMargin = 1e-12;

/// Checks that `instance` has a unique correct answer for `task`.
ValidationReport validate_instance(const TaskSpec& task, const BanditInstance& instance);

/// Correct answer i*(mu); throws DegenerateInstance on a boundary.
Answer correct_answer(const TaskSpec& task, const BanditInstance& instance);

/// Extended i* for empirical means on the closure of the mean domains:
/// ties go to the lowest index and a mean equal to the threshold counts as
/// above. Never throws for the task's own parameters.
Answer empirical_answer(const TaskSpec& task, std::span<const double> means);

/// True iff i*(candidate) differs from i*(instance). Both must be non-degenerate.
bool is_alternative(const TaskSpec& task, const BanditInstance& instance,
                    std::span<const double> candidate);

/// Membership of `candidate` in the closure of Alt(instance): ties and means on
/// the threshold count as reachable. Allocation-free.
bool in_alternative_closure(const TaskSpec& task, std::span<const double> base,
                            std::span<const double> candidate);

/// Index of the unique best arm of a validated best-arm instance.
std::size_t best_arm_index(std::span<const double> means) noexcept;

}  // namespace budgetid
