#include "budgetid/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace budgetid {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (b[k] != 0.0) s += a[k] * b[k];
  }
  return s;
}

void require_size(const TaskSpec& task, std::size_t arms) {
  if (task.kind() == TaskKind::HalfSpace && task.normal().size() != arms) {
    std::ostringstream os;
    os << "half-space normal has " << task.normal().size() << " entries for " << arms << " arms";
    fail(ErrorKind::InvalidInput, os.str());
  }
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

BanditInstance::BanditInstance(std::vector<Family> families, std::vector<double> means)
    : families_(std::move(families)), means_(std::move(means)) {
  if (families_.size() != means_.size()) {
    fail(ErrorKind::InvalidInput, "one family per arm is required");
  }
  if (means_.size() < 2) {
    fail(ErrorKind::InvalidInput, "a bandit instance needs at least two arms");
  }
  for (std::size_t k = 0; k < means_.size(); ++k) {
    if (!families_[k].in_mean_domain(means_[k])) {
      fail(ErrorKind::InvalidParameter,
           "mean " + fmt(means_[k]) + " of arm " + std::to_string(k) + " is outside the " +
               to_string(families_[k].kind()) + " mean domain");
    }
  }
}

BanditInstance::BanditInstance(const Family& family, std::vector<double> means)
    : BanditInstance(std::vector<Family>(means.size(), family), means) {}

bool BanditInstance::homogeneous() const noexcept {
  return std::all_of(families_.begin(), families_.end(),
                     [&](const Family& f) { return f == families_.front(); });
}

bool BanditInstance::all_gaussian() const noexcept {
  return std::all_of(families_.begin(), families_.end(), [](const Family& f) { return f.is_gaussian(); });
}

bool BanditInstance::all_bernoulli() const noexcept {
  return std::all_of(families_.begin(), families_.end(), [](const Family& f) { return f.is_bernoulli(); });
}

BanditInstance BanditInstance::with_means(std::vector<double> means) const {
  return BanditInstance(families_, std::move(means));
}

const char* to_string(TaskKind kind) noexcept {
  switch (kind) {
    case TaskKind::BestArm: return "bai";
    case TaskKind::Thresholding: return "thresholding";
    case TaskKind::Positivity: return "positivity";
    case TaskKind::HalfSpace: return "half_space";
  }
  return "unknown";
}

TaskSpec TaskSpec::half_space(std::vector<double> normal, double offset) {
  if (normal.empty() ||
      std::all_of(normal.begin(), normal.end(), [](double v) { return v == 0.0; })) {
    fail(ErrorKind::InvalidInput, "half-space normal must be nonzero");
  }
  return TaskSpec(TaskKind::HalfSpace, 0.0, std::move(normal), offset);
}

TaskSpec TaskSpec::normalized_for(const BanditInstance& instance) const {
  if (kind_ != TaskKind::HalfSpace || !instance.all_gaussian()) return *this;
  require_size(*this, instance.size());
  double scale = 0.0;
  for (std::size_t k = 0; k < normal_.size(); ++k) {
    scale += std::abs(normal_[k]) * instance.family(k).stddev();
  }
  std::vector<double> u(normal_);
  for (double& v : u) v /= scale;
  return TaskSpec(kind_, theta_, std::move(u), offset_ / scale);
}

std::string to_string(const Answer& answer) {
  std::ostringstream os;
  switch (answer.task) {
    case TaskKind::BestArm:
      os << "arm " << answer.arm;
      break;
    case TaskKind::Thresholding:
      for (int s : answer.signs) os << (s > 0 ? '+' : '-');
      break;
    case TaskKind::Positivity:
      os << (answer.label ? "all above" : "exists below");
      break;
    case TaskKind::HalfSpace:
      os << (answer.label ? "above" : "below");
      break;
  }
  return os.str();
}

ValidationReport validate_instance(const TaskSpec& task, const BanditInstance& instance) {
  require_size(task, instance.size());
  ValidationReport report;
  const auto mu = instance.means();
  switch (task.kind()) {
    case TaskKind::BestArm: {
      const std::size_t best = best_arm_index(mu);
      double runner_up = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < mu.size(); ++k) {
        if (k != best) runner_up = std::max(runner_up, mu[k]);
      }
      report.margin = mu[best] - runner_up;
      if (report.margin == 0.0) {
        report.ok = false;
        report.issues.push_back("best arm is not unique (tie at " + fmt(mu[best]) + ")");
      }
      break;
    }
    case TaskKind::Thresholding:
    case TaskKind::Positivity: {
      report.margin = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < mu.size(); ++k) {
        const double gap = std::abs(mu[k] - task.threshold());
        report.margin = std::min(report.margin, gap);
        if (gap == 0.0) {
          report.ok = false;
          report.issues.push_back("arm " + std::to_string(k) + " sits on the threshold " +
                                  fmt(task.threshold()));
        }
      }
      break;
    }
    case TaskKind::HalfSpace: {
      const auto u = task.normal();
      const double norm = std::sqrt(dot(u, u));
      report.margin = std::abs(dot(mu, u) - task.offset()) / norm;
      if (dot(mu, u) == task.offset()) {
        report.ok = false;
        report.issues.push_back("means lie on the separating hyperplane");
      }
      break;
    }
  }
  if (report.ok && report.margin < kNearDegenerateMargin) {
    report.warnings.push_back("near-degenerate instance: margin " + fmt(report.margin));
  }
  return report;
}

std::size_t best_arm_index(std::span<const double> means) noexcept {
  std::size_t best = 0;
  for (std::size_t k = 1; k < means.size(); ++k) {
    if (means[k] > means[best]) best = k;
  }
  return best;
}

Answer empirical_answer(const TaskSpec& task, std::span<const double> means) {
  Answer answer;
  answer.task = task.kind();
  switch (task.kind()) {
    case TaskKind::BestArm:
      answer.arm = best_arm_index(means);
      break;
    case TaskKind::Thresholding:
      answer.signs.resize(means.size());
      for (std::size_t k = 0; k < means.size(); ++k) {
        answer.signs[k] = means[k] >= task.threshold() ? 1 : -1;
      }
      break;
    case TaskKind::Positivity:
      answer.label = std::all_of(means.begin(), means.end(),
                                 [&](double m) { return m >= task.threshold(); });
      break;
    case TaskKind::HalfSpace:
      if (task.normal().size() != means.size()) {
        fail(ErrorKind::InvalidInput, "half-space normal size does not match the number of arms");
      }
      answer.label = dot(means, task.normal()) >= task.offset();
      break;
  }
  return answer;
}

Answer correct_answer(const TaskSpec& task, const BanditInstance& instance) {
  const auto report = validate_instance(task, instance);
  if (!report.ok) {
    fail(ErrorKind::DegenerateInstance, report.issues.front());
  }
  return empirical_answer(task, instance.means());
}

bool is_alternative(const TaskSpec& task, const BanditInstance& instance,
                    std::span<const double> candidate) {
  const BanditInstance other = instance.with_means({candidate.begin(), candidate.end()});
  return correct_answer(task, instance) != correct_answer(task, other);
}

bool in_alternative_closure(const TaskSpec& task, std::span<const double> base,
                            std::span<const double> candidate) {
  const std::size_t K = base.size();
  switch (task.kind()) {
    case TaskKind::BestArm: {
      const std::size_t best = best_arm_index(base);
      for (std::size_t k = 0; k < K; ++k) {
        if (k != best && candidate[k] >= candidate[best]) return true;
      }
      return false;
    }
    case TaskKind::Thresholding: {
      const double theta = task.threshold();
      for (std::size_t k = 0; k < K; ++k) {
        if (base[k] > theta ? candidate[k] <= theta : candidate[k] >= theta) return true;
      }
      return false;
    }
    case TaskKind::Positivity: {
      const double theta = task.threshold();
      bool base_all_above = true;
      for (double m : base) base_all_above = base_all_above && m > theta;
      if (base_all_above) {
        for (double c : candidate) {
          if (c <= theta) return true;
        }
        return false;
      }
      for (double c : candidate) {
        if (c < theta) return false;
      }
      return true;
    }
    case TaskKind::HalfSpace: {
      const double side = dot(base, task.normal()) - task.offset();
      const double cand = dot(candidate, task.normal()) - task.offset();
      return side > 0.0 ? cand <= 0.0 : cand >= 0.0;
    }
  }
  return false;
}

}  // namespace budgetid
